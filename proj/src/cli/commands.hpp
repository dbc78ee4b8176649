#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/output.hpp"

namespace delta2d::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Merged flag/config values; unset optionals fall back to per-command defaults.
struct RunConfig {
  double mu = 1.0;
  std::optional<double> alpha;
  std::vector<double> lambdas;
  std::vector<double> energies;
  std::vector<int> grid;
  std::vector<double> bracket;
  std::string potential;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 1;
  int jobs = 1;
  int scan = -1;
  int ell = 0;
  bool check_scaling = false;
  bool corrupt_g = false;
  int instances = 20;
  int modes = 9;
  int n_max = 4;
};

Report cmd_two_body(const RunConfig& config);
Report cmd_potential(const RunConfig& config);
/// Sets `ok` to false when the optional scaling check fails.
Report cmd_three_body(const RunConfig& config, bool& ok);
/// Sets `ok` to false when any residual exceeds its tolerance.
Report cmd_fock_check(const RunConfig& config, bool& ok);

/// Full command line: parses, runs, writes the report to --out (atomically) or `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delta2d::cli
