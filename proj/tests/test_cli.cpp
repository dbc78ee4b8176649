#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/output.hpp"

using namespace delta2d::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "delta2d");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("delta2d_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("two-body: cutoff energies are all -mu^2 and slopes near -1") {
  const auto r = invoke({"two-body", "--mu", "1", "--lambdas", "25,50,100,200", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["tables"]["cutoff"].size() == 4);
  for (const auto& row : j["tables"]["cutoff"]) CHECK(row["energy"].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
  for (const auto& row : j["tables"]["slopes"])
    if (row["slope"].is_number()) CHECK(row["slope"].get<double>() == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("two-body: alpha = 0 gives mu = 2 exp(digamma(1))") {
  const auto r = invoke({"two-body", "--alpha", "0", "--format", "json"});
  REQUIRE(r.code == 0);
  const double digamma1 = (std::lgamma(1.0 + 1e-5) - std::lgamma(1.0 - 1e-5)) / 2e-5;
  CHECK(nlohmann::json::parse(r.out)["meta"]["mu"].get<double>() == doctest::Approx(2.0 * std::exp(digamma1)));
}

TEST_CASE("potential: zero file reproduces -mu^2; malformed and missing files are usage errors") {
  const auto zero = temp_file("zero.txt", "# flat\n0 0\n2 0\n");
  const auto r = invoke({"potential", "--potential", zero.string(), "--mu", "0.5", "--format", "json", "--scan", "2"});
  REQUIRE(r.code == 0);
  const auto roots = nlohmann::json::parse(r.out)["tables"]["roots"];
  REQUIRE(roots.size() == 1);
  CHECK(roots[0]["energy"].get<double>() == doctest::Approx(-0.25).epsilon(1e-9));

  const auto bad = temp_file("bad.txt", "0 1 2\n");
  CHECK(invoke({"potential", "--potential", bad.string()}).code == 2);
  CHECK(invoke({"potential", "--potential", "/nonexistent/file.txt"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"two-body", "--no-such-flag"}).code == 2);
  CHECK(invoke({"two-body", "--mu", "-1"}).code == 2);
  CHECK(invoke({"two-body", "--format", "xml"}).code == 2);
  CHECK(invoke({"fock-check", "--modes", "17"}).code == 2);
  CHECK(invoke({"fock-check", "--modes", "16", "--n-max", "4"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("fock-check: deterministic for a seed, fails with a corrupted coupling") {
  const auto a = invoke({"fock-check", "--instances", "3", "--modes", "5", "--seed", "12"});
  const auto b = invoke({"fock-check", "--instances", "3", "--modes", "5", "--seed", "12", "--jobs", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# result: pass") != std::string::npos);
  const auto c = invoke({"fock-check", "--instances", "3", "--modes", "5", "--seed", "12", "--corrupt-g"});
  CHECK(c.code == 1);
}

TEST_CASE("three-body: a bracket that misses crossings exits 1 with a hint") {
  const auto r = invoke({"three-body", "--grid", "100", "--bracket", "-10,-1.5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hint") != std::string::npos);
}

TEST_CASE("output goes to --out atomically and config files sit under explicit flags") {
  const auto cfg = temp_file("run.ini", "mu = 2\nlambdas = 25,50,100\n");
  const fs::path dir = fs::temp_directory_path() / "delta2d_test_out";
  fs::create_directories(dir);
  const fs::path out = dir / "report.csv";
  const auto r = invoke({"two-body", "--config", cfg.string(), "--mu", "3", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.find("# mu: 3\n") != std::string::npos);
  CHECK(text.find("100,") != std::string::npos);
  CHECK(text.find("200,") == std::string::npos);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}

TEST_CASE("renderers share columns between CSV and JSON") {
  Report rep{"demo", {{"k", 1.5}}, {}};
  auto& t = rep.table("t", {"a", "b"});
  t.add({1LL, std::string("x")});
  rep.table("u", {"c"}).add({2.25});
  t.add({2LL, std::string("y")});  // reference stays valid after adding another table
  CHECK_THROWS(t.add({1LL}));
  const auto csv = render(rep, Format::csv);
  CHECK(csv == "# command: demo\n# k: 1.5\n# table: t\na,b\n1,x\n2,y\n# table: u\nc\n2.25\n");
  const auto j = nlohmann::json::parse(render(rep, Format::json));
  CHECK(j["tables"]["t"][1]["b"] == "y");
  CHECK_THROWS(parse_format("xml"));
}
