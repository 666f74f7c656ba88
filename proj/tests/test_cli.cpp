#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvcodes/cli.hpp"

using namespace mvcodes;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mvcodes");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) {
  const char* dir = std::getenv("MVCODES_SAMPLES");
  return std::string(dir ? dir : "samples") + "/configs/" + name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool has_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

} // namespace

TEST_CASE("params", "[cli]") {
  auto r = invoke({"params", "poly-box", "--q", "19", "--l", "2", "--m", "2,2", "--n", "6,6"});
  REQUIRE(r.code == 0);
  REQUIRE(has_line(r.out, "FB: 64"));
  REQUIRE(has_line(r.out, "k+1: 298"));
  REQUIRE(has_line(r.out, "xi: 102"));
  REQUIRE(has_line(r.out, "N: 361"));

  r = invoke({"params", "poly-box", "--q", "19", "--l", "2", "--m", "2", "--n", "6"});
  REQUIRE(has_line(r.out, "k+1: 298"));

  r = invoke({"params", "sep-vars", "--q", "2", "--mprime", "5", "--nprime", "5", "--F", "8"});
  REQUIRE(r.code == 0);
  REQUIRE(has_line(r.out, "m: 16"));
  REQUIRE(has_line(r.out, "k+1: 961"));

  // corner target reproduces the table row; the exhaustive search finds a larger set
  r = invoke({"--json", "params", "matdot-half", "--q", "8", "--l", "3", "--F", "57"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["m"] == 26);
  REQUIRE(j["designed_k+1"] == 456);
  REQUIRE(j["k+1"].get<int>() <= 456);
  r = invoke({"--json", "params", "matdot-half", "--q", "8", "--l", "3", "--F", "57", "--best-d"});
  j = nlohmann::json::parse(r.out);
  REQUIRE(j["m"] == 30);
  REQUIRE(j["d"] == nlohmann::json::array({2, 2, 3}));

  REQUIRE(invoke({"params", "better-box", "--field", "2^3/11", "--l", "2", "--m", "2", "--F", "9"}).code == 0);
  REQUIRE(invoke({"params", "poly-box", "--q", "6", "--l", "1", "--m", "2", "--n", "2"}).code == 2);
  REQUIRE(invoke({"params", "nope", "--q", "3"}).code == 2);
  REQUIRE(invoke({"params", "poly-box", "--l", "1", "--m", "2", "--n", "2"}).code == 2);
  REQUIRE(invoke({"params", "poly-box", "--q", "5", "--l", "1", "--m", "3", "--n", "3"}).code == 2);
  REQUIRE(invoke({"params"}).code == 2);
  REQUIRE(invoke({}).code == 2);
}

TEST_CASE("table", "[cli]") {
  auto r = invoke({"table", "T4"});
  REQUIRE(r.code == 0);
  REQUIRE(r.err.empty());
  REQUIRE(std::count(r.out.begin(), r.out.end(), '\n') == 10);
  REQUIRE(has_line(r.out, "128\t176\t16384\t16384\t1032193"));

  r = invoke({"table", "T2"});
  REQUIRE(has_line(r.out, "6\t2\t36\t4\t4\t196\t270\t270\t430"));

  r = invoke({"table", "T8"});
  REQUIRE(has_line(r.out, "2049\t976\t30720"));
  REQUIRE(r.out == invoke({"table", "8"}).out);

  r = invoke({"table", "all"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("# T7") != std::string::npos);

  r = invoke({"--json", "table", "T7"});
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["matches_golden"] == true);
  REQUIRE(j["rows"].size() == 8);

  REQUIRE(invoke({"table", "T9"}).code == 2);
  REQUIRE(invoke({"table"}).code == 2);
}

TEST_CASE("enum", "[cli]") {
  auto r = invoke({"enum", "hyp", "--q", "11", "--l", "2", "--F", "53"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("(0,0)\n", 0) == 0);
  REQUIRE(has_line(r.out, "(3,4)"));
  REQUIRE_FALSE(has_line(r.out, "(4,4)"));
  std::istringstream listing(r.out);
  REQUIRE(read_exponent_set(listing, 11, 2) == hyp_set({11, 2, 53}));

  r = invoke({"enum", "hyp", "--q", "2", "--l", "5", "--F", "8", "--stats"});
  REQUIRE(has_line(r.out, "set size: 16"));

  r = invoke({"enum", "hyp", "--q", "5", "--l", "1", "--F", "6"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.empty());

  REQUIRE(invoke({"--limit", "1000", "enum", "hyp", "--q", "2", "--l", "30", "--F", "1"}).code == 4);
  REQUIRE(invoke({"enum", "hyp", "--q", "5", "--F", "2"}).code == 2);

  r = invoke({"enum", "matdot-half", "--q", "8", "--l", "3", "--F", "17", "--stats"});
  REQUIRE(r.code == 0);
  REQUIRE(has_line(r.out, "D_A size: 56"));
  r = invoke({"enum", "sep-vars", "--q", "2", "--mprime", "5", "--nprime", "5", "--F", "8"});
  REQUIRE(r.code == 0);
  std::istringstream sol(r.out);
  const auto back = std::get<PolySolution>(read_solution(sol));
  REQUIRE(back.m() == 16);
}

TEST_CASE("simulate", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "mvcodes_cli_test";
  std::filesystem::create_directories(dir);
  const auto t1 = (dir / "a.txt").string(), t2 = (dir / "b.txt").string();

  auto r = invoke({"--out", t1, "simulate", sample("sep_vars_gf2.cfg")});
  REQUIRE(r.code == 0);
  REQUIRE(has_line(r.out, "result: success"));
  REQUIRE(has_line(r.out, "responses used: 961"));
  REQUIRE(invoke({"--out", t2, "simulate", sample("sep_vars_gf2.cfg")}).code == 0);
  REQUIRE(slurp(t1) == slurp(t2));
  REQUIRE(slurp(t1).rfind("# transcript v1\n", 0) == 0);

  REQUIRE(invoke({"--seed", "7", "--out", t1, "simulate", sample("sep_vars_gf2.cfg"), "--set", "trials=0"}).code == 0);
  REQUIRE(invoke({"--seed", "7", "--out", t2, "simulate", sample("sep_vars_gf2.cfg"), "--set", "trials=0"}).code == 0);
  REQUIRE(slurp(t1) == slurp(t2));

  r = invoke({"simulate", sample("sep_vars_gf2.cfg"), "--set", "straggler.param=count:64", "--set", "trials=0"});
  REQUIRE(r.code == 5);
  REQUIRE(has_line(r.out, "result: FAILURE"));

  r = invoke({"--json", "simulate", sample("matdot_gf8.cfg")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["success"] == true);
  REQUIRE(j["designed_k+1"] == 496);

  REQUIRE(invoke({"simulate", sample("box_gf19.cfg")}).code == 0);
  REQUIRE(invoke({"simulate", (dir / "missing.cfg").string()}).code == 2);
  REQUIRE(invoke({"simulate", sample("box_gf19.cfg"), "--set", "colour=blue"}).code == 2);
  REQUIRE(invoke({"simulate", sample("box_gf19.cfg"), "--set", "N=10"}).code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("selftest", "[cli]") {
  const auto r = invoke({"selftest"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("FAIL") == std::string::npos);
  REQUIRE(has_line(r.out, "selftest passed"));
}
