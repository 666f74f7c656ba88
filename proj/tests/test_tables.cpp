#include <catch_amalgamated.hpp>

#include <chrono>

#include "mvcodes/tables.hpp"
#include "oracles.hpp"

using namespace mvcodes;

namespace {

const std::vector<std::string>& row_with(const TableRows& rows, const std::string& first) {
  for (const auto& r : rows)
    if (r.front() == first)
      return r;
  FAIL("no row keyed " << first);
  return rows.front();
}

} // namespace

TEST_CASE("every table matches its reference", "[tables]") {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& s : table_specs()) {
    CAPTURE(s.id);
    const auto rows = compute_table(s);
    REQUIRE(rows.size() == s.rows.size() + 1);
    REQUIRE(diff_tables(parse_tsv(golden_table(s.id)), rows).empty());
    REQUIRE(render_table(s) == golden_table(s.id));
  }
  REQUIRE(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));
}

TEST_CASE("spot values", "[tables]") {
  const auto t1 = compute_table(table_spec("T1"));
  REQUIRE(row_with(t1, "5") == std::vector<std::string>{"5", "2", "25", "4", "4", "100", "143", "143", "262"});
  REQUIRE(row_with(t1, "2")[8] == "298");
  const auto t2 = compute_table(table_spec("T2"));
  REQUIRE(row_with(t2, "6")[5] == "196");
  REQUIRE(row_with(t2, "6")[8] == "430");
  const auto t4 = compute_table(table_spec("T4"));
  REQUIRE(t4.size() == 10);
  REQUIRE(row_with(t4, "128") == std::vector<std::string>{"128", "176", "16384", "16384", "1032193"});
  const auto t5 = compute_table(table_spec("5"));
  REQUIRE(row_with(t5, "32")[1] == "33");
  REQUIRE(row_with(t5, "32")[4] == "3073");
  const auto t7 = compute_table(table_spec("t7"));
  REQUIRE(row_with(t7, "33") == std::vector<std::string>{"33", "38", "480"});
  const auto t8 = compute_table(table_spec("T8"));
  REQUIRE(row_with(t8, "2049") == std::vector<std::string>{"2049", "976", "30720"});
}

TEST_CASE("matdot tables agree with brute-force enumeration", "[tables]") {
  const auto& s = table_spec("T7");
  const auto rows = compute_table(s);
  const oracle::Vec d(3, 3);
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    REQUIRE(rows[i + 1][1] == std::to_string(oracle::half_hyp(8, s.rows[i], s.rows[i], d).size()));
}

TEST_CASE("separation tables agree with brute-force enumeration", "[tables]") {
  const auto& s = table_spec("T3");
  const auto rows = compute_table(s);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto F = s.rows[i];
    REQUIRE(rows[i + 1][1] == std::to_string(oracle::hyp(2, 5, F).size()));
    REQUIRE(rows[i + 1][4] == std::to_string(1024 - F * F + 1));
  }
}

TEST_CASE("diffs are reported per cell", "[tables]") {
  const auto golden = parse_tsv(golden_table("T7"));
  auto changed = golden;
  changed[3][1] = "55";
  const auto diffs = diff_tables(golden, changed);
  REQUIRE(diffs.size() == 1);
  REQUIRE(diffs[0].find("F=17") != std::string::npos);
  REQUIRE(diffs[0].find("column m") != std::string::npos);
  changed.pop_back();
  REQUIRE(diff_tables(golden, changed).size() == 2);
  REQUIRE(parse_tsv("a\tb\n\n1\t2\n") == TableRows{{"a", "b"}, {"1", "2"}});
}

TEST_CASE("table ids", "[tables]") {
  REQUIRE(table_specs().size() == 8);
  REQUIRE(table_spec("t3").q == 2);
  REQUIRE(table_spec("8").q == 32);
  REQUIRE_THROWS_AS(table_spec("T9"), ParameterError);
  REQUIRE_THROWS_AS(golden_table("x"), ParameterError);
}
