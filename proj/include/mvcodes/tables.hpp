#pragma once

// Parameter tables T1..T8 rendered as TSV, with bundled reference copies.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mvcodes/constructions.hpp"
#include "mvcodes/errors.hpp"
#include "mvcodes/exponents.hpp"

namespace mvcodes {

struct TableSpec {
  std::string id;
  std::string title;
  std::uint32_t q = 2;
  std::size_t l = 1;
  std::string family; // box, sep-vars, matdot-half
  std::size_t mprime = 0, nprime = 0;
  std::vector<std::uint64_t> rows; // m_i for box tables, F otherwise
};

inline const std::vector<TableSpec>& table_specs() {
  static const std::vector<TableSpec> specs{
      {"T1", "box and better box, q=19, l=2, n_i = floor(2q/(3 m_i))", 19, 2, "box", 0, 0, {1, 2, 3, 4, 5, 6}},
      {"T2", "box and better box, q=25, l=2, n_i = floor(2q/(3 m_i))", 25, 2, "box", 0, 0, {1, 2, 3, 4, 5, 6}},
      {"T3", "separation of variables, q=2, l=10, m'=n'=5", 2, 10, "sep-vars", 5, 5, {2, 4, 8, 16}},
      {"T4",
       "separation of variables, q=2, l=20, m'=n'=10",
       2,
       20,
       "sep-vars",
       10,
       10,
       {2, 4, 8, 16, 32, 64, 128, 256, 512}},
      {"T5", "separation of variables, q=64, l=2, m'=n'=1", 64, 2, "sep-vars", 1, 1, {2, 4, 8, 16, 32}},
      {"T6", "separation of variables, q=128, l=2, m'=n'=1", 128, 2, "sep-vars", 1, 1, {2, 4, 8, 16, 32, 64}},
      {"T7", "half hyperbolic matdot, q=8, l=3", 8, 3, "matdot-half", 0, 0, {1, 9, 17, 25, 33, 41, 49, 57}},
      {"T8",
       "half hyperbolic matdot, q=32, l=3",
       32,
       3,
       "matdot-half",
       0,
       0,
       {1, 513, 1025, 1537, 2049, 2561, 3073, 3585}},
  };
  return specs;
}

inline const TableSpec& table_spec(std::string_view id) {
  std::string key(id);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
  if (key.size() == 1)
    key = "T" + key;
  for (const auto& s : table_specs())
    if (s.id == key)
      return s;
  throw ParameterError("unknown table '" + std::string(id) + "' (T1..T8)");
}

/// Reference copies of the eight parameter tables.
inline std::string_view golden_table(std::string_view id) {
  const auto& s = table_spec(id);
  if (s.id == "T1")
    return "m_i\tn_i\tm\tn\tn_tilde\tFB\txi\txi_tilde\tk+1\n"
           "1\t12\t1\t144\t204\t64\t102\t64\t298\n"
           "2\t6\t4\t36\t48\t64\t102\t70\t298\n"
           "3\t4\t9\t16\t20\t64\t102\t77\t298\n"
           "4\t3\t16\t9\t11\t64\t102\t80\t298\n"
           "5\t2\t25\t4\t4\t100\t143\t143\t262\n"
           "6\t2\t36\t4\t4\t64\t102\t102\t298\n";
  if (s.id == "T2")
    return "m_i\tn_i\tm\tn\tn_tilde\tFB\txi\txi_tilde\tk+1\n"
           "1\t16\t1\t256\t364\t100\t168\t100\t526\n"
           "2\t8\t4\t64\t84\t100\t168\t115\t526\n"
           "3\t5\t9\t25\t31\t121\t192\t152\t505\n"
           "4\t4\t16\t16\t20\t100\t168\t126\t526\n"
           "5\t3\t25\t9\t11\t121\t192\t154\t505\n"
           "6\t2\t36\t4\t4\t196\t270\t270\t430\n";
  if (s.id == "T3")
    return "F\tm\tFB\txi\tk+1\n"
           "2\t31\t4\t8\t1021\n"
           "4\t26\t16\t16\t1009\n"
           "8\t16\t64\t64\t961\n"
           "16\t6\t256\t256\t769\n";
  if (s.id == "T4")
    return "F\tm\tFB\txi\tk+1\n"
           "2\t1023\t4\t16\t1048573\n"
           "4\t1013\t16\t64\t1048561\n"
           "8\t968\t64\t128\t1048513\n"
           "16\t848\t256\t512\t1048321\n"
           "32\t638\t1024\t2048\t1047553\n"
           "64\t386\t4096\t4096\t1044481\n"
           "128\t176\t16384\t16384\t1032193\n"
           "256\t56\t65536\t65536\t983041\n"
           "512\t11\t262144\t262144\t786433\n";
  if (s.id == "T5")
    return "F\tm\tFB\txi\tk+1\n"
           "2\t63\t4\t35\t4093\n"
           "4\t61\t16\t92\t4081\n"
           "8\t57\t64\t236\t4033\n"
           "16\t49\t256\t600\t3841\n"
           "32\t33\t1024\t1540\t3073\n";
  if (s.id == "T6")
    return "F\tm\tFB\txi\tk+1\n"
           "2\t127\t4\t60\t16381\n"
           "4\t125\t16\t156\t16369\n"
           "8\t121\t64\t396\t16321\n"
           "16\t113\t256\t980\t16129\n"
           "32\t97\t1024\t2440\t15361\n"
           "64\t65\t4096\t6215\t12289\n";
  if (s.id == "T7")
    return "F\tm\tk+1\n"
           "1\t64\t512\n"
           "9\t62\t504\n"
           "17\t56\t496\n"
           "25\t50\t488\n"
           "33\t38\t480\n"
           "41\t38\t472\n"
           "49\t26\t464\n"
           "57\t26\t456\n";
  return "F\tm\tk+1\n"
         "1\t4096\t32768\n"
         "513\t3044\t32256\n"
         "1025\t2106\t31744\n"
         "1537\t1440\t31232\n"
         "2049\t976\t30720\n"
         "2561\t622\t30208\n"
         "3073\t374\t29696\n"
         "3585\t176\t29184\n";
}

using TableRows = std::vector<std::vector<std::string>>;

namespace detail {

inline std::string tsv(const TableRows& rows) {
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j)
        out += '\t';
      out += r[j];
    }
    out += '\n';
  }
  return out;
}

template <class... Ts> std::vector<std::string> cells(Ts... v) { return {std::to_string(v)...}; }

} // namespace detail

/// Computes a table from its row rule. Box tables: n_i = floor(2q/(3 m_i)), FB from the
/// box, n_tilde from the better box at F = FB, xi_tilde = xi(m n_tilde). Separation
/// tables: m = |Hyp_q(F, m')|, FB the footprint of the sum, xi = xi(m^2). Matdot tables:
/// m = |D(F, F, d)| at the half-box corner d, k+1 = q^l - F + 1.
inline TableRows compute_table(const TableSpec& s) {
  TableRows rows;
  const std::uint64_t N = checked_power(s.q, s.l);
  if (s.family == "box") {
    rows.push_back({"m_i", "n_i", "m", "n", "n_tilde", "FB", "xi", "xi_tilde", "k+1"});
    for (auto mi : s.rows) {
      const auto ni = static_cast<exp_t>(2 * std::uint64_t{s.q} / (3 * mi));
      const std::vector<exp_t> mv(s.l, static_cast<exp_t>(mi)), nv(s.l, ni);
      const auto box = box_poly(s.q, mv, nv);
      const auto better = better_box(s.q, mv, box.fb.value);
      rows.push_back(detail::cells(mi, std::uint64_t{ni}, box.m(), box.n(), better.n(), box.fb.value, *box.xi,
                                   *better.xi, box.recovery_threshold()));
    }
  } else if (s.family == "sep-vars") {
    rows.push_back({"F", "m", "FB", "xi", "k+1"});
    for (auto F : s.rows) {
      const auto sol = sep_vars(s.q, s.mprime, s.nprime, F, F);
      const auto m = hyp_size({s.q, s.mprime, F});
      if (m != sol.m())
        throw InternalConsistency("hyperbolic size recurrence disagrees with enumeration");
      rows.push_back(detail::cells(F, m, sol.fb.value, xi_bound(s.q, s.l, m * sol.n()), sol.recovery_threshold()));
    }
  } else {
    rows.push_back({"F", "m", "k+1"});
    const auto d = half_box_corner(s.q, s.l);
    for (auto F : s.rows)
      rows.push_back(detail::cells(F, d_size(s.q, F, F, d), N - F + 1));
  }
  return rows;
}

inline std::string render_table(const TableSpec& s) { return detail::tsv(compute_table(s)); }

inline TableRows parse_tsv(std::string_view text) {
  TableRows rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> r;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      r.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos)
        break;
      start = tab + 1;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Cell-level differences, one line each; empty when the tables agree.
inline std::vector<std::string> diff_tables(const TableRows& expected, const TableRows& actual) {
  std::vector<std::string> out;
  if (expected.size() != actual.size())
    out.push_back("row count: expected " + std::to_string(expected.size()) + ", got " + std::to_string(actual.size()));
  const std::size_t nr = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < nr; ++i) {
    if (expected[i].size() != actual[i].size()) {
      out.push_back("row " + std::to_string(i) + ": expected " + std::to_string(expected[i].size()) +
                    " cells, got " + std::to_string(actual[i].size()));
      continue;
    }
    for (std::size_t j = 0; j < expected[i].size(); ++j)
      if (expected[i][j] != actual[i][j]) {
        const std::string col = expected.empty() || j >= expected[0].size() ? std::to_string(j) : expected[0][j];
        const std::string key = expected[i].empty() ? "" : expected[0][0] + "=" + expected[i][0];
        out.push_back("row " + std::to_string(i) + " (" + key + ") column " + col + ": expected " + expected[i][j] +
                      ", got " + actual[i][j]);
      }
  }
  return out;
}

} // namespace mvcodes
