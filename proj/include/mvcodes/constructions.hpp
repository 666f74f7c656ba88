#pragma once

// Degree-set constructions for multivariate polynomial codes (row/column
// splitting, every block product owns one monomial of h) and multivariate
// matdot codes (inner-dimension splitting, A*B is the single coefficient of
// h at a target exponent d).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mvcodes/errors.hpp"
#include "mvcodes/exponents.hpp"

namespace mvcodes {

/// A non-colliding pair (D_A, D_B) with its footprint data.
struct PolySolution {
  std::uint32_t q = 2;
  std::size_t l = 1;
  ExponentSet da;
  ExponentSet db;
  FootprintValue fb;
  // prod bound (closed form or designed F) that fb is guaranteed to reach
  std::uint64_t design_footprint = 0;
  std::optional<std::uint64_t> xi;
  // Translation applied to anchor D_A at the axes (zero if none).
  ExponentVector shift_a;
  std::string construction;

  std::size_t m() const noexcept { return da.size(); }
  std::size_t n() const noexcept { return db.size(); }
  std::uint64_t points() const { return checked_power(q, l); }
  std::uint64_t recovery_threshold() const { return points() - fb.value + 1; }
};

struct MatchedPair {
  ExponentVector a;
  ExponentVector b;
};

/// D_A, D_B with exactly m pairs summing to d; A*B is the coefficient of x^d.
struct MatdotSolution {
  std::uint32_t q = 2;
  std::size_t l = 1;
  ExponentSet da;
  ExponentSet db;
  ExponentVector d;
  std::vector<MatchedPair> pairs;
  FootprintValue fb;
  std::uint64_t design_footprint = 0;
  // Coordinates where d is zero; every member of D_A and D_B vanishes there too.
  std::vector<std::size_t> removable;
  std::string construction;

  std::size_t m() const noexcept { return da.size(); }
  std::uint64_t points() const { return checked_power(q, l); }
  /// q^l - fb + 1 with fb measured on the explicit sum set.
  std::uint64_t recovery_threshold() const { return points() - fb.value + 1; }
  /// q^l - F + 1 with F the designed footprint (the quantity the design guarantees).
  std::uint64_t designed_threshold() const {
    return points() - std::max<std::uint64_t>(design_footprint, 1) + 1;
  }
};

using Solution = std::variant<PolySolution, MatdotSolution>;

namespace detail {

inline std::vector<exp_t> check_vector_param(const std::vector<exp_t>& v, const char* name) {
  if (v.empty())
    throw ParameterError(std::string(name) + " must have at least one coordinate");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == 0)
      throw ParameterError(std::string(name) + "[" + std::to_string(i) + "] must be at least 1");
  return v;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

inline std::int64_t ceil_div_signed(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline void for_each_in_ranges(const std::vector<exp_t>& lo, const std::vector<exp_t>& hi,
                               const std::function<void(const ExponentVector&)>& fn) {
  const std::size_t l = lo.size();
  for (std::size_t i = 0; i < l; ++i)
    if (lo[i] > hi[i])
      return;
  ExponentVector cur(lo);
  while (true) {
    fn(cur);
    std::size_t i = l;
    while (i-- > 0) {
      if (cur[i] < hi[i]) {
        ++cur[i];
        break;
      }
      cur[i] = lo[i];
    }
    if (i == static_cast<std::size_t>(-1))
      return;
  }
}

} // namespace detail

/// Fills fb and xi for an explicit pair of sets.
inline PolySolution make_poly_solution(ExponentSet da, ExponentSet db, std::string construction,
                                       std::uint64_t design_footprint = 0) {
  detail::check_compatible(da, db);
  PolySolution s;
  s.q = da.q();
  s.l = da.l();
  s.fb = fb_of_sum(da, db);
  s.design_footprint = design_footprint;
  try {
    s.xi = xi_bound(s.q, s.l, std::uint64_t{da.size()} * db.size());
  } catch (const Infeasible&) {
    s.xi.reset();
  }
  s.shift_a = ExponentVector(s.l);
  s.da = std::move(da);
  s.db = std::move(db);
  s.construction = std::move(construction);
  return s;
}

/// Translates S so that every coordinate minimum is zero.
inline std::pair<ExponentSet, ExponentVector> anchor_to_axes(const ExponentSet& S) {
  ExponentVector shift(S.l());
  if (S.empty())
    return {S, shift};
  for (std::size_t i = 0; i < S.l(); ++i) {
    exp_t lo = S[0][i];
    for (const auto& v : S)
      lo = std::min(lo, v[i]);
    shift[i] = lo;
  }
  std::vector<ExponentVector> out;
  out.reserve(S.size());
  for (const auto& v : S) {
    ExponentVector w(v);
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] -= shift[i];
    out.push_back(std::move(w));
  }
  return {ExponentSet(S.q(), S.l(), std::move(out)), shift};
}

/// Box construction: D_A = box(m), D_B = m * box(n); needs m_i n_i <= q.
inline PolySolution box_poly(std::uint32_t q, const std::vector<exp_t>& mvec, const std::vector<exp_t>& nvec) {
  detail::check_vector_param(mvec, "m");
  detail::check_vector_param(nvec, "n");
  if (mvec.size() != nvec.size())
    throw ParameterError("m and n have different lengths");
  std::uint64_t closed = 1;
  for (std::size_t i = 0; i < mvec.size(); ++i) {
    if (std::uint64_t{mvec[i]} * nvec[i] > q)
      throw ParameterError("coordinate " + std::to_string(i) + ": m_i * n_i = " +
                           std::to_string(std::uint64_t{mvec[i]} * nvec[i]) + " exceeds q = " + std::to_string(q));
    closed *= q - std::uint64_t{mvec[i]} * nvec[i] + 1;
  }
  ExponentSet da = box_set(q, mvec);
  ExponentSet nb = box_set(q, nvec);
  const ExponentVector mv(mvec);
  std::vector<ExponentVector> dbv;
  dbv.reserve(nb.size());
  for (const auto& k : nb)
    dbv.push_back(star(mv, k));
  ExponentSet db(q, mvec.size(), std::move(dbv));
  auto sol = make_poly_solution(std::move(da), std::move(db), "poly-box", closed);
  if (sol.fb.value != closed)
    throw InternalConsistency("box footprint " + std::to_string(sol.fb.value) + " != closed form " +
                              std::to_string(closed));
  return sol;
}

/// Expansion lemma: D_B = m * D_B' with m_i = 1 + spread of D_A in coordinate i.
/// A non-anchored D_A is first translated to the axes.
inline PolySolution expand_db(const ExponentSet& da_in, const ExponentSet& dbp) {
  detail::check_compatible(da_in, dbp);
  if (da_in.empty() || dbp.empty())
    throw EmptyInput("expand_db needs nonempty D_A and D_B'");
  auto [da, shift_a] = anchor_to_axes(da_in);
  const std::uint32_t q = da.q();
  const std::size_t l = da.l();
  ExponentVector mv(l), amax(l);
  for (const auto& a : da)
    for (std::size_t i = 0; i < l; ++i)
      amax[i] = std::max(amax[i], a[i]);
  for (std::size_t i = 0; i < l; ++i)
    mv[i] = amax[i] + 1;
  std::vector<ExponentVector> dbv;
  for (const auto& b : dbp) {
    ExponentVector e(l);
    for (std::size_t i = 0; i < l; ++i) {
      const std::uint64_t v = std::uint64_t{mv[i]} * b[i];
      if (v + amax[i] >= q)
        throw ParameterError("coordinate " + std::to_string(i) + ": max(a_i + b_i) = " +
                             std::to_string(v + amax[i]) + " is not below q = " + std::to_string(q));
      e[i] = static_cast<exp_t>(v);
    }
    dbv.push_back(std::move(e));
  }
  ExponentSet db(q, l, std::move(dbv));
  auto sol = make_poly_solution(std::move(da), std::move(db), "expand");
  sol.shift_a = shift_a;
  return sol;
}

/// |D_B(F, l)| for the better-box construction through its size recurrence.
inline std::uint64_t db_size(std::uint32_t q, const std::vector<exp_t>& mvec, std::uint64_t F) {
  detail::check_vector_param(mvec, "m");
  for (exp_t m : mvec)
    if (m > q)
      throw ParameterError("m_i exceeds q");
  F = std::max<std::uint64_t>(F, 1);
  std::vector<std::map<std::uint64_t, std::uint64_t>> memo(mvec.size() + 1);
  auto rec = [&](auto&& self, std::uint64_t f, std::size_t l) -> std::uint64_t {
    const std::uint64_t ql = q - mvec[l - 1] + 1;
    const std::uint64_t ml = mvec[l - 1];
    if (l == 1)
      return f > ql ? 0 : (ql - f) / ml + 1;
    if (auto it = memo[l].find(f); it != memo[l].end())
      return it->second;
    std::uint64_t s = 0;
    for (std::uint64_t b = 0; b <= (ql - 1) / ml; ++b)
      s += self(self, std::max<std::uint64_t>(detail::ceil_div(f, ql - ml * b), 1), l - 1);
    memo[l].emplace(f, s);
    return s;
  };
  return rec(rec, F, mvec.size());
}

/// Better box: D_A = box(m), D_B = {m*b : prod (q - m_i + 1 - m_i b_i) >= F}.
inline PolySolution better_box(std::uint32_t q, const std::vector<exp_t>& mvec, std::uint64_t F) {
  detail::check_vector_param(mvec, "m");
  const std::size_t l = mvec.size();
  for (exp_t m : mvec)
    if (m > q)
      throw ParameterError("m_i exceeds q");
  const std::uint64_t need = std::max<std::uint64_t>(F, 1);
  std::vector<exp_t> lo(l, 0), hi(l);
  for (std::size_t i = 0; i < l; ++i)
    hi[i] = (q - mvec[i]) / mvec[i]; // q_i - m_i b_i >= 1
  std::vector<ExponentVector> dbv;
  const ExponentVector mv(mvec);
  detail::for_each_in_ranges(lo, hi, [&](const ExponentVector& b) {
    std::uint64_t p = 1;
    for (std::size_t i = 0; i < l; ++i)
      p *= q - mvec[i] + 1 - std::uint64_t{mvec[i]} * b[i];
    if (p >= need)
      dbv.push_back(star(mv, b));
  });
  if (dbv.empty())
    throw Infeasible("better box with F = " + std::to_string(F) + " has an empty D_B");
  ExponentSet db(q, l, std::move(dbv));
  auto sol = make_poly_solution(box_set(q, mvec), std::move(db), "better-box", F);
  if (sol.fb.value < F)
    throw InternalConsistency("better box footprint below design");
  if (sol.n() != db_size(q, mvec, F))
    throw InternalConsistency("better box size disagrees with its recurrence");
  return sol;
}

/// Separation of variables: D_A from Hyp_q(F_A, m') on the first m' coordinates,
/// D_B from Hyp_q(F_B, n') on the last n'.
inline PolySolution sep_vars(std::uint32_t q, std::size_t mprime, std::size_t nprime, std::uint64_t FA,
                             std::uint64_t FB, std::uint64_t limit = kDefaultSetLimit) {
  if (mprime == 0 || nprime == 0)
    throw ParameterError("m' and n' must be at least 1");
  const std::size_t l = mprime + nprime;
  const auto ha = hyp_set({q, mprime, FA}, limit);
  const auto hb = hyp_set({q, nprime, FB}, limit);
  if (ha.empty() || hb.empty())
    throw Infeasible("separation of variables with an empty hyperbolic factor");
  std::vector<ExponentVector> dav, dbv;
  dav.reserve(ha.size());
  dbv.reserve(hb.size());
  for (const auto& a : ha) {
    ExponentVector v(l);
    for (std::size_t i = 0; i < mprime; ++i)
      v[i] = a[i];
    dav.push_back(std::move(v));
  }
  for (const auto& b : hb) {
    ExponentVector v(l);
    for (std::size_t i = 0; i < nprime; ++i)
      v[mprime + i] = b[i];
    dbv.push_back(std::move(v));
  }
  auto sol = make_poly_solution(ExponentSet::from_sorted(q, l, std::move(dav)), ExponentSet(q, l, std::move(dbv)),
                                "sep-vars", std::max<std::uint64_t>(FA, 1) * std::max<std::uint64_t>(FB, 1));
  if (sol.fb.value < sol.design_footprint)
    throw InternalConsistency("separation-of-variables footprint below F_A F_B");
  return sol;
}

namespace detail {

inline MatdotSolution make_matdot(std::uint32_t q, ExponentSet d_set, const ExponentVector& d,
                                  std::uint64_t design, std::string construction) {
  MatdotSolution s;
  s.q = q;
  s.l = d.size();
  s.d = d;
  for (const auto& a : d_set) {
    ExponentVector b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      b[i] = d[i] - a[i];
    s.pairs.push_back({a, b});
  }
  s.fb = fb_of_sum(d_set, d_set);
  s.design_footprint = design;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] == 0)
      s.removable.push_back(i);
  s.da = d_set;
  s.db = std::move(d_set);
  s.construction = std::move(construction);
  return s;
}

} // namespace detail

/// Matdot box: D_A = D_B = box(m), d = m - 1; needs 2(m_i - 1) < q.
inline MatdotSolution box_matdot(std::uint32_t q, const std::vector<exp_t>& mvec) {
  detail::check_vector_param(mvec, "m");
  std::uint64_t closed = 1;
  ExponentVector d(mvec.size());
  for (std::size_t i = 0; i < mvec.size(); ++i) {
    if (2 * (std::uint64_t{mvec[i]} - 1) >= q)
      throw ParameterError("coordinate " + std::to_string(i) + ": 2(m_i - 1) = " +
                           std::to_string(2 * (std::uint64_t{mvec[i]} - 1)) + " is not below q = " + std::to_string(q));
    closed *= q - 2 * std::uint64_t{mvec[i]} + 2;
    d[i] = mvec[i] - 1;
  }
  auto sol = detail::make_matdot(q, box_set(q, mvec), d, closed, "matdot-box");
  if (sol.fb.value != closed)
    throw InternalConsistency("matdot box footprint disagrees with closed form");
  return sol;
}

/// Largest admissible coordinate of a half-box exponent: a < q/2.
inline exp_t half_box_max(std::uint32_t q) { return (q - 1) / 2; }

namespace detail {
inline void check_target(std::uint32_t q, const ExponentVector& d) {
  if (d.size() == 0)
    throw ParameterError("d must have at least one coordinate");
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 2 * half_box_max(q))
      throw ParameterError("d[" + std::to_string(i) + "] = " + std::to_string(d[i]) +
                           " is not a sum of two exponents below q/2");
}
} // namespace detail

/// |{a in N_{<q/2}^l : d - a in N_{<q/2}^l, prod (q - 2a_i) >= F, prod (q - 2(d_i - a_i)) >= G}|.
inline std::uint64_t d_size(std::uint32_t q, std::uint64_t F, std::uint64_t G, const ExponentVector& d) {
  detail::check_target(q, d);
  const std::int64_t h = half_box_max(q);
  const std::int64_t Q = q;
  std::map<std::tuple<std::size_t, std::uint64_t, std::uint64_t>, std::uint64_t> memo;
  auto rec = [&](auto&& self, std::uint64_t f, std::uint64_t g, std::size_t l) -> std::uint64_t {
    const std::int64_t dl = d[l - 1];
    const std::int64_t lo_box = std::max<std::int64_t>(0, dl - h);
    const std::int64_t hi_box = std::min<std::int64_t>(h, dl);
    if (l == 1) {
      const std::int64_t lo =
          std::max(lo_box, detail::ceil_div_signed(static_cast<std::int64_t>(g) - Q + 2 * dl, 2));
      const std::int64_t hi = std::min(hi_box, detail::floor_div(Q - static_cast<std::int64_t>(f), 2));
      return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
    }
    const auto key = std::make_tuple(l, f, g);
    if (auto it = memo.find(key); it != memo.end())
      return it->second;
    std::uint64_t s = 0;
    for (std::int64_t a = lo_box; a <= hi_box; ++a)
      s += self(self, detail::ceil_div(f, static_cast<std::uint64_t>(Q - 2 * a)),
                detail::ceil_div(g, static_cast<std::uint64_t>(Q - 2 * dl + 2 * a)), l - 1);
    memo.emplace(key, s);
    return s;
  };
  return rec(rec, F, G, d.size());
}

/// Half-hyperbolic set: D_A = D_B = {a : FB(2a) >= F, FB(2(d - a)) >= F}, matched as (a, d - a).
/// F = 0 imposes no footprint constraint (the matdot box with m = d + 1).
inline MatdotSolution half_hyperbolic(std::uint32_t q, std::uint64_t F, const ExponentVector& d) {
  detail::check_target(q, d);
  const std::size_t l = d.size();
  const exp_t h = half_box_max(q);
  std::vector<exp_t> lo(l), hi(l);
  for (std::size_t i = 0; i < l; ++i) {
    lo[i] = d[i] > h ? d[i] - h : 0;
    hi[i] = std::min(h, d[i]);
  }
  std::vector<ExponentVector> out;
  detail::for_each_in_ranges(lo, hi, [&](const ExponentVector& a) {
    std::uint64_t p1 = 1, p2 = 1;
    for (std::size_t i = 0; i < l; ++i) {
      p1 *= q - 2 * std::uint64_t{a[i]};
      p2 *= q - 2 * (std::uint64_t{d[i]} - a[i]);
    }
    if (p1 >= F && p2 >= F)
      out.push_back(a);
  });
  if (out.empty())
    throw Infeasible("half-hyperbolic set is empty for F = " + std::to_string(F) + ", d = " + d.to_string());
  auto sol = detail::make_matdot(q, ExponentSet::from_sorted(q, l, std::move(out)), d, F, "matdot-half");
  if (sol.fb.value < F)
    throw InternalConsistency("half-hyperbolic footprint below design");
  if (sol.m() != d_size(q, F, F, d))
    throw InternalConsistency("half-hyperbolic size disagrees with its recurrence");
  return sol;
}

/// The corner d = (h, ..., h) of the half box, h = ceil(q/2) - 1.
inline ExponentVector half_box_corner(std::uint32_t q, std::size_t l) { return ExponentVector(l, half_box_max(q)); }

struct BestTarget {
  ExponentVector d;
  std::uint64_t m = 0;
};

inline constexpr std::uint64_t kDefaultSearchLimit = 1'000'000;

/// Exhaustive scan of d in N_{<ceil(q/2)}^l maximising |D(F, F, d)|; ties go to the
/// lexicographically smallest d.
inline BestTarget search_best_d(std::uint32_t q, std::size_t l, std::uint64_t F,
                                std::uint64_t limit = kDefaultSearchLimit) {
  const exp_t h = half_box_max(q);
  const std::uint64_t candidates = checked_power(h + 1, l);
  if (candidates > limit)
    throw CapacityError("best-d search over " + std::to_string(candidates) + " candidates exceeds limit " +
                        std::to_string(limit));
  BestTarget best{ExponentVector(l), 0};
  bool first = true;
  detail::for_each_in_ranges(std::vector<exp_t>(l, 0), std::vector<exp_t>(l, h), [&](const ExponentVector& d) {
    const auto m = d_size(q, F, F, d);
    if (first || m > best.m) {
      best = {d, m};
      first = false;
    }
  });
  return best;
}

/// Drops coordinates where d is zero; keeps at least one coordinate.
inline MatdotSolution project_removable(const MatdotSolution& s) {
  if (s.removable.empty())
    return s;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < s.l; ++i)
    if (s.d[i] != 0)
      keep.push_back(i);
  if (keep.empty())
    keep.push_back(0);
  auto project = [&](const ExponentVector& v) {
    ExponentVector w(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j)
      w[j] = v[keep[j]];
    return w;
  };
  std::vector<ExponentVector> dv;
  for (const auto& a : s.da)
    dv.push_back(project(a));
  ExponentSet dset(s.q, keep.size(), std::move(dv));
  auto out = detail::make_matdot(s.q, std::move(dset), project(s.d), s.design_footprint, s.construction);
  if (out.m() != s.m())
    throw InternalConsistency("projection merged distinct exponents");
  return out;
}

struct Collision {
  MatchedPair first;
  MatchedPair second;
  ExponentVector sum;
};

struct PolyValidation {
  bool non_colliding = false;
  std::vector<Collision> collisions; // first few only
  std::size_t sum_size = 0;
  FootprintValue fb;
  std::uint64_t recovery_threshold = 0;
  std::optional<std::uint64_t> xi;
  bool fb_within_xi = false;
  bool fb_matches = false;

  bool valid() const noexcept { return non_colliding && fb_within_xi && fb_matches; }
};

/// Brute-force check that distinct pairs give distinct reduced sums, plus
/// recomputation of fb, k+1 and the xi bound. Never throws on invalid input.
inline PolyValidation validate_poly(const PolySolution& sol, std::size_t max_reported = 8) {
  PolyValidation r;
  std::unordered_map<ExponentVector, std::pair<std::size_t, std::size_t>, ExponentVectorHash> seen;
  seen.reserve(sol.m() * sol.n());
  for (std::size_t i = 0; i < sol.m(); ++i)
    for (std::size_t j = 0; j < sol.n(); ++j) {
      auto s = reduce_q_sum(sol.da[i], sol.db[j], sol.q);
      auto [it, inserted] = seen.try_emplace(s, i, j);
      if (!inserted && r.collisions.size() < max_reported)
        r.collisions.push_back({{sol.da[it->second.first], sol.db[it->second.second]}, {sol.da[i], sol.db[j]}, s});
    }
  r.sum_size = seen.size();
  r.non_colliding = r.sum_size == sol.m() * sol.n();
  if (sol.m() > 0 && sol.n() > 0) {
    r.fb = fb_of_sum(sol.da, sol.db);
    r.recovery_threshold = sol.points() - r.fb.value + 1;
    r.fb_matches = r.fb.value == sol.fb.value && r.fb.witness == sol.fb.witness;
  }
  try {
    r.xi = xi_bound(sol.q, sol.l, std::uint64_t{sol.m()} * sol.n());
    r.fb_within_xi = r.fb.value <= *r.xi;
  } catch (const Infeasible&) {
    r.fb_within_xi = false;
  }
  return r;
}

struct MatdotValidation {
  bool sizes_equal = false;
  bool exact_pairs = false; // exactly m pairs sum to d, forming a bijection
  std::size_t pairs_found = 0;
  FootprintValue fb;
  bool fb_matches = false;

  bool valid() const noexcept { return sizes_equal && exact_pairs && fb_matches; }
};

inline MatdotValidation validate_matdot(const MatdotSolution& sol) {
  MatdotValidation r;
  r.sizes_equal = sol.da.size() == sol.db.size();
  std::vector<int> used_a(sol.da.size(), 0), used_b(sol.db.size(), 0);
  for (std::size_t i = 0; i < sol.da.size(); ++i)
    for (std::size_t j = 0; j < sol.db.size(); ++j)
      if (reduce_q_sum(sol.da[i], sol.db[j], sol.q) == sol.d) {
        ++r.pairs_found;
        ++used_a[i];
        ++used_b[j];
      }
  r.exact_pairs = r.sizes_equal && r.pairs_found == sol.da.size() &&
                  std::all_of(used_a.begin(), used_a.end(), [](int c) { return c == 1; }) &&
                  std::all_of(used_b.begin(), used_b.end(), [](int c) { return c == 1; });
  if (!sol.da.empty() && !sol.db.empty()) {
    r.fb = fb_of_sum(sol.da, sol.db);
    r.fb_matches = r.fb.value == sol.fb.value;
  }
  return r;
}

/// Over GF(2) every matdot solution has FB = 2^(l - |supp(D_A +_2 D_B)|).
inline FootprintValue matdot_q2_fb(const MatdotSolution& sol) {
  if (sol.q != 2)
    throw ParameterError("matdot_q2_fb requires q = 2, got q = " + std::to_string(sol.q));
  const auto sum = minkowski_sum_q(sol.da, sol.db);
  const auto supp = support(sum);
  ExponentVector witness(sol.l);
  for (auto i : supp)
    witness[i] = 1;
  return {std::uint64_t{1} << (sol.l - supp.size()), witness};
}

// ---------------------------------------------------------------------------
// Text serialisation

namespace detail {
inline void write_sets(std::ostream& os, const ExponentSet& da, const ExponentSet& db) {
  os << "DA:\n";
  write_exponent_set(os, da);
  os << "DB:\n";
  write_exponent_set(os, db);
}
} // namespace detail

inline void write_solution(std::ostream& os, const PolySolution& s) {
  os << "q=" << s.q << "\nl=" << s.l << "\nkind=poly\n";
  detail::write_sets(os, s.da, s.db);
}

inline void write_solution(std::ostream& os, const MatdotSolution& s) {
  os << "q=" << s.q << "\nl=" << s.l << "\nkind=matdot\nd=" << s.d.to_string() << "\n";
  detail::write_sets(os, s.da, s.db);
}

inline void write_solution(std::ostream& os, const Solution& s) {
  std::visit([&](const auto& v) { write_solution(os, v); }, s);
}

/// Reads the format produced by write_solution and recomputes all derived data.
inline Solution read_solution(std::istream& is) {
  std::map<std::string, std::string> header;
  std::vector<ExponentVector> da, db;
  std::vector<ExponentVector>* section = nullptr;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line == "DA:") {
      section = &da;
    } else if (line == "DB:") {
      section = &db;
    } else if (section) {
      section->push_back(ExponentVector::parse(line));
    } else {
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("bad solution header line '" + line + "'");
      header[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  for (const char* k : {"q", "l", "kind"})
    if (!header.count(k))
      throw ParseError(std::string("solution is missing '") + k + "'");
  const auto q = static_cast<std::uint32_t>(std::stoul(header["q"]));
  const auto l = static_cast<std::size_t>(std::stoul(header["l"]));
  ExponentSet A(q, l, std::move(da)), B(q, l, std::move(db));
  if (header["kind"] == "poly")
    return make_poly_solution(std::move(A), std::move(B), "file");
  if (header["kind"] != "matdot")
    throw ParseError("unknown solution kind '" + header["kind"] + "'");
  if (!header.count("d"))
    throw ParseError("matdot solution is missing 'd'");
  MatdotSolution s;
  s.q = q;
  s.l = l;
  s.d = ExponentVector::parse(header["d"]);
  A.check(s.d);
  for (const auto& a : A)
    for (const auto& b : B)
      if (reduce_q_sum(a, b, q) == s.d)
        s.pairs.push_back({a, b});
  s.fb = fb_of_sum(A, B);
  s.design_footprint = s.fb.value;
  for (std::size_t i = 0; i < l; ++i)
    if (s.d[i] == 0)
      s.removable.push_back(i);
  s.da = std::move(A);
  s.db = std::move(B);
  s.construction = "file";
  return s;
}

// ---------------------------------------------------------------------------
// Construction descriptors: "<kind> key=value ...", e.g. "sep-vars mprime=5 nprime=5 F=8".

struct ConstructionDescriptor {
  std::string kind;
  std::map<std::string, std::string> args;

  static ConstructionDescriptor parse(std::string_view text) {
    ConstructionDescriptor d;
    std::istringstream in{std::string(text)};
    if (!(in >> d.kind))
      throw ParseError("empty construction descriptor");
    std::string tok;
    while (in >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ParseError("construction argument '" + tok + "' is not key=value");
      d.args[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return d;
  }

  std::string to_string() const {
    std::string s = kind;
    for (const auto& [k, v] : args)
      s += " " + k + "=" + v;
    return s;
  }

  bool has(const std::string& key) const { return args.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    auto it = args.find(key);
    if (it == args.end())
      throw ParameterError("construction '" + kind + "' needs argument '" + key + "'");
    return it->second;
  }

  std::uint64_t get_u64(const std::string& key) const {
    const auto& v = get(key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
      throw ParseError("argument " + key + "='" + v + "' is not a natural number");
    return out;
  }

  std::vector<exp_t> get_vec(const std::string& key) const { return ExponentVector::parse(get(key)).coords(); }
};

inline const std::vector<std::string>& construction_kinds() {
  static const std::vector<std::string> kinds{"poly-box", "better-box", "sep-vars", "matdot-box", "matdot-half"};
  return kinds;
}

/// Builds the solution a descriptor names, over a field (or exponent box) of order q.
inline Solution resolve(const ConstructionDescriptor& desc, std::uint32_t q) {
  const auto& k = desc.kind;
  if (k == "poly-box")
    return box_poly(q, desc.get_vec("m"), desc.get_vec("n"));
  if (k == "better-box")
    return better_box(q, desc.get_vec("m"), desc.get_u64("F"));
  if (k == "sep-vars") {
    const auto mp = desc.get_u64("mprime"), np = desc.get_u64("nprime");
    const auto FA = desc.has("FA") ? desc.get_u64("FA") : desc.get_u64("F");
    const auto FB = desc.has("FB") ? desc.get_u64("FB") : desc.get_u64("F");
    return sep_vars(q, mp, np, FA, FB);
  }
  if (k == "matdot-box")
    return box_matdot(q, desc.get_vec("m"));
  if (k == "matdot-half") {
    const auto F = desc.get_u64("F");
    ExponentVector d;
    const std::string dspec = desc.has("d") ? desc.get("d") : "corner";
    if (dspec == "best") {
      d = search_best_d(q, desc.get_u64("l"), F).d;
    } else if (dspec == "corner") {
      d = half_box_corner(q, desc.get_u64("l"));
    } else {
      d = ExponentVector::parse(dspec);
      if (desc.has("l") && desc.get_u64("l") != d.size())
        throw ParameterError("d has " + std::to_string(d.size()) + " coordinates but l = " + desc.get("l"));
    }
    return half_hyperbolic(q, F, d);
  }
  throw ParameterError("unknown construction kind '" + k + "'");
}

} // namespace mvcodes
