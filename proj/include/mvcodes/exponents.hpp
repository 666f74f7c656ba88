#pragma once

// Exponent-vector combinatorics for evaluation codes on F_q^l.
//
// Exponents live in N_{<q}^l. Multiplying monomials in
// F_q[x_1..x_l]/(x_i^q - x_i) adds exponents and folds each coordinate back
// with reduce_q. Footprint values measure how many points a monomial span is
// guaranteed to be nonzero on; hyperbolic sets are the largest sets with a
// prescribed footprint value.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mvcodes/errors.hpp"
#include "mvcodes/finite_field.hpp"

namespace mvcodes {

using exp_t = std::uint32_t;

/// Exponent of a monomial x^a = x_1^{a_1} ... x_l^{a_l}.
class ExponentVector {
public:
  ExponentVector() = default;
  explicit ExponentVector(std::size_t l, exp_t fill = 0) : c_(l, fill) {}
  ExponentVector(std::initializer_list<exp_t> init) : c_(init) {}
  explicit ExponentVector(std::vector<exp_t> c) : c_(std::move(c)) {}

  std::size_t size() const noexcept { return c_.size(); }
  exp_t operator[](std::size_t i) const noexcept { return c_[i]; }
  exp_t& operator[](std::size_t i) noexcept { return c_[i]; }
  auto begin() const noexcept { return c_.begin(); }
  auto end() const noexcept { return c_.end(); }
  const std::vector<exp_t>& coords() const noexcept { return c_; }

  bool is_zero() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](exp_t v) { return v == 0; });
  }
  std::size_t weight() const noexcept {
    return static_cast<std::size_t>(std::count_if(c_.begin(), c_.end(), [](exp_t v) { return v != 0; }));
  }

  friend auto operator<=>(const ExponentVector&, const ExponentVector&) = default;
  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;

  /// "(0,3,1)"
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i)
        s += ',';
      s += std::to_string(c_[i]);
    }
    return s + ")";
  }

  /// Accepts "(0,3,1)" or "0,3,1".
  static ExponentVector parse(std::string_view text) {
    std::string_view s = text;
    auto strip = [](std::string_view v) {
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t'))
        v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
        v.remove_suffix(1);
      return v;
    };
    s = strip(s);
    if (!s.empty() && s.front() == '(') {
      if (s.back() != ')')
        throw ParseError("unbalanced parentheses in exponent vector '" + std::string(text) + "'");
      s = s.substr(1, s.size() - 2);
    }
    std::vector<exp_t> out;
    if (strip(s).empty())
      throw ParseError("empty exponent vector");
    while (true) {
      const auto comma = s.find(',');
      const auto tok = strip(s.substr(0, comma));
      exp_t v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
        throw ParseError("bad exponent entry '" + std::string(tok) + "' in '" + std::string(text) + "'");
      out.push_back(v);
      if (comma == std::string_view::npos)
        break;
      s = s.substr(comma + 1);
    }
    return ExponentVector(std::move(out));
  }

  friend std::ostream& operator<<(std::ostream& os, const ExponentVector& v) { return os << v.to_string(); }

private:
  std::vector<exp_t> c_;
};

struct ExponentVectorHash {
  std::size_t operator()(const ExponentVector& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (exp_t x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

/// (a)_q: exponent arithmetic of F_q[x]/(x^q - x), for a <= 2q - 2 (a sum of two exponents below q).
inline exp_t reduce_q(std::uint64_t a, std::uint32_t q) {
  if (a < q)
    return static_cast<exp_t>(a);
  if (a + 1 < 2 * std::uint64_t{q})
    return static_cast<exp_t>(a % q + 1);
  throw RangeError("exponent " + std::to_string(a) + " exceeds 2q - 2 = " + std::to_string(2 * std::uint64_t{q} - 2));
}

/// Coordinatewise (a + b)_q.
inline ExponentVector reduce_q_sum(const ExponentVector& a, const ExponentVector& b, std::uint32_t q) {
  if (a.size() != b.size())
    throw ParameterError("exponent vectors of different lengths");
  ExponentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = reduce_q(std::uint64_t{a[i]} + b[i], q);
  return out;
}

/// Star (Schur) product k * s.
inline ExponentVector star(const ExponentVector& k, const ExponentVector& s) {
  if (k.size() != s.size())
    throw ParameterError("star product of vectors of different lengths");
  ExponentVector out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    out[i] = k[i] * s[i];
  return out;
}

/// Footprint value of a single exponent: prod_i (q - c_i).
inline std::uint64_t footprint_of(const ExponentVector& c, std::uint32_t q) {
  std::uint64_t p = 1;
  for (exp_t v : c)
    p *= (q - v);
  return p;
}

/// A set of exponent vectors sharing (q, l), kept sorted lexicographically.
class ExponentSet {
public:
  ExponentSet() = default;
  ExponentSet(std::uint32_t q, std::size_t l) : q_(q), l_(l) { check_params(); }
  ExponentSet(std::uint32_t q, std::size_t l, std::vector<ExponentVector> elems)
      : q_(q), l_(l), elems_(std::move(elems)) {
    check_params();
    for (const auto& v : elems_)
      check(v);
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }

  /// Builds from vectors already sorted and unique; only entries are checked.
  static ExponentSet from_sorted(std::uint32_t q, std::size_t l, std::vector<ExponentVector> elems) {
    ExponentSet s(q, l);
    for (const auto& v : elems)
      s.check(v);
    s.elems_ = std::move(elems);
    return s;
  }

  std::uint32_t q() const noexcept { return q_; }
  std::size_t l() const noexcept { return l_; }
  std::size_t size() const noexcept { return elems_.size(); }
  bool empty() const noexcept { return elems_.empty(); }
  auto begin() const noexcept { return elems_.begin(); }
  auto end() const noexcept { return elems_.end(); }
  const ExponentVector& operator[](std::size_t i) const noexcept { return elems_[i]; }
  const std::vector<ExponentVector>& elements() const noexcept { return elems_; }

  bool contains(const ExponentVector& v) const { return std::binary_search(elems_.begin(), elems_.end(), v); }

  /// Position of v in lexicographic order, or size() if absent.
  std::size_t index_of(const ExponentVector& v) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), v);
    if (it == elems_.end() || *it != v)
      return elems_.size();
    return static_cast<std::size_t>(it - elems_.begin());
  }

  void insert(ExponentVector v) {
    check(v);
    auto it = std::lower_bound(elems_.begin(), elems_.end(), v);
    if (it == elems_.end() || *it != v)
      elems_.insert(it, std::move(v));
  }

  friend bool operator==(const ExponentSet& a, const ExponentSet& b) {
    return a.q_ == b.q_ && a.l_ == b.l_ && a.elems_ == b.elems_;
  }

  void check(const ExponentVector& v) const {
    if (v.size() != l_)
      throw ParameterError("exponent vector " + v.to_string() + " has length " + std::to_string(v.size()) +
                           ", expected " + std::to_string(l_));
    for (exp_t x : v)
      if (x >= q_)
        throw RangeError("exponent vector " + v.to_string() + " has an entry >= q = " + std::to_string(q_));
  }

private:
  void check_params() const {
    if (q_ < 2)
      throw ParameterError("q must be at least 2");
    if (l_ == 0)
      throw ParameterError("l must be at least 1");
  }

  std::uint32_t q_ = 2;
  std::size_t l_ = 1;
  std::vector<ExponentVector> elems_;
};

/// One vector per line, lexicographic, newline-terminated.
inline void write_exponent_set(std::ostream& os, const ExponentSet& s) {
  for (const auto& v : s)
    os << v.to_string() << '\n';
}

inline ExponentSet read_exponent_set(std::istream& is, std::uint32_t q, std::size_t l) {
  std::vector<ExponentVector> v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r")
      continue;
    v.push_back(ExponentVector::parse(line));
  }
  return ExponentSet(q, l, std::move(v));
}

/// Min over members of prod (q - c_i), with a lexicographically smallest witness.
struct FootprintValue {
  std::uint64_t value = 0;
  ExponentVector witness;
};

struct HyperbolicParams {
  std::uint32_t q = 2;
  std::size_t l = 1;
  std::uint64_t F = 0;
};

inline constexpr std::uint64_t kDefaultSetLimit = std::uint64_t{1} << 24;

namespace detail {
inline void check_compatible(const ExponentSet& a, const ExponentSet& b) {
  if (a.q() != b.q() || a.l() != b.l())
    throw ParameterError("exponent sets over different (q, l): (" + std::to_string(a.q()) + "," +
                         std::to_string(a.l()) + ") vs (" + std::to_string(b.q()) + "," + std::to_string(b.l()) + ")");
}
} // namespace detail

/// Reduced Minkowski sum {(a + b)_q : a in A, b in B}.
inline ExponentSet minkowski_sum_q(const ExponentSet& A, const ExponentSet& B,
                                   std::uint64_t limit = kDefaultSetLimit) {
  detail::check_compatible(A, B);
  if (A.size() * B.size() > limit)
    throw CapacityError("Minkowski sum of " + std::to_string(A.size()) + " x " + std::to_string(B.size()) +
                        " vectors exceeds limit");
  std::vector<ExponentVector> out;
  out.reserve(A.size() * B.size());
  for (const auto& a : A)
    for (const auto& b : B)
      out.push_back(reduce_q_sum(a, b, A.q()));
  return ExponentSet(A.q(), A.l(), std::move(out));
}

inline FootprintValue fb(const ExponentSet& S) {
  if (S.empty())
    throw EmptyInput("footprint value of an empty set");
  FootprintValue best{~std::uint64_t{0}, {}};
  for (const auto& c : S) {
    const auto v = footprint_of(c, S.q());
    if (v < best.value) // members are sorted, so the first minimum is the smallest witness
      best = {v, c};
  }
  return best;
}

/// fb(A +_q B) evaluated pair by pair without materialising the sum.
inline FootprintValue fb_of_sum(const ExponentSet& A, const ExponentSet& B) {
  detail::check_compatible(A, B);
  if (A.empty() || B.empty())
    throw EmptyInput("footprint value of an empty sum");
  const std::uint32_t q = A.q();
  FootprintValue best{~std::uint64_t{0}, {}};
  ExponentVector c(A.l());
  for (const auto& a : A)
    for (const auto& b : B) {
      std::uint64_t v = 1;
      for (std::size_t i = 0; i < a.size(); ++i)
        v *= q - reduce_q(std::uint64_t{a[i]} + b[i], q);
      if (v > best.value)
        continue;
      for (std::size_t i = 0; i < a.size(); ++i)
        c[i] = reduce_q(std::uint64_t{a[i]} + b[i], q);
      if (v < best.value || c < best.witness)
        best = {v, c};
    }
  return best;
}

/// q^l - fb(S): the largest zero count a function in span{x^c : c in S} can have.
inline std::uint64_t delta(const ExponentSet& S) { return checked_power(S.q(), S.l()) - fb(S).value; }

/// Coordinates (0-based) where some member is nonzero.
inline std::vector<std::size_t> support(const ExponentSet& S) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < S.l(); ++i)
    for (const auto& v : S)
      if (v[i] != 0) {
        out.push_back(i);
        break;
      }
  return out;
}

namespace detail {

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a == 0 ? 0 : (a - 1) / b + 1; }

inline void hyp_enumerate(std::uint32_t q, std::size_t l, std::size_t pos, std::uint64_t need,
                          const std::vector<std::uint64_t>& max_rest, ExponentVector& cur,
                          std::vector<ExponentVector>& out, std::uint64_t limit) {
  if (pos == l) {
    if (out.size() >= limit)
      throw CapacityError("hyperbolic set exceeds limit " + std::to_string(limit));
    out.push_back(cur);
    return;
  }
  for (exp_t a = 0; a < q; ++a) {
    const std::uint64_t f = q - a;
    const std::uint64_t rest_need = ceil_div(need, f);
    if (rest_need > max_rest[pos + 1])
      break; // factors only shrink as a grows
    cur[pos] = a;
    hyp_enumerate(q, l, pos + 1, std::max<std::uint64_t>(rest_need, 1), max_rest, cur, out, limit);
  }
  cur[pos] = 0;
}

} // namespace detail

/// Hyp_q(F, l) = {a in N_{<q}^l : prod (q - a_i) >= F}, lexicographic.
inline ExponentSet hyp_set(const HyperbolicParams& p, std::uint64_t limit = kDefaultSetLimit) {
  const std::uint64_t total = checked_power(p.q, p.l);
  std::vector<std::uint64_t> max_rest(p.l + 1, 1);
  for (std::size_t i = p.l; i-- > 0;)
    max_rest[i] = max_rest[i + 1] * p.q;
  std::vector<ExponentVector> out;
  if (p.F <= total) {
    ExponentVector cur(p.l);
    detail::hyp_enumerate(p.q, p.l, 0, std::max<std::uint64_t>(p.F, 1), max_rest, cur, out, limit);
  }
  return ExponentSet::from_sorted(p.q, p.l, std::move(out));
}

/// |Hyp_q(F, l)| through the size recurrence, memoised on (F, level).
inline std::uint64_t hyp_size(const HyperbolicParams& p) {
  const std::uint64_t total = checked_power(p.q, p.l);
  if (p.F <= 1)
    return total;
  if (p.F > total)
    return 0;
  std::vector<std::map<std::uint64_t, std::uint64_t>> memo(p.l + 1);
  auto rec = [&](auto&& self, std::uint64_t F, std::size_t l) -> std::uint64_t {
    if (l == 1)
      return F > std::uint64_t{p.q} + 1 ? 0 : p.q - F + 1;
    if (auto it = memo[l].find(F); it != memo[l].end())
      return it->second;
    std::uint64_t s = 0;
    for (std::uint64_t i = 1; i <= p.q; ++i)
      s += self(self, detail::ceil_div(F, i), l - 1);
    memo[l].emplace(F, s);
    return s;
  };
  return rec(rec, p.F, p.l);
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n)
    return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

/// |Hyp_2(F, l)| = sum_{i=0}^{l - ceil(log2 F)} C(l, i).
inline std::uint64_t hyp2_size(std::size_t l, std::uint64_t F) {
  if (F == 0)
    F = 1;
  std::uint64_t clog = 0;
  while ((std::uint64_t{1} << clog) < F)
    ++clog;
  if (clog > l)
    return 0;
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i <= l - clog; ++i)
    s += binomial(l, i);
  return s;
}

/// Largest F with |Hyp_q(F, l)| >= target; caps the footprint of any solution with m*n = target.
inline std::uint64_t xi_bound(std::uint32_t q, std::size_t l, std::uint64_t target) {
  const std::uint64_t total = checked_power(q, l);
  if (target > total)
    throw Infeasible("target " + std::to_string(target) + " exceeds q^l = " + std::to_string(total));
  if (target == 0)
    target = 1;
  std::uint64_t lo = 1, hi = total; // hyp_size(lo) >= target always holds
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (hyp_size({q, l, mid}) >= target)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

/// The full box {a : a_i < bound_i}, lexicographic.
inline ExponentSet box_set(std::uint32_t q, const std::vector<exp_t>& bound) {
  const std::size_t l = bound.size();
  std::vector<ExponentVector> out;
  for (exp_t b : bound)
    if (b == 0)
      return ExponentSet(q, l);
  ExponentVector cur(l);
  while (true) {
    out.push_back(cur);
    std::size_t i = l;
    while (i-- > 0) {
      if (++cur[i] < bound[i])
        break;
      cur[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1))
      break;
  }
  return ExponentSet(q, l, std::move(out));
}

} // namespace mvcodes
