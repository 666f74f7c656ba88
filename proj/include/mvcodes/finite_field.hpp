#pragma once

// Exact arithmetic in GF(p^e) on dense integer indices.
//
// An element is stored as the integer whose base-p digits are the coefficients
// of its polynomial-basis representative, lowest degree first. Index 0 is the
// additive identity and index 1 the multiplicative identity. The modulus is
// encoded the same way, including its leading coefficient, so x^3 + x + 1 over
// GF(2) is 0b1011 = 11 and the field prints as "2^3/11".

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mvcodes/errors.hpp"

namespace mvcodes {

using elem_t = std::uint32_t;

inline constexpr std::uint64_t kMaxFieldOrder = std::uint64_t{1} << 16;

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2)
    return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

inline std::vector<std::uint32_t> base_digits(std::uint64_t n, std::uint32_t p, std::size_t count) {
  std::vector<std::uint32_t> out(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = static_cast<std::uint32_t>(n % p);
    n /= p;
  }
  return out;
}

inline std::uint64_t from_digits(std::span<const std::uint32_t> d, std::uint32_t p) {
  std::uint64_t n = 0;
  for (std::size_t i = d.size(); i-- > 0;)
    n = n * p + d[i];
  return n;
}

inline std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a;
  while (new_r != 0) {
    std::int64_t quot = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - quot * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - quot * new_r);
  }
  if (t < 0)
    t += p;
  return static_cast<std::uint32_t>(t);
}

// Dense polynomials over Z_p, lowest degree first, no trailing zeros.
using Poly = std::vector<std::uint32_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0)
    a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::uint32_t lead_inv = inv_mod_prime(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t c = std::uint64_t{a.back()} * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * b[i] % p) % p);
    trim(a);
  }
  return a;
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty())
    return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = static_cast<std::uint32_t>((out[i + j] + std::uint64_t{a[i]} * b[j]) % p);
  trim(out);
  return out;
}

inline Poly poly_sub(Poly a, const Poly& b, std::uint32_t p) {
  if (a.size() < b.size())
    a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i)
    a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

// Quotient and remainder of a / b.
inline std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  Poly quot(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  const std::uint32_t lead_inv = inv_mod_prime(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint32_t c = static_cast<std::uint32_t>(std::uint64_t{a.back()} * lead_inv % p);
    const std::size_t shift = a.size() - b.size();
    quot[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - std::uint64_t{c} * b[i] % p) % p);
    trim(a);
  }
  trim(quot);
  return {quot, a};
}

// True when the monic polynomial f of degree e >= 1 has no factor of degree <= e/2.
inline bool is_irreducible(const Poly& f, std::uint32_t p) {
  const std::size_t e = f.size() - 1;
  for (std::size_t deg = 1; deg <= e / 2; ++deg) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < deg; ++i)
      count *= p;
    for (std::uint64_t t = 0; t < count; ++t) {
      Poly g = base_digits(t, p, deg);
      g.push_back(1);
      if (poly_mod(f, g, p).empty())
        return false;
    }
  }
  return true;
}

// Smallest modulus encoding (leading coefficient included) of a monic irreducible of degree e.
inline std::uint64_t least_irreducible(std::uint32_t p, std::uint32_t e) {
  std::uint64_t pe = 1;
  for (std::uint32_t i = 0; i < e; ++i)
    pe *= p;
  for (std::uint64_t t = 0; t < pe; ++t) {
    Poly f = base_digits(t, p, e);
    f.push_back(1);
    if (is_irreducible(f, p))
      return pe + t;
  }
  throw InternalConsistency("no irreducible polynomial found");
}

struct DefaultModulus {
  std::uint32_t q;
  std::uint64_t modulus;
};

// Lexicographically least monic irreducible for each built-in extension field.
inline constexpr std::array<DefaultModulus, 12> kDefaultModuli{{
    {4, 7},      // x^2 + x + 1
    {8, 11},     // x^3 + x + 1
    {16, 19},    // x^4 + x + 1
    {25, 27},    // x^2 + 2
    {27, 34},    // x^3 + 2x + 1
    {32, 37},    // x^5 + x^2 + 1
    {49, 50},    // x^2 + 1
    {64, 67},    // x^6 + x + 1
    {81, 86},    // x^4 + x + 2
    {125, 131},  // x^3 + x + 1
    {128, 131},  // x^7 + x + 1
    {256, 283},  // x^8 + x^4 + x^3 + x + 1
}};

struct FieldTables {
  std::uint32_t p = 0;
  std::uint32_t e = 0;
  std::uint32_t q = 0;
  std::uint64_t modulus = 0;
  Poly modulus_poly;
  // Full q*q tables for small extension fields; empty otherwise.
  std::vector<elem_t> add_table;
  std::vector<elem_t> mul_table;
  std::vector<elem_t> neg_table;
  std::vector<elem_t> inv_table;
  // log/antilog for larger extension fields.
  std::vector<std::uint32_t> log_table;
  std::vector<elem_t> exp_table;
};

} // namespace detail

/// Handle to an immutable finite field GF(p^e). Copies share the same tables.
///
/// Equality compares (p, e, modulus), so two independently constructed handles
/// for the same field interoperate.
class FieldSpec {
public:
  FieldSpec() = default;

  /// Builds GF(p^e). Without a modulus the built-in (lexicographically least)
  /// irreducible is used; a supplied modulus is checked for irreducibility.
  static FieldSpec make(std::uint32_t p, std::uint32_t e = 1,
                        std::optional<std::uint64_t> modulus = std::nullopt) {
    if (!detail::is_prime(p))
      throw ParameterError("field characteristic " + std::to_string(p) + " is not prime");
    if (e == 0)
      throw ParameterError("extension degree must be at least 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
      q *= p;
      if (q > kMaxFieldOrder)
        throw CapacityError("field order exceeds 2^16");
    }
    auto t = std::make_shared<detail::FieldTables>();
    t->p = p;
    t->e = e;
    t->q = static_cast<std::uint32_t>(q);
    if (e == 1) {
      t->modulus = 0;
    } else {
      std::uint64_t mod = 0;
      if (modulus) {
        mod = *modulus;
        if (mod < q || mod >= 2 * q || mod / q != 1)
          throw ParameterError("modulus " + std::to_string(mod) + " is not monic of degree " +
                               std::to_string(e));
      } else {
        mod = default_modulus(p, e);
      }
      t->modulus = mod;
      t->modulus_poly = detail::base_digits(mod, p, e + 1);
      if (!detail::is_irreducible(t->modulus_poly, p))
        throw ParameterError("modulus " + std::to_string(mod) + " is reducible over GF(" +
                             std::to_string(p) + ")");
    }
    build_tables(*t);
    FieldSpec f;
    f.t_ = std::move(t);
    return f;
  }

  /// Field of prime-power order q with the default modulus.
  static FieldSpec of_order(std::uint64_t q) {
    if (q < 2)
      throw ParameterError("field order must be at least 2");
    std::uint32_t p = 0;
    for (std::uint64_t d = 2; d <= q; ++d)
      if (q % d == 0) {
        p = static_cast<std::uint32_t>(d);
        break;
      }
    std::uint32_t e = 0;
    std::uint64_t r = q;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    if (r != 1)
      throw ParameterError(std::to_string(q) + " is not a prime power");
    return make(p, e);
  }

  /// Parses "p^e/modulus", "p^e", "p" or a prime-power order such as "8".
  static FieldSpec parse(std::string_view text) {
    auto num = [&](std::string_view s) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad field spec '" + std::string(text) + "'");
      return v;
    };
    std::optional<std::uint64_t> modulus;
    std::string_view head = text;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      modulus = num(text.substr(slash + 1));
      head = text.substr(0, slash);
    }
    if (auto caret = head.find('^'); caret != std::string_view::npos) {
      const auto p = num(head.substr(0, caret));
      const auto e = num(head.substr(caret + 1));
      if (p > kMaxFieldOrder || e > 64)
        throw CapacityError("field order exceeds 2^16");
      if (e == 1)
        modulus.reset();
      return make(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(e), modulus);
    }
    if (modulus)
      throw ParseError("modulus given without exponent in '" + std::string(text) + "'");
    return of_order(num(head));
  }

  static std::uint64_t default_modulus(std::uint32_t p, std::uint32_t e) {
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < e; ++i)
      q *= p;
    for (const auto& d : detail::kDefaultModuli)
      if (d.q == q)
        return d.modulus;
    return detail::least_irreducible(p, e);
  }

  bool valid() const noexcept { return t_ != nullptr; }
  std::uint32_t p() const noexcept { return t_->p; }
  std::uint32_t e() const noexcept { return t_->e; }
  std::uint32_t q() const noexcept { return t_->q; }
  /// Modulus encoding; 0 for prime fields.
  std::uint64_t modulus() const noexcept { return t_->modulus; }

  std::string to_string() const {
    std::string s = std::to_string(p()) + "^" + std::to_string(e());
    if (e() > 1)
      s += "/" + std::to_string(modulus());
    return s;
  }

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept {
    if (a.t_ == b.t_)
      return true;
    if (!a.t_ || !b.t_)
      return false;
    return a.p() == b.p() && a.e() == b.e() && a.modulus() == b.modulus();
  }

  void check_index(std::uint64_t i) const {
    if (i >= q())
      throw RangeError("element index " + std::to_string(i) + " out of range for GF(" +
                       std::to_string(q()) + ")");
  }

  // Raw index arithmetic. Arguments must be valid indices.

  elem_t add(elem_t a, elem_t b) const noexcept {
    const auto& t = *t_;
    if (t.e == 1) {
      const elem_t s = a + b;
      return s >= t.p ? s - t.p : s;
    }
    if (t.p == 2)
      return a ^ b;
    if (!t.add_table.empty())
      return t.add_table[std::size_t{a} * t.q + b];
    return digitwise(a, b, false);
  }

  elem_t neg(elem_t a) const noexcept {
    const auto& t = *t_;
    if (t.p == 2)
      return a;
    if (t.e == 1)
      return a == 0 ? 0 : t.p - a;
    return t.neg_table[a];
  }

  elem_t sub(elem_t a, elem_t b) const noexcept { return add(a, neg(b)); }

  elem_t mul(elem_t a, elem_t b) const noexcept {
    const auto& t = *t_;
    if (t.e == 1)
      return static_cast<elem_t>(std::uint64_t{a} * b % t.p);
    if (!t.mul_table.empty())
      return t.mul_table[std::size_t{a} * t.q + b];
    if (a == 0 || b == 0)
      return 0;
    return t.exp_table[t.log_table[a] + t.log_table[b]];
  }

  elem_t inv(elem_t a) const {
    if (a == 0)
      throw DivisionByZero("inverse of zero in GF(" + std::to_string(q()) + ")");
    return t_->inv_table[a];
  }

  elem_t div(elem_t a, elem_t b) const { return mul(a, inv(b)); }

  elem_t pow(elem_t a, std::uint64_t k) const noexcept {
    elem_t result = 1;
    elem_t base = a;
    while (k > 0) {
      if (k & 1)
        result = mul(result, base);
      base = mul(base, base);
      k >>= 1;
    }
    return result;
  }

  /// y <- y + c * x, elementwise. Hot loop of every elimination.
  void axpy(std::span<elem_t> y, elem_t c, std::span<const elem_t> x) const noexcept {
    if (c == 0)
      return;
    const auto& t = *t_;
    const std::size_t n = std::min(y.size(), x.size());
    if (t.p == 2 && c == 1) {
      for (std::size_t i = 0; i < n; ++i)
        y[i] ^= x[i];
      return;
    }
    if (!t.mul_table.empty()) {
      const elem_t* row = t.mul_table.data() + std::size_t{c} * t.q;
      if (t.p == 2) {
        for (std::size_t i = 0; i < n; ++i)
          y[i] ^= row[x[i]];
      } else {
        for (std::size_t i = 0; i < n; ++i)
          y[i] = add(y[i], row[x[i]]);
      }
      return;
    }
    for (std::size_t i = 0; i < n; ++i)
      y[i] = add(y[i], mul(c, x[i]));
  }

  void scale(std::span<elem_t> y, elem_t c) const noexcept {
    for (auto& v : y)
      v = mul(v, c);
  }

  /// Coefficient vector (length e, lowest degree first) of the element at index i.
  std::vector<std::uint32_t> coefficients(elem_t i) const {
    return detail::base_digits(i, p(), e());
  }

private:
  elem_t digitwise(elem_t a, elem_t b, bool subtract) const noexcept {
    const auto& t = *t_;
    elem_t out = 0, scale_ = 1;
    for (std::uint32_t i = 0; i < t.e; ++i) {
      const elem_t da = a % t.p, db = b % t.p;
      out += ((subtract ? da + t.p - db : da + db) % t.p) * scale_;
      a /= t.p;
      b /= t.p;
      scale_ *= t.p;
    }
    return out;
  }

  // Product through polynomial multiplication and long division by the modulus.
  static elem_t slow_mul(const detail::FieldTables& t, elem_t a, elem_t b) {
    auto pa = detail::base_digits(a, t.p, t.e);
    auto pb = detail::base_digits(b, t.p, t.e);
    detail::trim(pa);
    detail::trim(pb);
    auto r = detail::poly_mod(detail::poly_mul(pa, pb, t.p), t.modulus_poly, t.p);
    r.resize(t.e, 0);
    return static_cast<elem_t>(detail::from_digits(r, t.p));
  }

  // Inverse via the extended Euclidean algorithm on polynomial representatives.
  static elem_t slow_inv(const detail::FieldTables& t, elem_t a) {
    using detail::Poly;
    Poly r0 = t.modulus_poly, r1 = detail::base_digits(a, t.p, t.e);
    detail::trim(r1);
    Poly s0{}, s1{1};
    while (!r1.empty()) {
      auto [quot, rem] = detail::poly_divmod(r0, r1, t.p);
      Poly s2 = detail::poly_sub(s0, detail::poly_mul(quot, s1, t.p), t.p);
      r0 = std::move(r1);
      r1 = std::move(rem);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    // r0 is a nonzero constant: normalise.
    const std::uint32_t c = detail::inv_mod_prime(r0[0], t.p);
    for (auto& v : s0)
      v = static_cast<std::uint32_t>(std::uint64_t{v} * c % t.p);
    s0.resize(t.e, 0);
    return static_cast<elem_t>(detail::from_digits(s0, t.p));
  }

  static void build_tables(detail::FieldTables& t) {
    const std::uint32_t q = t.q;
    t.inv_table.assign(q, 0);
    if (t.e == 1) {
      for (std::uint32_t a = 1; a < q; ++a)
        t.inv_table[a] = detail::inv_mod_prime(a, t.p);
      return;
    }
    t.neg_table.assign(q, 0);
    for (elem_t a = 0; a < q; ++a) {
      auto d = detail::base_digits(a, t.p, t.e);
      for (auto& v : d)
        v = (t.p - v) % t.p;
      t.neg_table[a] = static_cast<elem_t>(detail::from_digits(d, t.p));
    }
    if (q <= 256) {
      t.add_table.assign(std::size_t{q} * q, 0);
      t.mul_table.assign(std::size_t{q} * q, 0);
      for (elem_t a = 0; a < q; ++a) {
        const auto da = detail::base_digits(a, t.p, t.e);
        for (elem_t b = 0; b < q; ++b) {
          const auto db = detail::base_digits(b, t.p, t.e);
          std::vector<std::uint32_t> s(t.e);
          for (std::uint32_t i = 0; i < t.e; ++i)
            s[i] = (da[i] + db[i]) % t.p;
          t.add_table[std::size_t{a} * q + b] = static_cast<elem_t>(detail::from_digits(s, t.p));
          t.mul_table[std::size_t{a} * q + b] = slow_mul(t, a, b);
        }
      }
    } else {
      // Find a generator of the multiplicative group for log/antilog tables.
      for (elem_t g = 2; g < q; ++g) {
        std::vector<elem_t> powers;
        powers.reserve(q - 1);
        elem_t x = 1;
        bool ok = true;
        for (std::uint32_t k = 0; k < q - 1; ++k) {
          if (k > 0 && x == 1) {
            ok = false;
            break;
          }
          powers.push_back(x);
          x = slow_mul(t, x, g);
        }
        if (!ok)
          continue;
        t.log_table.assign(q, 0);
        t.exp_table.assign(2 * std::size_t{q}, 0);
        for (std::uint32_t k = 0; k < q - 1; ++k) {
          t.log_table[powers[k]] = k;
          t.exp_table[k] = powers[k];
          t.exp_table[k + q - 1] = powers[k];
        }
        break;
      }
    }
    for (elem_t a = 1; a < q; ++a)
      t.inv_table[a] = slow_inv(t, a);
  }

  std::shared_ptr<const detail::FieldTables> t_;
};

/// A field element: a field handle plus its canonical index.
class FieldElement {
public:
  FieldElement() = default;
  FieldElement(FieldSpec spec, elem_t index) : spec_(std::move(spec)), index_(index) {
    spec_.check_index(index);
  }

  static FieldElement from_index(const FieldSpec& spec, std::uint64_t i) {
    spec.check_index(i);
    return FieldElement(spec, static_cast<elem_t>(i));
  }
  static FieldElement zero(const FieldSpec& spec) { return {spec, 0}; }
  static FieldElement one(const FieldSpec& spec) { return {spec, 1}; }

  const FieldSpec& spec() const noexcept { return spec_; }
  elem_t index() const noexcept { return index_; }
  bool is_zero() const noexcept { return index_ == 0; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.spec_, a.spec_.add(a.index_, b.index_)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.spec_, a.spec_.sub(a.index_, b.index_)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.spec_, a.spec_.mul(a.index_, b.index_)};
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.spec_, a.spec_.div(a.index_, b.index_)};
  }
  FieldElement operator-() const { return {spec_, spec_.neg(index_)}; }
  FieldElement inv() const { return {spec_, spec_.inv(index_)}; }
  FieldElement pow(std::uint64_t k) const { return {spec_, spec_.pow(index_, k)}; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.index_ == b.index_ && a.spec_ == b.spec_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& a) { return os << a.index_; }

private:
  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (!(a.spec_ == b.spec_))
      throw SpecMismatch("operands belong to different fields (" + a.spec_.to_string() + " vs " +
                         b.spec_.to_string() + ")");
  }

  FieldSpec spec_;
  elem_t index_ = 0;
};

inline FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement inv(const FieldElement& a) { return a.inv(); }
inline FieldElement element_from_index(const FieldSpec& s, std::uint64_t i) {
  return FieldElement::from_index(s, i);
}
inline std::uint64_t index_of(const FieldElement& a) { return a.index(); }

/// A point of F_q^l stored as coordinate indices.
struct Point {
  std::vector<elem_t> coords;

  std::size_t dim() const noexcept { return coords.size(); }
  friend auto operator<=>(const Point&, const Point&) = default;

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (i)
        s += ',';
      s += std::to_string(coords[i]);
    }
    return s;
  }
};

/// q^l with overflow detection; throws CapacityError beyond `limit`.
inline std::uint64_t checked_power(std::uint64_t q, std::uint64_t l,
                                   std::uint64_t limit = std::uint64_t{1} << 62) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < l; ++i) {
    if (r > limit / q)
      throw CapacityError(std::to_string(q) + "^" + std::to_string(l) + " exceeds limit " +
                          std::to_string(limit));
    r *= q;
  }
  return r;
}

inline constexpr std::uint64_t kDefaultPointLimit = std::uint64_t{1} << 22;

/// The point with the given rank in lexicographic order (last coordinate fastest).
inline Point point_at(std::uint32_t q, std::size_t l, std::uint64_t rank) {
  Point pt;
  pt.coords.assign(l, 0);
  for (std::size_t i = l; i-- > 0;) {
    pt.coords[i] = static_cast<elem_t>(rank % q);
    rank /= q;
  }
  return pt;
}

/// All q^l points of F_q^l in lexicographic order of coordinate indices.
inline std::vector<Point> enumerate_points(const FieldSpec& spec, std::size_t l,
                                           std::uint64_t limit = kDefaultPointLimit) {
  if (l == 0)
    throw ParameterError("point dimension must be at least 1");
  const std::uint64_t total = checked_power(spec.q(), l, limit);
  std::vector<Point> out;
  out.reserve(total);
  for (std::uint64_t r = 0; r < total; ++r)
    out.push_back(point_at(spec.q(), l, r));
  return out;
}

/// The first `count` points of the lexicographic enumeration.
inline std::vector<Point> first_points(const FieldSpec& spec, std::size_t l, std::uint64_t count) {
  if (l == 0)
    throw ParameterError("point dimension must be at least 1");
  const std::uint64_t total = checked_power(spec.q(), l);
  if (count > total)
    throw CapacityError("requested " + std::to_string(count) + " points but F_q^l has only " +
                        std::to_string(total));
  std::vector<Point> out;
  out.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r)
    out.push_back(point_at(spec.q(), l, r));
  return out;
}

} // namespace mvcodes
