#pragma once

// Encoding of block-partitioned operands as multivariate polynomials,
// evaluation at worker points, and recovery of the product from any
// k+1 worker responses.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mvcodes/constructions.hpp"
#include "mvcodes/errors.hpp"
#include "mvcodes/exponents.hpp"
#include "mvcodes/finite_field.hpp"

namespace mvcodes {

/// Uniform integer in [0, n) by rejection sampling on raw 64-bit draws.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0)
    throw ParameterError("uniform_below(0)");
  const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
  while (true) {
    const std::uint64_t x = rng();
    if (x >= threshold)
      return x % n;
  }
}

/// Dense row-major matrix of field indices.
struct MatrixFq {
  FieldSpec spec;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<elem_t> data;

  MatrixFq() = default;
  MatrixFq(FieldSpec s, std::size_t r, std::size_t c) : spec(std::move(s)), rows(r), cols(c), data(r * c, 0) {}

  static MatrixFq identity(const FieldSpec& s, std::size_t n) {
    MatrixFq m(s, n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = 1;
    return m;
  }

  static MatrixFq random(const FieldSpec& s, std::size_t r, std::size_t c, std::mt19937_64& rng) {
    MatrixFq m(s, r, c);
    for (auto& x : m.data)
      x = static_cast<elem_t>(uniform_below(rng, s.q()));
    return m;
  }

  elem_t& operator()(std::size_t i, std::size_t j) noexcept { return data[i * cols + j]; }
  elem_t operator()(std::size_t i, std::size_t j) const noexcept { return data[i * cols + j]; }

  std::span<elem_t> row(std::size_t i) noexcept { return {data.data() + i * cols, cols}; }
  std::span<const elem_t> row(std::size_t i) const noexcept { return {data.data() + i * cols, cols}; }

  bool is_zero() const noexcept {
    return std::all_of(data.begin(), data.end(), [](elem_t x) { return x == 0; });
  }

  friend bool operator==(const MatrixFq& a, const MatrixFq& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data && (a.data.empty() || a.spec == b.spec);
  }
};

/// Schoolbook product; the ground truth for every recovery check.
inline MatrixFq matmul(const MatrixFq& A, const MatrixFq& B) {
  if (!(A.spec == B.spec))
    throw SpecMismatch("matmul over different fields: " + A.spec.to_string() + " vs " + B.spec.to_string());
  if (A.cols != B.rows)
    throw ShapeError("matmul shape mismatch: " + std::to_string(A.rows) + "x" + std::to_string(A.cols) + " times " +
                     std::to_string(B.rows) + "x" + std::to_string(B.cols));
  MatrixFq C(A.spec, A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k)
      A.spec.axpy(C.row(i), A(i, k), B.row(k));
  return C;
}

inline void write_matrix(std::ostream& os, const MatrixFq& M) {
  os << M.rows << ' ' << M.cols << ' ' << M.spec.to_string() << '\n';
  for (std::size_t i = 0; i < M.rows; ++i) {
    for (std::size_t j = 0; j < M.cols; ++j)
      os << (j ? " " : "") << M(i, j);
    os << '\n';
  }
}

inline MatrixFq read_matrix(std::istream& is) {
  std::size_t r = 0, c = 0;
  std::string fs;
  if (!(is >> r >> c >> fs))
    throw ParseError("matrix header must read 'rows cols fieldspec'");
  MatrixFq M(FieldSpec::parse(fs), r, c);
  for (auto& x : M.data) {
    std::uint64_t v = 0;
    if (!(is >> v))
      throw ParseError("matrix body ends early");
    M.spec.check_index(v);
    x = static_cast<elem_t>(v);
  }
  return M;
}

// ---------------------------------------------------------------------------
// Block splitting

enum class CodeMode { poly, matdot };

inline const char* to_string(CodeMode m) { return m == CodeMode::poly ? "poly" : "matdot"; }

enum class SplitAxis { rows, cols };

/// One operand cut into equal blocks along an axis, zero-padded to a multiple.
struct BlockSplit {
  SplitAxis axis = SplitAxis::rows;
  std::size_t parts = 1;
  std::size_t original = 0; // extent along the split axis before padding
  std::size_t padding = 0;
  std::vector<MatrixFq> blocks;

  std::size_t block_extent() const noexcept { return (original + padding) / parts; }
};

inline BlockSplit split_operand(const MatrixFq& M, SplitAxis axis, std::size_t parts) {
  if (parts == 0)
    throw ParameterError("block count must be at least 1");
  BlockSplit s;
  s.axis = axis;
  s.parts = parts;
  s.original = axis == SplitAxis::rows ? M.rows : M.cols;
  const std::size_t ext = (s.original + parts - 1) / parts;
  s.padding = ext * parts - s.original;
  for (std::size_t p = 0; p < parts; ++p) {
    if (axis == SplitAxis::rows) {
      MatrixFq b(M.spec, ext, M.cols);
      for (std::size_t i = 0; i < ext && p * ext + i < M.rows; ++i)
        std::copy_n(M.row(p * ext + i).begin(), M.cols, b.row(i).begin());
      s.blocks.push_back(std::move(b));
    } else {
      MatrixFq b(M.spec, M.rows, ext);
      for (std::size_t i = 0; i < M.rows; ++i)
        for (std::size_t j = 0; j < ext && p * ext + j < M.cols; ++j)
          b(i, j) = M(i, p * ext + j);
      s.blocks.push_back(std::move(b));
    }
  }
  return s;
}

/// Concatenates the blocks and drops the padding.
inline MatrixFq reassemble(const BlockSplit& s) {
  if (s.blocks.empty())
    throw EmptyInput("no blocks to reassemble");
  const auto& b0 = s.blocks.front();
  const std::size_t ext = s.block_extent();
  if (s.axis == SplitAxis::rows) {
    MatrixFq M(b0.spec, s.original, b0.cols);
    for (std::size_t i = 0; i < s.original; ++i)
      std::copy_n(s.blocks[i / ext].row(i % ext).begin(), b0.cols, M.row(i).begin());
    return M;
  }
  MatrixFq M(b0.spec, b0.rows, s.original);
  for (std::size_t i = 0; i < b0.rows; ++i)
    for (std::size_t j = 0; j < s.original; ++j)
      M(i, j) = s.blocks[j / ext](i, j % ext);
  return M;
}

/// Poly mode: A by rows into m, B by columns into n. Matdot mode: A by columns
/// and B by rows, both into m (n is ignored).
inline std::pair<BlockSplit, BlockSplit> split(const MatrixFq& A, const MatrixFq& B, CodeMode mode, std::size_t m,
                                               std::size_t n) {
  if (!(A.spec == B.spec))
    throw SpecMismatch("operands over different fields");
  if (A.cols != B.rows)
    throw ShapeError("inner dimensions differ: A has " + std::to_string(A.cols) + " columns, B has " +
                     std::to_string(B.rows) + " rows");
  if (mode == CodeMode::poly)
    return {split_operand(A, SplitAxis::rows, m), split_operand(B, SplitAxis::cols, n)};
  return {split_operand(A, SplitAxis::cols, m), split_operand(B, SplitAxis::rows, m)};
}

// ---------------------------------------------------------------------------
// Encoding and evaluation

/// p(x) = sum_k blocks[k] x^{support[k]} with support in lexicographic order.
struct EncodedOperand {
  FieldSpec spec;
  ExponentSet support;
  std::vector<MatrixFq> blocks;
};

inline EncodedOperand encode(std::vector<MatrixFq> blocks, const ExponentSet& D) {
  if (blocks.size() != D.size())
    throw ParameterError("encode: " + std::to_string(blocks.size()) + " blocks for " + std::to_string(D.size()) +
                         " exponents");
  if (blocks.empty())
    throw EmptyInput("encode: no blocks");
  const auto& spec = blocks.front().spec;
  if (spec.q() != D.q())
    throw SpecMismatch("exponent set over q = " + std::to_string(D.q()) + " used with field " + spec.to_string());
  for (const auto& b : blocks)
    if (!(b.spec == spec) || b.rows != blocks.front().rows || b.cols != blocks.front().cols)
      throw ShapeError("encode: blocks differ in field or shape");
  return {spec, D, std::move(blocks)};
}

/// Encodes both operands for a solution. Poly mode pairs blocks with D_A and D_B in
/// lexicographic order; matdot mode puts B_i at the partner exponent of A_i's.
inline std::pair<EncodedOperand, EncodedOperand> encode_operands(const Solution& sol, const BlockSplit& sa,
                                                                 const BlockSplit& sb) {
  if (const auto* ps = std::get_if<PolySolution>(&sol))
    return {encode(sa.blocks, ps->da), encode(sb.blocks, ps->db)};
  const auto& ms = std::get<MatdotSolution>(sol);
  if (sa.blocks.size() != ms.m() || sb.blocks.size() != ms.m())
    throw ParameterError("matdot split has " + std::to_string(sa.blocks.size()) + " blocks for m = " +
                         std::to_string(ms.m()));
  std::vector<MatrixFq> bblocks(sb.blocks.size());
  for (std::size_t i = 0; i < ms.pairs.size(); ++i)
    bblocks[ms.db.index_of(ms.pairs[i].b)] = sb.blocks[ms.da.index_of(ms.pairs[i].a)];
  return {encode(sa.blocks, ms.da), encode(std::move(bblocks), ms.db)};
}

/// Values of x^c at P for every c in S (0^0 = 1).
inline std::vector<elem_t> monomial_values(const FieldSpec& spec, const ExponentSet& S, const Point& P) {
  if (P.dim() != S.l())
    throw ParameterError("point of dimension " + std::to_string(P.dim()) + " for exponents of length " +
                         std::to_string(S.l()));
  const std::uint32_t q = spec.q();
  std::vector<elem_t> pw(P.dim() * q);
  for (std::size_t i = 0; i < P.dim(); ++i) {
    pw[i * q] = 1;
    for (std::uint32_t e = 1; e < q; ++e)
      pw[i * q + e] = spec.mul(pw[i * q + e - 1], P.coords[i]);
  }
  std::vector<elem_t> out(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) {
    elem_t v = 1;
    for (std::size_t i = 0; i < P.dim() && v != 0; ++i)
      v = spec.mul(v, pw[i * q + S[k][i]]);
    out[k] = v;
  }
  return out;
}

inline MatrixFq evaluate(const EncodedOperand& op, const Point& P) {
  const auto vals = monomial_values(op.spec, op.support, P);
  MatrixFq out(op.spec, op.blocks.front().rows, op.blocks.front().cols);
  for (std::size_t k = 0; k < vals.size(); ++k)
    op.spec.axpy(out.data, vals[k], op.blocks[k].data);
  return out;
}

struct WorkerPayload {
  std::size_t worker = 0;
  Point point;
  MatrixFq a;
  MatrixFq b;
};

struct WorkerResponse {
  std::size_t worker = 0;
  MatrixFq value;
};

inline WorkerResponse compute(const WorkerPayload& p) { return {p.worker, matmul(p.a, p.b)}; }

// ---------------------------------------------------------------------------
// Interpolation

/// G has entry (c, j) = P_j^{support[c]}; any k+1 columns have rank kappa.
struct InterpolationSystem {
  FieldSpec spec;
  ExponentSet support;
  std::vector<Point> points;
  std::vector<elem_t> G; // kappa x |points|, row-major
  std::uint64_t threshold = 0; // k + 1

  std::size_t kappa() const noexcept { return support.size(); }
  std::size_t num_points() const noexcept { return points.size(); }
  elem_t at(std::size_t c, std::size_t j) const noexcept { return G[c * points.size() + j]; }

  std::vector<elem_t> column(std::size_t j) const {
    std::vector<elem_t> v(kappa());
    for (std::size_t c = 0; c < kappa(); ++c)
      v[c] = at(c, j);
    return v;
  }
};

struct BuildOptions {
  bool verify_rank = true;
  std::uint64_t limit = std::uint64_t{1} << 27; // entries of G
};

namespace detail {

/// Incremental row echelon basis used for rank tests and column selection.
class EchelonBasis {
public:
  EchelonBasis(const FieldSpec& spec, std::size_t width) : spec_(spec), width_(width) {}

  std::size_t rank() const noexcept { return rows_.size(); }

  /// Reduces v against the basis; adds it when independent. Counts mul-adds into ops.
  bool insert(std::vector<elem_t> v, std::uint64_t& ops) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const elem_t c = v[pivots_[r]];
      if (c != 0) {
        spec_.axpy(v, spec_.neg(c), rows_[r]);
        ops += width_;
      }
    }
    std::size_t p = 0;
    while (p < width_ && v[p] == 0)
      ++p;
    if (p == width_)
      return false;
    spec_.scale(v, spec_.inv(v[p]));
    ops += width_;
    rows_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
  }

private:
  FieldSpec spec_;
  std::size_t width_;
  std::vector<std::vector<elem_t>> rows_;
  std::vector<std::size_t> pivots_;
};

/// In-place Gauss-Jordan inverse of an n x n row-major matrix. Returns false if singular.
inline bool invert_in_place(const FieldSpec& spec, std::vector<elem_t>& a, std::size_t n, std::uint64_t& ops) {
  std::vector<std::size_t> perm(n);
  std::vector<elem_t> tmp(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p * n + k] == 0)
      ++p;
    if (p == n)
      return false;
    perm[k] = p;
    if (p != k)
      std::swap_ranges(a.begin() + k * n, a.begin() + (k + 1) * n, a.begin() + p * n);
    std::span<elem_t> rk(a.data() + k * n, n);
    const elem_t piv = spec.inv(rk[k]);
    rk[k] = 1;
    spec.scale(rk, piv);
    ops += n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k)
        continue;
      std::span<elem_t> ri(a.data() + i * n, n);
      const elem_t f = ri[k];
      if (f == 0)
        continue;
      ri[k] = 0;
      spec.axpy(ri, spec.neg(f), rk);
      ops += n;
    }
  }
  for (std::size_t k = n; k-- > 0;)
    if (perm[k] != k)
      for (std::size_t i = 0; i < n; ++i)
        std::swap(a[i * n + k], a[i * n + perm[k]]);
  return true;
}

/// Solves M x = rhs for square M (row-major, destroyed). Returns false if singular.
inline bool solve_in_place(const FieldSpec& spec, std::vector<elem_t>& M, std::vector<elem_t>& rhs, std::size_t n,
                           std::uint64_t& ops) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && M[p * n + k] == 0)
      ++p;
    if (p == n)
      return false;
    if (p != k) {
      std::swap_ranges(M.begin() + k * n, M.begin() + (k + 1) * n, M.begin() + p * n);
      std::swap(rhs[k], rhs[p]);
    }
    const elem_t piv = spec.inv(M[k * n + k]);
    std::span<elem_t> rk(M.data() + k * n + k, n - k);
    spec.scale(rk, piv);
    rhs[k] = spec.mul(rhs[k], piv);
    ops += n - k;
    for (std::size_t i = k + 1; i < n; ++i) {
      const elem_t f = M[i * n + k];
      if (f == 0)
        continue;
      const elem_t nf = spec.neg(f);
      spec.axpy(std::span<elem_t>(M.data() + i * n + k, n - k), nf, rk);
      rhs[i] = spec.add(rhs[i], spec.mul(nf, rhs[k]));
      ops += n - k + 1;
    }
  }
  for (std::size_t k = n; k-- > 0;)
    for (std::size_t j = k + 1; j < n; ++j)
      if (M[k * n + j] != 0) {
        rhs[k] = spec.sub(rhs[k], spec.mul(M[k * n + j], rhs[j]));
        ++ops;
      }
  return true;
}

} // namespace detail

/// Builds G for the monomials of `support` over the given points.
inline InterpolationSystem build_system(const FieldSpec& spec, const ExponentSet& support, std::vector<Point> points,
                                        const BuildOptions& opts = {}) {
  if (support.empty())
    throw EmptyInput("interpolation support is empty");
  if (spec.q() != support.q())
    throw SpecMismatch("support over q = " + std::to_string(support.q()) + " with field " + spec.to_string());
  InterpolationSystem sys;
  sys.spec = spec;
  sys.support = support;
  sys.threshold = checked_power(support.q(), support.l()) - fb(support).value + 1;
  if (points.size() < sys.threshold)
    throw Infeasible(std::to_string(points.size()) + " points cannot reach the recovery threshold " +
                     std::to_string(sys.threshold));
  {
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParameterError("evaluation points are not distinct");
  }
  const std::size_t kappa = support.size();
  const std::size_t N = points.size();
  if (std::uint64_t{kappa} * N > opts.limit)
    throw CapacityError("generator matrix of " + std::to_string(kappa) + " x " + std::to_string(N) +
                        " entries exceeds limit");
  sys.G.assign(kappa * N, 0);
  for (std::size_t j = 0; j < N; ++j) {
    const auto v = monomial_values(spec, support, points[j]);
    for (std::size_t c = 0; c < kappa; ++c)
      sys.G[c * N + j] = v[c];
  }
  sys.points = std::move(points);
  if (opts.verify_rank) {
    detail::EchelonBasis basis(spec, kappa);
    std::uint64_t ops = 0;
    for (std::size_t j = 0; j < N && basis.rank() < kappa; ++j)
      basis.insert(sys.column(j), ops);
    if (basis.rank() < kappa)
      throw InternalConsistency("generator matrix has rank " + std::to_string(basis.rank()) + " < " +
                                std::to_string(kappa));
  }
  return sys;
}

struct DecodeOptions {
  // Attempt recovery with fewer than k+1 responses (diagnostic probes only).
  bool allow_below_threshold = false;
};

struct DecodeStats {
  std::size_t responses_given = 0;
  std::size_t responses_examined = 0;
  std::vector<std::size_t> selected; // workers whose columns were used
  std::uint64_t selection_ops = 0;
  std::uint64_t solve_ops = 0;
  std::uint64_t apply_ops = 0;
  std::size_t entries = 0;

  std::uint64_t system_ops() const noexcept { return selection_ops + solve_ops; }
  /// Mul-adds to solve the system plus those for one matrix entry.
  std::uint64_t ops_per_entry() const noexcept {
    return system_ops() + (entries ? apply_ops / entries : 0);
  }
};

using CoefficientMap = std::map<ExponentVector, MatrixFq>;

namespace detail {

inline void check_responses(const InterpolationSystem& sys, const std::vector<WorkerResponse>& responses,
                            const DecodeOptions& opts) {
  std::vector<char> seen(sys.num_points(), 0);
  for (const auto& r : responses) {
    if (r.worker >= sys.num_points())
      throw ParameterError("response from unknown worker " + std::to_string(r.worker));
    if (seen[r.worker]++)
      throw ParameterError("duplicate response from worker " + std::to_string(r.worker));
    if (r.value.rows != responses.front().value.rows || r.value.cols != responses.front().value.cols)
      throw ShapeError("responses differ in shape");
  }
  if (responses.size() < sys.threshold && !opts.allow_below_threshold)
    throw InsufficientResponses(responses.size(), sys.threshold);
  if (responses.empty())
    throw InsufficientResponses(0, sys.threshold);
}

/// Picks kappa responses with independent columns, in arrival order.
inline std::vector<std::size_t> select_responses(const InterpolationSystem& sys,
                                                 const std::vector<WorkerResponse>& responses, DecodeStats& st) {
  const std::size_t kappa = sys.kappa();
  detail::EchelonBasis basis(sys.spec, kappa);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < responses.size() && chosen.size() < kappa; ++i) {
    ++st.responses_examined;
    if (basis.insert(sys.column(responses[i].worker), st.selection_ops))
      chosen.push_back(i);
  }
  if (chosen.size() < kappa) {
    if (responses.size() >= sys.threshold)
      throw InternalConsistency("responses at or above the threshold span rank " + std::to_string(chosen.size()) +
                                " < " + std::to_string(kappa));
    throw RankDeficient(chosen.size(), kappa);
  }
  for (auto i : chosen)
    st.selected.push_back(responses[i].worker);
  return chosen;
}

/// Row r of the returned kappa x kappa matrix holds the monomial values at the r-th chosen point.
inline std::vector<elem_t> chosen_rows(const InterpolationSystem& sys, const std::vector<WorkerResponse>& responses,
                                       const std::vector<std::size_t>& chosen) {
  const std::size_t kappa = sys.kappa();
  std::vector<elem_t> Mt(kappa * kappa);
  for (std::size_t r = 0; r < kappa; ++r)
    for (std::size_t c = 0; c < kappa; ++c)
      Mt[r * kappa + c] = sys.at(c, responses[chosen[r]].worker);
  return Mt;
}

} // namespace detail

/// Recovers every coefficient of h on the support from the responses.
inline CoefficientMap interpolate(const InterpolationSystem& sys, const std::vector<WorkerResponse>& responses,
                                  const DecodeOptions& opts = {}, DecodeStats* stats = nullptr) {
  detail::check_responses(sys, responses, opts);
  DecodeStats st;
  st.responses_given = responses.size();
  const auto chosen = detail::select_responses(sys, responses, st);
  const std::size_t kappa = sys.kappa();
  auto W = detail::chosen_rows(sys, responses, chosen);
  if (!detail::invert_in_place(sys.spec, W, kappa, st.solve_ops))
    throw InternalConsistency("selected interpolation matrix is singular");
  const auto& shape = responses.front().value;
  st.entries = shape.data.size();
  CoefficientMap out;
  for (std::size_t c = 0; c < kappa; ++c) {
    MatrixFq coef(sys.spec, shape.rows, shape.cols);
    for (std::size_t r = 0; r < kappa; ++r) {
      const elem_t w = W[c * kappa + r];
      if (w == 0)
        continue;
      sys.spec.axpy(coef.data, w, responses[chosen[r]].value.data);
      st.apply_ops += coef.data.size();
    }
    out.emplace(sys.support[c], std::move(coef));
  }
  if (stats)
    *stats = std::move(st);
  return out;
}

/// Recovers only the coefficient at x^target, solving for a single row of the inverse.
inline MatrixFq interpolate_coefficient(const InterpolationSystem& sys, const std::vector<WorkerResponse>& responses,
                                        const ExponentVector& target, const DecodeOptions& opts = {},
                                        DecodeStats* stats = nullptr) {
  if (!sys.support.contains(target))
    throw IncompleteRecovery("exponent " + target.to_string() + " is not in the interpolation support");
  detail::check_responses(sys, responses, opts);
  DecodeStats st;
  st.responses_given = responses.size();
  const auto chosen = detail::select_responses(sys, responses, st);
  const std::size_t kappa = sys.kappa();
  auto Mt = detail::chosen_rows(sys, responses, chosen);
  // w^T Mt = e_target, i.e. Mt^T w = e_target
  std::vector<elem_t> M(kappa * kappa);
  for (std::size_t r = 0; r < kappa; ++r)
    for (std::size_t c = 0; c < kappa; ++c)
      M[c * kappa + r] = Mt[r * kappa + c];
  std::vector<elem_t> w(kappa, 0);
  w[sys.support.index_of(target)] = 1;
  if (!detail::solve_in_place(sys.spec, M, w, kappa, st.solve_ops))
    throw InternalConsistency("selected interpolation matrix is singular");
  const auto& shape = responses.front().value;
  st.entries = shape.data.size();
  MatrixFq coef(sys.spec, shape.rows, shape.cols);
  for (std::size_t r = 0; r < kappa; ++r) {
    if (w[r] == 0)
      continue;
    sys.spec.axpy(coef.data, w[r], responses[chosen[r]].value.data);
    st.apply_ops += coef.data.size();
  }
  if (stats)
    *stats = std::move(st);
  return coef;
}

/// Assembles A*B from the block products A_i B_j sitting at (a_i + b_j)_q.
inline MatrixFq extract_poly(const CoefficientMap& coeffs, const PolySolution& sol, const BlockSplit& sa,
                             const BlockSplit& sb) {
  if (sa.parts != sol.m() || sb.parts != sol.n())
    throw ParameterError("split block counts do not match the solution");
  const MatrixFq* first = nullptr;
  std::vector<const MatrixFq*> grid(sol.m() * sol.n());
  for (std::size_t i = 0; i < sol.m(); ++i)
    for (std::size_t j = 0; j < sol.n(); ++j) {
      const auto key = reduce_q_sum(sol.da[i], sol.db[j], sol.q);
      auto it = coeffs.find(key);
      if (it == coeffs.end())
        throw IncompleteRecovery("coefficient at " + key.to_string() + " missing for block (" + std::to_string(i) +
                                 "," + std::to_string(j) + ")");
      grid[i * sol.n() + j] = &it->second;
      first = &it->second;
    }
  const std::size_t br = first->rows, bc = first->cols;
  MatrixFq out(first->spec, sa.original, sb.original);
  for (std::size_t i = 0; i < sa.original; ++i)
    for (std::size_t j = 0; j < sb.original; ++j)
      out(i, j) = (*grid[(i / br) * sol.n() + j / bc])(i % br, j % bc);
  return out;
}

/// In matdot mode the coefficient at x^d already is the r x t product.
inline MatrixFq extract_matdot(const CoefficientMap& coeffs, const ExponentVector& d) {
  auto it = coeffs.find(d);
  if (it == coeffs.end())
    throw IncompleteRecovery("coefficient at " + d.to_string() + " missing");
  return it->second;
}

// ---------------------------------------------------------------------------
// Response transcripts: "worker point-coords v1 v2 ..." per line.

inline void write_response(std::ostream& os, const InterpolationSystem& sys, const WorkerResponse& r) {
  os << r.worker << ' ' << sys.points.at(r.worker).to_string();
  for (auto v : r.value.data)
    os << ' ' << v;
  os << '\n';
}

/// Reads responses, checking each recorded point against the system's point list.
inline std::vector<WorkerResponse> read_responses(std::istream& is, const InterpolationSystem& sys, std::size_t rows,
                                                  std::size_t cols) {
  std::vector<WorkerResponse> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream in(line);
    WorkerResponse r;
    std::string pt;
    if (!(in >> r.worker >> pt))
      throw ParseError("bad transcript line '" + line + "'");
    if (r.worker >= sys.num_points() || sys.points[r.worker].to_string() != pt)
      throw ParseError("transcript point " + pt + " does not match worker " + std::to_string(r.worker));
    r.value = MatrixFq(sys.spec, rows, cols);
    for (auto& x : r.value.data) {
      std::uint64_t v = 0;
      if (!(in >> v))
        throw ParseError("transcript line for worker " + std::to_string(r.worker) + " is short");
      sys.spec.check_index(v);
      x = static_cast<elem_t>(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace mvcodes
