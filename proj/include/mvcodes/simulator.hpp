#pragma once

// Deterministic master/worker simulation of coded matrix multiplication.
//
// Randomness: matrices come from std::mt19937_64 seeded with `seed`, drawn
// row-major (A then B) through uniform_below. Straggler decisions come from a
// second mt19937_64 seeded with seed ^ kStragglerStream. Simulated time is
// integer ticks; ties go to the lower worker index.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mvcodes/codec.hpp"
#include "mvcodes/constructions.hpp"
#include "mvcodes/errors.hpp"
#include "mvcodes/finite_field.hpp"

namespace mvcodes {

inline constexpr std::uint64_t kStragglerStream = 0x5354524147474c45ULL;

enum class StragglerKind { none, adversarial, random, latency };

inline const char* to_string(StragglerKind k) {
  switch (k) {
  case StragglerKind::none:
    return "none";
  case StragglerKind::adversarial:
    return "adversarial";
  case StragglerKind::random:
    return "random";
  case StragglerKind::latency:
    return "latency";
  }
  return "?";
}

inline StragglerKind parse_straggler_kind(const std::string& s) {
  if (s == "none")
    return StragglerKind::none;
  if (s == "adversarial")
    return StragglerKind::adversarial;
  if (s == "random")
    return StragglerKind::random;
  if (s == "latency")
    return StragglerKind::latency;
  throw ParseError("unknown straggler kind '" + s + "' (none, adversarial, random, latency)");
}

/// straggler.param by kind:
///   adversarial  explicit worker list "3,17,40", or "count:K" for K workers drawn from the seed
///   random       per-worker drop probability in [0, 1]
///   latency      per-tick completion probability p in (0, 1]; ticks are geometric(p)
struct SimConfig {
  std::string field = "2";
  std::string construction = "poly-box m=1 n=1";
  std::size_t r = 1, s = 1, t = 1;
  std::uint64_t N = 0; // 0 means q^l
  StragglerKind straggler = StragglerKind::none;
  std::string straggler_param;
  std::uint64_t seed = 0;
  std::size_t trials = 0;

  void set(const std::string& key, const std::string& value) {
    auto num = [&](const std::string& v) -> std::uint64_t {
      std::uint64_t out = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
      if (ec != std::errc{} || p != v.data() + v.size())
        throw ParseError("config key '" + key + "' expects a natural number, got '" + v + "'");
      return out;
    };
    if (key == "field")
      field = value;
    else if (key == "construction")
      construction = value;
    else if (key == "r")
      r = num(value);
    else if (key == "s")
      s = num(value);
    else if (key == "t")
      t = num(value);
    else if (key == "N")
      N = num(value);
    else if (key == "straggler.kind")
      straggler = parse_straggler_kind(value);
    else if (key == "straggler.param")
      straggler_param = value;
    else if (key == "seed")
      seed = num(value);
    else if (key == "trials")
      trials = num(value);
    else
      throw ParseError("unknown config key '" + key + "'");
  }

  /// Flat "key = value" lines; '#' starts a comment.
  static SimConfig parse(std::istream& is) {
    SimConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos)
        line.erase(h);
      auto trim = [](std::string x) {
        const auto b = x.find_first_not_of(" \t\r");
        if (b == std::string::npos)
          return std::string();
        return x.substr(b, x.find_last_not_of(" \t\r") - b + 1);
      };
      line = trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("config line " + std::to_string(lineno) + " is not key = value");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  static SimConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "field = " << field << "\nconstruction = " << construction << "\nr = " << r << "\ns = " << s
       << "\nt = " << t << "\nN = " << N << "\nstraggler.kind = " << mvcodes::to_string(straggler)
       << "\nstraggler.param = " << straggler_param << "\nseed = " << seed << "\ntrials = " << trials << "\n";
    return os.str();
  }
};

struct Plan {
  SimConfig cfg;
  FieldSpec spec;
  Solution solution;
  CodeMode mode = CodeMode::poly;
  std::size_t N = 0;
  std::uint64_t threshold = 0;          // k+1 from the explicit support
  std::uint64_t designed_threshold = 0; // k+1 the construction promises
  MatrixFq A, B;
  BlockSplit split_a, split_b;
  std::vector<WorkerPayload> payloads;
  InterpolationSystem system;
  std::vector<std::string> warnings;

  std::size_t kappa() const noexcept { return system.kappa(); }
};

namespace detail {

inline std::size_t solution_l(const Solution& s) {
  return std::visit([](const auto& v) { return v.l; }, s);
}

} // namespace detail

/// Resolves the construction, draws A and B, encodes, and builds the system over the first N points.
inline Plan plan(const SimConfig& cfg) {
  Plan p;
  p.cfg = cfg;
  p.spec = FieldSpec::parse(cfg.field);
  p.solution = resolve(ConstructionDescriptor::parse(cfg.construction), p.spec.q());
  if (auto* md = std::get_if<MatdotSolution>(&p.solution); md && !md->removable.empty()) {
    const std::size_t before = md->l;
    *md = project_removable(*md);
    if (md->l != before)
      p.warnings.push_back("projected away " + std::to_string(before - md->l) +
                           " coordinate(s) where every exponent vanishes");
  }
  const std::size_t l = detail::solution_l(p.solution);
  const std::uint64_t total = checked_power(p.spec.q(), l, kDefaultPointLimit);
  p.N = cfg.N == 0 ? total : cfg.N;
  if (p.N > total)
    throw ParameterError("N = " + std::to_string(p.N) + " exceeds the " + std::to_string(total) + " points of F_q^" +
                         std::to_string(l));
  if (cfg.r == 0 || cfg.s == 0 || cfg.t == 0)
    throw ParameterError("matrix dimensions must be positive");

  std::mt19937_64 rng(cfg.seed);
  p.A = MatrixFq::random(p.spec, cfg.r, cfg.s, rng);
  p.B = MatrixFq::random(p.spec, cfg.s, cfg.t, rng);

  ExponentSet support(p.spec.q(), l);
  if (const auto* ps = std::get_if<PolySolution>(&p.solution)) {
    p.mode = CodeMode::poly;
    std::tie(p.split_a, p.split_b) = split(p.A, p.B, CodeMode::poly, ps->m(), ps->n());
    support = minkowski_sum_q(ps->da, ps->db);
    p.threshold = ps->recovery_threshold();
    p.designed_threshold = p.threshold;
  } else {
    const auto& ms = std::get<MatdotSolution>(p.solution);
    p.mode = CodeMode::matdot;
    std::tie(p.split_a, p.split_b) = split(p.A, p.B, CodeMode::matdot, ms.m(), ms.m());
    support = minkowski_sum_q(ms.da, ms.db);
    p.threshold = ms.recovery_threshold();
    p.designed_threshold = ms.designed_threshold();
  }
  if (p.N < p.threshold)
    throw Infeasible("N = " + std::to_string(p.N) + " workers is below the recovery threshold k+1 = " +
                     std::to_string(p.threshold));

  const auto [pa, pb] = encode_operands(p.solution, p.split_a, p.split_b);
  auto points = first_points(p.spec, l, p.N);
  p.payloads.reserve(p.N);
  for (std::size_t i = 0; i < p.N; ++i)
    p.payloads.push_back({i, points[i], evaluate(pa, points[i]), evaluate(pb, points[i])});
  p.system = build_system(p.spec, support, std::move(points));
  if (p.system.threshold != p.threshold)
    throw InternalConsistency("system threshold disagrees with the construction");
  return p;
}

enum class WorkerState { used, unused, dropped };

inline const char* to_string(WorkerState s) {
  switch (s) {
  case WorkerState::used:
    return "used";
  case WorkerState::unused:
    return "late";
  case WorkerState::dropped:
    return "dropped";
  }
  return "?";
}

struct WorkerStatus {
  std::size_t worker = 0;
  WorkerState state = WorkerState::unused;
  std::uint64_t tick = 0; // 0 for dropped workers
};

struct PhaseTimings {
  double plan_ms = 0, compute_ms = 0, decode_ms = 0, verify_ms = 0;
};

struct SimReport {
  bool success = false;
  std::string failure;
  std::size_t responses_used = 0;
  std::size_t responders = 0;
  std::vector<WorkerStatus> workers;
  bool decoded_equals_oracle = false;
  std::uint64_t threshold = 0;
  std::uint64_t designed_threshold = 0;
  std::size_t kappa = 0;
  std::size_t deficit = 0;
  std::optional<std::size_t> min_success_responses;
  DecodeStats stats;
  std::uint64_t transmitted_elements = 0; // payload plus used responses
  std::vector<std::string> warnings;
  PhaseTimings timings; // not part of the transcript
  std::string transcript;
};

namespace detail {

inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(uniform_below(rng, std::uint64_t{1} << 53)) / static_cast<double>(std::uint64_t{1} << 53);
}

inline double parse_probability(const std::string& s, bool allow_zero) {
  double p = 0;
  try {
    std::size_t pos = 0;
    p = std::stod(s, &pos);
    if (pos != s.size())
      throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ParseError("straggler.param '" + s + "' is not a probability");
  }
  if (p > 1 || p < 0 || (!allow_zero && p == 0))
    throw ParameterError("straggler.param " + s + " is outside the admissible range");
  return p;
}

/// Fisher-Yates shuffle driven by uniform_below.
template <class T> void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

/// Completion tick per worker, 0 meaning the worker never responds.
inline std::vector<std::uint64_t> straggler_ticks(const SimConfig& cfg, std::size_t N) {
  std::vector<std::uint64_t> ticks(N, 1);
  std::mt19937_64 rng(cfg.seed ^ kStragglerStream);
  switch (cfg.straggler) {
  case StragglerKind::none:
    break;
  case StragglerKind::adversarial: {
    const auto& prm = cfg.straggler_param;
    if (prm.rfind("count:", 0) == 0) {
      const auto k = std::stoull(prm.substr(6));
      if (k > N)
        throw ParameterError("cannot drop " + std::to_string(k) + " of " + std::to_string(N) + " workers");
      std::vector<std::size_t> idx(N);
      for (std::size_t i = 0; i < N; ++i)
        idx[i] = i;
      shuffle(idx, rng);
      for (std::size_t i = 0; i < k; ++i)
        ticks[idx[i]] = 0;
    } else if (!prm.empty()) {
      for (auto w : ExponentVector::parse(prm)) {
        if (w >= N)
          throw ParameterError("dropped worker " + std::to_string(w) + " does not exist");
        ticks[w] = 0;
      }
    }
    break;
  }
  case StragglerKind::random: {
    const double p = parse_probability(cfg.straggler_param.empty() ? "0" : cfg.straggler_param, true);
    for (auto& t : ticks)
      if (unit_draw(rng) < p)
        t = 0;
    break;
  }
  case StragglerKind::latency: {
    const double p = parse_probability(cfg.straggler_param.empty() ? "0.5" : cfg.straggler_param, false);
    for (auto& t : ticks) {
      t = 1;
      while (unit_draw(rng) >= p)
        ++t;
    }
    break;
  }
  }
  return ticks;
}

/// Minimum prefix of a random arrival order whose columns reach rank kappa.
inline std::size_t rank_prefix(const InterpolationSystem& sys, std::vector<std::size_t> order) {
  EchelonBasis basis(sys.spec, sys.kappa());
  std::uint64_t ops = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    basis.insert(sys.column(order[i]), ops);
    if (basis.rank() == sys.kappa())
      return i + 1;
  }
  return order.size() + 1;
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Decodes A*B from an explicit list of responses (arrival order).
inline MatrixFq decode_product(const Plan& p, const std::vector<WorkerResponse>& responses, DecodeStats* stats = nullptr,
                               const DecodeOptions& opts = {}) {
  if (p.mode == CodeMode::poly) {
    const auto coeffs = interpolate(p.system, responses, opts, stats);
    return extract_poly(coeffs, std::get<PolySolution>(p.solution), p.split_a, p.split_b);
  }
  const auto& ms = std::get<MatdotSolution>(p.solution);
  CoefficientMap one;
  one.emplace(ms.d, interpolate_coefficient(p.system, responses, ms.d, opts, stats));
  return extract_matdot(one, ms.d);
}

inline SimReport run(const Plan& p, double plan_ms = 0) {
  SimReport rep;
  rep.timings.plan_ms = plan_ms;
  rep.threshold = p.threshold;
  rep.designed_threshold = p.designed_threshold;
  rep.kappa = p.kappa();
  rep.warnings = p.warnings;
  const auto ticks = detail::straggler_ticks(p.cfg, p.N);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < p.N; ++i)
    if (ticks[i] != 0)
      order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ticks[a] < ticks[b]; });
  rep.responders = order.size();
  const std::size_t used = std::min<std::size_t>(order.size(), p.threshold);
  rep.workers.resize(p.N);
  for (std::size_t i = 0; i < p.N; ++i)
    rep.workers[i] = {i, ticks[i] == 0 ? WorkerState::dropped : WorkerState::unused, ticks[i]};

  auto t0 = std::chrono::steady_clock::now();
  std::vector<WorkerResponse> responses;
  responses.reserve(used);
  for (std::size_t k = 0; k < used; ++k) {
    responses.push_back(compute(p.payloads[order[k]]));
    rep.workers[order[k]].state = WorkerState::used;
  }
  rep.timings.compute_ms = detail::ms_since(t0);
  rep.responses_used = used;
  for (const auto& pl : p.payloads)
    rep.transmitted_elements += pl.a.data.size() + pl.b.data.size();
  for (const auto& r : responses)
    rep.transmitted_elements += r.value.data.size();

  if (used < p.threshold) {
    rep.deficit = p.threshold - used;
    rep.failure = "insufficient responses: have " + std::to_string(used) + ", need " + std::to_string(p.threshold) +
                  " (deficit " + std::to_string(rep.deficit) + ")";
  } else {
    t0 = std::chrono::steady_clock::now();
    try {
      const auto product = decode_product(p, responses, &rep.stats);
      rep.timings.decode_ms = detail::ms_since(t0);
      t0 = std::chrono::steady_clock::now();
      rep.decoded_equals_oracle = product == matmul(p.A, p.B);
      rep.timings.verify_ms = detail::ms_since(t0);
      rep.success = rep.decoded_equals_oracle;
      if (!rep.success)
        rep.failure = "decoded product differs from the direct product";
    } catch (const Error& e) {
      rep.failure = e.what();
    }
  }

  if (p.cfg.trials > 0) {
    std::mt19937_64 rng(p.cfg.seed ^ kStragglerStream ^ 0x747269616c73ULL);
    std::vector<std::size_t> all(p.N);
    for (std::size_t i = 0; i < p.N; ++i)
      all[i] = i;
    std::size_t best = p.N + 1;
    for (std::size_t k = 0; k < p.cfg.trials; ++k) {
      detail::shuffle(all, rng);
      best = std::min(best, detail::rank_prefix(p.system, all));
    }
    if (best <= p.N) {
      rep.min_success_responses = best;
      if (best < rep.kappa)
        throw InternalConsistency("recovery succeeded with fewer than kappa responses");
    }
  }

  std::ostringstream tr;
  tr << "# transcript v1\n";
  tr << "field " << p.spec.to_string() << "\n";
  tr << "construction " << p.cfg.construction << "\n";
  tr << "shape " << p.cfg.r << " " << p.cfg.s << " " << p.cfg.t << "\n";
  tr << "seed " << p.cfg.seed << "\n";
  tr << "straggler " << to_string(p.cfg.straggler) << " " << p.cfg.straggler_param << "\n";
  tr << "workers " << p.N << " kappa " << rep.kappa << " threshold " << rep.threshold << " designed "
     << rep.designed_threshold << "\n";
  for (const auto& w : rep.workers)
    tr << "status " << w.worker << " " << to_string(w.state) << " " << w.tick << "\n";
  if (!responses.empty())
    tr << "responses " << responses.front().value.rows << " " << responses.front().value.cols << "\n";
  for (const auto& r : responses)
    write_response(tr, p.system, r);
  tr << "result " << (rep.success ? "success" : "failure") << " used " << rep.responses_used << " oracle "
     << (rep.decoded_equals_oracle ? "match" : "mismatch") << "\n";
  if (rep.min_success_responses)
    tr << "min_success " << *rep.min_success_responses << "\n";
  rep.transcript = tr.str();
  return rep;
}

inline SimReport run(const SimConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = plan(cfg);
  return run(p, detail::ms_since(t0));
}

inline void write_summary(std::ostream& os, const SimReport& r) {
  os << "result: " << (r.success ? "success" : "FAILURE") << "\n";
  if (!r.failure.empty())
    os << "reason: " << r.failure << "\n";
  os << "kappa: " << r.kappa << "\nthreshold k+1: " << r.threshold;
  if (r.designed_threshold != r.threshold)
    os << " (designed " << r.designed_threshold << ")";
  os << "\nworkers: " << r.workers.size() << " (" << r.responders << " responded, "
     << r.workers.size() - r.responders << " dropped)\n";
  os << "responses used: " << r.responses_used << "\n";
  os << "decoded equals direct product: " << (r.decoded_equals_oracle ? "yes" : "no") << "\n";
  if (r.min_success_responses)
    os << "fewest responses that sufficed in probes: " << *r.min_success_responses << "\n";
  os << "decoder mul-adds: system " << r.stats.system_ops() << ", per entry " << r.stats.ops_per_entry() << "\n";
  os << "transmitted field elements: " << r.transmitted_elements << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "time ms: plan %.1f, compute %.1f, decode %.1f, verify %.1f\n", r.timings.plan_ms,
                r.timings.compute_ms, r.timings.decode_ms, r.timings.verify_ms);
  os << buf;
  for (const auto& w : r.warnings)
    os << "warning: " << w << "\n";
}

struct SweepCell {
  std::size_t index = 0;
  std::map<std::string, std::string> overrides;
  std::optional<SimReport> report;
  bool infeasible = false;
  std::string error;
};

/// One run per grid point with seed ^ index; errors stay in their cell.
inline std::vector<SweepCell> sweep(const SimConfig& base, const std::vector<std::map<std::string, std::string>>& grid) {
  std::vector<SweepCell> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepCell cell;
    cell.index = i;
    cell.overrides = grid[i];
    try {
      SimConfig cfg = base;
      for (const auto& [k, v] : grid[i])
        cfg.set(k, v);
      cfg.seed = base.seed ^ i;
      cell.report = run(cfg);
    } catch (const Infeasible& e) {
      cell.infeasible = true;
      cell.error = e.what();
    } catch (const Error& e) {
      cell.error = e.what();
    }
    out.push_back(std::move(cell));
  }
  return out;
}

} // namespace mvcodes
