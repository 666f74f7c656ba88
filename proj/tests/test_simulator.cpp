#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "mvcodes/simulator.hpp"

using namespace mvcodes;

namespace {

SimConfig sep_vars_config() {
  return SimConfig::parse("field = 2\n"
                          "construction = sep-vars mprime=5 nprime=5 F=8\n"
                          "r = 8\ns = 32\nt = 8\nN = 1024\nseed = 7\n");
}

} // namespace

TEST_CASE("config parsing", "[simulator]") {
  const auto c = SimConfig::parse("# comment\n"
                                  "field = 2^3/11\n"
                                  "construction = matdot-half l=3 F=17 d=3,3,3   # trailing\n"
                                  "r = 4\n s = 112 \nt=4\nN = 512\n"
                                  "straggler.kind = latency\nstraggler.param = 0.25\nseed = 3\ntrials = 5\n");
  REQUIRE(c.field == "2^3/11");
  REQUIRE(c.construction == "matdot-half l=3 F=17 d=3,3,3");
  REQUIRE(c.s == 112);
  REQUIRE(c.straggler == StragglerKind::latency);
  REQUIRE(c.trials == 5);
  REQUIRE(SimConfig::parse(c.to_string()).to_string() == c.to_string());
  REQUIRE_THROWS_AS(SimConfig::parse("bogus = 1\n"), ParseError);
  REQUIRE_THROWS_AS(SimConfig::parse("r = -1\n"), ParseError);
  REQUIRE_THROWS_AS(SimConfig::parse("r\n"), ParseError);
  REQUIRE_THROWS_AS(SimConfig::parse("straggler.kind = gremlins\n"), ParseError);
}

TEST_CASE("plan", "[simulator]") {
  const auto p = plan(sep_vars_config());
  REQUIRE(p.kappa() == 256);
  REQUIRE(p.threshold == 961);
  REQUIRE(p.payloads.size() == 1024);
  REQUIRE(p.payloads[5].point.to_string() == "0,0,0,0,0,0,0,1,0,1");

  SimConfig box;
  box.field = "19";
  box.construction = "poly-box m=2,2 n=6,6";
  box.N = 361;
  REQUIRE(plan(box).threshold == 298);

  SimConfig trivial;
  trivial.construction = "poly-box m=1 n=1";
  trivial.N = 1;
  const auto t = plan(trivial);
  REQUIRE(t.threshold == 1);
  REQUIRE(t.payloads.size() == 1);

  box.N = 297;
  try {
    (void)plan(box);
    FAIL("expected Infeasible");
  } catch (const Infeasible& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("297") != std::string::npos);
    REQUIRE(msg.find("298") != std::string::npos);
  }
  box.N = 400;
  REQUIRE_THROWS_AS(plan(box), ParameterError);
}

TEST_CASE("matdot plans keep the designed threshold alongside the actual one", "[simulator]") {
  SimConfig c;
  c.field = "8";
  c.construction = "matdot-half l=3 F=17";
  c.r = 4;
  c.s = 112;
  c.t = 4;
  const auto p = plan(c);
  REQUIRE(p.mode == CodeMode::matdot);
  REQUIRE(p.designed_threshold == 496);
  REQUIRE(p.threshold <= p.designed_threshold);
  REQUIRE(p.payloads[0].a.cols == 2);
  REQUIRE(p.payloads[0].b.rows == 2);
}

TEST_CASE("adversarial drops at and beyond the tolerance", "[simulator]") {
  auto c = sep_vars_config();
  c.straggler = StragglerKind::adversarial;
  c.straggler_param = "count:63";
  const auto ok = run(c);
  REQUIRE(ok.success);
  REQUIRE(ok.decoded_equals_oracle);
  REQUIRE(ok.responses_used == 961);
  REQUIRE(ok.responders == 961);
  REQUIRE(ok.responses_used >= ok.kappa);

  c.straggler_param = "count:64";
  const auto bad = run(c);
  REQUIRE_FALSE(bad.success);
  REQUIRE(bad.deficit == 1);
  REQUIRE(bad.responses_used == 960);
  REQUIRE(bad.failure.find("deficit 1") != std::string::npos);

  std::string list;
  for (int w = 0; w < 63; ++w)
    list += (w ? "," : "") + std::to_string(w * 16);
  c.straggler_param = list;
  const auto listed = run(c);
  REQUIRE(listed.success);
  for (int w = 0; w < 63; ++w)
    REQUIRE(listed.workers[w * 16].state == WorkerState::dropped);

  c.straggler_param = "1024";
  REQUIRE_THROWS_AS(run(c), ParameterError);
}

TEST_CASE("no drops uses exactly the first k+1 workers", "[simulator]") {
  auto c = sep_vars_config();
  c.straggler = StragglerKind::random;
  c.straggler_param = "0";
  const auto r = run(c);
  REQUIRE(r.success);
  REQUIRE(r.responses_used == 961);
  for (std::size_t w = 0; w < 1024; ++w)
    REQUIRE(r.workers[w].state == (w < 961 ? WorkerState::used : WorkerState::unused));
  REQUIRE(r.stats.ops_per_entry() <= 3 * (256ull * 256 * 256 + 256ull * 961));
}

TEST_CASE("latency ties go to the lower worker index", "[simulator]") {
  SimConfig c;
  c.field = "5";
  c.construction = "poly-box m=2 n=2";
  c.r = c.s = c.t = 2;
  c.straggler = StragglerKind::latency;
  c.straggler_param = "0.3";
  c.seed = 11;
  const auto r = run(c);
  REQUIRE(r.success);
  std::vector<std::size_t> used;
  std::uint64_t last = 0;
  for (const auto& w : r.workers)
    if (w.state == WorkerState::used) {
      used.push_back(w.worker);
      last = std::max(last, w.tick);
    }
  REQUIRE(used.size() == r.threshold);
  for (const auto& w : r.workers)
    if (w.state == WorkerState::unused) {
      REQUIRE(w.tick >= last);
      if (w.tick == last)
        REQUIRE(w.worker > used.back());
    }
  c.straggler_param = "0";
  REQUIRE_THROWS_AS(run(c), ParameterError);
  c.straggler_param = "fast";
  REQUIRE_THROWS_AS(run(c), ParseError);
}

TEST_CASE("determinism", "[simulator]") {
  SimConfig c;
  c.field = "2^3/11";
  c.construction = "matdot-half l=3 F=17 d=3,3,3";
  c.r = 4;
  c.s = 112;
  c.t = 4;
  c.N = 512;
  c.straggler = StragglerKind::latency;
  c.straggler_param = "0.25";
  c.seed = 3;
  c.trials = 4;
  const auto a = run(c), b = run(c);
  REQUIRE(a.success);
  REQUIRE(a.transcript == b.transcript);
  REQUIRE(a.min_success_responses.has_value());
  REQUIRE(*a.min_success_responses >= a.kappa);
  c.seed = 4;
  REQUIRE(run(c).transcript != a.transcript);
}

TEST_CASE("decoding ignores arrival order", "[simulator]") {
  SimConfig c;
  c.field = "19";
  c.construction = "poly-box m=2,2 n=6,6";
  c.r = 8;
  c.s = 5;
  c.t = 72;
  const auto p = plan(c);
  std::vector<std::size_t> ws(p.N);
  std::iota(ws.begin(), ws.end(), 0);
  std::mt19937_64 rng(2);
  std::shuffle(ws.begin(), ws.end(), rng);
  ws.resize(p.threshold);
  std::vector<WorkerResponse> rs;
  for (auto w : ws)
    rs.push_back(compute(p.payloads[w]));
  const auto first = decode_product(p, rs);
  std::shuffle(rs.begin(), rs.end(), rng);
  REQUIRE(decode_product(p, rs) == first);
  REQUIRE(first == matmul(p.A, p.B));
}

TEST_CASE("sweep", "[simulator]") {
  SimConfig base;
  base.field = "8";
  base.construction = "matdot-half l=3 F=1";
  base.r = 2;
  base.s = 3;
  base.t = 2;
  std::vector<std::map<std::string, std::string>> grid;
  for (int F : {1, 9, 17, 25, 33, 41, 49, 57})
    grid.push_back({{"construction", "matdot-half l=3 F=" + std::to_string(F)}});
  const auto cells = sweep(base, grid);
  REQUIRE(cells.size() == 8);
  for (const auto& cell : cells) {
    CAPTURE(cell.index, cell.error);
    REQUIRE(cell.report.has_value());
    REQUIRE(cell.report->success);
  }

  REQUIRE(sweep(base, {}).empty());

  grid = {{{"N", "512"}}, {{"N", "3"}}, {{"r", "x"}}, {{"N", "500"}}};
  const auto mixed = sweep(base, grid);
  REQUIRE(mixed[0].report->success);
  REQUIRE(mixed[1].infeasible);
  REQUIRE_FALSE(mixed[1].report.has_value());
  REQUIRE_FALSE(mixed[2].infeasible);
  REQUIRE_FALSE(mixed[2].error.empty());
  REQUIRE(mixed[3].report->success);
}

TEST_CASE("removable coordinates are projected away", "[simulator]") {
  SimConfig c;
  c.field = "8";
  c.construction = "matdot-half l=3 F=1 d=0,3,3";
  c.r = c.s = c.t = 3;
  const auto p = plan(c);
  REQUIRE(std::get<MatdotSolution>(p.solution).l == 2);
  REQUIRE(p.N == 64);
  REQUIRE(p.warnings.size() == 1);
  REQUIRE(run(p).success);
}
