#include <catch_amalgamated.hpp>

#include <sstream>

#include "mvcodes/constructions.hpp"
#include "oracles.hpp"

using namespace mvcodes;

namespace {

ExponentSet make_set(std::uint32_t q, std::size_t l, std::vector<std::vector<exp_t>> v) {
  std::vector<ExponentVector> e;
  for (auto& x : v)
    e.emplace_back(std::move(x));
  return ExponentSet(q, l, std::move(e));
}

void require_valid(const PolySolution& s) {
  const auto r = validate_poly(s);
  REQUIRE(r.non_colliding);
  REQUIRE(r.fb_matches);
  REQUIRE(r.fb_within_xi);
  REQUIRE(r.recovery_threshold == s.recovery_threshold());
}

void require_valid(const MatdotSolution& s) {
  const auto r = validate_matdot(s);
  REQUIRE(r.exact_pairs);
  REQUIRE(r.fb_matches);
  REQUIRE(s.pairs.size() == s.m());
  for (const auto& p : s.pairs)
    REQUIRE(reduce_q_sum(p.a, p.b, s.q) == s.d);
}

} // namespace

TEST_CASE("box construction", "[constructions]") {
  const auto s = box_poly(19, {2, 2}, {6, 6});
  REQUIRE(s.m() == 4);
  REQUIRE(s.n() == 36);
  REQUIRE(s.fb.value == 64);
  REQUIRE(s.recovery_threshold() == 298);
  REQUIRE(*s.xi == 102);
  require_valid(s);

  const auto t = box_poly(25, {3, 3}, {5, 5});
  REQUIRE(t.m() == 9);
  REQUIRE(t.n() == 25);
  REQUIRE(t.fb.value == 121);
  REQUIRE(t.recovery_threshold() == 505);
  require_valid(t);

  const auto u = box_poly(7, {1, 1, 1}, {1, 1, 1});
  REQUIRE(u.m() == 1);
  REQUIRE(u.fb.value == 343);
  REQUIRE(u.recovery_threshold() == 1);

  REQUIRE_THROWS_AS(box_poly(19, {2, 4}, {6, 6}), ParameterError);
  try {
    box_poly(19, {2, 4}, {6, 6});
  } catch (const ParameterError& e) {
    REQUIRE(std::string(e.what()).find("coordinate 1") != std::string::npos);
  }
}

TEST_CASE("table 1 row m_i=5 respects the xi bound", "[constructions]") {
  const auto s = box_poly(19, {5, 5}, {2, 2});
  REQUIRE(s.fb.value == 100);
  REQUIRE(*s.xi == 143);
  require_valid(s);
}

TEST_CASE("expansion lemma", "[constructions]") {
  const auto s = expand_db(box_set(19, {2, 2}), box_set(19, {6, 6}));
  const auto b = box_poly(19, {2, 2}, {6, 6});
  REQUIRE(s.da == b.da);
  REQUIRE(s.db == b.db);
  require_valid(s);

  const auto single = expand_db(make_set(7, 2, {{0, 0}}), make_set(7, 2, {{1, 2}, {3, 0}}));
  REQUIRE(single.db == make_set(7, 2, {{1, 2}, {3, 0}}));

  const auto t = expand_db(make_set(5, 2, {{0, 0}, {1, 1}}), make_set(5, 2, {{0, 0}, {1, 0}}));
  REQUIRE(t.db == make_set(5, 2, {{0, 0}, {2, 0}}));
  REQUIRE(minkowski_sum_q(t.da, t.db).size() == 4);
  require_valid(t);

  REQUIRE_THROWS_AS(expand_db(box_set(5, {3}), box_set(5, {3})), ParameterError);
}

TEST_CASE("expansion anchors translated inputs", "[constructions]") {
  const auto s = expand_db(make_set(9, 2, {{2, 1}, {3, 1}}), make_set(9, 2, {{0, 1}, {1, 1}}));
  REQUIRE(s.shift_a == ExponentVector{2, 1});
  REQUIRE(s.da == make_set(9, 2, {{0, 0}, {1, 0}}));
  REQUIRE(s.db == make_set(9, 2, {{0, 1}, {2, 1}}));
  REQUIRE(validate_poly(s).valid());
}

TEST_CASE("better box", "[constructions]") {
  REQUIRE(better_box(19, {2, 2}, 64).n() == 48);
  REQUIRE(better_box(25, {2, 2}, 100).n() == 84);
  REQUIRE(better_box(19, {1, 1}, 40).db == hyp_set({19, 2, 40}));
  REQUIRE(db_size(19, {2}, 4) == 8);
  REQUIRE(db_size(19, {2, 2}, 64) == 48);
  REQUIRE(db_size(25, {5, 5}, 121) == 11);
  REQUIRE_THROWS_AS(better_box(5, {2, 2}, 26), Infeasible);

  for (std::uint32_t q : {7u, 11u, 19u})
    for (exp_t m = 1; m * m <= q; ++m)
      for (exp_t n = 1; m * n <= q; ++n) {
        const auto box = box_poly(q, {m, m}, {n, n});
        const auto better = better_box(q, {m, m}, box.fb.value);
        REQUIRE(better.n() >= box.n());
        require_valid(better);
      }
}

TEST_CASE("better-box recurrence matches enumeration for q <= 9, l <= 3", "[constructions]") {
  for (std::uint32_t q = 2; q <= 9; ++q)
    for (std::size_t l = 1; l <= 3; ++l)
      for (const auto& mv : oracle::all_vectors(std::min<std::uint32_t>(q, 4), l)) {
        std::vector<exp_t> m(mv.begin(), mv.end());
        for (auto& x : m)
          ++x;
        if (std::any_of(m.begin(), m.end(), [&](exp_t x) { return x > q; }))
          continue;
        for (std::uint64_t F = 0; F <= oracle::ipow(q, l) + 1; F += (l == 3 ? 7 : 1)) {
          CAPTURE(q, l, F);
          REQUIRE(db_size(q, m, F) == oracle::better_box_count(q, oracle::Vec(m.begin(), m.end()), std::max<std::uint64_t>(F, 1)));
        }
      }
}

TEST_CASE("separation of variables", "[constructions]") {
  const auto s = sep_vars(2, 5, 5, 8, 8);
  REQUIRE(s.m() == 16);
  REQUIRE(s.n() == 16);
  REQUIRE(s.recovery_threshold() == 961);
  require_valid(s);

  const auto t = sep_vars(2, 10, 10, 64, 64);
  REQUIRE(t.m() == 386);
  REQUIRE(t.recovery_threshold() == 1044481);

  const auto u = sep_vars(64, 1, 1, 32, 32);
  REQUIRE(u.m() == 33);
  REQUIRE(u.recovery_threshold() == 3073);
  require_valid(u);

  const auto v = sep_vars(5, 2, 1, 6, 2);
  REQUIRE(v.fb.value >= 12);
  REQUIRE(v.m() == hyp_size({5, 2, 6}));
  REQUIRE(v.n() == hyp_size({5, 1, 2}));
  require_valid(v);
}

TEST_CASE("matdot box", "[constructions]") {
  const auto s = box_matdot(8, {4, 4, 4});
  REQUIRE(s.m() == 64);
  REQUIRE(s.fb.value == 8);
  REQUIRE(s.recovery_threshold() == 505);
  REQUIRE(s.d == ExponentVector{3, 3, 3});
  require_valid(s);

  const auto c = box_matdot(5, {3});
  REQUIRE(c.m() == 3);
  REQUIRE(c.fb.value == 1);
  REQUIRE(c.recovery_threshold() == 5);

  const auto one = box_matdot(7, {1, 1});
  REQUIRE(one.m() == 1);
  REQUIRE(one.fb.value == 49);
  REQUIRE(one.recovery_threshold() == 1);
  REQUIRE(one.removable == std::vector<std::size_t>{0, 1});

  REQUIRE_THROWS_AS(box_matdot(2, {2}), ParameterError);
  REQUIRE_THROWS_AS(box_matdot(8, {5, 1}), ParameterError);
}

TEST_CASE("half hyperbolic sets at the half-box corner", "[constructions]") {
  const std::vector<std::pair<std::uint64_t, std::size_t>> rows{{1, 64},  {9, 62},  {17, 56}, {25, 50},
                                                                {33, 38}, {41, 38}, {49, 26}, {57, 26}};
  for (auto [F, m] : rows) {
    const auto s = half_hyperbolic(8, F, half_box_corner(8, 3));
    CAPTURE(F);
    REQUIRE(s.m() == m);
    REQUIRE(s.designed_threshold() == 512 - F + 1);
    REQUIRE(s.fb.value >= F);
    require_valid(s);
  }
  REQUIRE(half_hyperbolic(8, 1, ExponentVector{3, 3, 3}).recovery_threshold() == 505);
  REQUIRE(half_hyperbolic(8, 0, ExponentVector{2, 1}).m() == box_matdot(8, {3, 2}).m());
  REQUIRE_THROWS_AS(half_hyperbolic(8, 1, ExponentVector{7, 0}), ParameterError);
}

TEST_CASE("half-hyperbolic recurrence matches enumeration for q <= 9, l <= 3", "[constructions]") {
  REQUIRE(d_size(8, 2, 2, ExponentVector{3}) == 4);
  for (std::uint32_t q = 2; q <= 9; ++q) {
    const exp_t h = (q - 1) / 2;
    for (std::size_t l = 1; l <= 3; ++l)
      for (const auto& dv : oracle::all_vectors(2 * h + 1, l)) {
        const ExponentVector d(std::vector<exp_t>(dv.begin(), dv.end()));
        const std::uint64_t top = oracle::ipow(q, l) + 1;
        const std::uint64_t step = l == 3 ? 13 : 1;
        for (std::uint64_t F = 0; F <= top; F += step)
          for (std::uint64_t G = 0; G <= top; G += (l == 1 ? 1 : step * 3)) {
            CAPTURE(q, l, F, G, d.to_string());
            REQUIRE(d_size(q, F, G, d) == oracle::half_hyp(q, F, G, dv).size());
          }
      }
  }
}

TEST_CASE("best target exponent search", "[constructions]") {
  REQUIRE(search_best_d(8, 3, 9).m == 62);
  REQUIRE(search_best_d(8, 3, 17).m == 56);
  const auto one = search_best_d(8, 3, 1);
  REQUIRE(one.m == 64);
  REQUIRE(one.d == ExponentVector{3, 3, 3});
  REQUIRE(search_best_d(32, 3, 1).m == 4096);

  // the exhaustive maximum exceeds the corner value on some rows
  const auto b57 = search_best_d(8, 3, 57);
  REQUIRE(b57.d == ExponentVector{2, 2, 3});
  REQUIRE(b57.m == 30);
  const auto s = half_hyperbolic(8, 57, b57.d);
  REQUIRE(s.m() == 30);
  REQUIRE(s.fb.value >= 57);
  require_valid(s);
  REQUIRE(search_best_d(8, 3, 33).m == 38);
  REQUIRE(search_best_d(32, 3, 3585).m == 1326);
  REQUIRE(search_best_d(32, 3, 513).m == 3084);

  REQUIRE_THROWS_AS(search_best_d(64, 4, 1, 1000), CapacityError);
}

TEST_CASE("projection of removable coordinates", "[constructions]") {
  const auto s = half_hyperbolic(9, 1, ExponentVector{0, 2, 1});
  REQUIRE(s.removable == std::vector<std::size_t>{0});
  const auto p = project_removable(s);
  REQUIRE(p.l == 2);
  REQUIRE(p.d == ExponentVector{2, 1});
  REQUIRE(p.m() == s.m());
  REQUIRE(p.removable.empty());
  REQUIRE(p.recovery_threshold() < s.recovery_threshold());
  require_valid(p);

  const auto z = project_removable(box_matdot(5, {1, 1}));
  REQUIRE(z.l == 1);
  REQUIRE(z.m() == 1);
}

TEST_CASE("poly validation reports collisions", "[constructions]") {
  const auto bad = make_poly_solution(make_set(5, 1, {{0}, {1}}), make_set(5, 1, {{0}, {1}}), "manual");
  const auto r = validate_poly(bad);
  REQUIRE_FALSE(r.non_colliding);
  REQUIRE_FALSE(r.valid());
  REQUIRE(r.collisions.size() == 1);
  REQUIRE(r.collisions[0].sum == ExponentVector{1});
}

TEST_CASE("binary matdot footprint", "[constructions]") {
  const auto trivial = box_matdot(2, {1, 1, 1});
  REQUIRE(matdot_q2_fb(trivial).value == 8);
  REQUIRE(matdot_q2_fb(trivial).value == trivial.fb.value);

  MatdotSolution s;
  s.q = 2;
  s.l = 3;
  s.d = ExponentVector{1, 1, 0};
  s.da = make_set(2, 3, {{0, 0, 0}, {1, 1, 0}});
  s.db = s.da;
  s.fb = fb_of_sum(s.da, s.db);
  REQUIRE(matdot_q2_fb(s).value == 2);
  REQUIRE(matdot_q2_fb(s).value == s.fb.value);

  s.d = ExponentVector{1, 1, 1};
  s.da = make_set(2, 3, {{0, 0, 0}, {1, 1, 1}});
  s.db = s.da;
  s.fb = fb_of_sum(s.da, s.db);
  REQUIRE(matdot_q2_fb(s).value == 1);
  REQUIRE(s.fb.value == 1);
  REQUIRE_THROWS_AS(matdot_q2_fb(box_matdot(3, {2})), ParameterError);
}

TEST_CASE("solution text format round trips", "[constructions]") {
  const Solution p = better_box(11, {2, 3}, 20);
  std::stringstream ss;
  write_solution(ss, p);
  const auto back = read_solution(ss);
  REQUIRE(std::get<PolySolution>(back).da == std::get<PolySolution>(p).da);
  REQUIRE(std::get<PolySolution>(back).db == std::get<PolySolution>(p).db);
  REQUIRE(std::get<PolySolution>(back).fb.value == std::get<PolySolution>(p).fb.value);

  const Solution m = half_hyperbolic(8, 17, half_box_corner(8, 3));
  std::stringstream ms;
  write_solution(ms, m);
  REQUIRE(ms.str().rfind("q=8\nl=3\nkind=matdot\nd=(3,3,3)\nDA:\n", 0) == 0);
  const auto mb = std::get<MatdotSolution>(read_solution(ms));
  REQUIRE(mb.m() == 56);
  REQUIRE(mb.pairs.size() == 56);
  REQUIRE(mb.fb.value == std::get<MatdotSolution>(m).fb.value);

  std::istringstream bad("q=5\nkind=poly\n");
  REQUIRE_THROWS_AS(read_solution(bad), ParseError);
}

TEST_CASE("construction descriptors", "[constructions]") {
  const auto d = ConstructionDescriptor::parse("sep-vars mprime=5 nprime=5 F=8");
  REQUIRE(d.kind == "sep-vars");
  REQUIRE(d.get_u64("F") == 8);
  REQUIRE(std::get<PolySolution>(resolve(d, 2)).recovery_threshold() == 961);
  REQUIRE(std::get<PolySolution>(resolve(ConstructionDescriptor::parse("poly-box m=2,2 n=6,6"), 19)).fb.value == 64);
  REQUIRE(std::get<MatdotSolution>(resolve(ConstructionDescriptor::parse("matdot-half l=3 F=9 d=best"), 8)).m() == 62);
  REQUIRE(std::get<MatdotSolution>(resolve(ConstructionDescriptor::parse("matdot-half l=3 F=57"), 8)).m() == 26);
  REQUIRE_THROWS_AS(resolve(ConstructionDescriptor::parse("nonsense"), 2), ParameterError);
  REQUIRE_THROWS_AS(resolve(ConstructionDescriptor::parse("better-box m=2"), 7), ParameterError);
  REQUIRE_THROWS_AS(ConstructionDescriptor::parse("poly-box m"), ParseError);
}
