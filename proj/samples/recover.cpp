// Multiplies two random matrices over GF(19) through a box code and
// recovers the product from the responses of the last 298 of 361 workers.

#include <iostream>
#include <random>

#include "mvcodes/codec.hpp"
#include "mvcodes/constructions.hpp"

int main() {
  using namespace mvcodes;
  const auto F19 = FieldSpec::of_order(19);
  const auto sol = box_poly(19, {2, 2}, {6, 6});

  std::mt19937_64 rng(2024);
  const auto A = MatrixFq::random(F19, 8, 5, rng);
  const auto B = MatrixFq::random(F19, 5, 72, rng);
  const auto [sa, sb] = split(A, B, CodeMode::poly, sol.m(), sol.n());
  const auto pa = encode(sa.blocks, sol.da);
  const auto pb = encode(sb.blocks, sol.db);

  const auto sys = build_system(F19, minkowski_sum_q(sol.da, sol.db), enumerate_points(F19, 2));
  std::vector<WorkerResponse> responses;
  for (std::size_t w = sys.num_points() - sol.recovery_threshold(); w < sys.num_points(); ++w)
    responses.push_back({w, matmul(evaluate(pa, sys.points[w]), evaluate(pb, sys.points[w]))});

  DecodeStats stats;
  const auto C = extract_poly(interpolate(sys, responses, {}, &stats), sol, sa, sb);
  std::cout << "workers " << sys.num_points() << ", used " << responses.size() << ", kappa " << sys.kappa()
            << "\nrecovered product " << (C == matmul(A, B) ? "matches" : "DIFFERS FROM") << " the direct product\n";
  return C == matmul(A, B) ? 0 : 1;
}
