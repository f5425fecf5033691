#include <cmath>

#include "doctest.h"
#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "fhslab/interaction.hpp"
#include "fhslab/stability.hpp"

using namespace fhs;

namespace {

std::shared_ptr<const Bubble> bubble_2d() {
  static const auto V = std::make_shared<const Bubble>(solve_bubble(Params(2, 0.75, 0.5), make_default_grid(), 1e-8));
  return V;
}

double unit_energy(const Bubble& V) { return std::pow(V.mu, V.params.energy_exponent()); }

}  // namespace

TEST_CASE("deficit vanishes on bubbles and is scale invariant") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  CHECK(deficit(RadialFn::zero(V->profile.grid_ptr()), P) == 0.0);
  const double norm = hs_norm(V->profile, P);
  for (double lambda : {1e-2, 1.0, 37.0}) CHECK(deficit(dilate(*V, lambda), P) <= 1e-7 * norm);
  // perturbation by the bump, then a node-ratio dilation of the whole thing
  const RadialFn u = V->profile + 0.01 * sharpness_bump(V->profile.grid_ptr());
  const double amp = P.scaling_exponent();
  const double lambda = std::pow(V->profile.grid().ratio(), 200);
  CHECK(deficit(dilate(u, lambda, amp), P) == doctest::Approx(deficit(u, P)).epsilon(1e-6));
}

TEST_CASE("deficit grows linearly along the sharpness family") {
  const auto V = bubble_2d();
  const RadialFn phi = sharpness_bump(V->profile.grid_ptr());
  std::vector<double> c;
  for (double kappa : {1e-4, 1e-3, 1e-2}) {
    const RadialFn u = sharpness_family(*V, {1.0}, phi, kappa);
    c.push_back(deficit(u, V->params) / kappa);
  }
  CHECK(*std::max_element(c.begin(), c.end()) <= 1.1 * *std::min_element(c.begin(), c.end()));
  const RadialFn flat = sharpness_family(*V, {0.1, 10.0}, phi, 0.0);
  CHECK(deficit(flat, V->params) >= 0.0);
}

TEST_CASE("sharpness construction") {
  const Params P(2, 0.75, 0.5);
  const auto s = sharpness_scales(P, 2, 1e-2);
  REQUIRE(s.size() == 2);
  // delta = kappa^{2/(N-2s)} = 1e-8 split evenly around 1
  CHECK(s[0] == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(1e-4).epsilon(1e-12));
  const auto s3 = sharpness_scales(P, 3, 1e-1);
  CHECK(s3[1] == doctest::Approx(1.0));
  CHECK(s3[0] / s3[1] == doctest::Approx(1e4).epsilon(1e-12));
  CHECK_THROWS_AS(sharpness_scales(P, 0, 1e-2), Error);
  CHECK_THROWS_AS(sharpness_scales(P, 2, 1.5), Error);

  auto g = make_default_grid();
  const RadialFn phi = sharpness_bump(g);
  CHECK(phi.eval(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(phi.eval(0.5) == 0.0);
  CHECK(phi.eval(3.5) == 0.0);
  const auto V = bubble_2d();
  RadialFn wide = RadialFn::sample(V->profile.grid_ptr(), [](double r) { return std::exp(-r); });
  CHECK_THROWS_AS(sharpness_family(*V, {1.0}, wide, 1e-3), Error);
}

TEST_CASE("energy window") {
  const auto V = bubble_2d();
  const double e = unit_energy(*V);
  const RadialFn two = dilate(*V, 1e-2) + dilate(*V, 1e2);
  const EnergyWindow w = energy_window_check(two, 2, *V);
  CHECK(w.ok);
  // N - 2s = 1/2 here, so the cross term is far from negligible at Q = 1e-4
  CHECK(w.energy == doctest::Approx(2.0 * e + 2.0 * hs_cross_inner(*V, 1e-2, 1e2)).epsilon(1e-8));
  CHECK(w.lower == doctest::Approx(1.5 * e));
  CHECK(w.upper == doctest::Approx(2.5 * e));
  CHECK_FALSE(energy_window_check(RadialFn::zero(V->profile.grid_ptr()), 1, *V).ok);
  CHECK_FALSE(energy_window_check(V->profile, 2, *V).ok);
}

TEST_CASE("projection recovers an on-manifold sum") {
  const auto V = bubble_2d();
  const BubbleFamily truth{{1e-2, 1.0, 1e2}, {1.0, 1.0, 1.0}, V};
  const RadialFn u = truth.evaluate();
  const BubbleFamily init{{1.3e-2, 0.8, 80.0}, {0.9, 1.1, 0.95}, V};
  const StabilityReport rep = project_multibubble(u, init);
  REQUIRE(rep.family.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.family.scales[i] == doctest::Approx(truth.scales[i]).epsilon(1e-6));
    CHECK(rep.family.coeffs[i] == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(rep.distance <= 1e-8);
  // a sum of interacting bubbles is not a critical point
  CHECK(rep.gamma == doctest::Approx(deficit(u, V->params)).epsilon(1e-10));
  CHECK(rep.interactions.size() == 3);
  for (std::size_t i = 1; i < rep.objective_trace.size(); ++i)
    CHECK(rep.objective_trace[i] <= rep.objective_trace[i - 1]);
}

TEST_CASE("projection of a perturbed pair is orthogonal and idempotent") {
  const auto V = bubble_2d();
  const RadialFn phi = sharpness_bump(V->profile.grid_ptr());
  const RadialFn u = sharpness_family(*V, {1e-1, 10.0}, phi, 1e-3);
  const StabilityReport rep = project_multibubble(u, BubbleFamily{{1e-1, 10.0}, {1.0, 1.0}, V});
  CHECK(rep.distance > 0.0);
  CHECK(rep.max_ortho_residual() <= 1e-8 * rep.distance);
  CHECK(rep.gamma > 0.0);
  const RadialFn sigma = rep.family.evaluate();
  const StabilityReport again = project_multibubble(sigma, rep.family);
  CHECK(again.distance <= 1e-10 * hs_norm(sigma, V->params));
}

TEST_CASE("seeding from local maxima and collisions") {
  const auto V = bubble_2d();
  const RadialFn u = dilate(*V, 1e-3) + dilate(*V, 1e3);
  const BubbleFamily seeds = seed_family(u, 2, V);
  REQUIRE(seeds.size() == 2);
  std::vector<double> s = seeds.scales;
  std::sort(s.begin(), s.end());
  CHECK(s[0] == doctest::Approx(1e-3).epsilon(0.2));
  CHECK(s[1] == doctest::Approx(1e3).epsilon(0.2));
  const StabilityReport rep = project_multibubble(u, 2, V);
  CHECK(rep.distance <= 1e-6 * hs_norm(u, V->params));

  const double h = V->profile.grid().ratio();
  const BubbleFamily clash{{1.0, std::sqrt(h)}, {1.0, 1.0}, V};
  try {
    project_multibubble(V->profile, clash);
    FAIL("expected a collision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_configuration);
  }
}

TEST_CASE("elementary inequalities") {
  CHECK(elementary_ratio_a(1.0, 0.0, 5.0) == 0.0);
  CHECK(elementary_ratio_a(0.0, 2.0, 5.0) <= 1.0);
  CHECK(elementary_ratio_a(0.0, -2.0, 5.0) == doctest::Approx(1.0));
  // p = 3, a = b = 1: (|8 - 1| - 3) / (1 + 1)
  CHECK(elementary_ratio_a(1.0, 1.0, 3.0) == doctest::Approx(2.0));
  // p = 3, a = (1, 1): |8 - 2| / 2
  CHECK(elementary_ratio_b({1.0, 1.0}, 3.0) == doctest::Approx(3.0));
  const auto c1 = check_elementary_inequalities(5.0, 20000, 1);
  const auto c2 = check_elementary_inequalities(5.0, 20000, 1);
  CHECK(c1.max_ratio_a == c2.max_ratio_a);
  CHECK(std::isfinite(c1.max_ratio_a));
  CHECK(std::isfinite(c1.max_ratio_b));
  CHECK(c1.max_ratio_a > 0.0);
  CHECK_THROWS_AS(check_elementary_inequalities(1.0, 10, 1), Error);
}
