#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fhslab/cutoff_commutator.hpp"
#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "fhslab/spectrum.hpp"

using namespace fhs;

namespace {

// (-Delta)^{beta/2} e^{-c r^2}
double gauss_power(double beta, int N, double c, double r) {
  const double a = 0.5 * (N + beta), b = 0.5 * N;
  return std::pow(c, 0.5 * beta) * std::pow(2.0, beta) * std::tgamma(a) / std::tgamma(b) *
         boost::math::hypergeometric_1F1(a, b, -c * r * r);
}

RadialFn gaussian(GridPtr g, double c) {
  auto f = RadialFn::sample(g, [c](double r) { return std::exp(-c * r * r); });
  f.set_tails(PowerTail(Side::left, g->r_min(), {{0.0, 1.0}, {2.0, -c * g->r_min() * g->r_min()}}), PowerTail());
  return f;
}

double max_abs(const RadialFn& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("log cutoff samples") {
  auto g = make_default_grid();
  const CutoffSpec spec{1e-2, 1e2};
  CHECK(spec.ratio() == doctest::Approx(1e4));
  const RadialFn phi = log_cutoff(spec, g);
  CHECK(phi.eval(spec.r / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi.eval(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi.eval(2.0 * spec.R) == 0.0);
  for (std::size_t j = 0; j < phi.size(); ++j) {
    REQUIRE(phi[j] >= 0.0);
    REQUIRE(phi[j] <= 1.0);
  }
  CHECK_THROWS_AS(log_cutoff({1e-6, 1.0}, g), Error);
  CHECK_THROWS_AS(log_cutoff({1.0, 2e5}, g), Error);
  CHECK_THROWS_AS(log_cutoff({2.0, 1.0}, g), Error);
}

TEST_CASE("cutoff norm: joint rescaling and decrease") {
  const Params P(2, 0.75, 0.5);
  // sq - N equals q t / crit, so the weighted norm is dilation invariant
  CHECK(P.s() * P.q() - P.N() == doctest::Approx(P.q() * P.t() / P.crit()).epsilon(1e-14));
  auto g = make_default_grid();
  for (double r : {1e-3, 1e-2}) {
    const double a = cutoff_weighted_norm({r, 1e3 * r}, P, g);
    const double b = cutoff_weighted_norm({10.0 * r, 1e4 * r}, P, g);
    CHECK(std::abs(a / b - 1.0) <= 1e-4);
  }
  const auto rows = cutoff_sweep(P, g, 1e-2, default_cutoff_ratios(), 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows.back().norm < rows.front().norm);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].norm < rows[i - 1].norm);
  CHECK(rows[0].fitted_slope < 0.0);
}

TEST_CASE("commutator of Gaussians against the 1F1 closed form") {
  for (int N : {2, 3}) {
    const Params P(N, 0.75, 0.5);
    auto g = make_default_grid();
    const RadialFn f = gaussian(g, 0.5);
    for (double alpha : {0.2, 0.375}) {
      const RadialFn C = commutator(f, f, alpha, P);
      const double b = 2.0 * alpha;
      double worst = 0.0, scale = 0.0;
      for (double r = 1e-3; r < 8.0; r *= 1.21) {
        const double exact =
            gauss_power(b, N, 1.0, r) - 2.0 * std::exp(-0.5 * r * r) * gauss_power(b, N, 0.5, r);
        scale = std::max(scale, std::abs(exact));
        worst = std::max(worst, std::abs(C.eval(r) - exact));
      }
      CHECK(worst / scale <= 1e-6);
    }
  }
}

RadialFn slow_decay(GridPtr g) {
  RadialFn h = RadialFn::sample(g, [](double r) { return std::pow(1.0 + r * r, -0.25); });
  h.set_tails(PowerTail(Side::left, g->r_min(), {{0.0, 1.0}}),
              PowerTail(Side::right, g->r_max(), {{-0.5, std::pow(1.0 + 1e12, -0.25)}}));
  return h;
}

TEST_CASE("commutator symmetry and refinement") {
  const Params P(2, 0.75, 0.5);
  auto g = make_default_grid();
  const RadialFn f = gaussian(g, 0.5), h = slow_decay(g);
  const double alpha = P.s() / 2.0;
  const RadialFn a = commutator(f, h, alpha, P), b = commutator(h, f, alpha, P);
  CHECK(max_abs(a - b) <= 1e-12 * max_abs(a));

  // L^2 norm on a twice finer grid
  const RadialFn ff = commutator(f, f, alpha, P);
  auto fine = make_log_grid(g->r_min(), g->r_max(), 2 * g->size());
  const RadialFn ffine = commutator(gaussian(fine, 0.5), gaussian(fine, 0.5), alpha, P);
  CHECK(weighted_lp_norm(ff, 2.0, 0.0, P) == doctest::Approx(weighted_lp_norm(ffine, 2.0, 0.0, P)).epsilon(1e-5));
  CHECK_THROWS_AS(commutator(f, f, 0.5, P), Error);
  CHECK_THROWS_AS(commutator(f, f, 0.0, P), Error);
}

TEST_CASE("commutator bilinearity, pointwise over the grid") {
  const Params P(2, 0.75, 0.5);
  auto g = make_default_grid();
  const RadialFn f = gaussian(g, 0.5), h = slow_decay(g);
  const double alpha = P.s() / 2.0;
  const RadialFn lin = commutator(f, 2.0 * h - 3.0 * f, alpha, P);
  const RadialFn sep = 2.0 * commutator(f, h, alpha, P) - 3.0 * commutator(f, f, alpha, P);
  CHECK(max_abs(lin - sep) <= 1e-12 * max_abs(sep));
  const RadialFn ff = commutator(f, f, alpha, P);
  const RadialFn scaled = commutator(f, 2.5 * f, alpha, P);
  CHECK(max_abs(scaled - 2.5 * ff) <= 1e-12 * max_abs(scaled));
}

TEST_CASE("power weight predicate") {
  CHECK(ap_power_weight_check(0.0, 1.5, 2));
  CHECK(ap_power_weight_check(0.0, 40.0, 3));
  CHECK_FALSE(ap_power_weight_check(-2.0, 3.0, 2));
  CHECK_FALSE(ap_power_weight_check(4.0, 3.0, 2));
  CHECK(ap_power_weight_check(3.9, 3.0, 2));
  const Params P(2, 0.75, 0.5);
  CHECK(ap_power_weight_check(P.q() * P.t() / P.crit(), P.q(), P.N()));
  CHECK_THROWS_AS(ap_power_weight_check(0.0, 1.0, 2), Error);
}

TEST_CASE("weighted Kato-Ponce ratios") {
  const Params P(2, 0.75, 0.5);
  const KpvExponents e = kpv_reference_exponents(P);
  CHECK(e.alpha1 == 0.0);
  CHECK(e.alpha2 == doctest::Approx(0.375));
  CHECK(1.0 / e.p == doctest::Approx(1.0 / e.p1 + 1.0 / e.p2));
  CHECK(e.a / e.p == doctest::Approx(e.a1 / e.p1 + e.a2 / e.p2));
  CHECK(e.p == doctest::Approx(2.0));
  CHECK(e.a == doctest::Approx(0.0).epsilon(1e-14));

  auto g = make_default_grid();
  const auto rows = kpv_sweep(P, g, {1e-2, 1.0, 1e2}, 3);
  double lo = 1e300, hi = 0.0;
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  CHECK(hi / lo <= 2.0);

  std::vector<double> ratios;
  for (std::size_t i = 0; i < 50; ++i) {
    const RadialFn f = random_test_function(g, 21, 2 * i), h = random_test_function(g, 21, 2 * i + 1);
    ratios.push_back(kpv_ratio(f, h, P.s() / 2.0, e, P));
  }
  for (double r : ratios) CHECK(std::isfinite(r));
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted.back() <= 10.0 * sorted[sorted.size() / 2]);

  KpvExponents broken = e;
  broken.p = 3.0;
  const RadialFn f = gaussian(g, 1.0);
  CHECK_THROWS_AS(kpv_ratio(f, f, P.s() / 2.0, broken, P), Error);
  broken = e;
  broken.a1 = -3.0;
  broken.a = broken.p * (broken.a1 / broken.p1 + broken.a2 / broken.p2);
  CHECK_THROWS_AS(kpv_ratio(f, f, P.s() / 2.0, broken, P), Error);
}
