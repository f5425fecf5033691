#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "fhslab/interaction.hpp"

using namespace fhs;
using std::numbers::pi;

namespace {

std::shared_ptr<const Bubble> bubble_2d() {
  static const auto V = std::make_shared<const Bubble>(solve_bubble(Params(2, 0.75, 0.5), make_default_grid(), 1e-8));
  return V;
}

// omega int V_i^alpha V_j^beta r^{N-1-t} dr by Gauss-Kronrod on the
// interpolated profile, with V ~ V(r_max)(r_max/r)^{N-2s} beyond the grid
double oracle_integral(const Bubble& V, double li, double lj, double alpha, double beta) {
  const Params& P = V.params;
  const double amp = P.scaling_exponent(), decay = P.N() - 2.0 * P.s();
  const auto& g = V.profile.grid();
  auto prof = [&](double r) {
    if (r <= g.r_min()) return V.profile[0];
    if (r >= g.r_max()) return V.profile[g.size() - 1] * std::pow(g.r_max() / r, decay);
    return V.profile.eval(r);
  };
  auto f = [&](double x) {
    const double r = std::exp(x);
    return std::pow(std::pow(li, amp) * prof(li * r), alpha) * std::pow(std::pow(lj, amp) * prof(lj * r), beta) *
           std::pow(r, P.N() - P.t());
  };
  const double lo = std::log(1e-12 / std::max(li, lj)), hi = std::log(1e12 / std::min(li, lj));
  return 2.0 * pi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 40, 1e-13);
}

}  // namespace

TEST_CASE("qij") {
  CHECK(qij(1.0, 1.0) == 1.0);
  CHECK(qij(1e-3, 1.0) == doctest::Approx(1e-3).epsilon(1e-15));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, u(rng)), b = std::pow(10.0, u(rng));
    CHECK(qij(a, b) == qij(b, a));
    CHECK(qij(a, b) <= 1.0);
  }
  CHECK_THROWS_AS(qij(0.0, 1.0), Error);
  CHECK_THROWS_AS(qij(1.0, -1.0), Error);
}

TEST_CASE("family delta") {
  BubbleFamily fam{{1e-2, 1.0, 50.0}, {1.0, 1.2, 0.9}, bubble_2d()};
  CHECK(delta_of_family(fam) == doctest::Approx(0.2).epsilon(1e-12));
  fam.coeffs = {1.0, 1.0, 1.0};
  CHECK(delta_of_family(fam) == doctest::Approx(0.02).epsilon(1e-12));
  BubbleFamily bad{{1.0, -1.0}, {1.0, 1.0}, bubble_2d()};
  CHECK_THROWS_AS(bad.validate(), Error);
  BubbleFamily uneven{{1.0, 2.0}, {1.0}, bubble_2d()};
  CHECK_THROWS_AS(uneven.validate(), Error);
}

TEST_CASE("two-bubble integrals against adaptive quadrature") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  for (auto [li, lj] : {std::pair{1.0, 1e-2}, std::pair{3.0, 1e-3}, std::pair{0.05, 1.0}}) {
    for (auto [a, b] : {std::pair{P.p(), 1.0}, std::pair{0.5 * P.crit(), 0.5 * P.crit()}, std::pair{1.0, P.p()}}) {
      const double ours = two_bubble_integral(*V, li, lj, a, b);
      CHECK(ours == doctest::Approx(oracle_integral(*V, li, lj, a, b)).epsilon(1e-6));
    }
  }
}

TEST_CASE("equal scales give one value for every split") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  const double whole = integrate_radial(V->profile.abs_pow(P.crit()), -P.t(), P);
  for (double a : {1.0, 2.5, 5.0, 6.0})
    CHECK(two_bubble_integral(*V, 4.0, 4.0, a, P.crit() - a) == doctest::Approx(whole).epsilon(1e-8));
  CHECK_THROWS_AS(two_bubble_integral(*V, 1.0, 2.0, 2.0, 2.0), Error);
}

TEST_CASE("symmetry and monotonicity in Q") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  CHECK(two_bubble_integral(*V, 1.0, 1e-2, P.p(), 1.0) ==
        doctest::Approx(two_bubble_integral(*V, 1e-2, 1.0, 1.0, P.p())).epsilon(1e-10));
  double prev = 0.0;
  auto qs = default_q_sweep();
  std::sort(qs.begin(), qs.end());
  for (double q : qs) {
    const double v = two_bubble_integral(*V, 1.0, q, P.p(), 1.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("energy inner product equals the integral form") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  CHECK(hs_cross_inner(*V, 2.0, 2.0) == doctest::Approx(hs_inner(V->profile, V->profile, P)).epsilon(1e-8));
  for (double q : {1e-1, 1e-2, 1e-3}) {
    const double hs = hs_cross_inner(*V, 1.0, q);
    CHECK(hs == doctest::Approx(two_bubble_integral(*V, 1.0, q, P.p(), 1.0)).epsilon(1e-4));
    CHECK(two_bubble_integral(*V, 1.0, q, P.p(), 1.0) ==
          doctest::Approx(two_bubble_integral(*V, 1.0, q, 1.0, P.p())).epsilon(1e-3));
  }
  const double c2 = hs_cross_inner(*V, 1.0, 1e-2) / std::pow(1e-2, 0.25);
  const double c3 = hs_cross_inner(*V, 1.0, 1e-3) / std::pow(1e-3, 0.25);
  CHECK(c2 / c3 < 4.0);
  CHECK(c3 / c2 < 4.0);
}

TEST_CASE("localized share of the interaction") {
  const auto V = bubble_2d();
  const double same = localized_interaction_check(*V, 1.0, 1.0);
  CHECK(same > 0.0);
  CHECK(same < 1.0);
  CHECK(localized_interaction_check(*V, 1.0, 1e-3) >= 0.25);
  for (double q : default_q_sweep()) CHECK(localized_interaction_check(*V, 1.0, q) >= 0.25);
  CHECK_THROWS_AS(localized_interaction_check(*V, 1.0, 2.0), Error);
}

TEST_CASE("scaling regression on synthetic data") {
  std::vector<ScalingPoint> pw, pl;
  for (double q : default_q_sweep()) {
    pw.push_back({q, 2.5 * std::pow(q, 0.25)});
    pl.push_back({q, 0.7 * std::pow(q, 1.5) * (1.0 + std::log(1.0 / q))});
  }
  const ScalingFit a = scaling_regression(pw, ScalingModel::power);
  CHECK(a.exponent == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(a.constant == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(a.residual <= 1e-10);
  const ScalingFit b = scaling_regression(pl, ScalingModel::power_log, 1.5);
  CHECK(b.residual <= 1e-10);
  CHECK(b.constant == doctest::Approx(0.7).epsilon(1e-10));
  pw.resize(3);
  CHECK_THROWS_AS(scaling_regression(pw, ScalingModel::power), Error);
}

TEST_CASE("predicted exponents") {
  const Params P(2, 0.75, 0.5);
  CHECK(predicted_interaction_exponent(P, P.p(), 1.0) == doctest::Approx(0.25));
  CHECK(predicted_interaction_exponent(P, 3.0, 3.0) == doctest::Approx(0.75));
  const Params Q(3, 0.9, 0.4);
  CHECK(predicted_interaction_exponent(Q, Q.p(), 1.0) == doctest::Approx(0.6));
}

TEST_CASE("sweep rows carry the fit") {
  const auto V = bubble_2d();
  const Params& P = V->params;
  const auto rows = interaction_sweep(*V, P.p(), 1.0, default_q_sweep(), 2);
  REQUIRE(rows.size() == default_q_sweep().size());
  for (const auto& r : rows) {
    CHECK(r.fitted_exponent == rows.front().fitted_exponent);
    CHECK(r.predicted_exponent == doctest::Approx(0.25));
    CHECK(r.integral > 0.0);
  }
}
