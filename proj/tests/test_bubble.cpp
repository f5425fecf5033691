#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fhslab/bubble.hpp"
#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"

using namespace fhs;
using std::numbers::pi;

namespace {

const Bubble& bubble_2d() {
  static const Bubble V = solve_bubble(Params(2, 0.75, 0.5), make_default_grid(), 1e-8);
  return V;
}

// sharp constant of the fractional Sobolev inequality
double sobolev_constant(int N, double s) {
  using boost::math::tgamma;
  return std::pow(2.0, 2.0 * s) * std::pow(pi, s) * tgamma(0.5 * (N + 2.0 * s)) / tgamma(0.5 * (N - 2.0 * s)) *
         std::pow(tgamma(0.5 * N) / tgamma(static_cast<double>(N)), 2.0 * s / N);
}

double log_slope(const RadialFn& v, double r0, double r1) {
  return (std::log(v.eval(r1)) - std::log(v.eval(r0))) / (std::log(r1) - std::log(r0));
}

}  // namespace

TEST_CASE("solved bubble: residual, sign, monotonicity and decay") {
  const Bubble& V = bubble_2d();
  const Params& P = V.params;
  CHECK(V.residual <= 1e-8);
  CHECK(residual_certificate(V.profile, P) <= 1e-8);
  for (std::size_t j = 0; j < V.profile.size(); ++j) REQUIRE(V.profile[j] > 0.0);
  for (std::size_t j = 1; j < V.profile.size(); ++j) REQUIRE(V.profile[j] < V.profile[j - 1]);
  const double slope = log_slope(V.profile, 1e2, 1e5);
  CHECK(std::abs(slope + (P.N() - 2.0 * P.s())) <= 0.02 * (P.N() - 2.0 * P.s()));
  // bounded at the origin: flat over the first two decades
  CHECK(V.profile[0] / V.profile.eval(1e-4) - 1.0 < 1e-3);
}

TEST_CASE("t = 0 reproduces the Sobolev extremal") {
  for (auto [N, s] : {std::pair{2, 0.75}, std::pair{3, 0.9}}) {
    const Params P = Params::validation(N, s, 0.0);
    const Bubble V = solve_bubble(P, make_default_grid(), 1e-8);
    const double a = 0.5 * (N - 2.0 * s);
    const double c = V.profile.eval(1.0) / std::pow(2.0, -a);
    double worst = 0.0;
    for (double r = 1e-4; r <= 1e4; r *= 1.37)
      worst = std::max(worst, std::abs(V.profile.eval(r) / (c * std::pow(1.0 + r * r, -a)) - 1.0));
    CHECK(worst <= 1e-4);
    CHECK(V.mu == doctest::Approx(sobolev_constant(N, s)).epsilon(1e-6));
  }
}

TEST_CASE("certificate re-evaluated at twice the resolution") {
  const Bubble& V = bubble_2d();
  auto fine = make_log_grid(V.profile.grid().r_min(), V.profile.grid().r_max(), 2 * V.profile.size());
  RadialFn v = RadialFn::sample(fine, [&](double r) { return V.profile.eval(r); });
  v.set_tails(V.profile.left_tail(), V.profile.right_tail());
  CHECK(residual_certificate(v, V.params) <= 10.0 * V.tol);
}

TEST_CASE("normalization and the mu exponent") {
  const Bubble& V = bubble_2d();
  const Params& P = V.params;
  CHECK(V.mu > 0.0);
  const double energy = hs_inner(V.profile, V.profile, P);
  CHECK(energy == doctest::Approx(std::pow(V.mu, P.energy_exponent())).epsilon(1e-5));
  CHECK(mu_constant(V) == doctest::Approx(V.mu).epsilon(1e-4));
  CHECK(mu_from_profile(dilate(V, 100.0), P) == doctest::Approx(V.mu).epsilon(1e-6));
  const double A = integrate_radial(V.profile.abs_pow(P.crit()), -P.t(), P);
  const double crit = P.crit();
  CHECK(A == doctest::Approx(std::pow(V.mu, crit / (crit - 2.0))).epsilon(1e-4));
  // the other exponent is off by far more than the tolerance
  CHECK(std::abs(A / std::pow(V.mu, crit / (crit - 1.0)) - 1.0) > 1e-2);
  const double lnorm = weighted_lp_norm(V.profile, crit, -P.t(), P);
  CHECK(lnorm == doctest::Approx(std::pow(V.mu, 1.0 / (crit - 2.0))).epsilon(1e-5));
  for (double lambda : {1e-2, 1e2})
    CHECK(weighted_lp_norm(dilate(V, lambda), crit, -P.t(), P) == doctest::Approx(lnorm).epsilon(1e-8));
}

TEST_CASE("integral law order check") {
  for (auto [N, s, t] : {std::tuple{2, 0.75, 0.5}, std::tuple{3, 0.9, 0.4}}) {
    const Params P(N, s, t);
    const Bubble V = solve_bubble(P, make_default_grid(), 1e-8);
    const double I = integrate_radial(V.profile.abs_pow(P.p()), -t, P);
    const double law = (N + 2.0 * s - 2.0 * t) / ((N - t) * (2.0 * s - t));
    CHECK(I / law >= 1.0 / 50.0);
    CHECK(I / law <= 50.0);
  }
}

TEST_CASE("dilation: identity, norm invariance, group law") {
  const Bubble& V = bubble_2d();
  const Params& P = V.params;
  const RadialFn id = dilate(V, 1.0);
  for (std::size_t j = 0; j < id.size(); ++j) REQUIRE(id[j] == V.profile[j]);
  const double h = V.profile.grid().ratio();
  const double n0 = hs_norm(V.profile, P);
  for (int k : {-1024, 1024}) {
    const double lambda = std::pow(h, k);
    CHECK(hs_norm(dilate(V, lambda), P) == doctest::Approx(n0).epsilon(1e-6));
  }
  const double amp = P.scaling_exponent();
  const double a = std::pow(h, 50), b = std::pow(h, -20);
  const RadialFn ab = dilate(dilate(V.profile, a, amp), b, amp);
  const RadialFn direct = dilate(V.profile, a * b, amp);
  double worst = 0.0;
  for (std::size_t j = 100; j + 100 < ab.size(); ++j) worst = std::max(worst, std::abs(ab[j] / direct[j] - 1.0));
  CHECK(worst <= 1e-10);
  // off-grid factor against interpolation of the profile
  const RadialFn d = dilate(V, 3.0);
  for (double r : {1e-3, 0.2, 1.0, 40.0})
    CHECK(d.eval(r) == doctest::Approx(std::pow(3.0, amp) * V.profile.eval(3.0 * r)).epsilon(1e-9));
  CHECK_THROWS_AS(dilate(V, 0.0), Error);
  CHECK_THROWS_AS(dilate(V, -2.0), Error);
}

TEST_CASE("scale derivative identities") {
  const Bubble& V = bubble_2d();
  const Params& P = V.params;
  const RadialFn Vd = bubble_derivative(V, 1.0);
  const double A = integrate_radial(V.profile.abs_pow(P.p()).times(Vd), -P.t(), P);
  const double scale = integrate_radial(V.profile.abs_pow(P.p() + 1.0), -P.t(), P);
  CHECK(std::abs(A) <= 1e-6 * scale);
  const double B = integrate_radial(V.profile.abs_pow(P.p() - 1.0).times(Vd), -P.t(), P);
  const double Bexact = -(P.N() - 2.0 * P.s()) / (2.0 * P.p()) * integrate_radial(V.profile.abs_pow(P.p()), -P.t(), P);
  CHECK(B == doctest::Approx(Bexact).epsilon(1e-3));

  // lambda |Vdot| / V stays bounded across scales
  std::vector<double> sup;
  for (double lambda : {0.1, 1.0, 10.0}) {
    const RadialFn d = bubble_derivative(V, lambda);
    const RadialFn v = dilate(V, lambda);
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) m = std::max(m, lambda * std::abs(d[j]) / v[j]);
    sup.push_back(m);
  }
  CHECK(std::isfinite(sup[0]));
  CHECK(*std::max_element(sup.begin(), sup.end()) <= 2.0 * *std::min_element(sup.begin(), sup.end()));
  // against a centered difference in lambda
  const double eps = 1e-4;
  const RadialFn fd = (1.0 / (2.0 * eps)) * (dilate(V, 2.0 + eps) - dilate(V, 2.0 - eps));
  const RadialFn an = bubble_derivative(V, 2.0);
  for (double r : {0.05, 0.5, 2.0}) CHECK(an.eval(r) == doctest::Approx(fd.eval(r)).epsilon(1e-6));
}

TEST_CASE("profile file round trip is bit-exact") {
  const Bubble& V = bubble_2d();
  std::stringstream buf;
  save_bubble(V, buf);
  const std::string text = buf.str();
  CHECK(text.find("# mu = ") != std::string::npos);
  CHECK(text.find("# residual = ") != std::string::npos);
  const Bubble W = load_bubble(buf);
  CHECK(W.params == V.params);
  CHECK(W.mu == V.mu);
  CHECK(W.residual == V.residual);
  REQUIRE(W.profile.size() == V.profile.size());
  for (std::size_t j = 0; j < W.profile.size(); ++j) REQUIRE(W.profile[j] == V.profile[j]);
  for (std::size_t j = 0; j < W.profile.size(); ++j)
    REQUIRE(W.profile.grid().nodes()[j] == V.profile.grid().nodes()[j]);
  REQUIRE(W.profile.right_tail().terms().size() == V.profile.right_tail().terms().size());
  for (std::size_t k = 0; k < W.profile.right_tail().terms().size(); ++k)
    CHECK(W.profile.right_tail().terms()[k].coeff == V.profile.right_tail().terms()[k].coeff);
  std::stringstream again;
  save_bubble(W, again);
  CHECK(again.str() == text);

  std::stringstream broken(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_bubble(broken), Error);
}

TEST_CASE("solver preconditions") {
  CHECK_THROWS_AS(solve_bubble(Params(2, 0.75, 0.5), make_log_grid(1e-3, 1e3, 512), 1e-12), Error);
  SolveOptions o;
  o.max_iterations = 2;
  try {
    solve_bubble(Params(2, 0.75, 0.5), make_log_grid(1e-4, 1e4, 1024), 1e-8, o);
    FAIL("expected solver failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::solver_failure);
  }
}
