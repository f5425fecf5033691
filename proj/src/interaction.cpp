#include "fhslab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "parallel.hpp"

namespace fhs {

void BubbleFamily::validate() const {
  require(base != nullptr, "bubble family: no base bubble");
  require(!scales.empty(), "bubble family: nu must be at least 1");
  require(scales.size() == coeffs.size(), "bubble family: scales and coeffs differ in length");
  for (double l : scales) require(l > 0.0 && std::isfinite(l), "bubble family: scales must be positive");
}

RadialFn BubbleFamily::evaluate() const {
  validate();
  RadialFn sum = dilate(*base, scales[0]) * coeffs[0];
  for (std::size_t i = 1; i < scales.size(); ++i) sum += dilate(*base, scales[i]) * coeffs[i];
  return sum;
}

double delta_of_family(const BubbleFamily& f) {
  f.validate();
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    d = std::max(d, std::abs(f.coeffs[i] - 1.0));
    for (std::size_t j = i + 1; j < f.size(); ++j) d = std::max(d, qij(f.scales[i], f.scales[j]));
  }
  return d;
}

double qij(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    fail(ErrorCode::invalid_argument, "qij: scales must be positive");
  return std::min(a / b, b / a);
}

namespace {

// Both forms are invariant under a joint dilation of the pair, so the pair is
// moved to (Q^{-1/2}, Q^{1/2}) around r = 1 where the grid resolves both.
std::pair<double, double> centered_pair(double li, double lj) {
  const double c = std::sqrt(qij(li, lj));
  if (li == lj) return {1.0, 1.0};
  return li > lj ? std::pair{1.0 / c, c} : std::pair{c, 1.0 / c};
}

}  // namespace

double two_bubble_integral(const Bubble& V, double li, double lj, double alpha, double beta) {
  const Params& P = V.params;
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    fail(ErrorCode::invalid_argument, "two_bubble_integral: exponents must be nonnegative");
  if (std::abs(alpha + beta - P.crit()) > 1e-12) {
    std::ostringstream msg;
    msg << "two_bubble_integral: alpha + beta = " << alpha + beta << " differs from crit = " << P.crit();
    fail(ErrorCode::invalid_argument, msg.str());
  }
  const auto [ui, uj] = centered_pair(li, lj);
  const RadialFn f = dilate(V, ui).abs_pow(alpha).times(dilate(V, uj).abs_pow(beta));
  return integrate_radial(f, -P.t(), P);
}

double hs_cross_inner(const Bubble& V, double li, double lj) {
  const Params& P = V.params;
  const auto [ui, uj] = centered_pair(li, lj);
  const double form = hs_inner(dilate(V, ui), dilate(V, uj), P);
  const double integral = two_bubble_integral(V, li, lj, P.p(), 1.0);
  if (std::abs(form - integral) > 1e-2 * std::abs(integral)) {
    std::ostringstream msg;
    msg << "hs_cross_inner: transform value " << form << " vs integral " << integral;
    fail(ErrorCode::consistency_failure, msg.str());
  }
  return form;
}

double localized_interaction_check(const Bubble& V, double li, double lj) {
  const Params& P = V.params;
  if (!(li >= lj) || !(lj > 0.0))
    fail(ErrorCode::invalid_argument, "localized_interaction_check: need lambda_i >= lambda_j > 0");
  // |x| <= 1/lambda_i becomes |x| <= 1/c after moving the pair to (c, Q/c)
  const auto [ui, uj] = centered_pair(li, lj);
  const RadialFn f = dilate(V, ui).abs_pow(P.p()).times(dilate(V, uj));
  const double full = integrate_radial(f, -P.t(), P);
  return integrate_radial_ball(f, -P.t(), 1.0 / ui, P) / full;
}

ScalingFit scaling_regression(const std::vector<ScalingPoint>& pts, ScalingModel model,
                              double e_fixed) {
  if (pts.size() < 4) fail(ErrorCode::insufficient_data, "scaling_regression: need at least 4 points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].q > 0.0) || !(pts[i].value > 0.0))
      fail(ErrorCode::invalid_argument, "scaling_regression: Q and values must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (pts[i].q == pts[j].q) fail(ErrorCode::invalid_argument, "scaling_regression: repeated Q");
  }
  const double n = static_cast<double>(pts.size());
  ScalingFit fit;
  if (model == ScalingModel::power) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : pts) {
      const double x = std::log(pt.q), y = std::log(pt.value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.constant = std::exp((sy - fit.exponent * sx) / n);
  } else {
    double acc = 0.0;
    for (const auto& pt : pts)
      acc += std::log(pt.value) - e_fixed * std::log(pt.q) - std::log1p(-std::log(pt.q));
    fit.exponent = e_fixed;
    fit.constant = std::exp(acc / n);
  }
  for (const auto& pt : pts) {
    double model_value = fit.constant * std::pow(pt.q, fit.exponent);
    if (model == ScalingModel::power_log) model_value *= 1.0 - std::log(pt.q);
    fit.residual = std::max(fit.residual, std::abs(pt.value / model_value - 1.0));
  }
  return fit;
}

double predicted_interaction_exponent(const Params& P, double alpha, double beta) {
  if (alpha == beta) return (P.N() - P.t()) / 2.0;
  return (P.N() - 2.0 * P.s()) * std::min(alpha, beta) / 2.0;
}

std::vector<double> default_q_sweep() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}; }

std::vector<InteractionRow> interaction_sweep(const Bubble& V, double alpha, double beta,
                                              const std::vector<double>& qs, int threads) {
  std::vector<double> values(qs.size());
  detail::parallel_for(qs.size(), threads,
                       [&](std::size_t i) { values[i] = two_bubble_integral(V, 1.0, qs[i], alpha, beta); });
  const double predicted = predicted_interaction_exponent(V.params, alpha, beta);
  std::vector<ScalingPoint> pts;
  for (std::size_t i = 0; i < qs.size(); ++i) pts.push_back({qs[i], values[i]});
  ScalingFit fit;
  if (pts.size() >= 4)
    fit = alpha == beta ? scaling_regression(pts, ScalingModel::power_log, predicted)
                        : scaling_regression(pts, ScalingModel::power);
  std::vector<InteractionRow> rows;
  for (std::size_t i = 0; i < qs.size(); ++i)
    rows.push_back({alpha, beta, qs[i], values[i], predicted, fit.exponent, fit.residual});
  return rows;
}

}  // namespace fhs
