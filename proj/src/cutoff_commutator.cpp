#include "fhslab/cutoff_commutator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "fhslab/mellin.hpp"
#include "parallel.hpp"

namespace fhs {

RadialFn log_cutoff(const CutoffSpec& spec, GridPtr grid) {
  if (!(spec.r > 0.0) || !(spec.R > spec.r))
    fail(ErrorCode::invalid_argument, "log_cutoff: need 0 < r < R");
  if (spec.r < 10.0 * grid->r_min() || spec.R > grid->r_max() / 10.0) {
    std::ostringstream msg;
    msg << "log_cutoff: [" << spec.r << ", " << spec.R << "] must lie a decade inside ["
        << grid->r_min() << ", " << grid->r_max() << "]";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  const double L = std::log(spec.R / spec.r);
  RadialFn phi = RadialFn::sample(grid, [&](double x) {
    if (x < spec.r) return 1.0;
    if (x > spec.R) return 0.0;
    return std::log(spec.R / x) / L;
  });
  phi.set_tails(PowerTail(Side::left, grid->r_min(), {{0.0, 1.0}}), PowerTail());
  return phi;
}

double cutoff_weighted_norm(const CutoffSpec& spec, const Params& P, GridPtr grid) {
  const RadialFn phi = log_cutoff(spec, grid);
  // phi has kinks at r and R; on the midpoint line their error is amplified
  // like r^{-(N-2s)/2 - s} toward r_min. A line near the lower strip edge keeps it flat.
  MellinOptions opts;
  opts.line = 0.25;
  const RadialFn d = mellin_apply(phi, MellinKind::power, P.s(), P.N(), nullptr, opts);
  const double q = P.q();
  return weighted_lp_norm(d, q, q * P.t() / P.crit(), P);
}

std::vector<double> default_cutoff_ratios() { return {1e2, 1e3, 1e4, 1e5}; }

std::vector<CutoffRow> cutoff_sweep(const Params& P, GridPtr grid, double r, const std::vector<double>& ratios,
                                    int threads) {
  if (ratios.size() < 2) fail(ErrorCode::insufficient_data, "cutoff_sweep: need at least two ratios");
  std::vector<CutoffRow> rows(ratios.size());
  detail::parallel_for(ratios.size(), threads, [&](std::size_t i) {
    const CutoffSpec spec{r, r * ratios[i]};
    rows[i] = {spec.r, spec.R, spec.ratio(), cutoff_weighted_norm(spec, P, grid), 0.0};
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    const double x = std::log(std::log(row.ratio)), y = std::log(row.norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  for (auto& row : rows) row.fitted_slope = slope;
  return rows;
}

RadialFn commutator(const RadialFn& f, const RadialFn& g, double alpha, const Params& P) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    std::ostringstream msg;
    msg << "commutator: alpha = " << alpha << " outside (0, 1/2)";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  f.check_same_grid(g);
  const double b = 2.0 * alpha;
  // the three terms cancel near the origin, so keep the line low where the
  // small-r error is amplified least, and the map data-independent
  MellinOptions opts;
  opts.denoise = false;
  opts.line = 0.1;
  auto power = [&](const RadialFn& u) { return mellin_apply(u, MellinKind::power, b, P.N(), nullptr, opts); };
  return power(f.times(g)) - g.times(power(f)) - f.times(power(g));
}

bool ap_power_weight_check(double a, double p_exp, int N) {
  if (!(p_exp > 1.0)) fail(ErrorCode::invalid_argument, "ap_power_weight_check: p must exceed 1");
  return a > -N && a < N * (p_exp - 1.0);
}

KpvExponents kpv_reference_exponents(const Params& P) {
  KpvExponents e{};
  e.alpha1 = 0.0;
  e.alpha2 = P.s() / 2.0;
  e.p1 = P.crit();
  e.p2 = P.q();
  e.a1 = -P.t();
  e.a2 = P.q() * P.t() / P.crit();
  e.p = 1.0 / (1.0 / e.p1 + 1.0 / e.p2);
  e.a = e.p * (e.a1 / e.p1 + e.a2 / e.p2);
  return e;
}

namespace {

RadialFn apply_power(const RadialFn& f, double alpha, const Params& P) {
  if (alpha == 0.0) return f;
  return frac_power(f, 2.0 * alpha, P);
}

}  // namespace

double kpv_ratio(const RadialFn& f, const RadialFn& g, double alpha, const KpvExponents& e, const Params& P) {
  const int N = P.N();
  auto bad = [](const std::string& what) { fail(ErrorCode::invalid_argument, "kpv_ratio: " + what); };
  if (!(e.alpha1 >= 0.0) || !(e.alpha2 >= 0.0)) bad("alpha1 and alpha2 must be nonnegative");
  if (std::abs(e.alpha1 + e.alpha2 - alpha) > 1e-12) bad("alpha1 + alpha2 must equal alpha");
  if (!(e.p > 1.0 && e.p1 > 1.0 && e.p2 > 1.0)) bad("exponents must exceed 1");
  if (std::abs(1.0 / e.p - 1.0 / e.p1 - 1.0 / e.p2) > 1e-12) bad("1/p must equal 1/p1 + 1/p2");
  if (std::abs(e.a / e.p - e.a1 / e.p1 - e.a2 / e.p2) > 1e-12) bad("a/p must equal a1/p1 + a2/p2");
  if (!ap_power_weight_check(e.a1, e.p1, N)) bad("|x|^a1 is not an A_p1 weight");
  if (!ap_power_weight_check(e.a2, e.p2, N)) bad("|x|^a2 is not an A_p2 weight");
  const double top = weighted_lp_norm(commutator(f, g, alpha, P), e.p, e.a, P);
  const double n1 = weighted_lp_norm(apply_power(f, e.alpha1, P), e.p1, e.a1, P);
  const double n2 = weighted_lp_norm(apply_power(g, e.alpha2, P), e.p2, e.a2, P);
  if (!(n1 > 0.0) || !(n2 > 0.0)) fail(ErrorCode::degenerate_input, "kpv_ratio: vanishing denominator");
  return top / (n1 * n2);
}

std::vector<KpvRow> kpv_sweep(const Params& P, GridPtr grid, const std::vector<double>& lambdas, int threads) {
  const KpvExponents e = kpv_reference_exponents(P);
  const double alpha = P.s() / 2.0;
  const double a = P.scaling_exponent();
  std::vector<KpvRow> rows(lambdas.size());
  detail::parallel_for(lambdas.size(), threads, [&](std::size_t i) {
    const double l = lambdas[i];
    RadialFn f = RadialFn::sample(grid, [l](double r) { return std::exp(-l * l * r * r); });
    // bubble-shaped partner with the tails of (1 + r^2)^{-a}
    RadialFn g = RadialFn::sample(grid, [l, a](double r) { return std::pow(1.0 + l * l * r * r, -a); });
    const double r0 = grid->r_min(), r1 = grid->r_max();
    f.set_tails(PowerTail(Side::left, r0, {{0.0, 1.0}, {2.0, -l * l * r0 * r0}}), PowerTail());
    g.set_tails(PowerTail(Side::left, r0, {{0.0, 1.0}, {2.0, -a * l * l * r0 * r0}}),
                PowerTail(Side::right, r1,
                          {{-2.0 * a, std::pow(l * r1, -2.0 * a)}, {-2.0 * a - 2.0, -a * std::pow(l * r1, -2.0 * a - 2.0)}}));
    rows[i] = {e, l, kpv_ratio(f, g, alpha, e, P)};
  });
  return rows;
}

}  // namespace fhs
