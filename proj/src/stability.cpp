#include "fhslab/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fhslab/error.hpp"
#include "fhslab/frac_transform.hpp"
#include "parallel.hpp"

namespace fhs {

double deficit(const RadialFn& u, const Params& P) {
  return dual_norm(euler_lagrange_residual(u, P), P);
}

double StabilityReport::max_ortho_residual() const {
  double m = 0.0;
  for (double r : ortho_residuals) m = std::max(m, std::abs(r));
  return m;
}

namespace {

// Pieces of sigma and of the tangent space at one parameter point.
struct Frame {
  std::vector<RadialFn> V, D;  // V_i and d/dlambda V_i
  std::vector<RadialFn> P, Q;  // V_i^p |x|^-t and p V_i^{p-1} Vdot_i |x|^-t
  RadialFn sigma;
};

Frame build_frame(const Bubble& B, const std::vector<double>& alpha, const std::vector<double>& ell) {
  const Params& P = B.params;
  Frame f;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double lam = std::exp(ell[i]);
    RadialFn Vi = dilate(B, lam);
    RadialFn Di = bubble_derivative(B, lam);
    f.P.push_back(Vi.abs_pow(P.p()).times_power(-P.t()));
    f.Q.push_back(Vi.abs_pow(P.p() - 1.0).times(Di).times_power(-P.t()) * P.p());
    if (i == 0)
      f.sigma = Vi * alpha[0];
    else
      f.sigma += Vi * alpha[i];
    f.V.push_back(std::move(Vi));
    f.D.push_back(std::move(Di));
  }
  return f;
}

double pair(const RadialFn& a, const RadialFn& b, const Params& P) { return integrate_radial(a.times(b), 0.0, P); }

void check_collision(const std::vector<double>& ell, double h) {
  for (std::size_t i = 0; i < ell.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(ell[i] - ell[j]) < h) {
        std::ostringstream msg;
        msg << "project_multibubble: scales " << std::exp(ell[j]) << " and " << std::exp(ell[i])
            << " lie within one grid step";
        fail(ErrorCode::degenerate_configuration, msg.str());
      }
}

}  // namespace

StabilityReport project_multibubble(const RadialFn& u, const BubbleFamily& init, const ProjectOptions& opts) {
  init.validate();
  const Bubble& B = *init.base;
  const Params& P = B.params;
  u.check_same_grid(B.profile);
  const std::size_t nu = init.size();
  const auto dim = static_cast<Eigen::Index>(2 * nu);
  std::vector<double> alpha = init.coeffs, ell;
  for (double l : init.scales) ell.push_back(std::log(l));
  const double h = u.grid().step();
  check_collision(ell, h);

  StabilityReport rep;
  Frame fr = build_frame(B, alpha, ell);
  RadialFn rho = u - fr.sigma;
  double F = hs_inner(rho, rho, P);
  rep.objective_trace.push_back(F);
  const double scale_F = std::max(hs_inner(u, u, P), 1e-300);

  std::vector<double> resid(2 * nu);
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    rep.iterations = it + 1;
    // Jacobian columns d sigma/d alpha_i = V_i and d sigma/d log lambda_i =
    // alpha_i lambda_i Vdot_i; energy products from the equations satisfied by
    // V_i and Vdot_i.
    Eigen::MatrixXd G(dim, dim);
    Eigen::VectorXd g(dim);
    std::vector<double> jscale(nu);
    for (std::size_t i = 0; i < nu; ++i) jscale[i] = alpha[i] * std::exp(ell[i]);
    for (std::size_t i = 0; i < nu; ++i) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(nu + i);
      g[a] = pair(fr.P[i], rho, P);
      g[b] = jscale[i] * pair(fr.Q[i], rho, P);
      for (std::size_t j = 0; j <= i; ++j) {
        const auto c = static_cast<Eigen::Index>(j), d = static_cast<Eigen::Index>(nu + j);
        G(a, c) = G(c, a) = 0.5 * (pair(fr.P[i], fr.V[j], P) + pair(fr.P[j], fr.V[i], P));
        G(b, d) = G(d, b) = jscale[i] * jscale[j] * 0.5 * (pair(fr.Q[i], fr.D[j], P) + pair(fr.Q[j], fr.D[i], P));
      }
      for (std::size_t j = 0; j < nu; ++j) {
        const auto d = static_cast<Eigen::Index>(nu + j);
        G(a, d) = G(d, a) = jscale[j] * 0.5 * (pair(fr.P[i], fr.D[j], P) + pair(fr.Q[j], fr.V[i], P));
      }
    }
    const double rho_norm = std::sqrt(std::max(F, 0.0));
    double worst = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      resid[static_cast<std::size_t>(k)] = g[k] / std::sqrt(G(k, k));
      worst = std::max(worst, std::abs(resid[static_cast<std::size_t>(k)]));
    }
    // below ~1e-12 ||u|| the remainder is rounding noise of sigma itself
    if (worst <= opts.ortho_tol * rho_norm || rho_norm <= 1e-12 * std::sqrt(scale_F)) {
      converged = true;
      break;
    }
    const Eigen::VectorXd delta = G.ldlt().solve(g);
    if (!delta.allFinite()) fail(ErrorCode::solver_failure, "project_multibubble: singular Gram matrix");
    double step = 1.0;
    bool accepted = false;
    std::vector<double> a2(nu), l2(nu);
    Frame f2;
    RadialFn rho2;
    double F2 = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < nu; ++i) {
        a2[i] = alpha[i] + step * delta[static_cast<Eigen::Index>(i)];
        l2[i] = ell[i] + step * delta[static_cast<Eigen::Index>(nu + i)];
      }
      check_collision(l2, h);
      f2 = build_frame(B, a2, l2);
      rho2 = u - f2.sigma;
      F2 = hs_inner(rho2, rho2, P);
      // objective values below ~1e-13 of ||u||^2 are rounding noise
      if (F2 <= F + 1e-13 * scale_F) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double moved = 0.0;
    for (std::size_t i = 0; i < nu; ++i)
      moved = std::max({moved, std::abs(a2[i] - alpha[i]), std::abs(l2[i] - ell[i])});
    alpha = a2;
    ell = l2;
    fr = std::move(f2);
    rho = std::move(rho2);
    F = F2;
    rep.objective_trace.push_back(F);
    if (moved < 1e-15) break;
  }
  // residuals at the final point
  {
    for (std::size_t i = 0; i < nu; ++i) {
      const double jd = std::sqrt(pair(fr.Q[i], fr.D[i], P));
      const double jv = std::sqrt(pair(fr.P[i], fr.V[i], P));
      resid[i] = pair(fr.P[i], rho, P) / jv;
      resid[nu + i] = pair(fr.Q[i], rho, P) / jd;
    }
  }
  rep.ortho_residuals = resid;
  rep.distance = hs_norm(rho, P);
  if (!converged) {
    if (rep.max_ortho_residual() > 1e-8 * rep.distance && rep.distance > 1e-12 * std::sqrt(scale_F)) {
      std::ostringstream msg;
      msg << "project_multibubble: no convergence after " << rep.iterations << " iterations; objective trace:";
      for (double v : rep.objective_trace) msg << ' ' << v;
      msg << "; max residual " << rep.max_ortho_residual();
      fail(ErrorCode::solver_failure, msg.str());
    }
  }
  rep.family = BubbleFamily{{}, alpha, init.base};
  for (double l : ell) rep.family.scales.push_back(std::exp(l));
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = i + 1; j < nu; ++j) rep.interactions.push_back(qij(rep.family.scales[i], rep.family.scales[j]));
  const EnergyWindow w = energy_window_check(u, static_cast<int>(nu), B);
  rep.energy = w.energy;
  rep.energy_window_ok = w.ok;
  if (opts.compute_gamma) rep.gamma = deficit(u, P);
  return rep;
}

BubbleFamily seed_family(const RadialFn& u, int nu, std::shared_ptr<const Bubble> base,
                         std::vector<std::string>* warnings) {
  require(base != nullptr, "seed_family: no base bubble");
  if (nu < 1) fail(ErrorCode::invalid_argument, "seed_family: nu must be at least 1");
  const Params& P = base->params;
  const double a = P.scaling_exponent();
  const auto& g = u.grid();
  const std::size_t n = u.size();
  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) y[j] = std::pow(g.nodes()[j], a) * u[j];
  std::vector<std::size_t> peaks;
  for (std::size_t j = 1; j + 1 < n; ++j)
    if (y[j] > 0.0 && y[j] >= y[j - 1] && y[j] > y[j + 1]) peaks.push_back(j);
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t i, std::size_t j) { return y[i] > y[j]; });
  if (peaks.size() > static_cast<std::size_t>(nu)) peaks.resize(static_cast<std::size_t>(nu));
  std::sort(peaks.begin(), peaks.end());
  std::vector<std::size_t> kept;
  for (std::size_t j : peaks) {
    if (!kept.empty() && j - kept.back() <= 1) {
      if (warnings) warnings->push_back("seed scales collided; merged into one bubble");
      if (y[j] > y[kept.back()]) kept.back() = j;
      continue;
    }
    kept.push_back(j);
  }
  if (kept.size() < static_cast<std::size_t>(nu) && warnings) {
    std::ostringstream msg;
    msg << "found " << kept.size() << " bubble seeds for nu = " << nu;
    warnings->push_back(msg.str());
  }
  if (kept.empty()) fail(ErrorCode::degenerate_input, "seed_family: no positive local maximum");
  const double peak = base->profile.eval(1.0);
  BubbleFamily fam{{}, {}, base};
  for (std::size_t j : kept) {
    fam.scales.push_back(1.0 / g.nodes()[j]);
    fam.coeffs.push_back(y[j] / peak);
  }
  return fam;
}

StabilityReport project_multibubble(const RadialFn& u, int nu, std::shared_ptr<const Bubble> base,
                                    const ProjectOptions& opts) {
  std::vector<std::string> warnings;
  const BubbleFamily init = seed_family(u, nu, base, &warnings);
  StabilityReport rep = project_multibubble(u, init, opts);
  rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
  return rep;
}

RadialFn sharpness_bump(GridPtr grid) {
  return RadialFn::sample(std::move(grid), [](double r) {
    const double x = r - 2.0;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
  });
}

std::vector<double> sharpness_scales(const Params& P, int nu, double kappa) {
  if (nu < 1) fail(ErrorCode::invalid_argument, "sharpness_scales: nu must be at least 1");
  if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorCode::invalid_argument, "sharpness_scales: kappa must lie in (0, 1)");
  const double log_delta = 2.0 / (P.N() - 2.0 * P.s()) * std::log(kappa);
  std::vector<double> out;
  for (int i = 0; i < nu; ++i) out.push_back(std::exp(-log_delta * (0.5 * (nu - 1) - i)));
  return out;
}

RadialFn sharpness_family(const Bubble& V, const std::vector<double>& scales, const RadialFn& phi, double kappa) {
  phi.check_same_grid(V.profile);
  if (scales.empty()) fail(ErrorCode::invalid_argument, "sharpness_family: no scales");
  if (phi.has_tails()) fail(ErrorCode::invalid_argument, "sharpness_family: phi must have compact support");
  const std::size_t n = phi.size(), margin = std::min<std::size_t>(16, n / 4);
  for (std::size_t j = 0; j < margin; ++j)
    if (phi[j] != 0.0 || phi[n - 1 - j] != 0.0)
      fail(ErrorCode::invalid_argument, "sharpness_family: phi support reaches the grid ends");
  RadialFn u = phi * kappa;
  for (double l : scales) u += dilate(V, l);
  return u;
}

EnergyWindow energy_window_check(const RadialFn& u, int nu, const Bubble& V) {
  const Params& P = V.params;
  const double unit = std::pow(V.mu, P.energy_exponent());
  EnergyWindow w;
  w.energy = hs_inner(u, u, P);
  w.lower = (nu - 0.5) * unit;
  w.upper = (nu + 0.5) * unit;
  w.ok = w.energy >= w.lower && w.energy <= w.upper;
  return w;
}

std::vector<double> default_kappas() { return {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}; }

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

StabilitySweep stability_sweep(std::shared_ptr<const Bubble> V, const RadialFn& phi,
                               const std::vector<double>& kappas, int nu, int threads) {
  require(V != nullptr, "stability_sweep: no bubble");
  if (kappas.size() < 2) fail(ErrorCode::insufficient_data, "stability_sweep: need at least two kappas");
  const Params& P = V->params;
  StabilitySweep out;
  out.nu = nu;
  out.rows.resize(kappas.size());
  detail::parallel_for(kappas.size(), threads, [&](std::size_t k) {
    const double kappa = kappas[k];
    const auto scales = sharpness_scales(P, nu, kappa);
    const RadialFn u = sharpness_family(*V, scales, phi, kappa);
    BubbleFamily init{scales, std::vector<double>(scales.size(), 1.0), V};
    const StabilityReport rep = project_multibubble(u, init);
    double inter = 0.0, min_q = 1.0;
    for (std::size_t i = 0; i < scales.size(); ++i)
      for (std::size_t j = i + 1; j < scales.size(); ++j) {
        // integral form of <V_i, V_j>; the transform form loses accuracy once
        // the pair spans the whole grid
        inter = std::max(inter, two_bubble_integral(*V, rep.family.scales[i], rep.family.scales[j], P.p(), 1.0));
        min_q = std::min(min_q, qij(rep.family.scales[i], rep.family.scales[j]));
      }
    out.rows[k] = {kappa, rep.gamma, rep.distance, rep.distance / rep.gamma, inter,
                   rep.max_ortho_residual() / std::max(rep.distance, 1e-300), min_q, rep.energy,
                   rep.energy_window_ok};
  });
  std::vector<double> ks, gs, ds;
  double rmin = INFINITY, rmax = 0.0;
  for (const auto& r : out.rows) {
    ks.push_back(r.kappa);
    gs.push_back(r.gamma);
    ds.push_back(r.distance);
    rmin = std::min(rmin, r.ratio);
    rmax = std::max(rmax, r.ratio);
  }
  out.slope_gamma = loglog_slope(ks, gs);
  out.slope_distance = loglog_slope(ks, ds);
  out.ratio_spread = rmax / rmin;
  out.interaction_constant = 2.0 * out.rows.front().interaction / out.rows.front().gamma;
  out.interaction_bound_ok = true;
  for (const auto& r : out.rows)
    if (r.interaction > out.interaction_constant * r.gamma) out.interaction_bound_ok = false;
  return out;
}

double elementary_ratio_a(double a, double b, double p) {
  auto spow = [p](double x) { return std::copysign(std::pow(std::abs(x), p), x); };
  const double lhs = std::abs(spow(a + b) - spow(a));
  const double excess = std::max(0.0, lhs - p * std::pow(std::abs(a), p - 1.0) * std::abs(b));
  double den = std::pow(std::abs(b), p);
  if (p > 2.0) den += std::pow(std::abs(a), p - 2.0) * b * b;
  if (den == 0.0) return 0.0;
  return excess / den;
}

double elementary_ratio_b(const std::vector<double>& a, double p) {
  auto spow = [p](double x) { return std::copysign(std::pow(std::abs(x), p), x); };
  double sum = 0.0, each = 0.0, den = 0.0;
  for (double x : a) {
    sum += x;
    each += spow(x);
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) den += std::pow(std::abs(a[i]), p - 1.0) * std::abs(a[j]);
  const double lhs = std::abs(spow(sum) - each);
  if (den == 0.0) return 0.0;
  return lhs / den;
}

ElementaryConstants check_elementary_inequalities(double p, long samples, std::uint64_t seed, int nu) {
  if (!(p > 1.0)) fail(ErrorCode::invalid_argument, "check_elementary_inequalities: p must exceed 1");
  if (samples < 1) fail(ErrorCode::invalid_argument, "check_elementary_inequalities: need samples");
  if (nu < 2) fail(ErrorCode::invalid_argument, "check_elementary_inequalities: nu must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  std::bernoulli_distribution sign(0.5);
  auto draw = [&] {
    const double m = std::pow(10.0, expo(rng));
    return sign(rng) ? m : -m;
  };
  ElementaryConstants c;
  std::vector<double> a(static_cast<std::size_t>(nu));
  for (long k = 0; k < samples; ++k) {
    const double x = draw(), y = draw();
    c.max_ratio_a = std::max(c.max_ratio_a, elementary_ratio_a(x, y, p));
    for (auto& v : a) v = draw();
    c.max_ratio_b = std::max(c.max_ratio_b, elementary_ratio_b(a, p));
  }
  return c;
}

}  // namespace fhs
