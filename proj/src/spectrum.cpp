#include "fhslab/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "fhslab/error.hpp"
#include "fhslab/format.hpp"
#include "fhslab/frac_transform.hpp"
#include "fhslab/mellin.hpp"
#include "parallel.hpp"

namespace fhs {

namespace {

RadialFn weight_fn(const Bubble& V, double lambda) {
  const Params& P = V.params;
  const RadialFn Vl = lambda == 1.0 ? V.profile : dilate(V, lambda);
  return Vl.abs_pow(P.p() - 1.0).times_power(-P.t());
}

// Re-solves the problem on the span of the tail-extended eigenfunctions, using the
// same energy form and weighted pairing as every later check.
void rayleigh_ritz(SpectralReport& rep, const RadialFn& W) {
  const Params& P = rep.params;
  const auto k = static_cast<Eigen::Index>(rep.eigenfunctions.size());
  std::vector<RadialFn> L;
  for (const auto& e : rep.eigenfunctions) L.push_back(mellin_apply(e, MellinKind::power, 2.0 * P.s(), P.N()));
  Eigen::MatrixXd A(k, k), B(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& ei = rep.eigenfunctions[static_cast<std::size_t>(i)];
      const auto& ej = rep.eigenfunctions[static_cast<std::size_t>(j)];
      A(i, j) = A(j, i) = 0.5 * (l2_pairing(L[static_cast<std::size_t>(i)], ej, P) +
                                 l2_pairing(ei, L[static_cast<std::size_t>(j)], P));
      B(i, j) = B(j, i) = integrate_radial(ei.times(ej).times(W), 0.0, P);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  if (es.info() != Eigen::Success) fail(ErrorCode::solver_failure, "linearized_eigs: Rayleigh-Ritz step failed");
  std::vector<RadialFn> out;
  for (Eigen::Index c = 0; c < k; ++c) {
    RadialFn f = rep.eigenfunctions[0] * es.eigenvectors()(0, c);
    for (Eigen::Index i = 1; i < k; ++i) f += rep.eigenfunctions[static_cast<std::size_t>(i)] * es.eigenvectors()(i, c);
    // keep the sign of the dominant original component
    Eigen::Index dom = 0;
    es.eigenvectors().col(c).cwiseAbs().maxCoeff(&dom);
    if (es.eigenvectors()(dom, c) < 0.0) f *= -1.0;
    rep.eigenvalues[static_cast<std::size_t>(c)] = es.eigenvalues()[c];
    out.push_back(std::move(f));
  }
  rep.eigenfunctions = std::move(out);
}

}  // namespace

double weighted_pairing(const Bubble& V, double lambda, const RadialFn& f, const RadialFn& g) {
  return integrate_radial(f.times(g).times(weight_fn(V, lambda)), 0.0, V.params);
}

SpectralReport linearized_eigs(const Bubble& V, int k, double lambda) {
  const Params& P = V.params;
  if (k < 3) fail(ErrorCode::invalid_argument, "linearized_eigs: k must be at least 3");
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "linearized_eigs: lambda must be positive");
  const RadialFn W = weight_fn(V, lambda);
  const auto& g = V.profile.grid();
  const std::size_t n = g.size();

  // Discrete operator I_{2s} W is self-adjoint for sum_j w_j W_j f_j g_j with
  // w_j = h r_j^N; K = (wW)^{1/2} I_{2s} (W/w)^{1/2} is its symmetric form.
  std::vector<double> mass(n), sq(n), isq(n);
  double mmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    mass[j] = g.step() * std::pow(g.nodes()[j], P.N()) * W[j];
    mmax = std::max(mmax, mass[j]);
  }
  SpectralReport rep{P, lambda, {}, {}, 0.0, 0, 0};
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < n; ++j) {
    if (mass[j] > 1e-290 * mmax) {
      active.push_back(j);
      sq[j] = std::sqrt(mass[j]);
      isq[j] = std::sqrt(W[j] / (g.step() * std::pow(g.nodes()[j], P.N())));
    } else {
      ++rep.trimmed_nodes;
    }
  }
  const std::size_t m = active.size();
  if (m < static_cast<std::size_t>(4 * k)) fail(ErrorCode::solver_failure, "linearized_eigs: too few active nodes");

  MellinOptions exact;
  exact.denoise = false;
  const double s2 = 2.0 * P.s();
  auto apply = [&](const Eigen::VectorXd& x) {
    std::vector<double> in(n, 0.0);
    for (std::size_t a = 0; a < m; ++a) in[active[a]] = isq[active[a]] * x[static_cast<Eigen::Index>(a)];
    const RadialFn out =
        mellin_apply(RadialFn(V.profile.grid_ptr(), std::move(in)), MellinKind::power, -s2, P.N(), nullptr, exact);
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t a = 0; a < m; ++a) y[static_cast<Eigen::Index>(a)] = sq[active[a]] * out[active[a]];
    return y;
  };

  // Lanczos with full reorthogonalization; the wanted eigenvalues 1/mu are the largest.
  const auto mi = static_cast<Eigen::Index>(m);
  const int max_steps = static_cast<int>(std::min<std::size_t>(m, 600));
  Eigen::MatrixXd Q(mi, max_steps + 1);
  std::vector<double> alpha, beta;
  Eigen::VectorXd q0(mi);
  for (Eigen::Index a = 0; a < mi; ++a) q0[a] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(a));
  Q.col(0) = q0.normalized();
  Eigen::VectorXd theta;
  Eigen::MatrixXd S;
  bool converged = false;
  int steps = 0;
  for (int j = 0; j < max_steps; ++j) {
    Eigen::VectorXd z = apply(Q.col(j));
    const double a = Q.col(j).dot(z);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) z -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * z);
    const double b = z.norm();
    steps = j + 1;
    const bool check = steps >= 2 * k && (steps % 5 == 0 || b < 1e-14);
    if (check || steps == max_steps) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      theta = es.eigenvalues();
      S = es.eigenvectors();
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        const int c = steps - 1 - i;
        if (std::abs(b * S(steps - 1, c)) > 1e-11 * theta[steps - 1]) ok = false;
      }
      if (ok) {
        converged = true;
        break;
      }
    }
    if (b < 1e-300) break;
    beta.push_back(b);
    Q.col(j + 1) = z / b;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "linearized_eigs: Lanczos did not converge in " << steps << " steps";
    fail(ErrorCode::solver_failure, msg.str());
  }
  rep.lanczos_steps = steps;

  for (int i = 0; i < k; ++i) {
    const int c = steps - 1 - i;
    const double inv_mu = theta[c];
    if (!(inv_mu > 0.0)) fail(ErrorCode::solver_failure, "linearized_eigs: non-positive Ritz value");
    const Eigen::VectorXd y = Q.leftCols(steps) * S.col(c);
    std::vector<double> psi(n, 0.0);
    for (std::size_t a = 0; a < m; ++a)
      psi[active[a]] = y[static_cast<Eigen::Index>(a)] / sq[active[a]];
    // psi = mu I_{2s}(W psi) extends the eigenvector off the grid; the
    // eigenfunctions share the bubble's tail powers.
    RadialFn raw(V.profile.grid_ptr(), std::move(psi));
    raw.set_tails(fit_tail(g, raw.values(), Side::left, bubble_left_powers(P)),
                  fit_tail(g, raw.values(), Side::right, bubble_right_powers(P)));
    const RadialFn src = raw.times(W);
    RadialFn ef = mellin_apply(src, MellinKind::power, -s2, P.N(), nullptr, exact) * (1.0 / inv_mu);
    const double norm2 = integrate_radial(ef.times(ef).times(W), 0.0, P);
    ef *= 1.0 / std::sqrt(norm2);
    // sign convention: positive at the weight's peak
    std::size_t jmax = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (mass[j] > mass[jmax]) jmax = j;
    if (ef[jmax] < 0.0) ef *= -1.0;
    rep.eigenvalues.push_back(1.0 / inv_mu);
    rep.eigenfunctions.push_back(std::move(ef));
  }
  rayleigh_ritz(rep, W);
  rep.gap_margin = rep.eigenvalues[2] - P.p();
  return rep;
}

GapCheck spectral_gap_check(const Bubble& V, const RadialFn& f, const SpectralReport& rep, bool project) {
  const Params& P = V.params;
  if (rep.eigenvalues.size() < 3) fail(ErrorCode::invalid_argument, "spectral_gap_check: report needs mu_3");
  RadialFn u = f;
  if (project) {
    // V and V-dot are eigenfunctions, so H^s and weighted orthogonality coincide.
    const RadialFn Vl = dilate(V, rep.scale);
    const RadialFn Vd = bubble_derivative(V, rep.scale);
    for (const RadialFn* e : {&Vl, &Vd}) {
      const double c = weighted_pairing(V, rep.scale, u, *e) / weighted_pairing(V, rep.scale, *e, *e);
      u -= *e * c;
    }
  }
  GapCheck out;
  out.lhs = weighted_pairing(V, rep.scale, u, u);
  out.rhs = hs_inner(u, u, P) / rep.eigenvalues[2];
  if (!(out.rhs > 0.0) || !(out.lhs > 0.0))
    fail(ErrorCode::degenerate_input, "spectral_gap_check: test function vanishes after projection");
  out.ratio = out.lhs / out.rhs;
  return out;
}

void write_spectral_report(const SpectralReport& rep, std::ostream& out) {
  out << "N = " << rep.params.N() << '\n';
  out << "s = " << fmt_double(rep.params.s()) << '\n';
  out << "t = " << fmt_double(rep.params.t()) << '\n';
  out << "lambda = " << fmt_double(rep.scale) << '\n';
  out << "k = " << rep.eigenvalues.size() << '\n';
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    out << "mu_" << i + 1 << " = " << fmt_double(rep.eigenvalues[i]) << '\n';
  out << "gap_margin = " << fmt_double(rep.gap_margin) << '\n';
  out << "trimmed_nodes = " << rep.trimmed_nodes << '\n';
  out << "sector = radial\n";
}

RadialFn random_test_function(GridPtr grid, std::uint64_t seed, std::size_t index) {
  // one stream per index so the draw does not depend on the thread schedule
  std::seed_seq seq{seed, static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double c = std::pow(10.0, -2.0 + 4.0 * u01(rng));
  const double w = 0.3 + 1.2 * u01(rng);
  const double a = u01(rng) - 0.5;
  const double k = 4.0 * u01(rng);
  return RadialFn::sample(std::move(grid), [=](double r) {
    const double x = std::log(r / c) / w;
    return std::exp(-x * x) * (1.0 + a * std::sin(k * x));
  });
}

std::vector<GapCheck> random_gap_checks(const Bubble& V, const SpectralReport& report,
                                        std::size_t count, std::uint64_t seed, int threads) {
  std::vector<GapCheck> out(count);
  detail::parallel_for(count, threads, [&](std::size_t i) {
    out[i] = spectral_gap_check(V, random_test_function(V.profile.grid_ptr(), seed, i), report);
  });
  return out;
}

}  // namespace fhs
