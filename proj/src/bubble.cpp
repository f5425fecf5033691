#include "fhslab/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fhslab/error.hpp"
#include "fhslab/format.hpp"
#include "fhslab/frac_transform.hpp"
#include "lagrange.hpp"

namespace fhs {

std::vector<double> bubble_left_powers(const Params& P) {
  const double e = 2.0 * P.s() - P.t();
  return {0.0, e, 2.0 * e, 2.0, 3.0 * e, 2.0 + e, 4.0};
}

// mirror image of the left expansion under r -> 1/r
std::vector<double> bubble_right_powers(const Params& P) {
  std::vector<double> out;
  for (double x : bubble_left_powers(P)) out.push_back(-(P.N() - 2.0 * P.s()) - x);
  return out;
}

RadialFn bubble_seed(const Params& P, GridPtr grid) {
  const double a = P.scaling_exponent();
  RadialFn w = RadialFn::sample(grid, [a](double r) { return std::pow(1.0 + r * r, -a); });
  const double r0 = grid->r_min(), r1 = grid->r_max();
  const double c2 = a * (a + 1.0) / 2.0;
  PowerTail left(Side::left, r0, {{0.0, 1.0}, {2.0, -a * r0 * r0}, {4.0, c2 * std::pow(r0, 4)}});
  PowerTail right(Side::right, r1,
                  {{-2.0 * a, std::pow(r1, -2.0 * a)},
                   {-2.0 * a - 2.0, -a * std::pow(r1, -2.0 * a - 2.0)},
                   {-2.0 * a - 4.0, c2 * std::pow(r1, -2.0 * a - 4.0)}});
  w.set_tails(left, right);
  return w;
}

RadialFn nonlinearity(const RadialFn& u, const Params& P) {
  return u.signed_pow(P.p()).times_power(-P.t());
}

RadialFn euler_lagrange_residual(const RadialFn& u, const Params& P) {
  return frac_power(u, 2.0 * P.s(), P) - nonlinearity(u, P);
}

double residual_certificate(const RadialFn& v, const Params& P) {
  const double norm = hs_norm(v, P);
  if (norm == 0.0) return 0.0;
  return dual_norm(euler_lagrange_residual(v, P), P) / norm;
}

namespace {

RadialFn refit_bubble_tails(RadialFn f, const Params& P) {
  const auto& g = f.grid();
  f.set_tails(fit_tail(g, f.values(), Side::left, bubble_left_powers(P)),
              fit_tail(g, f.values(), Side::right, bubble_right_powers(P)));
  return f;
}

// Radius where r^amp f(r) peaks, refined by the interpolant's derivative.
double peak_radius(const RadialFn& f, double amp) {
  const auto& g = f.grid();
  const std::size_t n = f.size();
  std::size_t best = 0;
  double bv = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    if (f[j] <= 0.0) continue;
    const double v = amp * g.log_node(static_cast<std::ptrdiff_t>(j)) + std::log(f[j]);
    if (v > bv) {
      bv = v;
      best = j;
    }
  }
  if (best < 4 || best + 5 > n) return g.nodes()[best];
  auto lg = [&](std::ptrdiff_t k) {
    return amp * g.log_node(k) + std::log(f[static_cast<std::size_t>(k)]);
  };
  // Newton on the derivative of the 8-point interpolant around the discrete peak
  const auto base = static_cast<std::ptrdiff_t>(best) - 3;
  double u = 3.0;
  for (int it = 0; it < 30; ++it) {
    const auto d1 = detail::lagrange_derivative_weights<8>(u);
    const double eps = 1e-4;
    const auto d1p = detail::lagrange_derivative_weights<8>(u + eps);
    double g1 = 0.0, g1p = 0.0;
    for (int i = 0; i < 8; ++i) {
      g1 += d1[i] * lg(base + i);
      g1p += d1p[i] * lg(base + i);
    }
    const double g2 = (g1p - g1) / eps;
    if (g2 >= 0.0) break;
    const double step = -g1 / g2;
    u = std::clamp(u + step, 2.0, 5.0);
    if (std::abs(step) < 1e-13) break;
  }
  return std::exp(g.log_node(base) + u * g.step());
}

}  // namespace

Bubble solve_bubble(const Params& P, GridPtr grid, double tol, const SolveOptions& opts) {
  if (!(tol >= 1e-10)) fail(ErrorCode::invalid_argument, "solve_bubble: tol must be >= 1e-10");
  const double crit = P.crit(), p = P.p(), t = P.t();
  Bubble out{P, RadialFn(), 0.0, 0.0, tol, 0, {}};

  auto normalize = [&](const RadialFn& w, double* c) {
    const double norm = weighted_lp_norm(w, crit, -t, P);
    if (!(norm > 0.0) || !std::isfinite(norm))
      fail(ErrorCode::numerical_instability, "solve_bubble: iterate lost its norm");
    if (c) *c = norm;
    return w * (1.0 / norm);
  };
  auto step = [&](const RadialFn& w, double* c) {
    RadialFn T = refit_bubble_tails(frac_inverse(nonlinearity(w, P), 2.0 * P.s(), P), P);
    for (double v : T.values())
      if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "solve_bubble: non-positive iterate at iteration " << out.iterations;
        fail(ErrorCode::numerical_instability, msg.str());
      }
    return normalize(T, c);
  };

  RadialFn U = normalize(bubble_seed(P, grid), nullptr);
  double c = 1.0;
  double theta = 1.0;
  int rising = 0;
  double prev = INFINITY;
  bool converged = false;
  const double stop = 0.05 * tol;
  bool recentered = !opts.canonical_scale;
  int polish = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    ++out.iterations;
    RadialFn W = step(U, &c);
    if (theta < 1.0) W = normalize(refit_bubble_tails(U * (1.0 - theta) + W * theta, P), nullptr);
    const double diff = hs_norm(W - U, P) / hs_norm(W, P);
    out.history.push_back(diff);
    U = std::move(W);
    if (diff > prev) {
      if (++rising >= 2 && theta == 1.0) {
        theta = opts.damping;
        rising = 0;
      }
    } else {
      rising = 0;
    }
    prev = diff;
    if (diff < stop) {
      if (!recentered) {
        const double a = P.scaling_exponent();
        U = normalize(refit_bubble_tails(dilate(U, peak_radius(U, a), a), P), nullptr);
        recentered = true;
        prev = INFINITY;
        continue;
      }
      // one more application so that c belongs to the returned iterate
      if (++polish >= 1) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve_bubble: no convergence in " << opts.max_iterations << " iterations; history:";
    const std::size_t k0 = out.history.size() > 8 ? out.history.size() - 8 : 0;
    for (std::size_t k = k0; k < out.history.size(); ++k) msg << ' ' << out.history[k];
    fail(ErrorCode::solver_failure, msg.str());
  }
  // (-Delta)^s U = (1/c) U^p |x|^-t with ||U||_crit = 1, so mu = 1/c.
  out.mu = 1.0 / c;
  out.profile = U * std::pow(out.mu, 1.0 / (p - 1.0));
  out.profile = refit_bubble_tails(out.profile, P);
  out.residual = residual_certificate(out.profile, P);
  return out;
}

// ---------------------------------------------------------------- dilation

RadialFn dilate(const RadialFn& f, double lambda, double amp) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::invalid_argument, "dilate: lambda must be positive");
  const auto& g = f.grid();
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const double shift = std::log(lambda) / g.step();
  const double rounded = std::round(shift);
  const double scale = std::pow(lambda, amp);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (std::abs(shift - rounded) < 1e-9) {
    const auto k = static_cast<std::ptrdiff_t>(rounded);
    for (std::ptrdiff_t j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = scale * f.extended(j + k);
  } else {
    const std::ptrdiff_t lo = f.stencil_lo(), hi = f.stencil_hi();
    auto value = [&](std::ptrdiff_t k) {
      if (k < lo || k >= hi) return 0.0;
      return f.extended(k);
    };
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double pos = static_cast<double>(j) + shift;
      double v;
      if ((pos < 0.0 && f.left_tail().empty()) || (pos > static_cast<double>(n - 1) && f.right_tail().empty())) {
        v = 0.0;
      } else if (pos < 0.0 || pos > static_cast<double>(n - 1)) {
        v = (pos < 0.0 ? f.left_tail() : f.right_tail()).at_log(g.log_node(0) + pos * g.step());
      } else {
        const double fl = std::floor(pos);
        auto base = static_cast<std::ptrdiff_t>(fl) - 3;
        base = std::clamp(base, lo, hi - 8);
        bool positive = true;
        for (int i = 0; i < 8; ++i) positive = positive && value(base + i) > 0.0;
        if (positive) {
          v = std::exp(detail::interpolate([&](std::ptrdiff_t k) { return std::log(value(k)); }, pos, lo, hi));
        } else {
          v = detail::interpolate(value, pos, lo, hi);
        }
      }
      out[static_cast<std::size_t>(j)] = scale * v;
    }
  }
  // c (lambda r / e)^P lambda^amp = c lambda^{P+amp} (r/e)^P when the new tail
  // region maps into f's own tail; otherwise it maps into the grid, and the
  // tail is refit from the dilated samples with the same powers.
  auto map_tail = [&](const PowerTail& t, bool exact) {
    if (t.empty()) return t;
    if (!exact) {
      std::vector<double> powers;
      for (const auto& term : t.terms()) powers.push_back(term.power);
      return fit_tail(g, out, t.side(), powers);
    }
    std::vector<TailTerm> terms;
    for (const auto& term : t.terms())
      terms.push_back({term.power, term.coeff * std::pow(lambda, term.power + amp)});
    return PowerTail(t.side(), t.edge(), std::move(terms));
  };
  PowerTail left = map_tail(f.left_tail(), lambda <= 1.0);
  PowerTail right = map_tail(f.right_tail(), lambda >= 1.0);
  return RadialFn(f.grid_ptr(), std::move(out), std::move(left), std::move(right));
}

RadialFn dilate(const Bubble& V, double lambda) {
  return dilate(V.profile, lambda, V.params.scaling_exponent());
}

RadialFn bubble_derivative(const Bubble& V, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "bubble_derivative: lambda must be positive");
  const double a = V.params.scaling_exponent();
  const RadialFn base = V.profile * a + V.profile.log_derivative();
  return dilate(base, lambda, a) * (1.0 / lambda);
}

double mu_from_profile(const RadialFn& v, const Params& P) {
  const double e = hs_inner(v, v, P);
  if (!(e > 0.0)) fail(ErrorCode::consistency_failure, "mu: non-positive energy");
  return std::pow(e, 1.0 / P.energy_exponent());
}

double mu_constant(const Bubble& V) {
  const double mu = mu_from_profile(V.profile, V.params);
  if (std::abs(mu - V.mu) > 1e-4 * V.mu) {
    std::ostringstream msg;
    msg << "mu_constant: energy gives " << mu << " but the Rayleigh quotient gives " << V.mu;
    fail(ErrorCode::consistency_failure, msg.str());
  }
  return mu;
}

// ---------------------------------------------------------------- text format

namespace {

std::string tail_text(const PowerTail& t) {
  std::string s;
  for (const auto& term : t.terms()) {
    if (!s.empty()) s += ' ';
    s += fmt_double(term.power) + ':' + fmt_double(term.coeff);
  }
  return s;
}

std::vector<TailTerm> parse_tail(std::string_view s) {
  std::vector<TailTerm> terms;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) fail(ErrorCode::invalid_data, "bubble file: bad tail term");
    terms.push_back({parse_double(std::string_view(tok).substr(0, colon)),
                     parse_double(std::string_view(tok).substr(colon + 1))});
  }
  return terms;
}

}  // namespace

void save_bubble(const Bubble& V, std::ostream& out) {
  const auto& g = V.profile.grid();
  out << "# fhslab bubble profile\n";
  out << "# N = " << V.params.N() << '\n';
  out << "# s = " << fmt_double(V.params.s()) << '\n';
  out << "# t = " << fmt_double(V.params.t()) << '\n';
  out << "# mu = " << fmt_double(V.mu) << '\n';
  out << "# residual = " << fmt_double(V.residual) << '\n';
  out << "# tol = " << fmt_double(V.tol) << '\n';
  out << "# iterations = " << V.iterations << '\n';
  out << "# r_min = " << fmt_double(g.r_min()) << '\n';
  out << "# r_max = " << fmt_double(g.r_max()) << '\n';
  out << "# n = " << g.size() << '\n';
  out << "# tail_left = " << tail_text(V.profile.left_tail()) << '\n';
  out << "# tail_right = " << tail_text(V.profile.right_tail()) << '\n';
  for (std::size_t j = 0; j < g.size(); ++j)
    out << fmt_double(g.nodes()[j]) << ' ' << fmt_double(V.profile[j]) << '\n';
}

Bubble load_bubble(std::istream& in) {
  std::map<std::string, std::string> head;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty()) continue;
    if (l.front() == '#') {
      const auto eq = l.find('=');
      if (eq == std::string_view::npos) continue;
      head[std::string(trim(l.substr(1, eq - 1)))] = std::string(trim(l.substr(eq + 1)));
      continue;
    }
    const auto sp = l.find_first_of(" \t");
    if (sp == std::string_view::npos) fail(ErrorCode::invalid_data, "bubble file: expected two columns");
    values.push_back(parse_double(l.substr(sp + 1)));
  }
  for (const char* key : {"N", "s", "t", "mu", "residual", "r_min", "r_max", "n"})
    if (!head.count(key)) fail(ErrorCode::invalid_data, std::string("bubble file: missing ") + key);
  const Params P = parse_double(head["t"]) == 0.0
                       ? Params::validation(static_cast<int>(parse_int(head["N"])), parse_double(head["s"]), 0.0)
                       : Params(static_cast<int>(parse_int(head["N"])), parse_double(head["s"]),
                                parse_double(head["t"]));
  const auto n = static_cast<std::size_t>(parse_int(head["n"]));
  if (values.size() != n) fail(ErrorCode::invalid_data, "bubble file: sample count differs from n");
  GridPtr grid = make_log_grid(parse_double(head["r_min"]), parse_double(head["r_max"]), n);
  Bubble V{P, RadialFn(), 0.0, 0.0, 0.0, 0, {}};
  V.profile = RadialFn(grid, std::move(values),
                       PowerTail(Side::left, grid->r_min(), parse_tail(head["tail_left"])),
                       PowerTail(Side::right, grid->r_max(), parse_tail(head["tail_right"])));
  V.mu = parse_double(head["mu"]);
  V.residual = parse_double(head["residual"]);
  if (head.count("tol")) V.tol = parse_double(head["tol"]);
  if (head.count("iterations")) V.iterations = static_cast<int>(parse_int(head["iterations"]));
  return V;
}

void save_bubble_file(const Bubble& V, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  save_bubble(V, out);
  if (!out) fail(ErrorCode::io_error, "write failed: " + path);
}

Bubble load_bubble_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot read " + path);
  return load_bubble(in);
}

}  // namespace fhs
