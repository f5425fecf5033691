#include "fhslab/mellin.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "fhslab/error.hpp"

namespace fhs {

using cd = std::complex<double>;

cd log_gamma(cd z) {
  // shift right until Stirling converges to double precision
  cd shift = 0.0;
  int count = 0;
  while (z.real() < 12.0) {
    shift += std::log(z);
    z += 1.0;
    if (++count > 10000) fail(ErrorCode::invalid_argument, "log_gamma: argument too negative");
  }
  static const double c[] = {1.0 / 12.0,       -1.0 / 360.0,         1.0 / 1260.0,
                             -1.0 / 1680.0,    1.0 / 1188.0,         -691.0 / 360360.0,
                             1.0 / 156.0,      -3617.0 / 122400.0};
  const cd iz = 1.0 / z;
  const cd iz2 = iz * iz;
  cd series = 0.0;
  cd term = iz;
  for (double ck : c) {
    series += ck * term;
    term *= iz2;
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift;
}

namespace {

bool is_gamma_pole(cd z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

cd power_symbol(double beta, int N, cd z) {
  if (beta == 0.0) return 1.0;
  const cd a = 0.5 * (z + beta);
  const cd b = 0.5 * (static_cast<double>(N) - z);
  const cd c = 0.5 * z;
  const cd d = 0.5 * (static_cast<double>(N) - z - beta);
  if (is_gamma_pole(c) || is_gamma_pole(d)) return 0.0;
  if (is_gamma_pole(a) || is_gamma_pole(b))
    return {std::numeric_limits<double>::infinity(), 0.0};
  return std::pow(2.0, beta) * std::exp(log_gamma(a) + log_gamma(b) - log_gamma(c) - log_gamma(d));
}

cd fourier_symbol(int N, cd z) {
  const cd b = 0.5 * (static_cast<double>(N) - z);
  const cd c = 0.5 * z;
  if (is_gamma_pole(c)) return 0.0;
  if (is_gamma_pole(b)) return {std::numeric_limits<double>::infinity(), 0.0};
  return std::exp((0.5 * N - z) * std::log(2.0) + log_gamma(b) - log_gamma(c));
}

namespace {

constexpr double kDecay = 37.0;  // e^-37 ~ 1e-16
constexpr std::size_t kMaxFft = std::size_t{1} << 22;

struct FftPlans {
  fftw_plan forward;
  fftw_plan backward;
};

const FftPlans& plans_for(std::size_t M) {
  static std::mutex mu;
  static std::map<std::size_t, FftPlans> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find(M);
  if (it != plans.end()) return it->second;
  double* in = fftw_alloc_real(M);
  fftw_complex* out = fftw_alloc_complex(M / 2 + 1);
  FftPlans p;
  const int m = static_cast<int>(M);
  p.forward = fftw_plan_dft_r2c_1d(m, in, out, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_1d(m, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  return plans.emplace(M, p).first->second;
}

using SymbolKey = std::tuple<int, int, double, double, double, std::size_t>;
using SymbolTable = std::shared_ptr<const std::vector<cd>>;

SymbolTable symbol_table(MellinKind kind, int N, double beta, double q, double h, std::size_t M) {
  static std::mutex mu;
  static std::map<SymbolKey, SymbolTable> cache;
  static std::vector<SymbolKey> order;
  const SymbolKey key{static_cast<int>(kind), N, beta, q, h, M};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<std::vector<cd>>(M / 2 + 1);
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(M) * h);
  for (std::size_t m = 0; m <= M / 2; ++m) {
    const cd z(q, -dw * static_cast<double>(m));
    cd s = kind == MellinKind::power ? power_symbol(beta, N, z) : fourier_symbol(N, z);
    if (m == M / 2) s = s.real();
    (*table)[m] = s;
  }
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (order.size() >= 48) {
    cache.erase(order.front());
    order.erase(order.begin());
  }
  order.push_back(key);
  cache.emplace(key, table);
  return table;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

struct Aligned {
  explicit Aligned(std::size_t n) : re(fftw_alloc_real(n)), co(fftw_alloc_complex(n / 2 + 1)) {}
  ~Aligned() {
    fftw_free(re);
    fftw_free(co);
  }
  Aligned(const Aligned&) = delete;
  Aligned& operator=(const Aligned&) = delete;
  double* re;
  fftw_complex* co;
};

// Candidate powers for the output tails. Input powers the symbol annihilates
// (even integers under a fractional power, constants under the Fourier map)
// produce no output term.
void output_powers(const RadialFn& f, MellinKind kind, double beta, int N,
                   std::vector<double>& left, std::vector<double>& right) {
  auto live = [&](double power) {
    const cd z(-power, 0.0);
    const cd s = kind == MellinKind::power ? power_symbol(beta, N, z) : fourier_symbol(N, z);
    return std::abs(s) != 0.0;
  };
  if (kind == MellinKind::power) {
    for (const auto& t : f.left_tail().terms())
      if (live(t.power)) left.push_back(t.power - beta);
    for (const auto& t : f.right_tail().terms())
      if (live(t.power)) right.push_back(t.power - beta);
    left.push_back(0.0);
    left.push_back(2.0);
    right.push_back(-(N + beta));
    right.push_back(-(N + beta + 2.0));
  } else {
    // small r <-> large rho
    for (const auto& t : f.right_tail().terms())
      if (live(t.power)) left.push_back(-t.power - N);
    for (const auto& t : f.left_tail().terms())
      if (live(t.power)) right.push_back(-t.power - N);
    left.push_back(0.0);
    left.push_back(2.0);
  }
}

double fit_error(const RadialFn& out) {
  const auto& g = out.grid();
  const std::size_t n = g.size();
  const std::size_t w = std::min<std::size_t>(n / 8, 64);
  double err = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t jl = i, jr = n - 1 - i;
    const double vl = out[jl], vr = out[jr];
    const double tl = out.left_tail().empty() ? vl : out.left_tail()(g.nodes()[jl]);
    const double tr = out.right_tail().empty() ? vr : out.right_tail()(g.nodes()[jr]);
    if (vl != 0.0) err = std::max(err, std::abs(tl - vl) / std::abs(vl));
    if (vr != 0.0) err = std::max(err, std::abs(tr - vr) / std::abs(vr));
  }
  return err;
}

}  // namespace

RadialFn mellin_apply(const RadialFn& f, MellinKind kind, double beta, int N,
                      TransformReport* report, MellinOptions opts) {
  f.check_finite("transform");
  const RadialGrid& grid = f.grid();
  const GridPtr out_grid = kind == MellinKind::power ? f.grid_ptr() : grid.reciprocal();
  const std::size_t n = grid.size();
  TransformReport rep;

  bool all_zero = std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
  if (all_zero && !f.has_tails()) {
    if (report) *report = rep;
    return RadialFn::zero(out_grid);
  }

  // Mellin strip of the input from its tails, intersected with the operator's.
  double lo = kind == MellinKind::power ? -beta : 0.0;
  double hi = static_cast<double>(N);
  for (const auto& t : f.left_tail().terms()) lo = std::max(lo, -t.power);
  for (const auto& t : f.right_tail().terms()) hi = std::min(hi, -t.power);
  if (!(hi - lo > 1e-6)) {
    std::ostringstream msg;
    msg << "transform: no admissible Mellin line (strip " << lo << " .. " << hi
        << "); the input does not decay enough for this operator";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  if (!(opts.line > 0.0 && opts.line < 1.0)) fail(ErrorCode::invalid_argument, "transform: line must lie in (0, 1)");
  const double q = lo + opts.line * (hi - lo);
  const double h = grid.step();
  const auto pad_left = static_cast<std::size_t>(std::ceil(kDecay / (q - lo) / h));
  const auto pad_right = static_cast<std::size_t>(std::ceil(kDecay / (hi - q) / h));
  std::size_t pl = f.left_tail().empty() ? 0 : pad_left;
  std::size_t pr = f.right_tail().empty() ? 0 : pad_right;
  std::size_t gap = std::max(pad_left, pad_right);
  std::size_t M = next_pow2(n + pl + pr + gap);
  if (M > kMaxFft) {
    M = kMaxFft;
    const double shrink = static_cast<double>(M - n) / static_cast<double>(pl + pr + gap);
    pl = static_cast<std::size_t>(static_cast<double>(pl) * shrink);
    pr = static_cast<std::size_t>(static_cast<double>(pr) * shrink);
    gap = M - n - pl - pr;
    rep.warning = true;
  }
  rep.bias = q;
  rep.strip_lo = lo;
  rep.strip_hi = hi;
  rep.fft_size = M;
  rep.pad_left = pl;
  rep.pad_right = pr;

  Aligned buf(M);
  double* a = buf.re;
  const double x0 = grid.log_node(0);
  const auto ipl = static_cast<std::ptrdiff_t>(pl);
  double mass = 0.0, pad_mass = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const auto j = static_cast<std::ptrdiff_t>(k) - ipl;
    double v = 0.0;
    if (j < 0) {
      v = f.left_tail().at_log(x0 + static_cast<double>(j) * h);
    } else if (j < static_cast<std::ptrdiff_t>(n)) {
      v = f[static_cast<std::size_t>(j)];
    } else if (j < static_cast<std::ptrdiff_t>(n + pr)) {
      v = f.right_tail().at_log(x0 + static_cast<double>(j) * h);
    }
    const double x = x0 + static_cast<double>(j) * h;
    a[k] = v == 0.0 ? 0.0 : v * std::exp(q * x);
    mass += std::abs(a[k]);
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) pad_mass += std::abs(a[k]);
  }
  rep.extension_share = mass > 0.0 ? pad_mass / mass : 0.0;

  double l2 = 0.0;
  for (std::size_t k = 0; k < M; ++k) l2 += a[k] * a[k];
  l2 = std::sqrt(l2);

  const FftPlans& plans = plans_for(M);
  fftw_execute_dft_r2c(plans.forward, a, buf.co);
  const SymbolTable sym = symbol_table(kind, N, beta, q, h, M);
  // Modes past the last one above the rounding floor carry only noise, which
  // a growing symbol would amplify.
  std::size_t m_end = M / 2 + 1;
  if (opts.denoise) {
    const double floor = 32.0 * std::numeric_limits<double>::epsilon() * l2;
    std::size_t last = 0;
    for (std::size_t m = 0; m <= M / 2; ++m)
      if (std::hypot(buf.co[m][0], buf.co[m][1]) > floor) last = m;
    m_end = std::min(M / 2 + 1, last + 8);
    rep.cutoff_mode = m_end;
  }
  for (std::size_t m = m_end; m <= M / 2; ++m) buf.co[m][0] = buf.co[m][1] = 0.0;
  for (std::size_t m = 0; m < m_end; ++m) {
    const cd v = cd(buf.co[m][0], buf.co[m][1]) * (*sym)[m];
    buf.co[m][0] = v.real();
    buf.co[m][1] = v.imag();
  }
  fftw_execute_dft_c2r(plans.backward, buf.co, a);
  const double inv = 1.0 / static_cast<double>(M);

  double peak = 0.0;
  for (std::size_t k = 0; k < M; ++k) peak = std::max(peak, std::abs(a[k]));
  {
    // leakage probe: middle of the zero gap
    const std::size_t mid = (pl + n + pr + M) / 2 % M;
    rep.wrap_level = peak > 0.0 ? std::abs(a[mid]) / peak : 0.0;
    if (rep.wrap_level > 1e-10) rep.warning = true;
  }

  std::vector<double> out(n);
  if (kind == MellinKind::power) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = grid.log_node(static_cast<std::ptrdiff_t>(j));
      out[j] = a[pl + j] * inv * std::exp(-(q + beta) * x);
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double xr = grid.log_node(static_cast<std::ptrdiff_t>(n - 1 - j));
      // rho_j = 1/r_{n-1-j}: rho^{q-N} = exp((N-q) x_{n-1-j})
      out[j] = a[pl + n - 1 - j] * inv * std::exp((static_cast<double>(N) - q) * xr);
    }
  }
  std::vector<double> lp, rp;
  output_powers(f, kind, beta, N, lp, rp);
  const RadialGrid& og = *out_grid;
  PowerTail left = fit_tail(og, out, Side::left, lp);
  PowerTail right = fit_tail(og, out, Side::right, rp);
  RadialFn result(out_grid, std::move(out), std::move(left), std::move(right));
  rep.tail_fit_error = fit_error(result);
  if (report) *report = rep;
  return result;
}

}  // namespace fhs
