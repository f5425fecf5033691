#include "fhslab/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "fhslab/error.hpp"
#include "lagrange.hpp"

namespace fhs {

namespace {

constexpr std::size_t kMaxTailTerms = 8;
constexpr double kPowerMergeTol = 1e-9;

bool more_dominant(Side side, double a, double b) {
  return side == Side::right ? a > b : a < b;
}

}  // namespace

// ---------------------------------------------------------------- grid

RadialGrid::RadialGrid(double r_min, double r_max, std::size_t n)
    : r_min_(r_min), r_max_(r_max), n_(n) {
  x0_ = std::log(r_min);
  h_ = (std::log(r_max) - x0_) / static_cast<double>(n - 1);
  nodes_.resize(n);
  for (std::size_t j = 0; j < n; ++j) nodes_[j] = std::exp(x0_ + static_cast<double>(j) * h_);
  nodes_.front() = r_min;
  nodes_.back() = r_max;
}

double RadialGrid::ratio() const { return std::exp(h_); }

double RadialGrid::node(std::ptrdiff_t j) const {
  if (j >= 0 && static_cast<std::size_t>(j) < n_) return nodes_[static_cast<std::size_t>(j)];
  return std::exp(log_node(j));
}

GridPtr RadialGrid::create(double r_min, double r_max, std::size_t n, std::size_t min_n) {
  if (!(r_min > 0.0) || !std::isfinite(r_min))
    fail(ErrorCode::invalid_argument, "grid: r_min must be positive");
  if (!(r_min < r_max) || !std::isfinite(r_max))
    fail(ErrorCode::invalid_argument, "grid: r_min must be below r_max");
  if (n < min_n) {
    std::ostringstream msg;
    msg << "grid: n = " << n << " violates n >= " << min_n;
    fail(ErrorCode::invalid_argument, msg.str());
  }
  return GridPtr(new RadialGrid(r_min, r_max, n));
}

GridPtr RadialGrid::reciprocal() const { return create(1.0 / r_max_, 1.0 / r_min_, n_, 2); }

GridPtr make_log_grid(double r_min, double r_max, std::size_t n) {
  return RadialGrid::create(r_min, r_max, n, 8);
}

GridPtr make_default_grid() { return make_log_grid(1e-6, 1e6, 4096); }

// ---------------------------------------------------------------- tails

PowerTail::PowerTail(Side side, double edge, std::vector<TailTerm> terms)
    : side_(side), edge_(edge), terms_(std::move(terms)) {
  normalize();
}

void PowerTail::normalize() {
  std::sort(terms_.begin(), terms_.end(), [this](const TailTerm& a, const TailTerm& b) {
    return more_dominant(side_, a.power, b.power);
  });
  std::vector<TailTerm> merged;
  for (const auto& t : terms_) {
    if (!std::isfinite(t.coeff) || !std::isfinite(t.power))
      fail(ErrorCode::invalid_data, "tail: non-finite term");
    if (!merged.empty() && std::abs(merged.back().power - t.power) < kPowerMergeTol)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  double scale = 0.0;
  for (const auto& t : merged) scale = std::max(scale, std::abs(t.coeff));
  terms_.clear();
  for (const auto& t : merged)
    if (t.coeff != 0.0 && std::abs(t.coeff) > 1e-17 * scale) terms_.push_back(t);
  if (terms_.size() > kMaxTailTerms) terms_.resize(kMaxTailTerms);
}

double PowerTail::at_log(double x) const {
  const double d = x - std::log(edge_);
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coeff * std::exp(t.power * d);
  return acc;
}

double PowerTail::operator()(double r) const { return at_log(std::log(r)); }

double PowerTail::leading_power() const {
  if (terms_.empty()) fail(ErrorCode::invalid_argument, "tail: empty");
  return terms_.front().power;
}

PowerTail PowerTail::scaled(double c) const {
  PowerTail out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  if (c == 0.0) out.terms_.clear();
  return out;
}

PowerTail PowerTail::shifted(double a) const {
  PowerTail out = *this;
  const double f = std::pow(edge_, a);
  for (auto& t : out.terms_) {
    t.power += a;
    t.coeff *= f;
  }
  return out;
}

PowerTail PowerTail::log_derivative() const {
  std::vector<TailTerm> terms;
  for (const auto& t : terms_) terms.push_back({t.power, t.coeff * t.power});
  return PowerTail(side_, edge_, std::move(terms));
}

PowerTail PowerTail::rebased(double new_edge) const {
  PowerTail out = *this;
  for (auto& t : out.terms_) t.coeff *= std::pow(new_edge / edge_, t.power);
  out.edge_ = new_edge;
  return out;
}

PowerTail PowerTail::sum(const PowerTail& a, double ca, const PowerTail& b, double cb) {
  if (b.empty() || cb == 0.0) return a.scaled(ca);
  if (a.empty() || ca == 0.0) return b.scaled(cb);
  if (a.side_ != b.side_) fail(ErrorCode::invalid_argument, "tail: side mismatch");
  const PowerTail bb = b.edge_ == a.edge_ ? b : b.rebased(a.edge_);
  std::vector<TailTerm> terms;
  for (const auto& t : a.terms_) terms.push_back({t.power, ca * t.coeff});
  for (const auto& t : bb.terms_) terms.push_back({t.power, cb * t.coeff});
  return PowerTail(a.side_, a.edge_, std::move(terms));
}

PowerTail PowerTail::product(const PowerTail& a, const PowerTail& b) {
  if (a.empty() || b.empty()) return PowerTail(a.side_, a.edge_, {});
  if (a.side_ != b.side_) fail(ErrorCode::invalid_argument, "tail: side mismatch");
  const PowerTail bb = b.edge_ == a.edge_ ? b : b.rebased(a.edge_);
  std::vector<TailTerm> terms;
  for (const auto& x : a.terms_)
    for (const auto& y : bb.terms_) terms.push_back({x.power + y.power, x.coeff * y.coeff});
  return PowerTail(a.side_, a.edge_, std::move(terms));
}

PowerTail PowerTail::power(double gamma, bool signed_power) const {
  if (terms_.empty()) return *this;
  if (gamma == 0.0) return PowerTail(side_, edge_, {{0.0, 1.0}});
  // expand around the term that is largest at the edge
  std::size_t li = 0;
  for (std::size_t k = 1; k < terms_.size(); ++k)
    if (std::abs(terms_[k].coeff) > std::abs(terms_[li].coeff)) li = k;
  const TailTerm lead = terms_[li];
  // y = sum_{k != lead} (c_k/c_lead) (r/edge)^{P_k - P_lead}
  std::vector<TailTerm> y;
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (k != li) y.push_back({terms_[k].power - lead.power, terms_[k].coeff / lead.coeff});
  auto mul = [this](const std::vector<TailTerm>& u, const std::vector<TailTerm>& v) {
    std::vector<TailTerm> w;
    for (const auto& a : u)
      for (const auto& b : v) w.push_back({a.power + b.power, a.coeff * b.coeff});
    return PowerTail(side_, 1.0, std::move(w)).terms_;
  };
  std::vector<TailTerm> series{{0.0, 1.0}};
  std::vector<TailTerm> ypow = y;
  double binom = 1.0;
  for (int k = 1; k <= 3 && !ypow.empty(); ++k) {
    binom *= (gamma - (k - 1)) / k;
    for (const auto& t : ypow) series.push_back({t.power, binom * t.coeff});
    if (k < 3) ypow = mul(ypow, y);
  }
  const double mag = std::pow(std::abs(lead.coeff), gamma);
  const double c0 = signed_power && lead.coeff < 0.0 ? -mag : mag;
  std::vector<TailTerm> out;
  for (const auto& t : series) out.push_back({gamma * lead.power + t.power, c0 * t.coeff});
  return PowerTail(side_, edge_, std::move(out));
}

double PowerTail::integral(double weight_power) const {
  double acc = 0.0;
  const double base = std::pow(edge_, weight_power);
  for (const auto& t : terms_) {
    const double e = t.power + weight_power;
    const bool decays = side_ == Side::left ? e > 0.0 : e < 0.0;
    if (!decays) {
      std::ostringstream msg;
      msg << "integrand tail r^" << e << " is not integrable on the "
          << (side_ == Side::left ? "origin" : "infinity") << " side";
      fail(ErrorCode::non_integrable_weight, msg.str());
    }
    acc += t.coeff * base / std::abs(e);
  }
  return acc;
}

PowerTail fit_tail(const RadialGrid& grid, const std::vector<double>& values, Side side,
                   std::vector<double> powers, std::size_t window) {
  const std::size_t n = grid.size();
  const double edge = side == Side::left ? grid.r_min() : grid.r_max();
  if (window == 0) {
    const auto decade = static_cast<std::size_t>(std::lround(1.5 * std::log(10.0) / grid.step()));
    window = std::clamp<std::size_t>(decade, 12, n / 4);
  }
  window = std::min(window, n);
  std::sort(powers.begin(), powers.end(),
            [side](double a, double b) { return more_dominant(side, a, b); });
  std::vector<double> keep;
  for (double p : powers) {
    bool dup = false;
    for (double q : keep) dup = dup || std::abs(p - q) < 0.1;
    if (!dup) keep.push_back(p);
    if (keep.size() == 5) break;
  }
  if (keep.empty()) return PowerTail(side, edge, {});
  bool all_zero = true;
  const std::size_t m = window;
  Eigen::MatrixXd A(m, keep.size());
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = side == Side::left ? i : n - 1 - i;
    const double d = grid.log_node(static_cast<std::ptrdiff_t>(j)) - std::log(edge);
    const double norm = std::exp(keep[0] * d);
    for (std::size_t k = 0; k < keep.size(); ++k) A(i, k) = std::exp(keep[k] * d) / norm;
    b(i) = values[j] / norm;
    all_zero = all_zero && values[j] == 0.0;
  }
  if (all_zero) return PowerTail(side, edge, {});
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(1e-13);
  const Eigen::VectorXd c = cod.solve(b);
  std::vector<TailTerm> terms;
  for (std::size_t k = 0; k < keep.size(); ++k) terms.push_back({keep[k], c(k)});
  return PowerTail(side, edge, std::move(terms));
}

// ---------------------------------------------------------------- functions

RadialFn::RadialFn(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorCode::invalid_argument, "function: null grid");
  if (values_.size() != grid_->size())
    fail(ErrorCode::invalid_argument, "function: value count differs from grid size");
  left_ = PowerTail(Side::left, grid_->r_min(), {});
  right_ = PowerTail(Side::right, grid_->r_max(), {});
}

RadialFn::RadialFn(GridPtr grid, std::vector<double> values, PowerTail left, PowerTail right)
    : RadialFn(std::move(grid), std::move(values)) {
  set_tails(std::move(left), std::move(right));
}

void RadialFn::set_tails(PowerTail left, PowerTail right) {
  if (left.side() != Side::left || right.side() != Side::right)
    fail(ErrorCode::invalid_argument, "function: tail sides swapped");
  left_ = left.edge() == grid_->r_min() ? std::move(left) : left.rebased(grid_->r_min());
  right_ = right.edge() == grid_->r_max() ? std::move(right) : right.rebased(grid_->r_max());
}

RadialFn RadialFn::zero(GridPtr grid) {
  const std::size_t n = grid->size();
  return RadialFn(std::move(grid), std::vector<double>(n, 0.0));
}

RadialFn RadialFn::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->nodes()[j]);
  return RadialFn(std::move(grid), std::move(v));
}

RadialFn RadialFn::without_tails() const { return RadialFn(grid_, values_); }

double RadialFn::extended(std::ptrdiff_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  if (k >= 0 && k < n) return values_[static_cast<std::size_t>(k)];
  const double x = grid_->log_node(k);
  return k < 0 ? left_.at_log(x) : right_.at_log(x);
}

double RadialFn::eval(double r) const {
  if (!(r > 0.0)) fail(ErrorCode::invalid_argument, "function: radius must be positive");
  const double pos = (std::log(r) - grid_->log_node(0)) / grid_->step();
  const double n1 = static_cast<double>(values_.size() - 1);
  if (pos < 0.0) return left_(r);
  if (pos > n1) return right_(r);
  return detail::interpolate([this](std::ptrdiff_t k) { return extended(k); }, pos,
                             stencil_lo(), stencil_hi());
}

std::ptrdiff_t RadialFn::stencil_lo() const {
  return left_.empty() ? 0 : PTRDIFF_MIN / 2;
}

std::ptrdiff_t RadialFn::stencil_hi() const {
  return right_.empty() ? static_cast<std::ptrdiff_t>(values_.size()) : PTRDIFF_MAX / 2;
}

void RadialFn::check_same_grid(const RadialFn& o) const {
  if (!grid_ || !o.grid_ || !(grid_ == o.grid_ || grid_->same_as(*o.grid_)))
    fail(ErrorCode::invalid_argument, "function: grid mismatch");
}

void RadialFn::check_finite(const char* what) const {
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_data, std::string(what) + ": non-finite sample");
}

RadialFn RadialFn::combine(double a, const RadialFn& o, double b) const {
  check_same_grid(o);
  RadialFn out(grid_, values_);
  for (std::size_t j = 0; j < values_.size(); ++j) out.values_[j] = a * values_[j] + b * o.values_[j];
  out.left_ = PowerTail::sum(left_, a, o.left_, b);
  out.right_ = PowerTail::sum(right_, a, o.right_, b);
  return out;
}

RadialFn& RadialFn::operator+=(const RadialFn& o) { return *this = combine(1.0, o, 1.0); }
RadialFn& RadialFn::operator-=(const RadialFn& o) { return *this = combine(1.0, o, -1.0); }

RadialFn& RadialFn::operator*=(double c) {
  for (double& v : values_) v *= c;
  left_ = left_.scaled(c);
  right_ = right_.scaled(c);
  return *this;
}

RadialFn RadialFn::times(const RadialFn& o) const {
  check_same_grid(o);
  RadialFn out(grid_, values_);
  for (std::size_t j = 0; j < values_.size(); ++j) out.values_[j] = values_[j] * o.values_[j];
  out.left_ = PowerTail::product(left_, o.left_);
  out.right_ = PowerTail::product(right_, o.right_);
  return out;
}

RadialFn RadialFn::signed_pow(double gamma) const {
  RadialFn out(grid_, values_);
  for (double& v : out.values_) v = std::copysign(std::pow(std::abs(v), gamma), v);
  out.left_ = left_.power(gamma, true);
  out.right_ = right_.power(gamma, true);
  return out;
}

RadialFn RadialFn::abs_pow(double gamma) const {
  RadialFn out(grid_, values_);
  for (double& v : out.values_) v = std::pow(std::abs(v), gamma);
  out.left_ = left_.power(gamma, false);
  out.right_ = right_.power(gamma, false);
  return out;
}

RadialFn RadialFn::times_power(double a) const {
  RadialFn out(grid_, values_);
  const auto& r = grid_->nodes();
  for (std::size_t j = 0; j < values_.size(); ++j) out.values_[j] *= std::pow(r[j], a);
  out.left_ = left_.shifted(a);
  out.right_ = right_.shifted(a);
  return out;
}

RadialFn RadialFn::log_derivative() const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  constexpr int K = 9;
  constexpr int half = 4;
  const double h = grid_->step();
  RadialFn out(grid_, values_);
  const auto central = detail::lagrange_derivative_weights<K>(half);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    std::ptrdiff_t base = j - half;
    // without a tail model the stencil must stay inside the grid
    if (base < 0 && left_.empty()) base = 0;
    if (base + K > n && right_.empty()) base = n - K;
    const auto w = base == j - half ? central
                                    : detail::lagrange_derivative_weights<K>(
                                          static_cast<double>(j - base));
    double acc = 0.0;
    for (int i = 0; i < K; ++i) acc += w[i] * extended(base + i);
    out.values_[static_cast<std::size_t>(j)] = acc / h;
  }
  out.left_ = left_.log_derivative();
  out.right_ = right_.log_derivative();
  return out;
}

// ---------------------------------------------------------------- quadrature

namespace {

constexpr int kGregoryOrder = 5;
constexpr double kGregoryCoeff[kGregoryOrder] = {1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0,
                                                 3.0 / 160.0, 863.0 / 60480.0};

// End weights w_0..w_K of the Gregory rule with K difference corrections.
std::vector<double> gregory_end(int K) {
  std::vector<double> w(static_cast<std::size_t>(K) + 1, 1.0);
  w[0] = 0.5;
  for (int k = 1; k <= K; ++k) {
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      if (j > 0) binom = binom * (k - j + 1) / j;
      w[static_cast<std::size_t>(j)] -= kGregoryCoeff[k - 1] * ((j % 2) ? -1.0 : 1.0) * binom;
    }
  }
  return w;
}

int gregory_order(std::size_t m) {
  if (m < 2) return -1;
  return std::min<int>(kGregoryOrder, static_cast<int>(m / 2) - 1);
}

// Unit-spacing end-corrected trapezoid sum of g[0..m-1].
double gregory_sum(const double* g, std::size_t m) {
  if (m == 0) return 0.0;
  if (m == 1) return 0.0;
  const int K = gregory_order(m);
  if (K <= 0) {
    double acc = 0.5 * (g[0] + g[m - 1]);
    for (std::size_t j = 1; j + 1 < m; ++j) acc += g[j];
    return acc;
  }
  static std::mutex mu;
  static std::map<int, std::vector<double>> ends;
  std::vector<double> w;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = ends.find(K);
    if (it == ends.end()) it = ends.emplace(K, gregory_end(K)).first;
    w = it->second;
  }
  double acc = 0.0;
  const auto kk = static_cast<std::size_t>(K);
  for (std::size_t j = kk + 1; j + kk + 1 < m; ++j) acc += g[j];
  for (std::size_t j = 0; j <= kk; ++j) acc += w[j] * (g[j] + g[m - 1 - j]);
  return acc;
}

std::vector<double> integrand(const RadialFn& f, double k) {
  const auto& grid = f.grid();
  std::vector<double> g(f.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double v = f[j];
    if (std::isnan(v)) fail(ErrorCode::invalid_data, "integrate: NaN sample");
    g[j] = v == 0.0 ? 0.0 : v * std::exp(k * grid.log_node(static_cast<std::ptrdiff_t>(j)));
  }
  return g;
}

void check_weight(const Params& params, double a) {
  if (!(params.N() + a > 0.0)) {
    std::ostringstream msg;
    msg << "weight |x|^" << a << " is not integrable at the origin in dimension " << params.N();
    fail(ErrorCode::non_integrable_weight, msg.str());
  }
}

// int of the tail c (r/e)^P r^k d(log r) between log radii x0 < x1 (either may be infinite).
double tail_segment(const PowerTail& tail, double k, double x0, double x1) {
  double acc = 0.0;
  const double le = std::log(tail.edge());
  for (const auto& t : tail.terms()) {
    const double e = t.power + k;
    const double pre = t.coeff * std::exp(-t.power * le);
    if (std::abs(e) < 1e-14) {
      acc += pre * (x1 - x0);
    } else {
      const double hi = std::isinf(x1) ? 0.0 : std::exp(e * x1);
      const double lo = std::isinf(x0) ? 0.0 : std::exp(e * x0);
      acc += pre * (hi - lo) / e;
    }
  }
  return acc;
}

}  // namespace

const std::vector<double>& gregory_weights(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> w(n, 1.0);
  const int K = gregory_order(n);
  if (K <= 0) {
    if (n >= 2) w.front() = w.back() = 0.5;
    if (n == 1) w[0] = 0.0;
  } else {
    const auto e = gregory_end(K);
    for (std::size_t j = 0; j < e.size(); ++j) w[j] = w[n - 1 - j] = e[j];
  }
  return cache.emplace(n, std::move(w)).first->second;
}

IntegralReport integrate_radial_report(const RadialFn& f, double a, const Params& params) {
  check_weight(params, a);
  const double k = params.N() + a;
  const auto& grid = f.grid();
  const auto g = integrand(f, k);
  const double h = grid.step();
  double core = h * gregory_sum(g.data(), g.size());
  const double left = f.left_tail().integral(k);
  const double right = f.right_tail().integral(k);
  IntegralReport rep;
  rep.value = params.sphere_area() * (core + left + right);

  // outermost decade on each side without a tail model
  const auto decade = static_cast<std::size_t>(std::ceil(std::log(10.0) / h));
  double total = 0.0, edge_mass = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    total += std::abs(g[j]);
    const bool in_left = j < decade && f.left_tail().empty();
    const bool in_right = j + decade >= g.size() && f.right_tail().empty();
    if (in_left || in_right) edge_mass += std::abs(g[j]);
  }
  total *= h;
  edge_mass *= h;
  const double tails = std::abs(left) + std::abs(right);
  rep.tail_fraction = total + tails > 0.0 ? (edge_mass + tails) / (total + tails) : 0.0;
  rep.tail_warning = total > 0.0 && edge_mass / (total + tails) > 1e-8;
  return rep;
}

double integrate_radial(const RadialFn& f, double a, const Params& params) {
  check_weight(params, a);
  const double k = params.N() + a;
  const auto g = integrand(f, k);
  const double core = f.grid().step() * gregory_sum(g.data(), g.size());
  return params.sphere_area() * (core + f.left_tail().integral(k) + f.right_tail().integral(k));
}

double integrate_radial_ball(const RadialFn& f, double a, double R, const Params& params) {
  check_weight(params, a);
  if (!(R > 0.0)) fail(ErrorCode::invalid_argument, "ball radius must be positive");
  const double k = params.N() + a;
  const auto& grid = f.grid();
  const double X = std::log(R);
  const double x0 = grid.log_node(0);
  const double h = grid.step();
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const double pos = (X - x0) / h;
  if (pos <= 0.0) return params.sphere_area() * tail_segment(f.left_tail(), k, -INFINITY, X);
  double acc = f.left_tail().integral(k);
  const auto g = integrand(f, k);
  if (pos >= static_cast<double>(n - 1)) {
    acc += h * gregory_sum(g.data(), g.size());
    acc += tail_segment(f.right_tail(), k, grid.log_node(n - 1), X);
    return params.sphere_area() * acc;
  }
  const auto J = static_cast<std::ptrdiff_t>(std::floor(pos));
  acc += h * gregory_sum(g.data(), static_cast<std::size_t>(J) + 1);
  const double frac = pos - static_cast<double>(J);
  if (frac > 0.0) {
    // Gauss-Legendre on [J, pos] of the 8-point interpolant of the integrand
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    auto sample = [&](std::ptrdiff_t j) {
      return f.extended(j) * std::exp(k * grid.log_node(j));
    };
    double part = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double u = static_cast<double>(J) + 0.5 * frac * (gx[i] + 1.0);
      part += gw[i] * detail::interpolate(sample, u, f.stencil_lo(), f.stencil_hi());
    }
    acc += 0.5 * frac * h * part;
  }
  return params.sphere_area() * acc;
}

double weighted_lp_norm(const RadialFn& f, double p_exp, double a, const Params& params) {
  if (!(p_exp >= 1.0)) fail(ErrorCode::invalid_argument, "weighted_lp_norm: exponent must be >= 1");
  const double I = integrate_radial(f.abs_pow(p_exp), a, params);
  return I > 0.0 ? std::pow(I, 1.0 / p_exp) : 0.0;
}

}  // namespace fhs
