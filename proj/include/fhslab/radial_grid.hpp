#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "fhslab/params.hpp"

namespace fhs {

// Geometric grid r_j = r_min (r_max/r_min)^{j/(n-1)}; uniform in x = log r.
class RadialGrid {
 public:
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  std::size_t size() const { return n_; }
  double step() const { return h_; }  // log-radius spacing
  double ratio() const;                // r_{j+1}/r_j
  double log_node(std::ptrdiff_t j) const { return x0_ + static_cast<double>(j) * h_; }
  double node(std::ptrdiff_t j) const;
  const std::vector<double>& nodes() const { return nodes_; }
  // Grid with nodes 1/r reversed, used for frequency samples.
  std::shared_ptr<const RadialGrid> reciprocal() const;

  bool same_as(const RadialGrid& o) const {
    return n_ == o.n_ && r_min_ == o.r_min_ && r_max_ == o.r_max_;
  }

  static std::shared_ptr<const RadialGrid> create(double r_min, double r_max,
                                                  std::size_t n, std::size_t min_n);

 private:
  RadialGrid(double r_min, double r_max, std::size_t n);
  double r_min_, r_max_;
  std::size_t n_;
  double x0_, h_;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Checks 0 < r_min < r_max and n >= 8.
GridPtr make_log_grid(double r_min, double r_max, std::size_t n);
GridPtr make_default_grid();

enum class Side { left, right };

struct TailTerm {
  double power;
  double coeff;
};

// Asymptotic model of a function beyond one end of the grid:
//   f(r) ~ sum_k c_k (r/edge)^{P_k},
// with edge = r_min (left) or r_max (right). An empty tail means f = 0 there.
class PowerTail {
 public:
  PowerTail() = default;
  PowerTail(Side side, double edge, std::vector<TailTerm> terms);

  Side side() const { return side_; }
  double edge() const { return edge_; }
  const std::vector<TailTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double operator()(double r) const;
  double at_log(double x) const;
  // Power with the slowest decay away from the grid.
  double leading_power() const;

  PowerTail scaled(double c) const;
  // Multiply by r^a.
  PowerTail shifted(double a) const;
  // Tail of r f'(r).
  PowerTail log_derivative() const;
  // Same function re-expressed with a different edge radius.
  PowerTail rebased(double new_edge) const;

  static PowerTail sum(const PowerTail& a, double ca, const PowerTail& b, double cb);
  static PowerTail product(const PowerTail& a, const PowerTail& b);
  // sign(f)|f|^gamma (signed) or |f|^gamma, by truncated binomial series.
  PowerTail power(double gamma, bool signed_power) const;

  // int f(r) r^{k} d(log r) over the tail region, k = N + a.
  // Throws non_integrable_weight when a nonzero term does not decay.
  double integral(double weight_power) const;

 private:
  void normalize();
  Side side_ = Side::right;
  double edge_ = 1.0;
  std::vector<TailTerm> terms_;
};

// Least-squares fit of tail coefficients for the given powers over the
// outermost `window` nodes (relative weighting by the leading power).
PowerTail fit_tail(const RadialGrid& grid, const std::vector<double>& values,
                   Side side, std::vector<double> powers, std::size_t window = 0);

class RadialFn {
 public:
  RadialFn() = default;
  RadialFn(GridPtr grid, std::vector<double> values);
  RadialFn(GridPtr grid, std::vector<double> values, PowerTail left, PowerTail right);

  static RadialFn zero(GridPtr grid);
  static RadialFn sample(GridPtr grid, const std::function<double(double)>& f);

  const GridPtr& grid_ptr() const { return grid_; }
  const RadialGrid& grid() const { return *grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  const PowerTail& left_tail() const { return left_; }
  const PowerTail& right_tail() const { return right_; }
  void set_tails(PowerTail left, PowerTail right);
  RadialFn without_tails() const;
  bool has_tails() const { return !left_.empty() || !right_.empty(); }

  // Value at node index k, extended by the tails outside [0, n).
  double extended(std::ptrdiff_t k) const;
  // Value at arbitrary radius (8-point Lagrange in log r inside the grid).
  double eval(double r) const;

  RadialFn& operator+=(const RadialFn& o);
  RadialFn& operator-=(const RadialFn& o);
  RadialFn& operator*=(double c);
  friend RadialFn operator+(RadialFn a, const RadialFn& b) { return a += b; }
  friend RadialFn operator-(RadialFn a, const RadialFn& b) { return a -= b; }
  friend RadialFn operator*(RadialFn a, double c) { return a *= c; }
  friend RadialFn operator*(double c, RadialFn a) { return a *= c; }
  friend RadialFn operator-(RadialFn a) { return a *= -1.0; }

  // a*this + b*o
  RadialFn combine(double a, const RadialFn& o, double b) const;
  RadialFn times(const RadialFn& o) const;
  // sign(f)|f|^gamma
  RadialFn signed_pow(double gamma) const;
  RadialFn abs_pow(double gamma) const;
  // f(r) r^a
  RadialFn times_power(double a) const;
  // r f'(r), 8th-order centered differences in log r.
  RadialFn log_derivative() const;

  // Index range usable by interpolation stencils: unbounded on sides with a
  // tail model, the grid itself otherwise.
  std::ptrdiff_t stencil_lo() const;
  std::ptrdiff_t stencil_hi() const;

  void check_finite(const char* what) const;
  void check_same_grid(const RadialFn& o) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  PowerTail left_, right_;
};

// omega_{N-1} * int_0^inf f(r) r^{N-1+a} dr, end-corrected trapezoid in
// log r over the grid plus the analytic tail integrals.
double integrate_radial(const RadialFn& f, double a, const Params& params);

struct IntegralReport {
  double value = 0.0;
  // share of |integrand| carried by the outermost decade and the tails
  double tail_fraction = 0.0;
  bool tail_warning = false;
};
IntegralReport integrate_radial_report(const RadialFn& f, double a, const Params& params);

// Same integral restricted to the ball r <= R.
double integrate_radial_ball(const RadialFn& f, double a, double R, const Params& params);

double weighted_lp_norm(const RadialFn& f, double p_exp, double a, const Params& params);

// Integration weights of the end-corrected trapezoid rule on n uniform points
// with unit spacing.
const std::vector<double>& gregory_weights(std::size_t n);

}  // namespace fhs
