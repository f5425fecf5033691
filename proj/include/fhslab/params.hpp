#pragma once

namespace fhs {

// Dimension N, fractional order s and Hardy exponent t, with the derived
// critical exponent crit = 2(N-t)/(N-2s), p = crit-1 and q = 2 crit/(crit-2).
class Params {
 public:
  // Requires 0 < s < 1, 0 < t < 2s, N > 2s.
  Params(int N, double s, double t);

  // Same checks except t = 0 is accepted. Only meant for solver validation
  // against the closed-form Sobolev extremal.
  static Params validation(int N, double s, double t);

  int N() const { return N_; }
  double s() const { return s_; }
  double t() const { return t_; }
  double crit() const { return crit_; }
  double p() const { return crit_ - 1.0; }
  double q() const { return 2.0 * crit_ / (crit_ - 2.0); }
  // N < 6s - 2t, i.e. p > 2.
  bool low_dim() const { return N_ < 6.0 * s_ - 2.0 * t_; }
  // (N-2s)/2, the amplitude exponent of the dilation.
  double scaling_exponent() const { return 0.5 * (N_ - 2.0 * s_); }
  // (N-t)/(2s-t), so that |V|^2 = mu^energy_exponent.
  double energy_exponent() const { return (N_ - t_) / (2.0 * s_ - t_); }
  // Surface measure of the unit sphere in R^N.
  double sphere_area() const;

  bool operator==(const Params& o) const {
    return N_ == o.N_ && s_ == o.s_ && t_ == o.t_;
  }

 private:
  Params(int N, double s, double t, bool allow_zero_t);
  int N_;
  double s_;
  double t_;
  double crit_;
};

}  // namespace fhs
