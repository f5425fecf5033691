#include "fhslab/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fhslab/error.hpp"

namespace fhs {

Params::Params(int N, double s, double t) : Params(N, s, t, false) {}

Params Params::validation(int N, double s, double t) { return Params(N, s, t, true); }

Params::Params(int N, double s, double t, bool allow_zero_t) : N_(N), s_(s), t_(t) {
  std::ostringstream msg;
  if (N < 1) {
    msg << "N = " << N << " violates N >= 1";
  } else if (!(s > 0.0 && s < 1.0)) {
    msg << "s = " << s << " violates s in (0, 1)";
  } else if (!(allow_zero_t ? t >= 0.0 : t > 0.0) || !(t < 2.0 * s)) {
    msg << "t = " << t << " violates t ∈ (0, 2s) with 2s = " << 2.0 * s;
  } else if (!(N > 2.0 * s)) {
    msg << "N = " << N << " violates N > 2s";
  }
  if (!msg.str().empty()) fail(ErrorCode::invalid_argument, msg.str());
  crit_ = 2.0 * (N - t) / (N - 2.0 * s);
}

double Params::sphere_area() const {
  const double half = 0.5 * N_;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

}  // namespace fhs
