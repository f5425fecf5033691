#include "fhslab/frac_transform.hpp"

#include <cmath>
#include <sstream>

#include "fhslab/error.hpp"

namespace fhs {

FreqFn radial_fourier(const RadialFn& f, const Params& params, TransformReport* report) {
  return mellin_apply(f, MellinKind::fourier, 0.0, params.N(), report);
}

RadialFn inverse_radial_fourier(const FreqFn& u, const Params& params, TransformReport* report) {
  return mellin_apply(u, MellinKind::fourier, 0.0, params.N(), report);
}

RadialFn frac_power(const RadialFn& f, double beta, const Params& params,
                    TransformReport* report) {
  if (!(beta > 0.0 && beta <= 2.0)) {
    std::ostringstream msg;
    msg << "frac_power: beta = " << beta << " outside (0, 2]";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  return mellin_apply(f, MellinKind::power, beta, params.N(), report);
}

RadialFn frac_inverse(const RadialFn& f, double beta, const Params& params,
                      TransformReport* report) {
  if (!(beta > 0.0 && beta <= 2.0)) {
    std::ostringstream msg;
    msg << "frac_inverse: beta = " << beta << " outside (0, 2]";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  if (!(params.N() > beta)) {
    std::ostringstream msg;
    msg << "frac_inverse: N = " << params.N() << " must exceed beta = " << beta;
    fail(ErrorCode::invalid_argument, msg.str());
  }
  return mellin_apply(f, MellinKind::power, -beta, params.N(), report);
}

double l2_pairing(const RadialFn& u, const RadialFn& v, const Params& params) {
  return integrate_radial(u.times(v), 0.0, params);
}

double hs_inner(const RadialFn& u, const RadialFn& v, const Params& params) {
  u.check_same_grid(v);
  const double s2 = 2.0 * params.s();
  const RadialFn Lu = mellin_apply(u, MellinKind::power, s2, params.N());
  if (&u == &v) return l2_pairing(Lu, v, params);
  const RadialFn Lv = mellin_apply(v, MellinKind::power, s2, params.N());
  return 0.5 * (l2_pairing(Lu, v, params) + l2_pairing(u, Lv, params));
}

double hs_norm(const RadialFn& u, const Params& params) {
  const double v = hs_inner(u, u, params);
  return std::sqrt(std::max(v, 0.0));
}

double dual_norm(const RadialFn& f, const Params& params) {
  const double s2 = 2.0 * params.s();
  if (!(params.N() > s2)) fail(ErrorCode::invalid_argument, "dual_norm: requires N > 2s");
  const RadialFn If = mellin_apply(f, MellinKind::power, -s2, params.N());
  const double v = l2_pairing(If, f, params);
  return std::sqrt(std::max(v, 0.0));
}

}  // namespace fhs
