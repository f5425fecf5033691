#pragma once

#include <vector>

#include "fhslab/params.hpp"
#include "fhslab/radial_grid.hpp"

namespace fhs {

struct CutoffSpec {
  double r = 0.0;
  double R = 0.0;
  double ratio() const { return R / r; }
};

// 1 below r, 0 above R, log(R/|x|)/log(R/r) between. r and R must sit at least
// a decade inside the grid.
RadialFn log_cutoff(const CutoffSpec& spec, GridPtr grid);

// || |x|^{t/crit} (-Delta)^{s/2} phi_{r,R} ||_{L^q}, q = 2 crit/(crit-2)
double cutoff_weighted_norm(const CutoffSpec& spec, const Params& params, GridPtr grid);

struct CutoffRow {
  double r, R, ratio, norm, fitted_slope;
};
// Slope of log(norm) against log(log(R/r)) over the given ratios at fixed r.
std::vector<CutoffRow> cutoff_sweep(const Params& params, GridPtr grid, double r,
                                    const std::vector<double>& ratios, int threads = 1);
std::vector<double> default_cutoff_ratios();

// (-Delta)^alpha(fg) - g (-Delta)^alpha f - f (-Delta)^alpha g with (-Delta)^alpha
// the multiplier |xi|^{2 alpha}, alpha in (0, 1/2).
RadialFn commutator(const RadialFn& f, const RadialFn& g, double alpha, const Params& params);

// -N < a < N(p-1)
bool ap_power_weight_check(double a, double p_exp, int N);

struct KpvExponents {
  double alpha1, alpha2;
  double p, p1, p2;
  double a, a1, a2;
};

// Instance used for the gap estimate: alpha1 = 0, alpha2 = s/2, p1 = crit,
// p2 = q, a1 = -t, a2 = q t / crit, with p and a fixed by the Holder relations.
KpvExponents kpv_reference_exponents(const Params& params);

// ||C[f,g]||_{L^p(|x|^a)} / (||(-Delta)^{alpha1} f||_{L^{p1}(|x|^{a1})}
//                            ||(-Delta)^{alpha2} g||_{L^{p2}(|x|^{a2})})
double kpv_ratio(const RadialFn& f, const RadialFn& g, double alpha, const KpvExponents& e,
                 const Params& params);

struct KpvRow {
  KpvExponents exponents;
  double lambda;
  double ratio;
};
// Ratios for Gaussian and bubble-shaped pairs dilated by each lambda.
std::vector<KpvRow> kpv_sweep(const Params& params, GridPtr grid, const std::vector<double>& lambdas,
                              int threads = 1);

}  // namespace fhs
