#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhslab/interaction.hpp"

namespace fhs {

// || (-Delta)^s u - u|u|^{p-1}|x|^-t ||_{dual}
double deficit(const RadialFn& u, const Params& params);

struct StabilityReport {
  double gamma = 0.0;
  double distance = 0.0;  // ||u - sigma||_{H^s}
  BubbleFamily family;
  // <rho, V_i>, <rho, Vdot_i> in the energy space, each divided by the norm of
  // the tangent vector it pairs with.
  std::vector<double> ortho_residuals;
  std::vector<double> interactions;  // Q_ij over pairs i < j
  double energy = 0.0;
  bool energy_window_ok = false;
  int iterations = 0;
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
  double max_ortho_residual() const;
};

struct ProjectOptions {
  int max_iterations = 100;
  // stop once every normalized orthogonality residual is below this times ||rho||
  double ortho_tol = 1e-10;
  bool compute_gamma = true;
};

// Minimizes ||u - sum alpha_i V_{lambda_i}||^2 over (alpha_i, log lambda_i) by
// Gauss-Newton from init.
StabilityReport project_multibubble(const RadialFn& u, const BubbleFamily& init,
                                    const ProjectOptions& opts = {});
// Seeds nu scales from the local maxima of r^{(N-2s)/2} u(r). Colliding
// seeds are merged, which lowers nu and adds a warning.
StabilityReport project_multibubble(const RadialFn& u, int nu, std::shared_ptr<const Bubble> base,
                                    const ProjectOptions& opts = {});
BubbleFamily seed_family(const RadialFn& u, int nu, std::shared_ptr<const Bubble> base,
                         std::vector<std::string>* warnings = nullptr);

// sum_i V_{lambda_i} + kappa phi
RadialFn sharpness_family(const Bubble& V, const std::vector<double>& scales, const RadialFn& phi,
                          double kappa);
// exp(-1/(1-(r-2)^2)) on |r-2| < 1
RadialFn sharpness_bump(GridPtr grid);
// nu scales spaced by delta = kappa^{2/(N-2s)} around 1.
std::vector<double> sharpness_scales(const Params& params, int nu, double kappa);

struct EnergyWindow {
  bool ok = false;
  double energy = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
EnergyWindow energy_window_check(const RadialFn& u, int nu, const Bubble& V);

struct StabilityRow {
  double kappa, gamma, distance, ratio, interaction, max_ortho_residual, min_q, energy;
  bool energy_window_ok;
};

struct StabilitySweep {
  int nu = 2;
  std::vector<StabilityRow> rows;
  double slope_gamma = 0.0;
  double slope_distance = 0.0;
  double ratio_spread = 0.0;        // max/min of distance/gamma
  double interaction_constant = 0.0;  // calibrated at the first kappa, with margin 2
  bool interaction_bound_ok = false;
};

std::vector<double> default_kappas();
StabilitySweep stability_sweep(std::shared_ptr<const Bubble> V, const RadialFn& phi,
                               const std::vector<double>& kappas, int nu = 2, int threads = 1);

struct ElementaryConstants {
  double max_ratio_a = 0.0;
  double max_ratio_b = 0.0;
};
// Empirical constants of the two pointwise inequalities for signed powers,
// sampled over signed log-uniform draws.
ElementaryConstants check_elementary_inequalities(double p_exp, long samples, std::uint64_t seed,
                                                  int nu = 3);
// [|(a+b)|a+b|^{p-1} - a|a|^{p-1}| - p|a|^{p-1}|b|]^+ / (chi_{p>2}|a|^{p-2}b^2 + |b|^p)
double elementary_ratio_a(double a, double b, double p_exp);
// |S|S|^{p-1} - sum a_i|a_i|^{p-1}| / sum_{i != j} |a_i|^{p-1}|a_j|
double elementary_ratio_b(const std::vector<double>& a, double p_exp);

}  // namespace fhs
