#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fhslab/params.hpp"
#include "fhslab/radial_grid.hpp"

namespace fhs {

struct Bubble {
  Params params;
  RadialFn profile;         // V at scale 1, peak of r^{(N-2s)/2} V(r) at r = 1
  double mu = 0.0;          // from the Rayleigh quotient of the converged iterate
  double residual = 0.0;    // Gamma(V) / ||V||_{H^s}
  double tol = 0.0;
  int iterations = 0;
  std::vector<double> history;  // relative H^s change per iteration
};

struct SolveOptions {
  int max_iterations = 400;
  double damping = 0.5;
  // Final dilation so that r^{(N-2s)/2} V(r) peaks at r = 1.
  bool canonical_scale = true;
};

// Initial guess (1+r^2)^{-(N-2s)/2} with its tail expansions.
RadialFn bubble_seed(const Params& params, GridPtr grid);

// u |u|^{p-1} |x|^{-t}
RadialFn nonlinearity(const RadialFn& u, const Params& params);

// (-Delta)^s u - u |u|^{p-1} |x|^{-t}
RadialFn euler_lagrange_residual(const RadialFn& u, const Params& params);

// Tail powers of the bubble profile.
std::vector<double> bubble_left_powers(const Params& params);
std::vector<double> bubble_right_powers(const Params& params);

Bubble solve_bubble(const Params& params, GridPtr grid, double tol, const SolveOptions& opts = {});

// lambda^amp f(lambda r); exact index shift when log(lambda) is a multiple of the
// grid step, otherwise 8-point Lagrange interpolation in log r (on log|f| for
// positive data).
RadialFn dilate(const RadialFn& f, double lambda, double amp);
RadialFn dilate(const Bubble& V, double lambda);

// d/dlambda [lambda^{(N-2s)/2} V(lambda r)].
RadialFn bubble_derivative(const Bubble& V, double lambda);

// mu from ||V||^2_{H^s} = mu^{(N-t)/(2s-t)}, checked against Bubble::mu.
double mu_constant(const Bubble& V);
// Same formula applied to an arbitrary dilate of V.
double mu_from_profile(const RadialFn& v, const Params& params);

// Gamma(V)/||V||_{H^s}.
double residual_certificate(const RadialFn& v, const Params& params);

void save_bubble(const Bubble& V, std::ostream& out);
Bubble load_bubble(std::istream& in);
void save_bubble_file(const Bubble& V, const std::string& path);
Bubble load_bubble_file(const std::string& path);

}  // namespace fhs
