#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fhslab/bubble.hpp"

namespace fhs {

// Radial sector only: V and its scale derivative are radial, and the bubbles
// carry no translation parameter.
struct SpectralReport {
  Params params;
  double scale = 1.0;                  // lambda of the bubble the weight was built from
  std::vector<double> eigenvalues;     // ascending
  std::vector<RadialFn> eigenfunctions;  // int psi^2 V^{p-1} |x|^-t = 1
  double gap_margin = 0.0;             // mu_3 - p
  std::size_t trimmed_nodes = 0;       // nodes dropped where the weight underflows
  int lanczos_steps = 0;
};

// k smallest eigenpairs of (-Delta)^s psi = mu V_lambda^{p-1} |x|^-t psi.
SpectralReport linearized_eigs(const Bubble& V, int k, double lambda = 1.0);

// int f g V^{p-1} |x|^-t at the report's scale.
double weighted_pairing(const Bubble& V, double lambda, const RadialFn& f, const RadialFn& g);

struct GapCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// lhs = int f^2 V^{p-1}|x|^-t, rhs = <f,f>_{H^s}/mu_3 after removing the V and
// V-dot components (skipped when project is false).
GapCheck spectral_gap_check(const Bubble& V, const RadialFn& f, const SpectralReport& report,
                            bool project = true);

// Oscillating log-Gaussian bump exp(-x^2)(1 + a sin(k x)), x = log(r/c)/w, with
// c log-uniform in [1e-2, 1e2], w in [0.3, 1.5], a in [-0.5, 0.5], k in [0, 4].
RadialFn random_test_function(GridPtr grid, std::uint64_t seed, std::size_t index);

// spectral_gap_check over `count` random test functions.
std::vector<GapCheck> random_gap_checks(const Bubble& V, const SpectralReport& report,
                                        std::size_t count, std::uint64_t seed, int threads = 1);

void write_spectral_report(const SpectralReport& report, std::ostream& out);

}  // namespace fhs
