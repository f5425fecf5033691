#pragma once

#include <memory>
#include <vector>

#include "fhslab/bubble.hpp"

namespace fhs {

struct BubbleFamily {
  std::vector<double> scales;
  std::vector<double> coeffs;
  std::shared_ptr<const Bubble> base;

  std::size_t size() const { return scales.size(); }
  void validate() const;
  // sum_i coeffs[i] * dilate(base, scales[i])
  RadialFn evaluate() const;
};

// max over pairs of qij joined with max |alpha_i - 1|.
double delta_of_family(const BubbleFamily& family);

double qij(double lambda_i, double lambda_j);

// int V_i^alpha V_j^beta |x|^-t dx with alpha + beta = crit.
double two_bubble_integral(const Bubble& V, double lambda_i, double lambda_j, double alpha,
                           double beta);

// <V_i, V_j> in the energy space, from the transforms. Throws consistency_failure
// if it misses the integral form int V_i^p V_j |x|^-t by more than 1%.
double hs_cross_inner(const Bubble& V, double lambda_i, double lambda_j);

// Share of int V_i^p V_j |x|^-t coming from |x| <= 1/lambda_i, lambda_i >= lambda_j.
double localized_interaction_check(const Bubble& V, double lambda_i, double lambda_j);

struct ScalingPoint {
  double q;
  double value;
};

enum class ScalingModel { power, power_log };

struct ScalingFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // max relative misfit
};

// power: value = C Q^e with e fitted. power_log: value = C Q^e (1 + log(1/Q))
// with e = fixed_exponent.
ScalingFit scaling_regression(const std::vector<ScalingPoint>& points, ScalingModel model,
                              double fixed_exponent = 0.0);

// Exponent of Q in the two-bubble law: (N-2s) min(alpha,beta)/2 for alpha != beta,
// (N-t)/2 (with a log factor) for alpha = beta.
double predicted_interaction_exponent(const Params& params, double alpha, double beta);

std::vector<double> default_q_sweep();

struct InteractionRow {
  double alpha, beta, q, integral, predicted_exponent, fitted_exponent, residual;
};

// One row per Q; the fit columns are shared by the whole sweep.
std::vector<InteractionRow> interaction_sweep(const Bubble& V, double alpha, double beta,
                                              const std::vector<double>& qs, int threads = 1);

}  // namespace fhs
