#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace fhs::detail {

constexpr int kStencil = 8;

// Lagrange weights on the integer nodes 0..K-1 evaluated at u.
template <int K>
std::array<double, K> lagrange_weights(double u) {
  std::array<double, K> w{};
  for (int i = 0; i < K; ++i) {
    double num = 1.0, den = 1.0;
    for (int k = 0; k < K; ++k) {
      if (k == i) continue;
      num *= u - k;
      den *= static_cast<double>(i - k);
    }
    w[i] = num / den;
  }
  return w;
}

// Weights of the derivative of the interpolant on nodes 0..K-1 at u.
template <int K>
std::array<double, K> lagrange_derivative_weights(double u) {
  std::array<double, K> w{};
  for (int i = 0; i < K; ++i) {
    double den = 1.0;
    for (int k = 0; k < K; ++k)
      if (k != i) den *= static_cast<double>(i - k);
    double acc = 0.0;
    for (int j = 0; j < K; ++j) {
      if (j == i) continue;
      double prod = 1.0;
      for (int k = 0; k < K; ++k)
        if (k != i && k != j) prod *= u - k;
      acc += prod;
    }
    w[i] = acc / den;
  }
  return w;
}

// Interpolate sample(k) at fractional index pos with an 8-point stencil
// centered on pos, shifted if needed to stay within [lo, hi).
template <class F>
double interpolate(const F& sample, double pos, std::ptrdiff_t lo = PTRDIFF_MIN / 2,
                   std::ptrdiff_t hi = PTRDIFF_MAX / 2) {
  const double fl = std::floor(pos);
  auto base = static_cast<std::ptrdiff_t>(fl) - (kStencil / 2 - 1);
  if (base < lo) base = lo;
  if (base + kStencil > hi) base = hi - kStencil;
  const double u = pos - static_cast<double>(base);
  if (pos == fl) return sample(static_cast<std::ptrdiff_t>(fl));
  const auto w = lagrange_weights<kStencil>(u);
  double acc = 0.0;
  for (int i = 0; i < kStencil; ++i) acc += w[i] * sample(base + i);
  return acc;
}

}  // namespace fhs::detail
