#pragma once

#include <complex>
#include <cstddef>

#include "fhslab/radial_grid.hpp"

namespace fhs {

// Principal-branch-free log Gamma; only exp(log_gamma(z)) is meaningful.
std::complex<double> log_gamma(std::complex<double> z);

// (-Delta)^{beta/2} r^{-z} = power_symbol(beta, N, z) r^{-z-beta} on R^N.
// Negative beta gives the Riesz potential of order -beta.
std::complex<double> power_symbol(double beta, int N, std::complex<double> z);

// Unitary radial Fourier transform: F[r^{-z}](rho) = fourier_symbol(N, z) rho^{z-N}.
std::complex<double> fourier_symbol(int N, std::complex<double> z);

struct TransformReport {
  double bias = 0.0;  // Mellin line Re z
  double strip_lo = 0.0;
  double strip_hi = 0.0;
  std::size_t fft_size = 0;
  std::size_t pad_left = 0;   // samples generated from the left tail model
  std::size_t pad_right = 0;  // samples generated from the right tail model
  double extension_share = 0.0;  // share of the biased input living in the padding
  double wrap_level = 0.0;       // periodic leakage relative to the peak
  double tail_fit_error = 0.0;   // relative misfit of the output tails on the grid
  std::size_t cutoff_mode = 0;   // first discarded frequency (0: none)
  bool warning = false;
};

enum class MellinKind { power, fourier };

struct MellinOptions {
  // Drop the spectral modes beyond the last one above the rounding floor.
  // Makes the map data-dependent; iterative eigensolvers turn it off.
  bool denoise = true;
  // Position of the Mellin line inside the admissible strip, 0.5 = midpoint.
  // Lower values amplify errors less at small r and more at large r.
  double line = 0.5;
};

// Applies a homogeneous radial multiplier through a Mellin convolution on the
// log grid. For MellinKind::power the result lives on f's grid; for
// MellinKind::fourier it lives on the reciprocal grid.
RadialFn mellin_apply(const RadialFn& f, MellinKind kind, double beta, int N,
                      TransformReport* report = nullptr, MellinOptions opts = {});

}  // namespace fhs
