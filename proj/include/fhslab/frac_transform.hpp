#pragma once

#include "fhslab/mellin.hpp"
#include "fhslab/params.hpp"
#include "fhslab/radial_grid.hpp"

namespace fhs {

// Radial Fourier samples u^(rho) on the reciprocal grid rho_j = 1/r_{n-1-j}.
using FreqFn = RadialFn;

// Unitary convention u^(xi) = (2 pi)^{-N/2} int u(x) e^{-i x.xi} dx.
FreqFn radial_fourier(const RadialFn& f, const Params& params, TransformReport* report = nullptr);
// The radial transform is an involution, so this is the same map back.
RadialFn inverse_radial_fourier(const FreqFn& u, const Params& params,
                                TransformReport* report = nullptr);

// Multiplier |xi|^beta, beta in (0, 2].
RadialFn frac_power(const RadialFn& f, double beta, const Params& params,
                    TransformReport* report = nullptr);
// Multiplier |xi|^{-beta}, beta in (0, 2], N > beta.
RadialFn frac_inverse(const RadialFn& f, double beta, const Params& params,
                      TransformReport* report = nullptr);

// <(-Delta)^s u, v>, symmetrized when u and v differ.
double hs_inner(const RadialFn& u, const RadialFn& v, const Params& params);
double hs_norm(const RadialFn& u, const Params& params);

// ||(-Delta)^{-s/2} f||_2 = sqrt(<I_{2s} f, f>).
double dual_norm(const RadialFn& f, const Params& params);

// Pairing int u v dx with the tails included.
double l2_pairing(const RadialFn& u, const RadialFn& v, const Params& params);

}  // namespace fhs
