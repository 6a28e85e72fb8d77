#pragma once

#include "sqg/lattice.hpp"

namespace sqg {

struct NonlinearityResult {
    SpectralField field;     // value of B^N(psi)
    std::size_t pair_count;  // ordered (h1, h2) pairs summed
};

/// Truncated quadratic nonlinearity by direct convolution:
///   B_k = sum_{h1+h2=k, 0<|h1|,|h2|,|k|<=N} alpha(h1, h2, k) psi_h1 psi_h2.
/// The output of a real field is real (B_{-k} = conj B_k).
NonlinearityResult eval_B(const SpectralField& psi, int trunc);

/// Such sums on raw coordinate maps, without the reality constraint; used by
/// derivative checks that perturb a single coordinate.
cplx eval_B_mode_raw(const SpectralField::CoeffMap& coords, const WaveVector& k, int trunc);

/// Polarized bilinear form B(f, g) = (B(f+g) - B(f) - B(g)) / 2.
SpectralField eval_B_bilinear(const SpectralField& f, const SpectralField& g, int trunc);

struct PairingResult {
    double value = 0.0;
    double scale = 0.0;  // sum of |term| magnitudes, for relative contracts
};

/// sum_k |k|^2 B_k(psi) psi_{-k}.  Vanishes identically for any coordinate
/// assignment (term-by-term cancellation over zero-sum triples), so the
/// returned value is pure roundoff relative to 'scale'.
PairingResult h1_pairing(const SpectralField& psi, int trunc);

/// sum_k B_k(psi) psi_{-k}.  Reported as a diagnostic; carries no zero
/// contract.
PairingResult l2_pairing(const SpectralField& psi, int trunc);

/// Analytic derivative dB_k / dpsi_k at psi (coordinates treated
/// independently).  Structurally zero: the only candidate pair has a zero
/// partner frequency, which the mean-zero convention excludes.
cplx state_divergence(const SpectralField& psi, const WaveVector& k, int trunc);

/// Derivative of B_m with respect to the coordinate psi_k:
///   2 alpha(k, m-k, m) psi_{m-k}, zero if any frequency leaves the band.
cplx d_B_mode(const SpectralField& psi, const WaveVector& m, const WaveVector& k, int trunc);

}  // namespace sqg
