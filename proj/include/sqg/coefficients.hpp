#pragma once

#include "sqg/lattice.hpp"

namespace sqg {

/// Interaction coefficient of the quadratic streamline nonlinearity,
///   alpha(h1, h2, k) = |k|^{-1} (h1^perp . h2) (|h1| - |h2|),
/// defined for h1 + h2 = k with all three nonzero.  Symmetric in (h1, h2)
/// and invariant under the global sign flip (h1, h2, k) -> (-h1, -h2, -k);
/// both hold exactly in double precision because the integer part is exact.
double alpha(const WaveVector& h1, const WaveVector& h2, const WaveVector& k);

/// Derivative coefficient of the Poisson inverse,
///   beta(k, j) = (j^perp . (k-j)) (|k-j| - |j|) / (|j|^{2+2d} + |k-j|^{2+2d}).
/// Requires j != 0 and k != j.
double beta(const WaveVector& k, const WaveVector& j, double delta);

/// Energy-form envelope weight,
///   gamma(k, j) = 2 |j|^{2d} beta(k, j)^2 / (|k|^2 |k-j|^2)  >= 0.
double gamma_coeff(const WaveVector& k, const WaveVector& j, double delta);

/// sum of gamma(k, j) over 0 < |j| <= J, j != k.  Multiplying by |k|^{2d}
/// probes the uniform-in-k boundedness of the row sums.
double gamma_row_sum(const WaveVector& k, double delta, int J);

/// Coefficient of psi_{j1} psi_{j2} in the k-th component of the Poisson
/// inverse:  -alpha(j1, j2, k) / (|j1|^{2+2d} + |j2|^{2+2d}), j1 + j2 = k.
double poisson_kernel(const WaveVector& j1, const WaveVector& j2, const WaveVector& k,
                      double delta);

}  // namespace sqg
