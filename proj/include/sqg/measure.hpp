#pragma once

#include <functional>
#include <optional>

#include "sqg/lattice.hpp"
#include "sqg/rng.hpp"

namespace sqg {

/// Exact sampler of the invariant Gaussian measure on the band |k| <= N.
/// Per canonical mode k, Re psi_k and Im psi_k are independent centered
/// Gaussians of variance |k|^{-2}/2 each, so E|psi_k|^2 = |k|^{-2}; the
/// mirror entry is the conjugate.  Sample i uses the derived stream
/// (seed, measure_tag, i), with modes consumed in canonical order, so the
/// sequence is reproducible and samples can be generated independently by
/// index.
class MeasureSampler {
  public:
    MeasureSampler(int trunc, std::uint64_t seed);

    int truncation() const { return trunc_; }
    std::uint64_t seed() const { return seed_; }

    /// Next sample of the sequence.
    SpectralField sample();
    /// Random access by sample index (used by parallel reductions).
    SpectralField sample_at(std::uint64_t index) const;
    /// Same draws written into a dense canonical-order vector; `modes` must
    /// be the canonical band of the sampler's truncation.
    void sample_into(std::uint64_t index, const std::vector<WaveVector>& modes,
                     std::vector<cplx>& out) const;

  private:
    int trunc_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::vector<WaveVector> band_;
};

struct McResult {
    cplx mean{0.0, 0.0};
    double std_error = 0.0;   // of |.|'s real scalar parts, componentwise max
    double std_error_re = 0.0;
    double std_error_im = 0.0;
    std::size_t n_used = 0;
    std::size_t n_nonfinite = 0;
};

/// Sample mean and standard error of F under the measure.  Non-finite values
/// of F are excluded and counted.  The reduction is chunked with a fixed
/// chunk size and merged in index order, so results do not depend on the
/// worker count.
McResult mc_expectation(const std::function<cplx(const SpectralField&)>& F,
                        std::size_t n_samples, const MeasureSampler& sampler);

}  // namespace sqg
