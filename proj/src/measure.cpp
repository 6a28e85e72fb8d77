#include "sqg/measure.hpp"

#include <cmath>
#include <stdexcept>

#include "sqg/parallel.hpp"

namespace sqg {

MeasureSampler::MeasureSampler(int trunc, std::uint64_t seed)
    : trunc_(trunc), seed_(seed), band_(canonical_band(trunc)) {}

SpectralField MeasureSampler::sample() { return sample_at(counter_++); }

void MeasureSampler::sample_into(std::uint64_t index, const std::vector<WaveVector>& modes,
                                 std::vector<cplx>& out) const {
    GaussianStream g(derive_stream(seed_, {rng_tags::measure, index}));
    out.resize(modes.size());
    for (std::size_t s = 0; s < modes.size(); ++s) {
        const double sigma = 1.0 / (modes[s].norm() * std::sqrt(2.0));
        const double re = sigma * g.next();
        const double im = sigma * g.next();
        out[s] = cplx{re, im};
    }
}

SpectralField MeasureSampler::sample_at(std::uint64_t index) const {
    std::vector<cplx> draws;
    sample_into(index, band_, draws);
    SpectralField f(trunc_);
    for (std::size_t s = 0; s < band_.size(); ++s) f.set_pair(band_[s], draws[s]);
    return f;
}

McResult mc_expectation(const std::function<cplx(const SpectralField&)>& F,
                        std::size_t n_samples, const MeasureSampler& sampler) {
    if (n_samples < 2) throw std::invalid_argument("mc_expectation: need n_samples >= 2");

    constexpr std::size_t kChunk = 256;
    const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;

    struct ChunkSums {
        KahanSum re, im, re2, im2;
        std::size_t used = 0, nonfinite = 0;
    };
    std::vector<ChunkSums> sums(n_chunks);

    parallel_for(n_chunks, [&](std::size_t c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(lo + kChunk, n_samples);
        ChunkSums& s = sums[c];
        for (std::size_t i = lo; i < hi; ++i) {
            const cplx v = F(sampler.sample_at(i));
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                ++s.nonfinite;
                continue;
            }
            s.re.add(v.real());
            s.im.add(v.imag());
            s.re2.add(v.real() * v.real());
            s.im2.add(v.imag() * v.imag());
            ++s.used;
        }
    });

    KahanSum re, im, re2, im2;
    std::size_t used = 0, nonfinite = 0;
    for (const auto& s : sums) {
        re.add(s.re.value());
        im.add(s.im.value());
        re2.add(s.re2.value());
        im2.add(s.im2.value());
        used += s.used;
        nonfinite += s.nonfinite;
    }

    McResult r;
    r.n_used = used;
    r.n_nonfinite = nonfinite;
    if (used == 0) return r;
    const double n = double(used);
    const double mre = re.value() / n;
    const double mim = im.value() / n;
    r.mean = cplx{mre, mim};
    if (used >= 2) {
        const double vre = std::max(0.0, (re2.value() / n - mre * mre) * n / (n - 1.0));
        const double vim = std::max(0.0, (im2.value() / n - mim * mim) * n / (n - 1.0));
        r.std_error_re = std::sqrt(vre / n);
        r.std_error_im = std::sqrt(vim / n);
        r.std_error = std::max(r.std_error_re, r.std_error_im);
    }
    return r;
}

}  // namespace sqg
