#pragma once

#include <cstdint>
#include <initializer_list>

namespace sqg {

/// Deterministic stream machinery.  All randomness in the library is derived
/// from a single 64-bit root seed through the documented scheme below, so
/// that every result is reproducible bit-for-bit and independent of worker
/// scheduling:
///
///   stream(root, tags...) seeds a xoshiro256** generator from the SplitMix64
///   sequence of h, where h starts at root and absorbs each tag t via
///   h = splitmix_mix(h ^ (t + 0x9e3779b97f4a7c15)).
///
/// Tag conventions (see rng_tags):
///   {TAG, sample_index, 0, 0}             measure sampler, one stream/sample
///   {TAG, member, slot_kx, slot_ky}       trajectory noise, one stream per
///                                         (ensemble member, canonical mode)
/// Gaussians come from the Marsaglia polar method, two per rejection cycle.

inline std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace rng_tags {
constexpr std::uint64_t measure = 0x01;
constexpr std::uint64_t traj_init = 0x02;
constexpr std::uint64_t traj_noise = 0x03;
constexpr std::uint64_t synthetic = 0x04;
}  // namespace rng_tags

class Xoshiro256ss {
  public:
    Xoshiro256ss() : Xoshiro256ss(0x6a09e667f3bcc909ULL) {}
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t h = seed;
        for (auto& word : s_) {
            h += 0x9e3779b97f4a7c15ULL;
            word = splitmix_mix(h);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in (0, 1); never returns exactly 0.
    double uniform() { return double((next() >> 11) + 1) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Derives an independent substream from (root, tags...).
Xoshiro256ss derive_stream(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

/// Standard normal draws by Marsaglia polar rejection.
class GaussianStream {
  public:
    GaussianStream() = default;
    explicit GaussianStream(Xoshiro256ss gen) : gen_(gen) {}

    double next();
    Xoshiro256ss& raw() { return gen_; }

  private:
    Xoshiro256ss gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sqg
