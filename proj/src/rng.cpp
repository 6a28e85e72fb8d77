#include "sqg/rng.hpp"

#include <cmath>

namespace sqg {

Xoshiro256ss derive_stream(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = root;
    for (std::uint64_t t : tags) h = splitmix_mix(h ^ (t + 0x9e3779b97f4a7c15ULL));
    return Xoshiro256ss(h);
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, q;
    do {
        u = 2.0 * gen_.uniform() - 1.0;
        v = 2.0 * gen_.uniform() - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace sqg
