#include "sqg/coefficients.hpp"

#include <stdexcept>

namespace sqg {

double alpha(const WaveVector& h1, const WaveVector& h2, const WaveVector& k) {
    if (h1.is_zero() || h2.is_zero() || k.is_zero())
        throw std::invalid_argument("alpha: zero wavevector");
    if (h1 + h2 != k) throw std::invalid_argument("alpha: h1 + h2 != k");
    return double(perp_dot(h1, h2)) * (h1.norm() - h2.norm()) / k.norm();
}

double beta(const WaveVector& k, const WaveVector& j, double delta) {
    if (j.is_zero()) throw std::invalid_argument("beta: j = 0");
    const WaveVector d = k - j;
    if (d.is_zero()) throw std::invalid_argument("beta: k - j = 0");
    const double e = 2.0 + 2.0 * delta;
    const double denom = std::pow(j.norm(), e) + std::pow(d.norm(), e);
    return double(perp_dot(j, d)) * (d.norm() - j.norm()) / denom;
}

double gamma_coeff(const WaveVector& k, const WaveVector& j, double delta) {
    const double b = beta(k, j, delta);
    const WaveVector d = k - j;
    return 2.0 * std::pow(j.norm(), 2.0 * delta) * b * b /
           (double(k.norm2()) * double(d.norm2()));
}

double gamma_row_sum(const WaveVector& k, double delta, int J) {
    if (k.is_zero()) throw std::invalid_argument("gamma_row_sum: k = 0");
    KahanSum acc;
    const std::int64_t j2max = std::int64_t(J) * J;
    for (int x = -J; x <= J; ++x) {
        for (int y = -J; y <= J; ++y) {
            WaveVector j{x, y};
            if (j.is_zero() || j == k) continue;
            if (j.norm2() > j2max) continue;
            acc.add(gamma_coeff(k, j, delta));
        }
    }
    return acc.value();
}

double poisson_kernel(const WaveVector& j1, const WaveVector& j2, const WaveVector& k,
                      double delta) {
    const double a = alpha(j1, j2, k);
    const double e = 2.0 + 2.0 * delta;
    return -a / (std::pow(j1.norm(), e) + std::pow(j2.norm(), e));
}

}  // namespace sqg
