#include "sqg/nonlinearity.hpp"

#include <stdexcept>

#include "sqg/coefficients.hpp"

namespace sqg {

namespace {

struct CplxKahan {
    KahanSum re, im;
    void add(const cplx& v) {
        re.add(v.real());
        im.add(v.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

bool in_band(const WaveVector& k, std::int64_t n2) { return k.norm2() <= n2; }

}  // namespace

NonlinearityResult eval_B(const SpectralField& psi, int trunc) {
    if (trunc < 1) throw std::invalid_argument("eval_B: truncation must be >= 1");
    const std::int64_t n2 = std::int64_t(trunc) * trunc;

    std::map<WaveVector, CplxKahan> acc;
    std::size_t pairs = 0;
    const auto& c = psi.coeffs();
    for (const auto& [h1, v1] : c) {
        if (!in_band(h1, n2)) continue;
        for (const auto& [h2, v2] : c) {
            if (!in_band(h2, n2)) continue;
            const WaveVector k = h1 + h2;
            if (k.is_zero() || !in_band(k, n2)) continue;
            const double a = alpha(h1, h2, k);
            ++pairs;
            if (a == 0.0) continue;
            acc[k].add(a * v1 * v2);
        }
    }

    SpectralField out(trunc);
    for (const auto& [k, s] : acc) {
        if (!is_canonical(k)) continue;
        out.set_pair(k, s.value());
    }
    return {std::move(out), pairs};
}

cplx eval_B_mode_raw(const SpectralField::CoeffMap& coords, const WaveVector& k, int trunc) {
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    if (!in_band(k, n2) || k.is_zero()) return {0.0, 0.0};
    CplxKahan acc;
    for (const auto& [h1, v1] : coords) {
        if (!in_band(h1, n2)) continue;
        const WaveVector h2 = k - h1;
        if (h2.is_zero() || !in_band(h2, n2)) continue;
        auto it = coords.find(h2);
        if (it == coords.end()) continue;
        const double a = alpha(h1, h2, k);
        if (a == 0.0) continue;
        acc.add(a * v1 * it->second);
    }
    return acc.value();
}

SpectralField eval_B_bilinear(const SpectralField& f, const SpectralField& g, int trunc) {
    SpectralField sum = f;
    sum += g;
    SpectralField out = eval_B(sum, trunc).field;
    out -= eval_B(f, trunc).field;
    out -= eval_B(g, trunc).field;
    out *= 0.5;
    return out;
}

namespace {

PairingResult weighted_pairing(const SpectralField& psi, int trunc, bool h1_weight) {
    const auto B = eval_B(psi, trunc).field;
    KahanSum val, mag;
    for (const auto& [k, bk] : B.coeffs()) {
        const cplx pk = psi.at(-k);
        if (pk == cplx{0.0, 0.0}) continue;
        const double w = h1_weight ? double(k.norm2()) : 1.0;
        const cplx term = w * bk * pk;
        val.add(term.real());
        mag.add(std::abs(term));
    }
    return {val.value(), mag.value()};
}

}  // namespace

PairingResult h1_pairing(const SpectralField& psi, int trunc) {
    return weighted_pairing(psi, trunc, true);
}

PairingResult l2_pairing(const SpectralField& psi, int trunc) {
    return weighted_pairing(psi, trunc, false);
}

cplx d_B_mode(const SpectralField& psi, const WaveVector& m, const WaveVector& k, int trunc) {
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    if (!in_band(m, n2) || !in_band(k, n2)) return {0.0, 0.0};
    const WaveVector partner = m - k;
    if (partner.is_zero() || !in_band(partner, n2)) return {0.0, 0.0};
    return 2.0 * alpha(k, partner, m) * psi.at(partner);
}

cplx state_divergence(const SpectralField& psi, const WaveVector& k, int trunc) {
    if (k.norm2() > std::int64_t(trunc) * trunc)
        throw std::invalid_argument("state_divergence: |k| > truncation");
    return d_B_mode(psi, k, k, trunc);
}

}  // namespace sqg
