#include "sqg/quadratic.hpp"

#include <algorithm>
#include <stdexcept>

#include "sqg/coefficients.hpp"
#include "sqg/nonlinearity.hpp"
#include "sqg/parallel.hpp"

namespace sqg {

namespace {
void check_nonzero(const WaveVector& a, const char* where) {
    if (a.is_zero()) throw std::invalid_argument(std::string(where) + ": zero frequency");
}
}  // namespace

void CylindricalQuadratic::add_monomial(const WaveVector& a, const WaveVector& b, const cplx& c) {
    check_nonzero(a, "add_monomial");
    check_nonzero(b, "add_monomial");
    if (a == b) {
        rows_[a][a] += c;
        return;
    }
    rows_[a][b] += c * 0.5;
    rows_[b][a] += c * 0.5;
}

void CylindricalQuadratic::add_linear(const WaveVector& a, const cplx& c) {
    check_nonzero(a, "add_linear");
    linear_[a] += c;
}

CylindricalQuadratic CylindricalQuadratic::mod2(const WaveVector& k) {
    CylindricalQuadratic q;
    q.add_monomial(k, -k, 1.0);
    return q;
}

CylindricalQuadratic CylindricalQuadratic::re_product(const WaveVector& a, const WaveVector& b) {
    CylindricalQuadratic q;
    q.add_monomial(a, b, 0.5);
    q.add_monomial(-a, -b, 0.5);
    return q;
}

CylindricalQuadratic CylindricalQuadratic::im_product(const WaveVector& a, const WaveVector& b) {
    CylindricalQuadratic q;
    q.add_monomial(a, b, cplx{0.0, -0.5});
    q.add_monomial(-a, -b, cplx{0.0, 0.5});
    return q;
}

CylindricalQuadratic CylindricalQuadratic::re_coord(const WaveVector& a) {
    CylindricalQuadratic q;
    q.add_linear(a, 0.5);
    q.add_linear(-a, 0.5);
    return q;
}

CylindricalQuadratic CylindricalQuadratic::im_coord(const WaveVector& a) {
    CylindricalQuadratic q;
    q.add_linear(a, cplx{0.0, -0.5});
    q.add_linear(-a, cplx{0.0, 0.5});
    return q;
}

cplx CylindricalQuadratic::quad_coeff(const WaveVector& a, const WaveVector& b) const {
    auto it = rows_.find(a);
    if (it == rows_.end()) return {0.0, 0.0};
    auto jt = it->second.find(b);
    return jt == it->second.end() ? cplx{0.0, 0.0} : jt->second;
}

cplx CylindricalQuadratic::linear_coeff(const WaveVector& a) const {
    auto it = linear_.find(a);
    return it == linear_.end() ? cplx{0.0, 0.0} : it->second;
}

cplx CylindricalQuadratic::eval(const SpectralField& psi) const {
    return eval([&psi](const WaveVector& k) { return psi.at(k); });
}

cplx CylindricalQuadratic::eval(const Lookup& coords) const {
    cplx out = constant_;
    for (const auto& [a, c] : linear_) out += c * coords(a);
    for (const auto& [a, row] : rows_) {
        const cplx va = coords(a);
        if (va == cplx{0.0, 0.0}) continue;
        for (const auto& [b, c] : row) out += c * va * coords(b);
    }
    return out;
}

cplx CylindricalQuadratic::grad(const SpectralField& psi, const WaveVector& k) const {
    return grad([&psi](const WaveVector& j) { return psi.at(j); }, k);
}

cplx CylindricalQuadratic::grad(const Lookup& coords, const WaveVector& k) const {
    cplx out = linear_coeff(k);
    auto it = rows_.find(k);
    if (it != rows_.end())
        for (const auto& [b, c] : it->second) out += 2.0 * c * coords(b);
    return out;
}

cplx CylindricalQuadratic::second_kmk(const WaveVector& k) const {
    return 2.0 * quad_coeff(k, -k);
}

std::vector<WaveVector> CylindricalQuadratic::gradient_support() const {
    std::vector<WaveVector> out;
    for (const auto& [a, c] : linear_) out.push_back(a);
    for (const auto& [a, row] : rows_)
        if (!row.empty()) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CylindricalQuadratic& CylindricalQuadratic::operator+=(const CylindricalQuadratic& o) {
    constant_ += o.constant_;
    for (const auto& [a, c] : o.linear_) linear_[a] += c;
    for (const auto& [a, row] : o.rows_)
        for (const auto& [b, c] : row) rows_[a][b] += c;
    return *this;
}

CylindricalQuadratic& CylindricalQuadratic::operator-=(const CylindricalQuadratic& o) {
    constant_ -= o.constant_;
    for (const auto& [a, c] : o.linear_) linear_[a] -= c;
    for (const auto& [a, row] : o.rows_)
        for (const auto& [b, c] : row) rows_[a][b] -= c;
    return *this;
}

CylindricalQuadratic& CylindricalQuadratic::operator*=(const cplx& c) {
    constant_ *= c;
    for (auto& [a, v] : linear_) v *= c;
    for (auto& [a, row] : rows_)
        for (auto& [b, v] : row) v *= c;
    return *this;
}

std::size_t CylindricalQuadratic::quad_entries() const {
    std::size_t n = 0;
    for (const auto& [a, row] : rows_) n += row.size();
    return n;
}

cplx apply_L0(const CylindricalQuadratic& phi, const CylindricalQuadratic::Lookup& coords,
              double delta, int trunc) {
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    KahanSum re, im;
    for (const auto& m : phi.gradient_support()) {
        if (m.norm2() > n2) continue;
        const double w = std::pow(m.norm(), 2.0 * delta);
        const cplx term =
            w * (-double(m.norm2()) * coords(m) * phi.grad(coords, m) + phi.second_kmk(m));
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

cplx apply_L0(const CylindricalQuadratic& phi, const SpectralField& psi, double delta,
              int trunc) {
    return apply_L0(phi, [&psi](const WaveVector& k) { return psi.at(k); }, delta, trunc);
}

cplx apply_LN_terms(const CylindricalQuadratic& phi, const CylindricalQuadratic::Lookup& coords,
                    const CylindricalQuadratic::Lookup& Bmode, double delta, int trunc) {
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    cplx out = apply_L0(phi, coords, delta, trunc);
    for (const auto& m : phi.gradient_support()) {
        if (m.norm2() > n2) continue;
        const cplx bm = Bmode(m);
        if (bm == cplx{0.0, 0.0}) continue;
        out += bm * phi.grad(coords, m);
    }
    return out;
}

cplx apply_LN_with_B(const CylindricalQuadratic& phi, const SpectralField& psi,
                     const SpectralField& B, double delta, int trunc) {
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    cplx out = apply_L0(phi, psi, delta, trunc);
    for (const auto& m : phi.gradient_support()) {
        if (m.norm2() > n2) continue;
        const cplx bm = B.at(m);
        if (bm == cplx{0.0, 0.0}) continue;
        out += bm * phi.grad(psi, m);
    }
    return out;
}

cplx apply_LN(const CylindricalQuadratic& phi, const SpectralField& psi, double delta, int trunc) {
    const auto B = eval_B(psi, trunc).field;
    return apply_LN_with_B(phi, psi, B, delta, trunc);
}

double energy_form(const CylindricalQuadratic& phi, const SpectralField& psi, double delta) {
    KahanSum acc;
    for (const auto& m : phi.gradient_support()) {
        const cplx g = phi.grad(psi, m);
        acc.add(std::pow(m.norm(), 2.0 * delta) * std::norm(g));
    }
    return 0.5 * acc.value();
}

cplx energy_form_bilinear(const CylindricalQuadratic& phi1, const CylindricalQuadratic& phi2,
                          const SpectralField& psi, double delta) {
    auto support = phi1.gradient_support();
    {
        auto s2 = phi2.gradient_support();
        support.insert(support.end(), s2.begin(), s2.end());
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
    }
    KahanSum re, im;
    for (const auto& m : support) {
        const cplx term = std::pow(m.norm(), 2.0 * delta) * phi1.grad(psi, m) * phi2.grad(psi, -m);
        re.add(term.real());
        im.add(term.imag());
    }
    return 0.5 * cplx{re.value(), im.value()};
}

IbpResult ibp_residual(const CylindricalQuadratic& F, const WaveVector& k,
                       std::size_t n_samples, const MeasureSampler& sampler) {
    const double w = double(k.norm2());
    auto lhs = mc_expectation(
        [&](const SpectralField& psi) { return F.grad(psi, k); }, n_samples, sampler);
    auto rhs = mc_expectation(
        [&](const SpectralField& psi) { return w * psi.at(-k) * F.eval(psi); }, n_samples,
        sampler);
    IbpResult r;
    r.residual = lhs.mean - rhs.mean;
    r.std_error = std::sqrt(lhs.std_error * lhs.std_error + rhs.std_error * rhs.std_error);
    return r;
}

const CylindricalQuadratic& PoissonDrift::at(const WaveVector& k) const {
    auto it = components.find(k);
    if (it == components.end()) throw std::invalid_argument("PoissonDrift::at: mode outside band");
    return it->second;
}

PoissonDrift build_H(int trunc, double delta) {
    PoissonDrift H;
    H.trunc = trunc;
    H.delta = delta;

    std::vector<WaveVector> band;
    for (const auto& k : canonical_band(trunc)) {
        band.push_back(k);
        band.push_back(-k);
    }

    for (const auto& k : band) {
        CylindricalQuadratic form;
        for (const auto& j1 : band) {
            const WaveVector j2 = k - j1;
            if (j2.is_zero()) continue;
            if (j2.norm2() > std::int64_t(trunc) * trunc) continue;
            if (j2 < j1) continue;  // one visit per unordered pair
            const double c = poisson_kernel(j1, j2, k, delta);
            if (c == 0.0) continue;
            form.add_monomial(j1, j2, j1 == j2 ? c : 2.0 * c);
        }
        H.components.emplace(k, std::move(form));
    }
    return H;
}

double verify_generator_identity(const PoissonDrift& H, const SpectralField& psi) {
    const auto B = eval_B(psi, H.trunc).field;
    double worst = 0.0;
    for (const auto& [k, form] : H.components) {
        const cplx lhs = apply_L0(form, psi, H.delta, H.trunc);
        const cplx bk = B.at(k);
        worst = std::max(worst, std::abs(lhs - bk) / (1.0 + std::abs(bk)));
    }
    return worst;
}

double verify_generator_identity(int trunc, double delta, const SpectralField& psi) {
    return verify_generator_identity(build_H(trunc, delta), psi);
}

namespace {

double energy_via_beta(const WaveVector& k, ReIm part, const SpectralField& psi, double delta,
                       int trunc_n, int trunc_m) {
    if (k.is_zero()) throw std::invalid_argument("energy_H_mode: k = 0");
    const std::int64_t n2 = std::int64_t(trunc_n) * trunc_n;
    const std::int64_t m2 = std::int64_t(trunc_m) * trunc_m;
    const bool diff = trunc_m > 0;
    const double sgn = part == ReIm::re ? 1.0 : -1.0;
    const double kn2 = double(k.norm2());

    auto weight = [&](const WaveVector& j, const WaveVector& other) -> double {
        // indicator of the (k, j, other) triple lying inside the band(s)
        if (k.norm2() > n2 || j.norm2() > n2 || other.norm2() > n2) return 0.0;
        if (!diff) return 1.0;
        const bool in_m = k.norm2() <= m2 && j.norm2() <= m2 && other.norm2() <= m2;
        return in_m ? 0.0 : 1.0;
    };

    KahanSum acc;
    for (const auto& j : canonical_band(trunc_n)) {
        for (const WaveVector jj : {j, -j}) {
            const double wj = std::pow(jj.norm(), 2.0 * delta);
            cplx d{0.0, 0.0};
            const WaveVector kmj = k - jj;
            if (!kmj.is_zero() && kmj.norm2() <= n2 && weight(jj, kmj) != 0.0)
                d += beta(k, jj, delta) * psi.at(kmj);
            const WaveVector mkmj = -k - jj;
            if (!mkmj.is_zero() && mkmj.norm2() <= n2 && weight(jj, mkmj) != 0.0)
                d += sgn * beta(k, -jj, delta) * psi.at(mkmj);
            if (d == cplx{0.0, 0.0}) continue;
            acc.add(wj * std::norm(d) / kn2);
        }
    }
    return 0.5 * acc.value();
}

}  // namespace

double energy_H_mode(const WaveVector& k, ReIm part, const SpectralField& psi, double delta,
                     int trunc) {
    return energy_via_beta(k, part, psi, delta, trunc, 0);
}

double energy_H_mode_diff(const WaveVector& k, ReIm part, const SpectralField& psi, double delta,
                          int trunc_n, int trunc_m) {
    if (trunc_m < 1 || trunc_m > trunc_n)
        throw std::invalid_argument("energy_H_mode_diff: need 1 <= M <= N");
    return energy_via_beta(k, part, psi, delta, trunc_n, trunc_m);
}

std::vector<double> sample_H_energies(const WaveVector& k, ReIm part, double delta, int trunc,
                                      std::size_t n_samples, const MeasureSampler& sampler,
                                      int trunc_m) {
    std::vector<double> out(n_samples);
    parallel_for(n_samples, [&](std::size_t i) {
        const SpectralField psi = sampler.sample_at(i);
        out[i] = trunc_m > 0 ? energy_H_mode_diff(k, part, psi, delta, trunc, trunc_m)
                             : energy_H_mode(k, part, psi, delta, trunc);
    });
    return out;
}

ExpMomentResult exp_moment_from_energies(const std::vector<double>& energies, double scale) {
    ExpMomentResult r;
    if (energies.empty()) return r;
    KahanSum sum, sum2;
    std::vector<double> weights(energies.size());
    bool overflow = false;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double w = std::exp(scale * energies[i]);
        if (!std::isfinite(w)) overflow = true;
        weights[i] = w;
        sum.add(w);
        sum2.add(w * w);
    }
    const double n = double(energies.size());
    r.estimate = sum.value() / n;
    const double var = std::max(0.0, sum2.value() / n - r.estimate * r.estimate);
    r.std_error = std::sqrt(var / n);

    if (overflow) {
        r.diverged = true;
        return r;
    }
    // heavy-tail dominance: top 0.1% of samples carrying > half the weight
    std::size_t top = std::max<std::size_t>(1, energies.size() / 1000);
    std::nth_element(weights.begin(), weights.begin() + top, weights.end(),
                     std::greater<double>());
    KahanSum head;
    for (std::size_t i = 0; i < top; ++i) head.add(weights[i]);
    if (head.value() > 0.5 * sum.value()) r.diverged = true;
    return r;
}

ExpMomentResult exp_moment(const WaveVector& k, double delta, double lambda, int trunc,
                           std::size_t n_samples, const MeasureSampler& sampler, ReIm part) {
    if (lambda < 0.0) throw std::invalid_argument("exp_moment: lambda must be >= 0");
    const auto energies = sample_H_energies(k, part, delta, trunc, n_samples, sampler);
    return exp_moment_from_energies(energies, lambda * std::pow(k.norm(), 2.0 * delta));
}

}  // namespace sqg
