#include "sqg/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sqg {

std::vector<WaveVector> canonical_band(int trunc) {
    if (trunc < 1) throw std::invalid_argument("canonical_band: truncation must be >= 1");
    std::vector<WaveVector> out;
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    for (int x = 0; x <= trunc; ++x) {
        for (int y = -trunc; y <= trunc; ++y) {
            WaveVector k{x, y};
            if (!is_canonical(k)) continue;
            if (k.norm2() > n2) continue;
            out.push_back(k);
        }
    }
    std::sort(out.begin(), out.end(), CanonicalOrder{});
    return out;
}

SpectralField::SpectralField(int trunc) : trunc_(trunc) {
    if (trunc < 1) throw std::invalid_argument("SpectralField: truncation must be >= 1");
}

SpectralField SpectralField::from_half_lattice(
    const std::vector<std::pair<WaveVector, cplx>>& entries, int trunc) {
    SpectralField f(trunc);
    const std::int64_t n2 = std::int64_t(trunc) * trunc;
    for (const auto& [k, v] : entries) {
        if (k.is_zero()) throw std::invalid_argument("from_half_lattice: zero frequency entry");
        if (k.norm2() > n2)
            throw std::invalid_argument("from_half_lattice: |k| exceeds truncation");
        if (f.coeffs_.count(k) || f.coeffs_.count(-k))
            throw std::invalid_argument("from_half_lattice: duplicate or mirrored entry");
        f.coeffs_[k] = v;
        f.coeffs_[-k] = std::conj(v);
    }
    return f;
}

void SpectralField::set_pair(const WaveVector& k, const cplx& v, double drop_tol) {
    if (k.is_zero()) throw std::invalid_argument("set_pair: zero frequency");
    if (k.norm2() > std::int64_t(trunc_) * trunc_)
        throw std::invalid_argument("set_pair: |k| exceeds truncation");
    if (std::abs(v.real()) <= drop_tol && std::abs(v.imag()) <= drop_tol) {
        coeffs_.erase(k);
        coeffs_.erase(-k);
        return;
    }
    coeffs_[k] = v;
    coeffs_[-k] = std::conj(v);
}

SpectralField SpectralField::projected(int m) const {
    if (m < 1) throw std::invalid_argument("projected: band must be >= 1");
    SpectralField out(std::min(m, trunc_));
    const std::int64_t m2 = std::int64_t(m) * m;
    for (const auto& [k, v] : coeffs_)
        if (k.norm2() <= m2) out.coeffs_[k] = v;
    return out;
}

double SpectralField::fl_norm(double p, double s) const {
    if (p < 1.0) throw std::invalid_argument("fl_norm: p must be >= 1");
    if (std::isinf(p)) {
        double sup = 0.0;
        for (const auto& [k, v] : coeffs_)
            sup = std::max(sup, std::pow(k.norm(), s) * std::abs(v));
        return sup;
    }
    KahanSum acc;
    for (const auto& [k, v] : coeffs_) acc.add(std::pow(k.norm(), p * s) * std::pow(std::abs(v), p));
    return std::pow(acc.value(), 1.0 / p);
}

SpectralField SpectralField::theta() const {
    SpectralField out(trunc_);
    for (const auto& [k, v] : coeffs_) out.coeffs_[k] = k.norm() * v;
    return out;
}

std::pair<SpectralField, SpectralField> SpectralField::velocity() const {
    SpectralField ux(trunc_), uy(trunc_);
    const cplx i{0.0, 1.0};
    for (const auto& [k, v] : coeffs_) {
        const cplx vx = -i * double(k.y) * v;
        const cplx vy = i * double(k.x) * v;
        if (vx != cplx{0.0, 0.0}) ux.coeffs_[k] = vx;
        if (vy != cplx{0.0, 0.0}) uy.coeffs_[k] = vy;
    }
    return {ux, uy};
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    trunc_ = std::max(trunc_, o.trunc_);
    for (const auto& [k, v] : o.coeffs_) coeffs_[k] += v;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    trunc_ = std::max(trunc_, o.trunc_);
    for (const auto& [k, v] : o.coeffs_) coeffs_[k] -= v;
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& [k, v] : coeffs_) v *= a;
    return *this;
}

bool SpectralField::reality_ok() const {
    for (const auto& [k, v] : coeffs_) {
        auto it = coeffs_.find(-k);
        if (it == coeffs_.end()) return false;
        if (it->second != std::conj(v)) return false;
    }
    return true;
}

std::string SpectralField::to_json() const {
    std::vector<WaveVector> keys;
    for (const auto& [k, v] : coeffs_)
        if (is_canonical(k)) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), CanonicalOrder{});

    nlohmann::json j;
    j["N"] = trunc_;
    auto arr = nlohmann::json::array();
    for (const auto& k : keys) {
        const cplx v = at(k);
        arr.push_back({k.x, k.y, v.real(), v.imag()});
    }
    j["coeffs"] = std::move(arr);
    return j.dump();
}

SpectralField SpectralField::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const int trunc = j.at("N").get<int>();
    std::vector<std::pair<WaveVector, cplx>> entries;
    for (const auto& e : j.at("coeffs")) {
        if (!e.is_array() || e.size() != 4)
            throw std::invalid_argument("field json: entry must be [kx, ky, re, im]");
        WaveVector k{e[0].get<int>(), e[1].get<int>()};
        entries.emplace_back(k, cplx{e[2].get<double>(), e[3].get<double>()});
    }
    return from_half_lattice(entries, trunc);
}

double h1_inner(const SpectralField& f, const SpectralField& g) {
    KahanSum re;
    for (const auto& [k, v] : f.coeffs()) {
        const cplx w = g.at(-k);
        if (w == cplx{0.0, 0.0}) continue;
        re.add(double(k.norm2()) * (v * w).real());
    }
    return re.value();
}

}  // namespace sqg
