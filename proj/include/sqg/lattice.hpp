#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sqg {

using cplx = std::complex<double>;

/// Integer frequency on the 2-torus.  The zero frequency is excluded
/// everywhere (mean-zero convention); constructors of higher-level objects
/// enforce this.
struct WaveVector {
    int x = 0;
    int y = 0;

    friend bool operator==(const WaveVector& a, const WaveVector& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const WaveVector& a, const WaveVector& b) { return !(a == b); }
    friend bool operator<(const WaveVector& a, const WaveVector& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }

    WaveVector operator-() const { return {-x, -y}; }
    WaveVector operator+(const WaveVector& o) const { return {x + o.x, y + o.y}; }
    WaveVector operator-(const WaveVector& o) const { return {x - o.x, y - o.y}; }

    bool is_zero() const { return x == 0 && y == 0; }
    std::int64_t norm2() const {
        return std::int64_t(x) * x + std::int64_t(y) * y;
    }
    double norm() const { return std::sqrt(double(norm2())); }
};

/// a^perp . b with a^perp = (-a_y, a_x); the integer 2D cross product.
inline std::int64_t perp_dot(const WaveVector& a, const WaveVector& b) {
    return std::int64_t(a.x) * b.y - std::int64_t(a.y) * b.x;
}

/// Canonical half-lattice rule: k is canonical iff k_x > 0, or k_x == 0 and
/// k_y > 0.  Exactly one of {k, -k} is canonical for every nonzero k.
inline bool is_canonical(const WaveVector& k) {
    return k.x > 0 || (k.x == 0 && k.y > 0);
}
inline WaveVector canonical(const WaveVector& k) { return is_canonical(k) ? k : -k; }

/// Canonical enumeration order used for dense state vectors, binary frames
/// and serialized output: ascending (|k|^2, k_x, k_y) over canonical modes.
struct CanonicalOrder {
    bool operator()(const WaveVector& a, const WaveVector& b) const {
        const auto na = a.norm2(), nb = b.norm2();
        if (na != nb) return na < nb;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
};

/// All canonical modes with 0 < |k| <= N, in canonical order.
std::vector<WaveVector> canonical_band(int trunc);

/// Compensated (Kahan) accumulator; keeps structural cancellations near
/// machine precision when summing many terms of mixed sign.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// Truncated spectral coefficient array of the streamline with the reality
/// constraint coeff(-k) = conj(coeff(k)).  Immutable after construction in
/// normal use; copies are cheap enough at desk scale.
class SpectralField {
  public:
    using CoeffMap = std::map<WaveVector, cplx>;

    SpectralField() = default;
    explicit SpectralField(int trunc);

    /// Builds a field from entries given on a half-lattice (one
    /// representative per +-k pair, not necessarily the canonical one).
    /// Conjugate entries are completed automatically.  Rejects the zero
    /// frequency, |k| > trunc, duplicate keys and entries that collide with
    /// the mirror of another entry.
    static SpectralField from_half_lattice(
        const std::vector<std::pair<WaveVector, cplx>>& entries, int trunc);

    int truncation() const { return trunc_; }
    const CoeffMap& coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    cplx at(const WaveVector& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? cplx{0.0, 0.0} : it->second;
    }

    /// Sets the +-k pair (value at k, conjugate at -k).  Dropping entries
    /// below 'drop_tol' keeps structurally-zero modes out of the map.
    void set_pair(const WaveVector& k, const cplx& v, double drop_tol = 0.0);

    /// Restriction to |k| <= m; truncation becomes min(m, truncation).
    SpectralField projected(int m) const;

    /// Fourier-Lebesgue norm (sum_k |k|^{ps} |f_k|^p)^{1/p}; p = infinity
    /// gives sup_k |k|^s |f_k|.  p = 2, s = 0/1 are the L^2 / H^1 norms.
    double fl_norm(double p, double s) const;

    /// Scalar theta = |D| psi: multiplier |k|.
    SpectralField theta() const;
    /// Velocity components of grad^perp psi: multipliers (-i k_y, i k_x).
    std::pair<SpectralField, SpectralField> velocity() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
    friend SpectralField operator-(SpectralField a, const SpectralField& b) {
        a -= b;
        return a;
    }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) {
        a += b;
        return a;
    }

    /// Exact reality check: coeff(-k) == conj(coeff(k)) at every stored k.
    bool reality_ok() const;

    /// {"N": int, "coeffs": [[kx, ky, re, im], ...]} with half-lattice
    /// (canonical) entries only, in canonical order.
    std::string to_json() const;
    static SpectralField from_json(const std::string& text);

  private:
    int trunc_ = 0;
    CoeffMap coeffs_;
};

/// H^1 pairing sum_k |k|^2 f_k g_{-k}, compensated summation.
double h1_inner(const SpectralField& f, const SpectralField& g);

}  // namespace sqg
