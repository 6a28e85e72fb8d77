#pragma once

#include <functional>

#include "sqg/lattice.hpp"
#include "sqg/measure.hpp"

namespace sqg {

/// Cylindrical function of degree <= 2 in the Fourier coordinates:
///   phi(psi) = constant + sum_a lin(a) psi_a + sum_{(a,b)} quad(a,b) psi_a psi_b,
/// the quadratic sum running over ordered pairs with symmetric coefficients
/// quad(a, b) = quad(b, a).  Coordinates psi_k and psi_{-k} are treated as
/// independent (Wirtinger style), so D_k is the plain partial derivative in
/// psi_k.
class CylindricalQuadratic {
  public:
    using Lookup = std::function<cplx(const WaveVector&)>;

    CylindricalQuadratic() = default;
    explicit CylindricalQuadratic(cplx constant) : constant_(constant) {}

    /// phi += c * psi_a psi_b  (monomial; handles the a == b case).
    void add_monomial(const WaveVector& a, const WaveVector& b, const cplx& c);
    /// phi += c * psi_a.
    void add_linear(const WaveVector& a, const cplx& c);
    void add_constant(const cplx& c) { constant_ += c; }

    /// |psi_k|^2 = psi_k psi_{-k}.
    static CylindricalQuadratic mod2(const WaveVector& k);
    /// Re(psi_a psi_b) and Im(psi_a psi_b) as real-valued quadratics.
    static CylindricalQuadratic re_product(const WaveVector& a, const WaveVector& b);
    static CylindricalQuadratic im_product(const WaveVector& a, const WaveVector& b);
    /// Re(psi_a), Im(psi_a).
    static CylindricalQuadratic re_coord(const WaveVector& a);
    static CylindricalQuadratic im_coord(const WaveVector& a);

    cplx constant() const { return constant_; }
    cplx quad_coeff(const WaveVector& a, const WaveVector& b) const;
    cplx linear_coeff(const WaveVector& a) const;

    cplx eval(const SpectralField& psi) const;
    cplx eval(const Lookup& coords) const;

    /// D_k phi = lin(k) + 2 sum_j quad(k, j) psi_j.
    cplx grad(const SpectralField& psi, const WaveVector& k) const;
    cplx grad(const Lookup& coords, const WaveVector& k) const;
    /// D_k D_{-k} phi = 2 quad(k, -k).
    cplx second_kmk(const WaveVector& k) const;

    /// Modes where the gradient can be nonzero (rows plus linear support).
    std::vector<WaveVector> gradient_support() const;

    CylindricalQuadratic& operator+=(const CylindricalQuadratic& o);
    CylindricalQuadratic& operator-=(const CylindricalQuadratic& o);
    CylindricalQuadratic& operator*=(const cplx& c);
    friend CylindricalQuadratic operator-(CylindricalQuadratic a, const CylindricalQuadratic& b) {
        a -= b;
        return a;
    }

    std::size_t quad_entries() const;

  private:
    cplx constant_{0.0, 0.0};
    std::map<WaveVector, cplx> linear_;
    std::map<WaveVector, std::map<WaveVector, cplx>> rows_;  // symmetric storage
};

/// Ornstein-Uhlenbeck generator on cylindrical functions,
///   L0 phi = sum_{0<|k|<=N} |k|^{2d} ( -|k|^2 psi_k D_k phi + D_k D_{-k} phi ).
/// The drift sign makes the Gaussian measure infinitesimally invariant under
/// the stated integration-by-parts formula; the diffusion coefficient
/// |k|^{2d} matches the semigroup exp(-|D|^{2+2d} t) of the Poisson inverse.
cplx apply_L0(const CylindricalQuadratic& phi, const SpectralField& psi, double delta, int trunc);
cplx apply_L0(const CylindricalQuadratic& phi, const CylindricalQuadratic::Lookup& coords,
              double delta, int trunc);

/// Full truncated generator L_N phi = L0 phi + sum_k B_k(psi) D_k phi.
/// The nonlinear pairing is the chain-rule term of the truncated flow; its
/// expectation vanishes identically because sum_k |k|^2 B_k psi_{-k} = 0
/// term-by-term.
cplx apply_LN(const CylindricalQuadratic& phi, const SpectralField& psi, double delta, int trunc);
cplx apply_LN_with_B(const CylindricalQuadratic& phi, const SpectralField& psi,
                     const SpectralField& B, double delta, int trunc);
/// Lookup-based variant: `Bmode` returns B_m(psi) for a mode m.
cplx apply_LN_terms(const CylindricalQuadratic& phi, const CylindricalQuadratic::Lookup& coords,
                    const CylindricalQuadratic::Lookup& Bmode, double delta, int trunc);

/// Energy (Dirichlet) form  E^d(phi)(psi) = 1/2 sum_k |k|^{2d} |D_k phi|^2.
double energy_form(const CylindricalQuadratic& phi, const SpectralField& psi, double delta);

/// Bilinear version 1/2 sum_k |k|^{2d} D_k phi1 D_{-k} phi2 (the carre du
/// champ of L0 up to the stored convention).
cplx energy_form_bilinear(const CylindricalQuadratic& phi1, const CylindricalQuadratic& phi2,
                          const SpectralField& psi, double delta);

/// Monte-Carlo residual of the integration-by-parts identity:
///   E[D_k F] - E[|k|^2 psi_{-k} F].
struct IbpResult {
    cplx residual{0.0, 0.0};
    double std_error = 0.0;  // combined std error of the two estimates
};
IbpResult ibp_residual(const CylindricalQuadratic& F, const WaveVector& k,
                       std::size_t n_samples, const MeasureSampler& sampler);

/// Explicit Poisson inverse: per-mode quadratic forms H_k with
/// quad(j1, j2) = poisson_kernel(j1, j2, k) for j1 + j2 = k within the band.
struct PoissonDrift {
    int trunc = 0;
    double delta = 0.0;
    std::map<WaveVector, CylindricalQuadratic> components;

    const CylindricalQuadratic& at(const WaveVector& k) const;
};

PoissonDrift build_H(int trunc, double delta);

/// max_k |L0 H_k(psi) - B_k(psi)| / (1 + |B_k(psi)|); the closed-form inverse
/// makes this machine-precision small.
double verify_generator_identity(const PoissonDrift& H, const SpectralField& psi);
double verify_generator_identity(int trunc, double delta, const SpectralField& psi);

enum class ReIm { re, im };

/// Energy form of the real/imaginary part of the k-th Poisson component,
/// evaluated through the closed-form derivative
///   D_j H_k^{+-} = (beta(k,j) psi^{(N)}_{k-j} +- beta(k,-j) psi^{(N)}_{-k-j}) / (|k| i^{+-}),
/// summed over 0 < |j| <= N.  Independent of the stored-form route through
/// energy_form, which the tests exploit.
double energy_H_mode(const WaveVector& k, ReIm part, const SpectralField& psi, double delta,
                     int trunc);

/// Same for the difference H^N - H^M (indicator-difference coefficients).
double energy_H_mode_diff(const WaveVector& k, ReIm part, const SpectralField& psi, double delta,
                          int trunc_n, int trunc_m);

struct ExpMomentResult {
    double estimate = 0.0;
    double std_error = 0.0;
    bool diverged = false;
};

/// E_rho[ exp(lambda |k|^{2d} E^d(H_k^{+-})) ] by Monte Carlo.  The estimate
/// is flagged divergent when fewer than 0.1% of the samples carry more than
/// half of the weight sum (heavy-tail dominance), or on overflow.
ExpMomentResult exp_moment(const WaveVector& k, double delta, double lambda, int trunc,
                           std::size_t n_samples, const MeasureSampler& sampler,
                           ReIm part = ReIm::re);

/// Energy samples for reuse across a lambda grid.
std::vector<double> sample_H_energies(const WaveVector& k, ReIm part, double delta, int trunc,
                                      std::size_t n_samples, const MeasureSampler& sampler,
                                      int trunc_m = 0);  // trunc_m > 0: difference version
ExpMomentResult exp_moment_from_energies(const std::vector<double>& energies, double scale);

}  // namespace sqg
