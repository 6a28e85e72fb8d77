#pragma once

#include <optional>
#include <string>

#include "sqg/lattice.hpp"
#include "sqg/rng.hpp"

namespace sqg {

/// Fourier-multiplier pair of the linear dynamics: per-mode drift rate
/// |k|^a and noise amplitude |k|^b per real component.  The constraint
/// 2b - a = -2 pins the stationary per-mode variance to |k|^{-2}, i.e. the
/// preset preserves the invariant Gaussian measure.  Two presets are used:
/// "spde" (a = 2 delta, b = delta - 1) for trajectory simulation and
/// "generator" (a = 2 + 2 delta, b = delta) matching the generator calculus
/// and the Poisson-inverse semigroup.
struct GeneratorPreset {
    double a = 0.0;
    double b = 0.0;
    std::string name;

    static GeneratorPreset spde(double delta);
    static GeneratorPreset generator(double delta);
    static GeneratorPreset custom(double a, double b);
};

/// Canonical modes of the band |k| <= N in canonical order, with a dense
/// coordinate lookup.  Because the order is ascending in |k|^2, the modes of
/// any smaller band M <= N form a prefix, so one state vector serves all
/// nested truncations.
class ModeTable {
  public:
    explicit ModeTable(int trunc);

    int truncation() const { return trunc_; }
    std::size_t size() const { return modes_.size(); }
    const std::vector<WaveVector>& modes() const { return modes_; }

    /// Number of canonical modes with |k| <= m (prefix length).
    std::size_t band_prefix(int m) const;

    /// Signed slot code: 0 if outside the band or zero; +(s+1) when k is
    /// canonical mode s; -(s+1) when -k is canonical mode s (value is the
    /// conjugate of slot s).
    int code(const WaveVector& k) const;

    static cplx decode(const std::vector<cplx>& state, int code) {
        if (code > 0) return state[std::size_t(code - 1)];
        if (code < 0) return std::conj(state[std::size_t(-code - 1)]);
        return {0.0, 0.0};
    }

    std::vector<cplx> to_state(const SpectralField& f) const;
    SpectralField to_field(const std::vector<cplx>& state, int band = 0) const;

  private:
    int trunc_;
    std::vector<WaveVector> modes_;
    std::vector<int> lut_;
    int side_;
};

/// Precomputed convolution tuples of B^M over states indexed by a ModeTable
/// (table truncation >= M).  One tuple per unordered interacting pair with
/// nonzero coefficient; weight folds in the ordered multiplicity.
class PairTable {
  public:
    PairTable() = default;
    PairTable(const ModeTable& table, int band);

    int band() const { return band_; }
    std::size_t tuple_count() const { return tuples_.size(); }

    /// Writes B_k for the canonical modes with |k| <= band into out
    /// (resized to the band prefix length).
    void eval(const ModeTable& table, const std::vector<cplx>& state,
              std::vector<cplx>& out) const;

  private:
    struct Tuple {
        std::int32_t out;
        std::int32_t c1;
        std::int32_t c2;
        double w;
    };
    int band_ = 0;
    std::size_t out_size_ = 0;
    std::vector<Tuple> tuples_;
};

/// Recommended maximum step for the exponential-Euler integrator:
/// min(0.1, 0.5 / (N^2 max_{|k|<=N} |k|^{a-2})).  The nonlinearity norm grows
/// like N^2; the stability scan in the test suite backs the constant.
double default_dt(int trunc, const GeneratorPreset& preset);

struct SimSpec {
    int trunc = 8;
    double delta = 1.0;
    GeneratorPreset preset = GeneratorPreset::spde(1.0);
    double dt = 0.0;  // 0: use default_dt
    double T = 1.0;
    bool b_on = true;
    std::uint64_t seed = 0;
    std::uint64_t member = 0;
    int snapshot_stride = 1;
    bool record_noise = true;
    std::optional<SpectralField> initial;  // default: invariant-measure draw
};

/// A realized trajectory: snapshot states on a stride grid plus the noise
/// increments of every step, enough to replay the run bit-for-bit.
struct TrajectoryRecord {
    int trunc = 0;
    double delta = 0.0;
    GeneratorPreset preset;
    double dt = 0.0;
    bool b_on = true;
    int snapshot_stride = 1;
    std::uint64_t seed = 0;
    std::uint64_t member = 0;
    std::vector<WaveVector> modes;  // canonical order

    std::vector<double> times;                // snapshot times, times[0] = 0
    std::vector<std::vector<cplx>> states;    // per snapshot, canonical order
    std::vector<std::vector<cplx>> noise;     // per step (all steps)
    std::vector<double> l2_norms;             // per snapshot

    int dt_halvings = 0;
    bool aborted = false;
    std::size_t abort_step = 0;

    SpectralField state_field(std::size_t snapshot) const;
};

TrajectoryRecord simulate(const SimSpec& spec);

/// Re-integrates the recorded noise from the recorded initial state; equal
/// to the stored snapshots bit-for-bit.
std::vector<std::vector<cplx>> replay(const TrajectoryRecord& traj);

/// One exponential-Euler update on a field:
///   v_k <- e^{-|k|^a dt} v_k + (B_on ? (1 - e^{-|k|^a dt})/|k|^a B_k(v) : 0) + eta_k,
/// where eta is the (already scaled) noise field.  Reality is preserved.
SpectralField step(const SpectralField& state, double dt, const GeneratorPreset& preset,
                   bool b_on, const SpectralField& noise, double delta, int trunc);

/// Per-component noise standard deviation of one step: sigma with
/// E|eta_k|^2 = 2 sigma^2 = |k|^{2b} (1 - e^{-2 |k|^a dt}) / |k|^a.
double step_noise_sigma(const WaveVector& k, const GeneratorPreset& preset, double dt);

struct DriftPath {
    std::vector<double> times;
    std::vector<SpectralField> values;
};

/// Trapezoidal time integral of B_M along the trajectory snapshots.
DriftPath accumulate_G(const TrajectoryRecord& traj, int band);

/// Semigroup-convolved drift: exact-exponential recursion
///   Gt_k <- e^{-l dt} Gt_k + (1 - e^{-l dt})/l * (B_k(t) + B_k(t+dt))/2,
/// with l = |k|^{2 delta}; exact for constant integrands and O(dt^2)
/// consistent in general.
DriftPath accumulate_G_tilde(const TrajectoryRecord& traj, int band, double delta);

struct MartingalePath {
    std::vector<double> times;
    std::vector<double> values;  // values[0] = 0
};

struct QvResult {
    double finest = 0.0;
    std::vector<double> by_level;  // level j: increments with stride 2^j
};

/// Realized quadratic variation: sum of squared increments at the finest
/// mesh plus the coarser dyadic meshes for convergence assessment.
QvResult quadratic_variation(const MartingalePath& path, int mesh_levels);

/// L^2 pairing sum_k f_k phi_{-k}; real for real fields.
double l2_pair(const SpectralField& f, const SpectralField& phi);

/// Dynkin compensated process
///   M_t = <psi_t - psi_0, phi> - int_0^t <-|D|^a psi, phi> dtau - <G_N(t), phi>
/// on the snapshot grid (trapezoid compensator).  Its quadratic variation
/// grows at the analytic noise rate of noise_qv_rate.
MartingalePath dynkin_martingale(const TrajectoryRecord& traj, const SpectralField& phi,
                                 const GeneratorPreset& preset);

/// Analytic quadratic-variation rate of t -> <noise_t, phi>:
///   2 sum_{k in Z_0^2} |k|^{2b} |phi_k|^2
/// (the factor 2 comes from the complex-pair noise convention).
double noise_qv_rate(const SpectralField& phi, const GeneratorPreset& preset);

struct TwinSpec {
    int trunc_n = 16;
    int trunc_m = 8;
    double delta = 1.6;
    GeneratorPreset preset = GeneratorPreset::spde(1.6);
    double dt = 0.0;
    double T = 0.1;
    bool b_on = true;
    std::uint64_t seed = 0;
    std::uint64_t member = 0;
    double s_index = 0.0;  // FL^{inf, s} weight of the difference norm
    int snapshot_stride = 1;
};

struct TwinResult {
    std::vector<double> times;
    std::vector<double> diff_norm;  // FL^{inf, s} of Pi_M(psi^N - psi^M)
    double sup_diff = 0.0;
    TrajectoryRecord run_n;
    TrajectoryRecord run_m;
};

/// Two truncations driven by the identical noise on the shared band (fresh
/// independent draws above it), from the same initial data projected.
TwinResult twin_simulate(const TwinSpec& spec);

}  // namespace sqg
