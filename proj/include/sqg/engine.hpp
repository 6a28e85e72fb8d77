#pragma once

#include "sqg/dynamics.hpp"

namespace sqg::engine {

/// Per-step multipliers of the exponential-Euler update for one
/// (table, preset, dt) combination.
struct StepCoeffs {
    std::vector<double> decay;    // e^{-lambda_k dt}
    std::vector<double> bweight;  // (1 - e^{-lambda_k dt}) / lambda_k
    std::vector<double> sigma;    // per-component noise std

    StepCoeffs(const ModeTable& table, const GeneratorPreset& preset, double dt);
};

/// One Gaussian stream per (member, canonical mode); shared across nested
/// truncations so twin runs see identical increments on the common band.
struct ModeNoise {
    std::vector<GaussianStream> streams;

    ModeNoise(const ModeTable& table, std::uint64_t seed, std::uint64_t member);
    void draw(const StepCoeffs& coeffs, std::vector<cplx>& out);
};

/// Invariant-measure initial state from per-(member, mode) streams, so the
/// projection of a larger band's draw equals the smaller band's draw.
std::vector<cplx> draw_initial(const ModeTable& table, std::uint64_t seed, std::uint64_t member);

bool finite_state(const std::vector<cplx>& state);
double l2_norm_state(const std::vector<cplx>& state, std::size_t prefix);

/// In-place exponential-Euler update of the first `prefix` slots; `bpairs`
/// null runs the linear dynamics.
void step_state(std::vector<cplx>& state, const StepCoeffs& coeffs, std::size_t prefix,
                const PairTable* bpairs, const ModeTable& table, const std::vector<cplx>& eta,
                std::vector<cplx>& bscratch);

/// sum_k f_k g_{-k} over the canonical prefix (both signs folded):
/// 2 sum_s Re(f_s conj(g_s)).
double pair_state(const std::vector<cplx>& f, const std::vector<cplx>& g, std::size_t prefix);

}  // namespace sqg::engine
