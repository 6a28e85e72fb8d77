#include "sqg/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "sqg/coefficients.hpp"
#include "sqg/engine.hpp"
#include "sqg/nonlinearity.hpp"

namespace sqg {

namespace {
constexpr double kPresetTol = 1e-12;

std::uint64_t tag_of(int v) { return std::uint64_t(std::int64_t(v)); }

void check_preset(const GeneratorPreset& p) {
    if (std::abs(2.0 * p.b - p.a + 2.0) > kPresetTol)
        throw std::invalid_argument("GeneratorPreset: constraint 2b - a = -2 violated");
}
}  // namespace

GeneratorPreset GeneratorPreset::spde(double delta) {
    GeneratorPreset p{2.0 * delta, delta - 1.0, "spde"};
    check_preset(p);
    return p;
}

GeneratorPreset GeneratorPreset::generator(double delta) {
    GeneratorPreset p{2.0 + 2.0 * delta, delta, "generator"};
    check_preset(p);
    return p;
}

GeneratorPreset GeneratorPreset::custom(double a, double b) {
    GeneratorPreset p{a, b, "custom"};
    check_preset(p);
    return p;
}

ModeTable::ModeTable(int trunc)
    : trunc_(trunc), modes_(canonical_band(trunc)), side_(2 * trunc + 1) {
    lut_.assign(std::size_t(side_) * side_, 0);
    for (std::size_t s = 0; s < modes_.size(); ++s) {
        const auto& k = modes_[s];
        lut_[std::size_t(k.x + trunc_) * side_ + (k.y + trunc_)] = int(s) + 1;
        lut_[std::size_t(-k.x + trunc_) * side_ + (-k.y + trunc_)] = -(int(s) + 1);
    }
}

std::size_t ModeTable::band_prefix(int m) const {
    const std::int64_t m2 = std::int64_t(m) * m;
    std::size_t n = 0;
    while (n < modes_.size() && modes_[n].norm2() <= m2) ++n;
    return n;
}

int ModeTable::code(const WaveVector& k) const {
    if (k.x < -trunc_ || k.x > trunc_ || k.y < -trunc_ || k.y > trunc_) return 0;
    if (k.norm2() > std::int64_t(trunc_) * trunc_) return 0;
    return lut_[std::size_t(k.x + trunc_) * side_ + (k.y + trunc_)];
}

std::vector<cplx> ModeTable::to_state(const SpectralField& f) const {
    std::vector<cplx> state(modes_.size(), cplx{0.0, 0.0});
    for (std::size_t s = 0; s < modes_.size(); ++s) state[s] = f.at(modes_[s]);
    return state;
}

SpectralField ModeTable::to_field(const std::vector<cplx>& state, int band) const {
    const int m = band > 0 ? band : trunc_;
    SpectralField f(std::min(m, trunc_));
    const std::size_t n = std::min(band_prefix(m), state.size());
    for (std::size_t s = 0; s < n; ++s) f.set_pair(modes_[s], state[s], 0.0);
    return f;
}

PairTable::PairTable(const ModeTable& table, int band) : band_(band) {
    if (band < 1 || band > table.truncation())
        throw std::invalid_argument("PairTable: band outside table");
    out_size_ = table.band_prefix(band);
    const std::int64_t b2 = std::int64_t(band) * band;

    std::vector<WaveVector> full;
    for (std::size_t s = 0; s < out_size_; ++s) {
        full.push_back(table.modes()[s]);
        full.push_back(-table.modes()[s]);
    }

    for (std::size_t s = 0; s < out_size_; ++s) {
        const WaveVector k = table.modes()[s];
        for (const auto& h1 : full) {
            const WaveVector h2 = k - h1;
            if (h2.is_zero() || h2.norm2() > b2) continue;
            if (h2 < h1) continue;  // one tuple per unordered pair
            const double a = alpha(h1, h2, k);
            if (a == 0.0) continue;
            tuples_.push_back(Tuple{std::int32_t(s), std::int32_t(table.code(h1)),
                                    std::int32_t(table.code(h2)),
                                    (h1 == h2 ? 1.0 : 2.0) * a});
        }
    }
}

void PairTable::eval(const ModeTable& table, const std::vector<cplx>& state,
                     std::vector<cplx>& out) const {
    (void)table;
    out.assign(out_size_, cplx{0.0, 0.0});
    for (const auto& t : tuples_)
        out[std::size_t(t.out)] +=
            t.w * ModeTable::decode(state, t.c1) * ModeTable::decode(state, t.c2);
}

double default_dt(int trunc, const GeneratorPreset& preset) {
    const double kmax = preset.a >= 2.0 ? std::pow(double(trunc), preset.a - 2.0) : 1.0;
    return std::min(0.1, 0.5 / (double(trunc) * trunc * kmax));
}

double step_noise_sigma(const WaveVector& k, const GeneratorPreset& preset, double dt) {
    const double lam = std::pow(k.norm(), preset.a);
    const double var =
        std::pow(k.norm(), 2.0 * preset.b) * (-std::expm1(-2.0 * lam * dt)) / (2.0 * lam);
    return std::sqrt(var);
}

namespace engine {

StepCoeffs::StepCoeffs(const ModeTable& table, const GeneratorPreset& preset, double dt) {
    const std::size_t n = table.size();
    decay.resize(n);
    bweight.resize(n);
    sigma.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const WaveVector& k = table.modes()[s];
        const double lam = std::pow(k.norm(), preset.a);
        decay[s] = std::exp(-lam * dt);
        bweight[s] = -std::expm1(-lam * dt) / lam;
        sigma[s] = step_noise_sigma(k, preset, dt);
    }
}

ModeNoise::ModeNoise(const ModeTable& table, std::uint64_t seed, std::uint64_t member) {
    streams.reserve(table.size());
    for (const auto& k : table.modes())
        streams.emplace_back(
            derive_stream(seed, {rng_tags::traj_noise, member, tag_of(k.x), tag_of(k.y)}));
}

void ModeNoise::draw(const StepCoeffs& coeffs, std::vector<cplx>& out) {
    out.resize(streams.size());
    for (std::size_t s = 0; s < streams.size(); ++s) {
        const double re = streams[s].next();
        const double im = streams[s].next();
        out[s] = coeffs.sigma[s] * cplx{re, im};
    }
}

std::vector<cplx> draw_initial(const ModeTable& table, std::uint64_t seed, std::uint64_t member) {
    std::vector<cplx> state(table.size());
    for (std::size_t s = 0; s < table.size(); ++s) {
        const WaveVector& k = table.modes()[s];
        GaussianStream g(
            derive_stream(seed, {rng_tags::traj_init, member, tag_of(k.x), tag_of(k.y)}));
        const double sig = 1.0 / (k.norm() * std::sqrt(2.0));
        state[s] = sig * cplx{g.next(), g.next()};
    }
    return state;
}

bool finite_state(const std::vector<cplx>& state) {
    for (const auto& v : state)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double l2_norm_state(const std::vector<cplx>& state, std::size_t prefix) {
    KahanSum acc;
    for (std::size_t s = 0; s < prefix; ++s) acc.add(2.0 * std::norm(state[s]));
    return std::sqrt(acc.value());
}

void step_state(std::vector<cplx>& state, const StepCoeffs& coeffs, std::size_t prefix,
                const PairTable* bpairs, const ModeTable& table, const std::vector<cplx>& eta,
                std::vector<cplx>& bscratch) {
    if (bpairs) {
        bpairs->eval(table, state, bscratch);
        for (std::size_t s = 0; s < prefix; ++s)
            state[s] = coeffs.decay[s] * state[s] + coeffs.bweight[s] * bscratch[s] + eta[s];
    } else {
        for (std::size_t s = 0; s < prefix; ++s)
            state[s] = coeffs.decay[s] * state[s] + eta[s];
    }
}

double pair_state(const std::vector<cplx>& f, const std::vector<cplx>& g, std::size_t prefix) {
    KahanSum acc;
    const std::size_t n = std::min({prefix, f.size(), g.size()});
    for (std::size_t s = 0; s < n; ++s)
        acc.add(2.0 * (f[s].real() * g[s].real() + f[s].imag() * g[s].imag()));
    return acc.value();
}

}  // namespace engine

using engine::ModeNoise;
using engine::StepCoeffs;

TrajectoryRecord simulate(const SimSpec& spec) {
    if (spec.T <= 0.0) throw std::invalid_argument("simulate: T must be > 0");
    const ModeTable table(spec.trunc);
    double dt = spec.dt > 0.0 ? spec.dt : default_dt(spec.trunc, spec.preset);
    if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");

    const PairTable bpairs = spec.b_on ? PairTable(table, spec.trunc) : PairTable();

    for (int attempt = 0;; ++attempt) {
        TrajectoryRecord rec;
        rec.trunc = spec.trunc;
        rec.delta = spec.delta;
        rec.preset = spec.preset;
        rec.dt = dt;
        rec.b_on = spec.b_on;
        rec.snapshot_stride = spec.snapshot_stride;
        rec.seed = spec.seed;
        rec.member = spec.member;
        rec.modes = table.modes();
        rec.dt_halvings = attempt;

        const StepCoeffs coeffs(table, spec.preset, dt);
        ModeNoise noise(table, spec.seed, spec.member);
        std::vector<cplx> state = spec.initial ? table.to_state(*spec.initial)
                                               : engine::draw_initial(table, spec.seed, spec.member);
        const std::size_t n_steps = std::size_t(std::llround(spec.T / dt));
        std::vector<cplx> eta, bscratch;

        rec.times.push_back(0.0);
        rec.states.push_back(state);
        rec.l2_norms.push_back(engine::l2_norm_state(state, state.size()));

        bool blown = false;
        for (std::size_t n = 0; n < n_steps; ++n) {
            noise.draw(coeffs, eta);
            if (spec.record_noise) rec.noise.push_back(eta);
            engine::step_state(state, coeffs, state.size(), spec.b_on ? &bpairs : nullptr, table,
                               eta, bscratch);
            if (!engine::finite_state(state)) {
                rec.aborted = true;
                rec.abort_step = n;
                blown = true;
                break;
            }
            if ((n + 1) % std::size_t(spec.snapshot_stride) == 0 || n + 1 == n_steps) {
                rec.times.push_back(double(n + 1) * dt);
                rec.states.push_back(state);
                rec.l2_norms.push_back(engine::l2_norm_state(state, state.size()));
            }
        }

        if (!blown || attempt >= 3) return rec;
        dt *= 0.5;  // retry with a halved step, recorded in dt_halvings
    }
}

std::vector<std::vector<cplx>> replay(const TrajectoryRecord& traj) {
    const ModeTable table(traj.trunc);
    const StepCoeffs coeffs(table, traj.preset, traj.dt);
    const PairTable bpairs = traj.b_on ? PairTable(table, traj.trunc) : PairTable();

    std::vector<std::vector<cplx>> out;
    std::vector<cplx> state = traj.states.at(0);
    std::vector<cplx> bscratch;
    out.push_back(state);
    for (std::size_t n = 0; n < traj.noise.size(); ++n) {
        engine::step_state(state, coeffs, state.size(), traj.b_on ? &bpairs : nullptr, table,
                           traj.noise[n], bscratch);
        if ((n + 1) % std::size_t(traj.snapshot_stride) == 0 || n + 1 == traj.noise.size())
            out.push_back(state);
    }
    return out;
}

SpectralField TrajectoryRecord::state_field(std::size_t snapshot) const {
    const ModeTable table(trunc);
    return table.to_field(states.at(snapshot));
}

SpectralField step(const SpectralField& state, double dt, const GeneratorPreset& preset,
                   bool b_on, const SpectralField& noise, double delta, int trunc) {
    (void)delta;
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
    check_preset(preset);
    const SpectralField B = b_on ? eval_B(state, trunc).field : SpectralField(trunc);
    SpectralField out(trunc);
    for (const auto& k : canonical_band(trunc)) {
        const double lam = std::pow(k.norm(), preset.a);
        const double decay = std::exp(-lam * dt);
        const double bw = -std::expm1(-lam * dt) / lam;
        const cplx v = decay * state.at(k) + (b_on ? bw * B.at(k) : cplx{0.0, 0.0}) + noise.at(k);
        out.set_pair(k, v, 0.0);
    }
    return out;
}

DriftPath accumulate_G(const TrajectoryRecord& traj, int band) {
    if (band > traj.trunc) throw std::invalid_argument("accumulate_G: band exceeds truncation");
    const ModeTable table(traj.trunc);
    const PairTable bp(table, band);
    const std::size_t prefix = table.band_prefix(band);

    DriftPath path;
    path.times = traj.times;
    std::vector<cplx> G(prefix, cplx{0.0, 0.0});
    std::vector<cplx> bprev, bcur;
    bp.eval(table, traj.states.at(0), bprev);
    path.values.push_back(table.to_field(G, band));
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double h = traj.times[i] - traj.times[i - 1];
        bp.eval(table, traj.states[i], bcur);
        for (std::size_t s = 0; s < prefix; ++s) G[s] += 0.5 * h * (bprev[s] + bcur[s]);
        path.values.push_back(table.to_field(G, band));
        bprev.swap(bcur);
    }
    return path;
}

DriftPath accumulate_G_tilde(const TrajectoryRecord& traj, int band, double delta) {
    if (band > traj.trunc)
        throw std::invalid_argument("accumulate_G_tilde: band exceeds truncation");
    const ModeTable table(traj.trunc);
    const PairTable bp(table, band);
    const std::size_t prefix = table.band_prefix(band);

    std::vector<double> lam(prefix), wconst(prefix);
    DriftPath path;
    path.times = traj.times;
    std::vector<cplx> G(prefix, cplx{0.0, 0.0});
    std::vector<cplx> bprev, bcur;
    bp.eval(table, traj.states.at(0), bprev);
    path.values.push_back(table.to_field(G, band));
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double h = traj.times[i] - traj.times[i - 1];
        bp.eval(table, traj.states[i], bcur);
        for (std::size_t s = 0; s < prefix; ++s) {
            const double l = std::pow(table.modes()[s].norm(), 2.0 * delta);
            const double decay = std::exp(-l * h);
            const double w = -std::expm1(-l * h) / l;
            G[s] = decay * G[s] + w * 0.5 * (bprev[s] + bcur[s]);
        }
        path.values.push_back(table.to_field(G, band));
        bprev.swap(bcur);
    }
    return path;
}

QvResult quadratic_variation(const MartingalePath& path, int mesh_levels) {
    QvResult r;
    const std::size_t n = path.values.size();
    if (n < 2) return r;
    for (int level = 0; level < mesh_levels; ++level) {
        const std::size_t stride = std::size_t(1) << level;
        if (stride >= n) break;
        KahanSum acc;
        for (std::size_t i = 0; i + stride < n; i += stride) {
            const double d = path.values[i + stride] - path.values[i];
            acc.add(d * d);
        }
        r.by_level.push_back(acc.value());
    }
    if (!r.by_level.empty()) r.finest = r.by_level.front();
    return r;
}

double l2_pair(const SpectralField& f, const SpectralField& phi) {
    KahanSum acc;
    for (const auto& [k, v] : phi.coeffs()) {
        const cplx w = f.at(-k);
        if (w == cplx{0.0, 0.0}) continue;
        acc.add((w * v).real());
    }
    return acc.value();
}

MartingalePath dynkin_martingale(const TrajectoryRecord& traj, const SpectralField& phi,
                                 const GeneratorPreset& preset) {
    const ModeTable table(traj.trunc);
    const std::vector<cplx> phi_state = table.to_state(phi);
    std::vector<double> lin_w(table.size());
    for (std::size_t s = 0; s < table.size(); ++s)
        lin_w[s] = std::pow(table.modes()[s].norm(), preset.a);

    const PairTable bp = traj.b_on ? PairTable(table, traj.trunc) : PairTable();
    std::vector<cplx> G(table.size(), cplx{0.0, 0.0});
    std::vector<cplx> bprev, bcur;
    if (traj.b_on) bp.eval(table, traj.states.at(0), bprev);

    auto lin_pair = [&](const std::vector<cplx>& st) {
        KahanSum acc;
        for (std::size_t s = 0; s < table.size(); ++s)
            acc.add(-2.0 * lin_w[s] *
                    (st[s].real() * phi_state[s].real() + st[s].imag() * phi_state[s].imag()));
        return acc.value();
    };

    MartingalePath m;
    m.times = traj.times;
    m.values.assign(traj.times.size(), 0.0);
    const double p0 = engine::pair_state(traj.states.at(0), phi_state, table.size());
    double quad = 0.0;
    double fprev = lin_pair(traj.states.at(0));
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        const auto& st = traj.states[i];
        const double fcur = lin_pair(st);
        const double h = traj.times[i] - traj.times[i - 1];
        quad += 0.5 * h * (fprev + fcur);
        double drift = 0.0;
        if (traj.b_on) {
            bp.eval(table, st, bcur);
            for (std::size_t s = 0; s < table.size(); ++s) G[s] += 0.5 * h * (bprev[s] + bcur[s]);
            bprev.swap(bcur);
            drift = engine::pair_state(G, phi_state, table.size());
        }
        m.values[i] = (engine::pair_state(st, phi_state, table.size()) - p0) - quad - drift;
        fprev = fcur;
    }
    return m;
}

double noise_qv_rate(const SpectralField& phi, const GeneratorPreset& preset) {
    KahanSum acc;
    for (const auto& [k, v] : phi.coeffs())
        acc.add(std::pow(k.norm(), 2.0 * preset.b) * std::norm(v));
    return 2.0 * acc.value();
}

TwinResult twin_simulate(const TwinSpec& spec) {
    if (spec.trunc_m > spec.trunc_n) throw std::invalid_argument("twin_simulate: need M <= N");
    const ModeTable table(spec.trunc_n);
    const double dt = spec.dt > 0.0 ? spec.dt : default_dt(spec.trunc_n, spec.preset);
    const StepCoeffs coeffs(table, spec.preset, dt);
    const PairTable bp_n = spec.b_on ? PairTable(table, spec.trunc_n) : PairTable();
    const PairTable bp_m = spec.b_on ? PairTable(table, spec.trunc_m) : PairTable();
    const std::size_t prefix_m = table.band_prefix(spec.trunc_m);

    ModeNoise noise(table, spec.seed, spec.member);
    std::vector<cplx> state_n = engine::draw_initial(table, spec.seed, spec.member);
    std::vector<cplx> state_m(state_n.begin(), state_n.begin() + prefix_m);

    const std::size_t n_steps = std::size_t(std::llround(spec.T / dt));
    std::vector<cplx> eta, eta_m, bscratch;

    auto diff_norm = [&]() {
        double sup = 0.0;
        for (std::size_t s = 0; s < prefix_m; ++s) {
            const WaveVector& k = table.modes()[s];
            sup = std::max(sup,
                           std::pow(k.norm(), spec.s_index) * std::abs(state_n[s] - state_m[s]));
        }
        return sup;
    };

    auto snap = [&](TrajectoryRecord& rec, const std::vector<cplx>& st, double t) {
        rec.times.push_back(t);
        rec.states.push_back(st);
        rec.l2_norms.push_back(engine::l2_norm_state(st, st.size()));
    };

    TwinResult out;
    for (TrajectoryRecord* rec : {&out.run_n, &out.run_m}) {
        rec->delta = spec.delta;
        rec->preset = spec.preset;
        rec->dt = dt;
        rec->b_on = spec.b_on;
        rec->snapshot_stride = spec.snapshot_stride;
        rec->seed = spec.seed;
        rec->member = spec.member;
    }
    out.run_n.trunc = spec.trunc_n;
    out.run_n.modes = table.modes();
    out.run_m.trunc = spec.trunc_m;
    out.run_m.modes =
        std::vector<WaveVector>(table.modes().begin(), table.modes().begin() + prefix_m);

    snap(out.run_n, state_n, 0.0);
    snap(out.run_m, state_m, 0.0);
    out.times.push_back(0.0);
    out.diff_norm.push_back(diff_norm());

    for (std::size_t n = 0; n < n_steps; ++n) {
        noise.draw(coeffs, eta);
        eta_m.assign(eta.begin(), eta.begin() + prefix_m);
        engine::step_state(state_n, coeffs, state_n.size(), spec.b_on ? &bp_n : nullptr, table,
                           eta, bscratch);
        engine::step_state(state_m, coeffs, prefix_m, spec.b_on ? &bp_m : nullptr, table, eta_m,
                           bscratch);
        const double t = double(n + 1) * dt;
        const double d = diff_norm();
        if ((n + 1) % std::size_t(spec.snapshot_stride) == 0 || n + 1 == n_steps) {
            snap(out.run_n, state_n, t);
            snap(out.run_m, state_m, t);
            out.times.push_back(t);
            out.diff_norm.push_back(d);
        }
        out.sup_diff = std::max(out.sup_diff, d);
    }
    return out;
}

}  // namespace sqg
