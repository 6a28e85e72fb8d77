#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqg/dynamics.hpp"

namespace sqg {

/// One configuration drives every experiment; runners read the fields they
/// need.  Defaults are the desk-scale grid; defaults_for(name) adjusts them
/// per experiment.
struct ExperimentConfig {
    double delta = 1.0;
    double epsilon = 0.05;
    int trunc_n = 8;                 // N
    int trunc_m = 4;                 // M (single-band uses)
    std::vector<int> bands;          // M sweep
    std::vector<int> k_mags;         // |k| sweep, modes (m, 0)
    std::vector<double> horizons;    // T sweep
    std::vector<double> lambdas;     // exponential-moment scan
    double dt = 0.0;                 // 0: integrator default policy
    double T = 1.0;
    int ensembles = 200;
    int p = 2;                       // L^{2p} ensemble moments
    double lambda = 0.01;
    std::string preset = "spde";     // "spde" | "generator"
    std::uint64_t seed = 20260809;
    std::uint64_t samples = 10000;   // static Monte Carlo size
    double t_frak = 0.02;            // contraction-statistic horizon
    int snapshot_stride = 1;
    int mesh_levels = 3;
    int row_sum_cutoff = 200;        // J
    std::vector<int> lags;           // Hoelder lags, in steps
    std::string format = "jsonl";    // trajectory output: "jsonl" | "bin"

    /// Regularity scale of the theorem statement: min(-eps, 2d - 1 - 3d eps),
    /// and its streamline shift s + 1.
    double s_theta() const;
    double s_psi() const;
    /// Index of the twin-run difference norm: 2d - 3d eps.
    double s_uniq() const;

    GeneratorPreset generator_preset() const;
    double effective_dt(int trunc) const;

    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;  // canonical key order and formatting
    std::uint64_t hash() const;   // FNV-1a over the canonical form
};

/// Per-experiment defaults (criterion-scale parameters).
ExperimentConfig defaults_for(const std::string& experiment);

struct CheckResult {
    std::string name;
    bool passed = false;
    bool informational = false;  // reported, never gates the exit code
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct ExperimentReport {
    std::string experiment;
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> tables;  // (file name, csv)
    double runtime_sec = 0.0;

    bool passed() const;
    std::string to_json() const;
    /// One line per check: "PASS <name> value=... threshold=..."
    std::string summary() const;
};

const std::vector<std::string>& experiment_names();

/// Runs one experiment; when out_dir is nonempty, writes the CSV tables,
/// report JSON and any artifacts (samples, trajectory frames, noise archive)
/// there.
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& config,
                                const std::string& out_dir = "");

/// CSV header comment carried by every table: experiment, config hash, seed.
std::string csv_preamble(const std::string& experiment, const ExperimentConfig& config);

std::string format_double(double v);  // stable "%.12g"

}  // namespace sqg
