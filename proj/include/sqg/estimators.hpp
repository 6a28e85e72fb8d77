#pragma once

#include <string>
#include <vector>

#include "sqg/lattice.hpp"

namespace sqg {

/// Ensemble moment norm (mean |x|^p)^{1/p} with a jackknife error bar.
struct EnsembleStatistic {
    std::string label;
    std::vector<double> sample_values;
    double p = 2.0;
    double estimate = 0.0;
    double std_error = 0.0;
    bool low_count = false;  // fewer than 30 members
};

/// L^p ensemble norm of precomputed per-member scalars (typically
/// sup-in-time path statistics).
EnsembleStatistic lp_norm(std::vector<double> values, double p, const std::string& label = "");

/// Convenience: sup_t |path| per member first, then the L^p norm.
EnsembleStatistic lp_sup_norm(const std::vector<std::vector<double>>& paths, double p,
                              const std::string& label = "");

/// Log-log least squares y = C x^slope.
struct ScalingFit {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    double slope = 0.0;
    double intercept = 0.0;  // log C
    double residual = 0.0;   // rms residual in log space
};

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

/// Empirical Hoelder exponent: fits mean |x(t + lag) - x(t)| against lag in
/// log-log coordinates, averaging over ensemble members and time offsets.
/// Paths share one uniform grid of spacing dt; lags are in steps.
ScalingFit holder_exponent(const std::vector<std::vector<double>>& paths, double dt,
                           const std::vector<int>& lags);

/// Two-sample Kolmogorov-Smirnov statistic and the asymptotic critical value
/// at the given significance level.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical(std::size_t n_a, std::size_t n_b, double alpha);

/// Stationarity diagnostics for |psi_k(t)|^2 path ensembles: per-member
/// linear drift of the squared modulus over the horizon (normalized by the
/// ensemble variance level and averaged; drift_z is drift / std error) and a
/// two-sample KS statistic between the first- and last-time marginals of
/// Re psi_k.
struct StationarityResult {
    double variance_drift = 0.0;  // relative drift over the horizon
    double drift_std_error = 0.0;
    double drift_z = 0.0;
    double ks_statistic = 0.0;
    double ks_critical_1pct = 0.0;
};

StationarityResult stationarity_test(const std::vector<std::vector<cplx>>& mode_paths,
                                     const std::vector<double>& times);

}  // namespace sqg
