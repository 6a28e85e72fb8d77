#include "sqg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqg {

namespace {

double mean_of(const std::vector<double>& v) {
    KahanSum s;
    for (double x : v) s.add(x);
    return v.empty() ? 0.0 : s.value() / double(v.size());
}

}  // namespace

EnsembleStatistic lp_norm(std::vector<double> values, double p, const std::string& label) {
    if (values.empty()) throw std::invalid_argument("lp_norm: empty ensemble");
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");

    EnsembleStatistic st;
    st.label = label;
    st.p = p;
    st.low_count = values.size() < 30;

    std::vector<double> powers(values.size());
    KahanSum sum;
    for (std::size_t i = 0; i < values.size(); ++i) {
        powers[i] = std::pow(std::abs(values[i]), p);
        sum.add(powers[i]);
    }
    const double n = double(values.size());
    st.estimate = std::pow(sum.value() / n, 1.0 / p);

    // delete-one jackknife on the p-norm
    if (values.size() >= 2) {
        std::vector<double> loo(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            loo[i] = std::pow((sum.value() - powers[i]) / (n - 1.0), 1.0 / p);
        const double lm = mean_of(loo);
        KahanSum sq;
        for (double x : loo) sq.add((x - lm) * (x - lm));
        st.std_error = std::sqrt((n - 1.0) / n * sq.value());
    }
    st.sample_values = std::move(values);
    return st;
}

EnsembleStatistic lp_sup_norm(const std::vector<std::vector<double>>& paths, double p,
                              const std::string& label) {
    std::vector<double> sups;
    sups.reserve(paths.size());
    for (const auto& path : paths) {
        double s = 0.0;
        for (double x : path) s = std::max(s, std::abs(x));
        sups.push_back(s);
    }
    return lp_norm(std::move(sups), p, label);
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_scaling: need >= 3 points");
    ScalingFit fit;
    std::vector<double> lx, ly;
    for (const auto& [x, y] : points) {
        if (x <= 0.0 || y <= 0.0)
            throw std::invalid_argument("fit_scaling: points must be positive");
        fit.abscissae.push_back(x);
        fit.ordinates.push_back(y);
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double n = double(lx.size());
    const double mx = mean_of(lx), my = mean_of(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_scaling: degenerate abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

ScalingFit holder_exponent(const std::vector<std::vector<double>>& paths, double dt,
                           const std::vector<int>& lags) {
    if (paths.empty()) throw std::invalid_argument("holder_exponent: empty ensemble");
    std::vector<std::pair<double, double>> points;
    for (int lag : lags) {
        if (lag < 1) throw std::invalid_argument("holder_exponent: lag must be >= 1");
        KahanSum acc;
        std::size_t count = 0;
        for (const auto& path : paths) {
            if (path.size() <= std::size_t(lag)) continue;
            for (std::size_t i = 0; i + std::size_t(lag) < path.size(); ++i) {
                acc.add(std::abs(path[i + std::size_t(lag)] - path[i]));
                ++count;
            }
        }
        if (count == 0) throw std::invalid_argument("holder_exponent: lag exceeds path length");
        points.emplace_back(double(lag) * dt, acc.value() / double(count));
    }
    return fit_scaling(points);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = double(i) / double(a.size());
        const double fb = double(j) / double(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double ks_critical(std::size_t n_a, std::size_t n_b, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(double(n_a + n_b) / (double(n_a) * double(n_b)));
}

StationarityResult stationarity_test(const std::vector<std::vector<cplx>>& mode_paths,
                                     const std::vector<double>& times) {
    if (mode_paths.size() < 2) throw std::invalid_argument("stationarity_test: need >= 2 members");
    const std::size_t nt = times.size();
    for (const auto& p : mode_paths)
        if (p.size() != nt) throw std::invalid_argument("stationarity_test: ragged ensemble");
    if (nt < 2) throw std::invalid_argument("stationarity_test: need >= 2 times");

    // level: ensemble-and-time average of |psi_k|^2, the normalization
    KahanSum level_acc;
    for (const auto& p : mode_paths)
        for (const auto& v : p) level_acc.add(std::norm(v));
    const double level = level_acc.value() / double(mode_paths.size() * nt);

    // per-member least-squares slope of |psi_k(t)|^2 against t
    const double tmean = [&] {
        KahanSum s;
        for (double t : times) s.add(t);
        return s.value() / double(nt);
    }();
    double sxx = 0.0;
    for (double t : times) sxx += (t - tmean) * (t - tmean);
    const double horizon = times.back() - times.front();

    std::vector<double> slopes(mode_paths.size());
    for (std::size_t m = 0; m < mode_paths.size(); ++m) {
        KahanSum sxy;
        for (std::size_t i = 0; i < nt; ++i)
            sxy.add((times[i] - tmean) * std::norm(mode_paths[m][i]));
        slopes[m] = sxy.value() / sxx;
    }
    // relative drift over the horizon, member mean +- standard error
    const double smean = mean_of(slopes);
    KahanSum svar;
    for (double s : slopes) svar.add((s - smean) * (s - smean));
    const double sse =
        std::sqrt(svar.value() / double(slopes.size() - 1) / double(slopes.size()));

    StationarityResult r;
    r.variance_drift = smean * horizon / level;
    r.drift_std_error = sse * horizon / level;
    r.drift_z = r.drift_std_error > 0.0 ? r.variance_drift / r.drift_std_error : 0.0;

    std::vector<double> first, last;
    first.reserve(mode_paths.size());
    last.reserve(mode_paths.size());
    for (const auto& p : mode_paths) {
        first.push_back(p.front().real());
        last.push_back(p.back().real());
    }
    r.ks_statistic = ks_two_sample(first, last);
    r.ks_critical_1pct = ks_critical(first.size(), last.size(), 0.01);
    return r;
}

}  // namespace sqg
