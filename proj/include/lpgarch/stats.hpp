#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "lpgarch/error.hpp"

namespace lpg {

/// A test statistic, its p-value and the settings that produced it.
struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::map<std::string, std::string> config;
};

struct Descriptive {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  ///< raw, Gaussian = 3
};

inline double chi2_upper_tail(double x, double dof) {
    if (!(x > 0.0)) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

inline double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

/// Two-sided standard normal quantile for a confidence level in (0, 1).
inline double normal_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError(fmt::format("confidence level {} outside (0, 1)", level));
    return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample autocorrelations r_1..r_max_lag, denominator the lag-0 autocovariance.
inline std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
    if (max_lag < 1) throw InputError("acf needs max_lag >= 1");
    if (x.size() <= max_lag)
        throw InputError(fmt::format("acf needs more than {} observations, got {}", max_lag, x.size()));
    const double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw InputError("acf of a constant series is undefined");
    std::vector<double> r(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < x.size(); ++t) ck += (x[t] - m) * (x[t - k] - m);
        r[k - 1] = ck / c0;
    }
    return r;
}

/// Ljung-Box portmanteau test, chi-squared with `lags` degrees of freedom.
inline TestResult ljung_box(std::span<const double> x, std::size_t lags) {
    const auto r = acf(x, lags);
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) q += r[k - 1] * r[k - 1] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);
    return {q, chi2_upper_tail(q, static_cast<double>(lags)), {{"lags", std::to_string(lags)}}};
}

/// Mean, sd (n-1), and skewness/kurtosis from population central moments.
inline Descriptive descriptive_stats(std::span<const double> x) {
    if (x.size() < 4) throw InputError(fmt::format("descriptive statistics need at least 4 values, got {}", x.size()));
    Descriptive d;
    d.n = x.size();
    const double n = static_cast<double>(x.size());
    d.mean = mean(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double e = v - d.mean, e2 = e * e;
        m2 += e2;
        m3 += e2 * e;
        m4 += e2 * e2;
    }
    d.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        d.skewness = m3 / std::pow(m2, 1.5);
        d.kurtosis = m4 / (m2 * m2);
    } else {
        d.skewness = std::nan("");
        d.kurtosis = std::nan("");
    }
    return d;
}

inline TestResult jarque_bera(double skewness, double kurtosis, std::size_t n) {
    const double excess = kurtosis - 3.0;
    const double jb = static_cast<double>(n) / 6.0 * (skewness * skewness + excess * excess / 4.0);
    return {jb, chi2_upper_tail(jb, 2.0), {{"n", std::to_string(n)}}};
}

inline TestResult jarque_bera(std::span<const double> x) {
    if (x.size() < 8) throw InputError(fmt::format("Jarque-Bera needs at least 8 values, got {}", x.size()));
    const auto d = descriptive_stats(x);
    if (!std::isfinite(d.kurtosis)) throw InputError("Jarque-Bera of a constant series is undefined");
    return jarque_bera(d.skewness, d.kurtosis, d.n);
}

inline std::vector<double> squared(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
    return out;
}

}  // namespace lpg
