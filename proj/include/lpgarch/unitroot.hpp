#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "lpgarch/error.hpp"
#include "lpgarch/stats.hpp"

namespace lpg {

namespace detail {

// MacKinnon (1994), "Approximate asymptotic distribution functions for
// unit-root and cointegration tests", JBES 12(2), one-variable case (N = 1).
// Coefficients are stored with the published scaling already applied
// (small-p: 1, 1, 1e-2; large-p: 1, 1e-1, 1e-1, 1e-2).
struct MacKinnonSurface {
    double tau_star, tau_min, tau_max;
    std::array<double, 3> small_p;
    std::array<double, 4> large_p;
};

inline constexpr MacKinnonSurface kMacKinnonNoConstant{
    -1.04, -19.04, std::numeric_limits<double>::infinity(), {0.6344, 1.2378, 3.2496e-2},
    {0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2}};
inline constexpr MacKinnonSurface kMacKinnonConstant{
    -1.61, -18.83, 2.74, {2.1659, 1.4412, 3.8269e-2}, {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}};

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::VectorXd resid;
    double ssr = 0.0;
};

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto n = X.rows(), k = X.cols();
    if (n <= k) throw InputError(fmt::format("regression has {} rows for {} regressors", n, k));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw InputError("singular unit-root regression (is the series constant?)");
    OlsFit f;
    f.beta = qr.solve(y);
    f.resid = y - X * f.beta;
    f.ssr = f.resid.squaredNorm();
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const double s2 = f.ssr / static_cast<double>(n - k);
    f.se = (s2 * xtx_inv.diagonal().array()).sqrt();
    return f;
}

// Augmented Dickey-Fuller regression of dx_t on x_{t-1}, [1], dx_{t-1..t-lag}
// using observations after the first `skip` differences. Column 0 is x_{t-1}.
inline OlsFit adf_regression(std::span<const double> x, std::size_t lag, std::size_t skip, bool intercept) {
    const std::size_t nd = x.size() - 1;
    const auto rows = static_cast<Eigen::Index>(nd - skip);
    const auto cols = static_cast<Eigen::Index>(1 + (intercept ? 1 : 0) + lag);
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = skip + 1 + static_cast<std::size_t>(r);  // index into x
        y(r) = x[t] - x[t - 1];
        Eigen::Index c = 0;
        X(r, c++) = x[t - 1];
        if (intercept) X(r, c++) = 1.0;
        for (std::size_t j = 1; j <= lag; ++j) X(r, c++) = x[t - j] - x[t - j - 1];
    }
    return ols(X, y);
}

inline double gaussian_aic(const OlsFit& f, std::size_t k) {
    const double n = static_cast<double>(f.resid.size());
    const double llf = -n / 2.0 * (std::log(2.0 * std::numbers::pi) + std::log(f.ssr / n) + 1.0);
    return -2.0 * llf + 2.0 * static_cast<double>(k);
}

inline void require_unit_root_length(std::span<const double> x) {
    if (x.size() < 25) throw InputError(fmt::format("unit-root tests need at least 25 observations, got {}", x.size()));
}

}  // namespace detail

/// MacKinnon (1994) asymptotic p-value of a Dickey-Fuller tau statistic.
inline double mackinnon_p(double tau, bool intercept) {
    const auto& s = intercept ? detail::kMacKinnonConstant : detail::kMacKinnonNoConstant;
    if (tau > s.tau_max) return 1.0;
    if (tau < s.tau_min) return 0.0;
    auto poly = [tau](std::span<const double> c) {
        double z = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) z = z * tau + c[i];
        return z;
    };
    return normal_cdf(tau <= s.tau_star ? poly(s.small_p) : poly(s.large_p));
}

/// Default upper bound for the automatic ADF lag search.
inline std::size_t adf_max_lag(std::size_t n, bool intercept) {
    const auto rule = static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    const std::size_t ntrend = intercept ? 1 : 0;
    const std::size_t cap = n / 2 > ntrend + 1 ? n / 2 - ntrend - 1 : 0;
    return std::min(rule, cap);
}

/**
 * Augmented Dickey-Fuller t-test of a unit root.
 *
 * With `lags` set the augmented regression uses exactly that many lagged
 * differences. Otherwise the order minimizing AIC over 0..max_lag is chosen on
 * a common sample and the test regression is refit at that order on the
 * longest sample it allows.
 */
inline TestResult adf_test(std::span<const double> x, bool intercept, std::optional<std::size_t> lags = std::nullopt,
                           std::optional<std::size_t> max_lag = std::nullopt) {
    detail::require_unit_root_length(x);
    std::size_t used = 0;
    std::string method = "fixed";
    if (lags) {
        used = *lags;
    } else {
        const std::size_t top = max_lag.value_or(adf_max_lag(x.size(), intercept));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p <= top; ++p) {
            const auto f = detail::adf_regression(x, p, top, intercept);
            const double aic = detail::gaussian_aic(f, 1 + (intercept ? 1 : 0) + p);
            if (aic < best) best = aic, used = p;
        }
        method = "aic";
    }
    if (used + 3 >= x.size()) throw InputError(fmt::format("ADF lag order {} too large for {} observations", used, x.size()));
    const auto f = detail::adf_regression(x, used, used, intercept);
    const double tau = f.beta(0) / f.se(0);
    return {tau,
            mackinnon_p(tau, intercept),
            {{"intercept", intercept ? "true" : "false"}, {"lags", std::to_string(used)}, {"lag_selection", method}}};
}

/// Newey-West (1994) automatic bandwidth for the Bartlett kernel.
inline std::size_t newey_west_bandwidth(std::span<const double> u) {
    const std::size_t T = u.size();
    const auto n_lag = static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
    auto gamma = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = j; t < T; ++t) s += u[t] * u[t - j];
        return s / static_cast<double>(T);
    };
    double s0 = gamma(0), s1 = 0.0;
    for (std::size_t j = 1; j <= n_lag && j < T; ++j) {
        const double g = gamma(j);
        s0 += 2.0 * g;
        s1 += 2.0 * static_cast<double>(j) * g;
    }
    if (!(s0 > 0.0)) return 0;
    const double g_hat = 1.1447 * std::cbrt((s1 / s0) * (s1 / s0));
    const auto m = static_cast<std::size_t>(std::floor(g_hat * std::cbrt(static_cast<double>(T))));
    return std::min(m, T - 1);
}

/// Bartlett-weighted long-run variance, not demeaned.
inline double long_run_variance(std::span<const double> u, std::size_t lags) {
    const std::size_t n = u.size();
    double lr = 0.0;
    for (double v : u) lr += v * v;
    for (std::size_t j = 1; j <= lags && j < n; ++j) {
        double g = 0.0;
        for (std::size_t t = j; t < n; ++t) g += u[t] * u[t - j];
        lr += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(lags + 1)) * g;
    }
    return lr / static_cast<double>(n);
}

/**
 * Phillips-Perron Z_tau test. The Dickey-Fuller regression of x_t on x_{t-1}
 * (and a constant) is corrected with a Bartlett long-run variance whose
 * bandwidth is chosen automatically unless `lags` is given.
 */
inline TestResult pp_test(std::span<const double> x, bool intercept, std::optional<std::size_t> lags = std::nullopt) {
    detail::require_unit_root_length(x);
    const auto rows = static_cast<Eigen::Index>(x.size() - 1);
    Eigen::MatrixXd X(rows, intercept ? 2 : 1);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        y(r) = x[static_cast<std::size_t>(r) + 1];
        X(r, 0) = x[static_cast<std::size_t>(r)];
        if (intercept) X(r, 1) = 1.0;
    }
    const auto f = detail::ols(X, y);
    const std::span<const double> u(f.resid.data(), static_cast<std::size_t>(f.resid.size()));
    const std::size_t bw = lags.value_or(newey_west_bandwidth(u));
    const double n = static_cast<double>(rows), k = static_cast<double>(X.cols());
    const double lam2 = long_run_variance(u, bw);
    const double s2 = f.ssr / (n - k);
    const double gamma0 = s2 * (n - k) / n;
    const double sigma = f.se(0);
    if (!(sigma > 0.0) || !(lam2 > 0.0)) throw InputError("degenerate Phillips-Perron regression (is the series constant?)");
    const double lam = std::sqrt(lam2);
    const double stat =
        std::sqrt(gamma0 / lam2) * ((f.beta(0) - 1.0) / sigma) - 0.5 * ((lam2 - gamma0) / lam) * (n * sigma / std::sqrt(s2));
    return {stat,
            mackinnon_p(stat, intercept),
            {{"intercept", intercept ? "true" : "false"},
             {"lags", std::to_string(bw)},
             {"bandwidth", lags ? "fixed" : "newey-west"}}};
}

}  // namespace lpg
