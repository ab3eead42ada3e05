#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "lpgarch/fit_result.hpp"
#include "lpgarch/logperiodic.hpp"
#include "lpgarch/lpfit.hpp"
#include "lpgarch/optimizer.hpp"

namespace lpg {

/// u_t = rho u_{t-1} + eta_t,  eta_t = sigma_t eps_t,
/// sigma_t^2 = alpha0 + alpha1 eta_{t-1}^2 + alpha2 sigma_{t-1}^2.
struct ARGARCHParams {
    double rho = 0.0;
    double alpha0 = 1.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    static constexpr std::size_t kSize = 4;
    static constexpr std::array<std::string_view, kSize> kNames{"rho", "alpha0", "alpha1", "alpha2"};

    std::array<double, kSize> to_array() const { return {rho, alpha0, alpha1, alpha2}; }
    static ARGARCHParams from_array(const std::array<double, kSize>& v) { return {v[0], v[1], v[2], v[3]}; }

    double unconditional_variance() const { return alpha0 / (1.0 - alpha1 - alpha2); }

    void validate() const {
        if (!(std::fabs(rho) < 1.0) || !(alpha0 > 0.0) || !(alpha1 >= 0.0) || !(alpha2 >= 0.0) ||
            !(alpha1 + alpha2 < 1.0))
            throw InputError(fmt::format("invalid AR(1)-GARCH(1,1) parameters: rho={} alpha0={} alpha1={} alpha2={}",
                                         rho, alpha0, alpha1, alpha2));
    }

    friend bool operator==(const ARGARCHParams&, const ARGARCHParams&) = default;
};

/// The 11 parameters of the log-periodic-AR(1)-GARCH(1,1) model.
struct FullParams {
    LPParams lp;
    ARGARCHParams ag;

    static constexpr std::size_t kSize = LPParams::kSize + ARGARCHParams::kSize;
    static constexpr std::array<std::string_view, kSize> kNames{"A",     "B",   "C",      "t_c",    "beta",  "omega",
                                                                "phi",   "rho", "alpha0", "alpha1", "alpha2"};

    std::array<double, kSize> to_array() const {
        std::array<double, kSize> out{};
        const auto a = lp.to_array();
        const auto b = ag.to_array();
        std::copy(a.begin(), a.end(), out.begin());
        std::copy(b.begin(), b.end(), out.begin() + LPParams::kSize);
        return out;
    }

    static FullParams from_array(const std::array<double, kSize>& v) {
        FullParams p;
        p.lp = {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
        p.ag = {v[7], v[8], v[9], v[10]};
        return p;
    }

    friend bool operator==(const FullParams&, const FullParams&) = default;
};

/**
 * Filtered sequences, all of length n. Entry 0 of eta, sigma2 and eps is NaN:
 * the recursions start at the second observation, with sigma2[1] set to the
 * unconditional variance alpha0 / (1 - alpha1 - alpha2).
 */
struct FilterOutput {
    std::vector<double> u;
    std::vector<double> eta;
    std::vector<double> sigma2;
    std::vector<double> eps;
};

inline FilterOutput filter_argarch(const ARGARCHParams& ag, std::span<const double> u) {
    if (u.size() < 2) throw InputError("AR(1)-GARCH(1,1) filter needs at least 2 observations");
    ag.validate();
    const std::size_t n = u.size();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    FilterOutput out{std::vector<double>(u.begin(), u.end()), std::vector<double>(n, nan), std::vector<double>(n, nan),
                     std::vector<double>(n, nan)};
    for (std::size_t t = 1; t < n; ++t) {
        out.eta[t] = u[t] - ag.rho * u[t - 1];
        out.sigma2[t] = t == 1 ? ag.unconditional_variance()
                               : ag.alpha0 + ag.alpha1 * out.eta[t - 1] * out.eta[t - 1] + ag.alpha2 * out.sigma2[t - 1];
        out.eps[t] = out.eta[t] / std::sqrt(out.sigma2[t]);
    }
    return out;
}

namespace detail {

// Gaussian conditional log-likelihood of residuals u with no parameter
// validation. Returns NaN when a variance is non-positive or non-finite.
inline double argarch_loglik_raw(const ARGARCHParams& ag, std::span<const double> u) {
    const std::size_t n = u.size();
    const double denom = 1.0 - ag.alpha1 - ag.alpha2;
    double sigma2 = ag.alpha0 / denom;
    double eta_prev = 0.0;
    double sum_log = 0.0, sum_sq = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double eta = u[t] - ag.rho * u[t - 1];
        if (t > 1) sigma2 = ag.alpha0 + ag.alpha1 * eta_prev * eta_prev + ag.alpha2 * sigma2;
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) return std::numeric_limits<double>::quiet_NaN();
        sum_log += std::log(sigma2);
        sum_sq += eta * eta / sigma2;
        eta_prev = eta;
    }
    return -0.5 * static_cast<double>(n - 1) * std::log(2.0 * std::numbers::pi) - 0.5 * sum_log - 0.5 * sum_sq;
}

inline double full_loglik_raw(const FullParams& theta, const PriceSeries& series) {
    const auto t = series.times();
    if (!(theta.lp.tc > t.back())) return std::numeric_limits<double>::quiet_NaN();
    const auto u = residuals(theta.lp, series);
    return argarch_loglik_raw(theta.ag, u);
}

inline double variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1);
}

inline double lag1_autocorrelation(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c0 += (x[i] - mean) * (x[i] - mean);
    for (std::size_t i = 1; i < x.size(); ++i) c1 += (x[i] - mean) * (x[i - 1] - mean);
    return c0 > 0.0 ? c1 / c0 : 0.0;
}

// Moves v strictly inside the interval.
inline double nudge_inside(double v, const Interval& iv) {
    const double margin = 1e-9 * iv.width();
    return std::clamp(v, iv.lower + margin, iv.upper - margin);
}

}  // namespace detail

/// ln L = -(n-1)/2 ln(2 pi) - 1/2 sum ln sigma_t^2 - 1/2 sum eta_t^2 / sigma_t^2, t = 2..n.
inline double argarch_loglik(const ARGARCHParams& ag, std::span<const double> u) {
    if (u.size() < 2) throw InputError("log-likelihood needs at least 2 residuals");
    ag.validate();
    const double ll = detail::argarch_loglik_raw(ag, u);
    if (!std::isfinite(ll)) throw NumericalError("non-positive conditional variance in the GARCH recursion");
    return ll;
}

/// Conditional Gaussian log-likelihood of the full model.
inline double loglik(const FullParams& theta, const PriceSeries& series) {
    if (series.size() < 3) throw InputError("log-likelihood needs at least 3 observations");
    const auto u = residuals(theta.lp, series);
    return argarch_loglik(theta.ag, u);
}

/// eps_t = eta_t / sigma_t for t = 2..n (n - 1 values).
inline std::vector<double> standardized_residuals(const FullParams& theta, const PriceSeries& series) {
    const auto u = residuals(theta.lp, series);
    auto f = filter_argarch(theta.ag, u);
    return {f.eps.begin() + 1, f.eps.end()};
}

/// Bounds for (rho, alpha0, alpha1, alpha2); alpha0 is capped by `variance_cap`.
inline Bounds<ARGARCHParams::kSize> argarch_bounds(double variance_cap) {
    return {{{-1.0, 1.0}, {1e-12, variance_cap}, {0.0, 1.0}, {0.0, 1.0}}};
}

inline Bounds<FullParams::kSize> default_full_bounds(const PriceSeries& series,
                                                     const Bounds<LPParams::kSize>& lp_bounds) {
    Bounds<FullParams::kSize> out{};
    std::copy(lp_bounds.begin(), lp_bounds.end(), out.begin());
    const auto ag = argarch_bounds(detail::variance(series.prices()));
    std::copy(ag.begin(), ag.end(), out.begin() + LPParams::kSize);
    return out;
}

inline Bounds<FullParams::kSize> default_full_bounds(const PriceSeries& series) {
    return default_full_bounds(series, default_lp_bounds(series));
}

/**
 * Stage-2 initial values: maximum likelihood for (rho, alpha0, alpha1, alpha2)
 * on already detrended residuals. BFGS runs from three moment-matched starts
 * in the logistic-mapped space. If none yields a finite likelihood the
 * moment defaults are returned with a warning.
 */
inline FitResult<ARGARCHParams> fit_argarch_on_residuals(std::span<const double> u, const BfgsConfig& bfgs = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (u.size() < kMinFitLength)
        throw InputError(fmt::format("residual series too short for AR(1)-GARCH(1,1): {} < {}", u.size(), kMinFitLength));
    bfgs.validate();
    const double var_u = detail::variance(u);
    if (!(var_u > 0.0)) throw InputError("residual series has zero variance; AR(1)-GARCH(1,1) is not identified");

    const auto bounds = argarch_bounds(var_u);
    const BoxTransform<ARGARCHParams::kSize> box(bounds);
    const double scale = static_cast<double>(u.size() - 1);
    const CostFunction cost = [&](const Vector& x) {
        const auto ag = ARGARCHParams::from_array(box.to_box(x));
        if (!(ag.alpha1 + ag.alpha2 < 1.0)) return std::numeric_limits<double>::infinity();
        const double ll = detail::argarch_loglik_raw(ag, u);
        return std::isfinite(ll) ? -ll / scale : std::numeric_limits<double>::infinity();
    };

    const double rho0 = std::clamp(detail::lag1_autocorrelation(u), -0.98, 0.98);
    std::vector<double> eta(u.size() - 1);
    for (std::size_t t = 1; t < u.size(); ++t) eta[t - 1] = u[t] - rho0 * u[t - 1];
    const double var_eta = std::min(detail::variance(eta), 0.999 * var_u);

    FitResult<ARGARCHParams> out;
    bool have = false;
    BfgsResult best;
    constexpr std::array<std::pair<double, double>, 3> kStarts{{{0.05, 0.90}, {0.10, 0.80}, {0.03, 0.95}}};
    for (const auto& [a1, a2] : kStarts) {
        const ARGARCHParams start{rho0, var_eta * (1.0 - a1 - a2), a1, a2};
        std::array<double, 4> inside{};
        const auto raw = start.to_array();
        for (std::size_t i = 0; i < 4; ++i) inside[i] = detail::nudge_inside(raw[i], bounds[i]);
        const auto free = box.to_free(inside);
        const BfgsResult r = bfgs_minimize(cost, Eigen::Map<const Vector>(free.data(), 4), bfgs);
        if (std::isfinite(r.value) && (!have || r.value < best.value)) {
            best = r;
            have = true;
        }
    }

    if (have) {
        out.params = ARGARCHParams::from_array(box.to_box(best.x));
        out.objective = -best.value * scale;
        out.converged = best.converged;
        out.bfgs_iterations = best.iterations;
        out.warnings = boundary_warnings(out.params.to_array(), bounds, ARGARCHParams::kNames);
    } else {
        const double rho = detail::lag1_autocorrelation(u);
        out.params = {std::clamp(rho, -0.99, 0.99), var_u * (1.0 - 0.05 - 0.90), 0.05, 0.90};
        out.objective = detail::argarch_loglik_raw(out.params, u);
        out.warnings.push_back("AR(1)-GARCH(1,1) residual fit failed; using moment-based initial values");
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

/**
 * Joint conditional-ML fit of all 11 parameters by BFGS on the
 * logistic-mapped space, starting from `init`. Candidates with
 * alpha1 + alpha2 >= 1 get an infinite cost.
 */
inline FitResult<FullParams> fit_full(const PriceSeries& series, const FullParams& init,
                                      const Bounds<FullParams::kSize>& bounds, const BfgsConfig& bfgs = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (series.size() < kMinFitLength)
        throw InputError(fmt::format("series too short for an 11-parameter fit: {} < {}", series.size(), kMinFitLength));
    bfgs.validate();
    const BoxTransform<FullParams::kSize> box(bounds);
    const double scale = static_cast<double>(series.size() - 1);
    const CostFunction cost = [&](const Vector& x) {
        const auto theta = FullParams::from_array(box.to_box(x));
        if (!(theta.ag.alpha1 + theta.ag.alpha2 < 1.0)) return std::numeric_limits<double>::infinity();
        const double ll = detail::full_loglik_raw(theta, series);
        return std::isfinite(ll) ? -ll / scale : std::numeric_limits<double>::infinity();
    };

    FitResult<FullParams> out;
    auto raw = init.to_array();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double inside = detail::nudge_inside(raw[i], bounds[i]);
        if (inside != raw[i])
            out.warnings.push_back(fmt::format("initial {} = {} moved inside its bounds", FullParams::kNames[i], raw[i]));
        raw[i] = inside;
    }
    const auto free = box.to_free(raw);
    const Vector x0 = Eigen::Map<const Vector>(free.data(), FullParams::kSize);
    const double start_cost = cost(x0);
    if (!std::isfinite(start_cost)) throw NumericalError("log-likelihood is not finite at the initial parameters");

    const BfgsResult r = bfgs_minimize(cost, x0, bfgs);
    const bool improved = std::isfinite(r.value) && r.value <= start_cost;
    out.params = FullParams::from_array(box.to_box(improved ? r.x : x0));
    out.objective = detail::full_loglik_raw(out.params, series);
    out.converged = improved && r.converged;
    out.bfgs_iterations = r.iterations;
    const auto flags = boundary_warnings(out.params.to_array(), bounds, FullParams::kNames);
    out.warnings.insert(out.warnings.end(), flags.begin(), flags.end());
    if (!r.converged) out.warnings.push_back("BFGS did not converge: " + r.message);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

/// All three stages of the extended-model estimation.
struct ExtendedFit {
    FitResult<LPParams> stage1;
    FitResult<ARGARCHParams> stage2;
    FitResult<FullParams> full;
};

/**
 * Stage 1 is the best least-squares trend; stage 2 fits AR-GARCH to its
 * residuals. The joint maximum-likelihood fit is started from every
 * restart's trend (with its own residual AR-GARCH fit), since the
 * least-squares optimum is often not in the likelihood's best basin; the
 * start reaching the highest likelihood wins.
 */
inline ExtendedFit fit_extended(const PriceSeries& series, const Bounds<LPParams::kSize>& lp_bounds,
                                const GsaConfig& gsa, const BfgsConfig& bfgs) {
    const auto candidates = fit_logperiodic_candidates(series, lp_bounds, gsa, bfgs);
    const auto full_bounds = default_full_bounds(series, lp_bounds);
    ExtendedFit out;
    out.stage1 = candidates.front();
    bool have_full = false;
    std::vector<LPParams> tried;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& lp = candidates[c].params;
        const bool duplicate = std::any_of(tried.begin(), tried.end(), [&](const LPParams& q) {
            const auto a = lp.to_array(), b = q.to_array();
            for (std::size_t i = 0; i < a.size(); ++i)
                if (std::abs(a[i] - b[i]) > 1e-6 * (1 + std::abs(b[i]))) return false;
            return true;
        });
        if (duplicate) continue;
        tried.push_back(lp);
        try {
            const auto stage2 = fit_argarch_on_residuals(residuals(lp, series), bfgs);
            if (c == 0) out.stage2 = stage2;
            auto full = fit_full(series, FullParams{lp, stage2.params}, full_bounds, bfgs);
            if (!have_full || full.objective > out.full.objective) {
                out.full = std::move(full);
                have_full = true;
            }
        } catch (const std::exception&) {
            if (c == 0) throw;
        }
    }
    out.full.seed = gsa.seed;
    out.full.gsa_evaluations = out.stage1.gsa_evaluations;
    return out;
}

inline ExtendedFit fit_extended(const PriceSeries& series, const GsaConfig& gsa = {}, const BfgsConfig& bfgs = {}) {
    return fit_extended(series, default_lp_bounds(series), gsa, bfgs);
}

}  // namespace lpg
