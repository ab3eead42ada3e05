#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "lpgarch/fit_result.hpp"
#include "lpgarch/logperiodic.hpp"
#include "lpgarch/optimizer.hpp"

namespace lpg {

inline constexpr std::size_t kMinFitLength = 30;

namespace detail {

// SSE is divided by the total sum of squares so optimizer tolerances are
// scale free.
inline double sse_scale(std::span<const double> prices) {
    double mean = 0.0;
    for (double p : prices) mean += p;
    mean /= static_cast<double>(prices.size());
    double sst = 0.0;
    for (double p : prices) sst += (p - mean) * (p - mean);
    if (sst > 0.0) return sst;
    return static_cast<double>(prices.size()) * std::max(1.0, mean * mean);
}

}  // namespace detail

/**
 * Least-squares fits of the log-periodic trend, one per GSA restart, sorted
 * by SSE. GSA searches the unconstrained (logistic-mapped) parameter space,
 * then BFGS refines each restart's best point. A BFGS point is kept only if
 * it does not raise the SSE. GSA randomness comes from `gsa.seed`.
 */
inline std::vector<FitResult<LPParams>> fit_logperiodic_candidates(const PriceSeries& series,
                                                                   const Bounds<LPParams::kSize>& bounds,
                                                                   const GsaConfig& gsa, const BfgsConfig& bfgs) {
    const auto started = std::chrono::steady_clock::now();
    if (series.size() < kMinFitLength)
        throw InputError(fmt::format("series too short for a 7-parameter fit: {} < {}", series.size(), kMinFitLength));
    gsa.validate();
    bfgs.validate();
    const BoxTransform<LPParams::kSize> box(bounds);
    const auto t = series.times();
    const auto p = series.prices();
    const double scale = detail::sse_scale(p);

    const CostFunction cost = [&](const Vector& x) {
        const LPParams params = LPParams::from_array(box.to_box(x));
        if (!(params.tc > t.back())) return std::numeric_limits<double>::infinity();
        return sse(params, t, p) / scale;
    };

    const GsaResult global = gsa_minimize(cost, LPParams::kSize, gsa);
    const bool constant = std::all_of(p.begin(), p.end(), [&](double v) { return v == p.front(); });

    std::vector<FitResult<LPParams>> out;
    for (std::size_t r = 0; r < global.restart_x.size(); ++r) {
        if (!std::isfinite(global.restart_value[r])) continue;
        const BfgsResult local = bfgs_minimize(cost, global.restart_x[r], bfgs);
        const bool keep_local = std::isfinite(local.value) && local.value <= global.restart_value[r];
        FitResult<LPParams> fit;
        fit.params = LPParams::from_array(box.to_box(keep_local ? local.x : global.restart_x[r]));
        fit.objective = sse(fit.params, series);
        fit.converged = keep_local && local.converged;
        fit.gsa_evaluations = global.evaluations;
        fit.bfgs_iterations = local.iterations;
        fit.seed = gsa.seed;
        fit.warnings = boundary_warnings(fit.params.to_array(), bounds, LPParams::kNames);
        if (constant) fit.warnings.push_back("price series is constant; trend amplitudes are not identified");
        if (!keep_local) fit.warnings.push_back("BFGS refinement did not improve on the GSA point: " + local.message);
        out.push_back(std::move(fit));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.objective < b.objective; });
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    for (auto& f : out) f.wall_seconds = wall;
    return out;
}

/// Best of fit_logperiodic_candidates.
inline FitResult<LPParams> fit_logperiodic(const PriceSeries& series, const Bounds<LPParams::kSize>& bounds,
                                           const GsaConfig& gsa, const BfgsConfig& bfgs) {
    return fit_logperiodic_candidates(series, bounds, gsa, bfgs).front();
}

inline FitResult<LPParams> fit_logperiodic(const PriceSeries& series, const GsaConfig& gsa = {},
                                           const BfgsConfig& bfgs = {}) {
    return fit_logperiodic(series, default_lp_bounds(series), gsa, bfgs);
}

}  // namespace lpg
