#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/bds.hpp"
#include "lpgarch/stats.hpp"
#include "lpgarch/unitroot.hpp"

namespace lpg {

struct DiagnosticsConfig {
    std::size_t lb_lag = 20;
    std::optional<std::size_t> adf_lags;  ///< unset: AIC selection
    std::optional<std::size_t> pp_lags;   ///< unset: Newey-West bandwidth
    BdsGrid bds;
    bool run_bds = true;
};

/// Residual diagnostics. Index 0 of adf/pp is without intercept, 1 with.
struct DiagnosticsReport {
    DiagnosticsConfig config;
    Descriptive descriptive;
    TestResult jb;
    TestResult lb_residuals;
    TestResult lb_squared;
    std::array<TestResult, 2> adf;
    std::array<TestResult, 2> pp;
    std::optional<BdsResult> bds;
};

/**
 * Runs the battery. Moment, Ljung-Box, Jarque-Bera and BDS tests use
 * `residuals`; the unit-root tests use `levels`, normally the trend
 * residuals of the fitted model.
 */
inline DiagnosticsReport run_diagnostics(std::span<const double> residuals, std::span<const double> levels,
                                         const DiagnosticsConfig& config = {}) {
    DiagnosticsReport r;
    r.config = config;
    r.descriptive = descriptive_stats(residuals);
    r.jb = jarque_bera(residuals);
    r.lb_residuals = ljung_box(residuals, config.lb_lag);
    const auto sq = squared(residuals);
    r.lb_squared = ljung_box(sq, config.lb_lag);
    for (int c = 0; c < 2; ++c) {
        r.adf[c] = adf_test(levels, c == 1, config.adf_lags);
        r.pp[c] = pp_test(levels, c == 1, config.pp_lags);
    }
    if (config.run_bds) r.bds = bds_bootstrap_pvalues(residuals, config.bds);
    return r;
}

inline std::string render_diagnostics(const DiagnosticsReport& r) {
    std::string out;
    const auto& d = r.descriptive;
    out += fmt::format("Residual statistics (n = {})\n", d.n);
    out += fmt::format("  {:<28}{:>12.3f}\n", "Mean", d.mean);
    out += fmt::format("  {:<28}{:>12.3f}\n", "Standard deviation", d.sd);
    out += fmt::format("  {:<28}{:>12.3f}\n", "Skewness", d.skewness);
    out += fmt::format("  {:<28}{:>12.3f}\n", "Kurtosis", d.kurtosis);
    out += fmt::format("  {:<28}{:>12.3f} ({:.3f})\n", "Jarque-Bera", r.jb.statistic, r.jb.p_value);
    out += fmt::format("  {:<28}{:>12.3f} ({:.3f})\n", fmt::format("Q-Stat({}) residuals", r.config.lb_lag),
                       r.lb_residuals.statistic, r.lb_residuals.p_value);
    out += fmt::format("  {:<28}{:>12.3f} ({:.3f})\n", fmt::format("Q-Stat({}) squared", r.config.lb_lag),
                       r.lb_squared.statistic, r.lb_squared.p_value);
    out += "\nUnit-root tests on trend residuals (statistic, p-value)\n";
    out += fmt::format("  {:<6}{:>22}{:>22}\n", "", "without intercept", "with intercept");
    out += fmt::format("  {:<6}{:>12.4f} ({:.4f}){:>12.4f} ({:.4f})\n", "ADF", r.adf[0].statistic, r.adf[0].p_value,
                       r.adf[1].statistic, r.adf[1].p_value);
    out += fmt::format("  {:<6}{:>12.4f} ({:.4f}){:>12.4f} ({:.4f})\n", "PP", r.pp[0].statistic, r.pp[0].p_value,
                       r.pp[1].statistic, r.pp[1].p_value);
    if (r.bds) {
        const auto& b = *r.bds;
        out += fmt::format("\nBDS bootstrap p-values ({} replications)\n  {:<6}", b.grid.replications, "M\\eps");
        for (double e : b.grid.eps_multipliers) out += fmt::format("{:>10}", fmt::format("{}sd", e));
        out += "\n";
        for (std::size_t i = 0; i < b.grid.dims.size(); ++i) {
            out += fmt::format("  {:<6}", b.grid.dims[i]);
            for (double p : b.p_value[i]) out += fmt::format("{:>10.5f}", p);
            out += "\n";
        }
    }
    return out;
}

}  // namespace lpg
