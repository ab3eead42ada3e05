#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/argarch.hpp"
#include "lpgarch/inference.hpp"
#include "lpgarch/parallel.hpp"
#include "lpgarch/simulate.hpp"
#include "lpgarch/stats.hpp"

namespace lpg {

struct RecoveryConfig {
    GsaConfig gsa;
    BfgsConfig bfgs;
    std::optional<Bounds<LPParams::kSize>> lp_bounds;  ///< default: default_lp_bounds of each series
    double level = 0.95;
    std::size_t lb_lag = 20;
    unsigned threads = 1;
};

struct ReplicationRecord {
    std::size_t index = 0;
    std::uint64_t fit_seed = 0;
    bool ok = false;  ///< pipeline ran to the end
    std::string error;
    bool converged = false;
    LPParams basic{};
    FullParams estimate{};
    double loglik = std::nan("");
    std::array<std::optional<double>, FullParams::kSize> se{};
    std::array<std::optional<bool>, FullParams::kSize> covers{};
    double lb_basic_p = std::nan("");     ///< trend residuals of the basic fit
    double lb_extended_p = std::nan("");  ///< standardized residuals of the extended fit
    double lb_truth_p = std::nan("");     ///< standardized residuals under the true parameters
};

/// Per-parameter error summary over converged replications.
struct ParameterSummary {
    std::string name;
    std::size_t count = 0;
    double bias = std::nan("");
    double rmse = std::nan("");
    double median_abs_error = std::nan("");
    std::size_t ci_count = 0;
    double coverage = std::nan("");
};

struct RecoveryStudy {
    FullParams truth{};
    std::size_t n = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    RecoveryConfig config;
    std::vector<ReplicationRecord> records;
    std::vector<ParameterSummary> summaries;
    double convergence_rate = 0.0;
};

/// Replication r simulates from stream 2r of `seed`; its GSA seed is the first draw of stream 2r+1.
inline PriceSeries replication_series(const FullParams& truth, std::size_t n, std::uint64_t seed, std::size_t r) {
    return simulate(truth, n, seed, 2 * r);
}

inline std::uint64_t replication_fit_seed(std::uint64_t seed, std::size_t r) { return stream_rng(seed, 2 * r + 1)(); }

inline ReplicationRecord run_replication(const FullParams& truth, std::size_t n, std::uint64_t seed, std::size_t r,
                                         const RecoveryConfig& config) {
    ReplicationRecord rec;
    rec.index = r;
    rec.fit_seed = replication_fit_seed(seed, r);
    try {
        const auto series = replication_series(truth, n, seed, r);
        rec.lb_truth_p = ljung_box(standardized_residuals(truth, series), config.lb_lag).p_value;
        GsaConfig gsa = config.gsa;
        gsa.seed = rec.fit_seed;
        gsa.threads = 1;
        const auto bounds = config.lp_bounds.value_or(default_lp_bounds(series));
        const auto fit = fit_extended(series, bounds, gsa, config.bfgs);
        rec.basic = fit.stage1.params;
        rec.estimate = fit.full.params;
        rec.loglik = fit.full.objective;
        rec.converged = fit.full.converged;
        rec.lb_basic_p = ljung_box(residuals(fit.stage1.params, series), config.lb_lag).p_value;
        rec.lb_extended_p = ljung_box(standardized_residuals(fit.full.params, series), config.lb_lag).p_value;
        const auto inf = infer(fit.full.params, series, config.level);
        const auto t = truth.to_array();
        for (std::size_t i = 0; i < FullParams::kSize; ++i) {
            const auto& row = inf.rows[i];
            if (!row.se) continue;
            rec.se[i] = row.se;
            rec.covers[i] = row.ci_lower <= t[i] && t[i] <= row.ci_upper;
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

inline std::vector<ParameterSummary> summarize(const FullParams& truth, const std::vector<ReplicationRecord>& records) {
    std::vector<ParameterSummary> out;
    const auto t = truth.to_array();
    for (std::size_t i = 0; i < FullParams::kSize; ++i) {
        ParameterSummary s;
        s.name = std::string(FullParams::kNames[i]);
        std::vector<double> err;
        std::size_t covered = 0;
        for (const auto& r : records) {
            if (!r.ok || !r.converged) continue;
            err.push_back(r.estimate.to_array()[i] - t[i]);
            if (r.covers[i]) {
                ++s.ci_count;
                covered += *r.covers[i];
            }
        }
        s.count = err.size();
        if (!err.empty()) {
            double sum = 0.0, sq = 0.0;
            for (double e : err) sum += e, sq += e * e;
            s.bias = sum / static_cast<double>(err.size());
            s.rmse = std::sqrt(sq / static_cast<double>(err.size()));
            for (double& e : err) e = std::abs(e);
            std::sort(err.begin(), err.end());
            const std::size_t h = err.size() / 2;
            s.median_abs_error = err.size() % 2 ? err[h] : (err[h - 1] + err[h]) / 2.0;
        }
        if (s.ci_count > 0) s.coverage = static_cast<double>(covered) / static_cast<double>(s.ci_count);
        out.push_back(std::move(s));
    }
    return out;
}

/**
 * Monte-Carlo recovery study: simulate from `truth`, run the full two-stage
 * pipeline and the information-matrix inference, record estimates and CI
 * coverage. Failed replications are recorded with their error and left out
 * of the summaries, as are non-converged ones.
 */
inline RecoveryStudy recovery_study(const FullParams& truth, std::size_t n, std::size_t replications,
                                    const RecoveryConfig& config = {}, std::uint64_t seed = 1) {
    if (replications < 10) throw InputError(fmt::format("a recovery study needs at least 10 replications, got {}", replications));
    if (n < kMinFitLength) throw InputError(fmt::format("series length {} below the fit minimum {}", n, kMinFitLength));
    truth.ag.validate();
    if (!(truth.lp.tc > to_year_units(n - 1))) throw InputError("true t_c lies inside the simulated window");
    config.gsa.validate();
    config.bfgs.validate();

    RecoveryStudy study;
    study.truth = truth;
    study.n = n;
    study.replications = replications;
    study.seed = seed;
    study.config = config;
    study.records.resize(replications);
    parallel_for(replications, config.threads,
                 [&](std::size_t r) { study.records[r] = run_replication(truth, n, seed, r, config); });
    std::size_t converged = 0;
    for (const auto& r : study.records) converged += r.ok && r.converged;
    study.convergence_rate = static_cast<double>(converged) / static_cast<double>(replications);
    study.summaries = summarize(truth, study.records);
    return study;
}

/// One row per replication: index, status, estimates, t_c standard error.
inline void write_replications_csv(std::ostream& out, const RecoveryStudy& study) {
    out << "replication,ok,converged";
    for (auto name : FullParams::kNames) out << ',' << name;
    out << ",loglik,se_t_c,covers_t_c,lb_basic_p,lb_extended_p,error\n";
    for (const auto& r : study.records) {
        out << fmt::format("{},{},{}", r.index, r.ok ? 1 : 0, r.converged ? 1 : 0);
        for (double v : r.estimate.to_array()) out << ',' << (r.ok ? fmt::format("{}", v) : "");
        const auto tc_se = r.se[3];
        out << ',' << (r.ok ? fmt::format("{}", r.loglik) : "") << ',' << (tc_se ? fmt::format("{}", *tc_se) : "") << ','
            << (r.covers[3] ? (*r.covers[3] ? "1" : "0") : "") << ',' << (r.ok ? fmt::format("{}", r.lb_basic_p) : "")
            << ',' << (r.ok ? fmt::format("{}", r.lb_extended_p) : "") << ',';
        std::string err = r.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        out << (err.empty() ? "" : "\"" + err + "\"") << '\n';
    }
}

}  // namespace lpg
