#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/error.hpp"
#include "lpgarch/parallel.hpp"

namespace lpg {

/**
 * Correlation sums for one threshold, embedding dimensions 1..max_dim.
 *
 * Two points are close when |x_i - x_j| < eps. c[m-1] is the fraction of
 * pairs i < j of m-histories (n - m + 1 of them) that are close in every
 * coordinate. c1_tail[m-1] is the one-dimensional sum restricted to points
 * m-1..n-1, and k is the triple-closeness moment used by the variance.
 */
struct CorrelationSums {
    std::vector<double> c;
    std::vector<double> c1_tail;
    double k = 0.0;
};

inline CorrelationSums correlation_sums(std::span<const double> x, double eps, std::size_t max_dim) {
    const std::size_t n = x.size();
    if (!(eps > 0.0)) throw InputError(fmt::format("BDS threshold must be positive, got {}", eps));
    if (max_dim < 1 || max_dim >= n) throw InputError(fmt::format("embedding dimension {} invalid for {} points", max_dim, n));

    std::vector<double> window_count(max_dim, 0.0);  // close m-history pairs
    std::vector<double> upper(n, 0.0);               // #{j > i close to i}
    std::vector<double> rowsum(n, 1.0);              // includes the point itself
    std::vector<std::uint8_t> b(n);
    for (std::size_t d = 1; d < n; ++d) {
        const std::size_t len = n - d;
        for (std::size_t i = 0; i < len; ++i) {
            b[i] = std::abs(x[i] - x[i + d]) < eps;
            if (b[i]) {
                upper[i] += 1.0;
                rowsum[i] += 1.0;
                rowsum[i + d] += 1.0;
            }
        }
        // A run of L consecutive close pairs holds L - m + 1 close m-histories.
        std::size_t run = 0;
        for (std::size_t i = 0; i <= len; ++i) {
            if (i < len && b[i]) {
                ++run;
                continue;
            }
            for (std::size_t m = 1; m <= std::min(run, max_dim); ++m) window_count[m - 1] += static_cast<double>(run - m + 1);
            run = 0;
        }
    }

    CorrelationSums out;
    out.c.resize(max_dim);
    out.c1_tail.resize(max_dim);
    for (std::size_t m = 1; m <= max_dim; ++m) {
        const double pts = static_cast<double>(n - m + 1);
        out.c[m - 1] = window_count[m - 1] / (pts * (pts - 1.0) / 2.0);
    }
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + upper[i];
    for (std::size_t m = 1; m <= max_dim; ++m) {
        const double pts = static_cast<double>(n - m + 1);
        out.c1_tail[m - 1] = suffix[m - 1] / (pts * (pts - 1.0) / 2.0);
    }
    double sq = 0.0, total = 0.0;
    for (double r : rowsum) sq += r * r, total += r;
    const double nn = static_cast<double>(n);
    out.k = (sq - 3.0 * total + 2.0 * nn) / (nn * (nn - 1.0) * (nn - 2.0));
    return out;
}

/// Standardized BDS statistics for m = 2..max_dim from precomputed sums.
inline std::vector<double> bds_from_sums(const CorrelationSums& s, std::size_t n) {
    const std::size_t max_dim = s.c.size();
    const double c1 = s.c[0], k = s.k;
    if (!(c1 > 0.0)) throw InputError("BDS threshold too small: no pair of points is within it");
    std::vector<double> out;
    for (std::size_t m = 2; m <= max_dim; ++m) {
        const double md = static_cast<double>(m);
        double mid = 0.0;
        for (std::size_t j = 1; j < m; ++j)
            mid += std::pow(k, static_cast<double>(m - j)) * std::pow(c1, 2.0 * static_cast<double>(j));
        const double var = 4.0 * (std::pow(k, md) + 2.0 * mid + (md - 1.0) * (md - 1.0) * std::pow(c1, 2.0 * md) -
                                  md * md * k * std::pow(c1, 2.0 * md - 2.0));
        const double effect = s.c[m - 1] - std::pow(s.c1_tail[m - 1], md);
        out.push_back(std::sqrt(static_cast<double>(n - m + 1)) * effect / std::sqrt(var));
    }
    return out;
}

inline double bds_statistic(std::span<const double> x, std::size_t m, double eps) {
    if (x.size() < 50) throw InputError(fmt::format("BDS needs at least 50 observations, got {}", x.size()));
    if (m < 2) throw InputError("BDS embedding dimension must be at least 2");
    return bds_from_sums(correlation_sums(x, eps, m), x.size()).back();
}

struct BdsGrid {
    std::vector<std::size_t> dims{2, 3, 4, 5, 6};
    std::vector<double> eps_multipliers{0.5, 1.0, 1.5, 2.0};
    std::size_t replications = 5000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Statistics and bootstrap p-values indexed [dim][eps multiplier].
struct BdsResult {
    BdsGrid grid;
    double sd = 0.0;
    std::vector<std::vector<double>> statistic;
    std::vector<std::vector<double>> p_value;
};

namespace detail {

inline double sample_sd(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Statistics on the grid with thresholds scaled by the series' own sd.
inline std::vector<std::vector<double>> bds_grid(std::span<const double> x, const BdsGrid& g) {
    std::size_t max_dim = 2;
    for (auto m : g.dims) max_dim = std::max(max_dim, m);
    const double sd = sample_sd(x);
    std::vector<std::vector<double>> out(g.dims.size(), std::vector<double>(g.eps_multipliers.size()));
    for (std::size_t e = 0; e < g.eps_multipliers.size(); ++e) {
        const auto stats = bds_from_sums(correlation_sums(x, g.eps_multipliers[e] * sd, max_dim), x.size());
        for (std::size_t d = 0; d < g.dims.size(); ++d) out[d][e] = stats[g.dims[d] - 2];
    }
    return out;
}

}  // namespace detail

/**
 * BDS statistics over a (dimension, threshold) grid with two-sided i.i.d.
 * bootstrap p-values, p = (1 + #{|stat*| >= |stat|}) / (R + 1).
 *
 * Replicate r resamples the series with replacement from stream r of `seed`;
 * every grid cell uses the same replicates. Thresholds are multiples of each
 * sample's own standard deviation.
 */
inline BdsResult bds_bootstrap_pvalues(std::span<const double> x, const BdsGrid& grid = {}) {
    if (x.size() < 50) throw InputError(fmt::format("BDS needs at least 50 observations, got {}", x.size()));
    if (grid.dims.empty() || grid.eps_multipliers.empty()) throw InputError("BDS grid is empty");
    if (grid.replications < 1) throw InputError("BDS bootstrap needs at least one replication");
    for (auto m : grid.dims)
        if (m < 2 || m >= x.size()) throw InputError(fmt::format("BDS embedding dimension {} out of range", m));
    for (double e : grid.eps_multipliers)
        if (!(e > 0.0)) throw InputError(fmt::format("BDS threshold multiplier must be positive, got {}", e));

    BdsResult out;
    out.grid = grid;
    out.sd = detail::sample_sd(x);
    if (!(out.sd > 0.0)) throw InputError("BDS test of a constant series is undefined");
    out.statistic = detail::bds_grid(x, grid);

    const std::size_t D = grid.dims.size(), E = grid.eps_multipliers.size();
    std::vector<std::uint32_t> hits(grid.replications * D * E, 0);
    parallel_for(grid.replications, grid.threads, [&](std::size_t r) {
        auto rng = stream_rng(grid.seed, r);
        std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
        std::vector<double> star(x.size());
        for (auto& v : star) v = x[pick(rng)];
        if (!(detail::sample_sd(star) > 0.0)) return;
        const auto s = detail::bds_grid(star, grid);
        for (std::size_t d = 0; d < D; ++d)
            for (std::size_t e = 0; e < E; ++e)
                hits[(r * D + d) * E + e] = std::abs(s[d][e]) >= std::abs(out.statistic[d][e]);
    });

    out.p_value.assign(D, std::vector<double>(E, 0.0));
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t e = 0; e < E; ++e) {
            std::size_t count = 0;
            for (std::size_t r = 0; r < grid.replications; ++r) count += hits[(r * D + d) * E + e];
            out.p_value[d][e] = (1.0 + static_cast<double>(count)) / (static_cast<double>(grid.replications) + 1.0);
        }
    return out;
}

}  // namespace lpg
