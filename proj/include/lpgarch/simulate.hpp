#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lpgarch/argarch.hpp"
#include "lpgarch/calendar.hpp"
#include "lpgarch/parallel.hpp"
#include "lpgarch/timeseries.hpp"

namespace lpg {

/// A simulated path with every latent sequence kept for checking.
struct SimulatedPath {
    PriceSeries series;
    std::vector<double> eps;     ///< standard normal draws, one per observation
    std::vector<double> sigma2;  ///< conditional variances
    std::vector<double> eta;     ///< innovations
    std::vector<double> u;       ///< AR(1) noise added to the trend
};

/**
 * Forward simulation of p_t = g(t) + u_t with AR(1)-GARCH(1,1) noise.
 *
 * The start mirrors filter_argarch: sigma2[0] = sigma2[1] = alpha0/(1-alpha1-alpha2),
 * u[0] = eta[0], and the GARCH recursion runs from index 2. Filtering the
 * simulated series with the true parameters returns eps[1..n-1] exactly.
 * Dates are consecutive business days from `origin`.
 */
template <class Rng>
SimulatedPath simulate_path(const FullParams& theta, std::size_t n, Rng& rng,
                            const Date& origin = make_date(2000, 1, 3),
                            const BusinessCalendar& calendar = BusinessCalendar::weekends_only()) {
    if (n < 2) throw InputError("simulation length must be at least 2");
    theta.ag.validate();
    const double t_last = to_year_units(n - 1);
    if (!(theta.lp.tc > t_last))
        throw InputError(fmt::format("t_c={} lies inside the simulated window (last time {})", theta.lp.tc, t_last));

    SimulatedPath out;
    out.eps.resize(n);
    out.sigma2.resize(n);
    out.eta.resize(n);
    out.u.resize(n);
    std::normal_distribution<double> normal;
    for (auto& e : out.eps) e = normal(rng);

    const auto& ag = theta.ag;
    const double v = ag.unconditional_variance();
    for (std::size_t t = 0; t < n; ++t) {
        out.sigma2[t] = t < 2 ? v : ag.alpha0 + ag.alpha1 * out.eta[t - 1] * out.eta[t - 1] + ag.alpha2 * out.sigma2[t - 1];
        out.eta[t] = std::sqrt(out.sigma2[t]) * out.eps[t];
        out.u[t] = t == 0 ? out.eta[0] : ag.rho * out.u[t - 1] + out.eta[t];
    }

    std::vector<double> prices(n);
    for (std::size_t t = 0; t < n; ++t) prices[t] = evaluate_trend(theta.lp, to_year_units(t)) + out.u[t];
    for (std::size_t t = 0; t < n; ++t)
        if (!(prices[t] > 0.0))
            throw InputError(fmt::format("simulated price {} at index {} is not positive; raise A or lower the noise",
                                         prices[t], t));
    out.series = PriceSeries{business_dates(origin, n, calendar), std::move(prices)};
    return out;
}

/// Simulated price series for (seed, stream).
inline PriceSeries simulate(const FullParams& theta, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0,
                            const Date& origin = make_date(2000, 1, 3)) {
    auto rng = stream_rng(seed, stream);
    return simulate_path(theta, n, rng, origin).series;
}

}  // namespace lpg
