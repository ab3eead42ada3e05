#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/error.hpp"
#include "lpgarch/timeseries.hpp"
#include "lpgarch/transform.hpp"

namespace lpg {

/**
 * Parameters of the log-periodic trend
 *
 *   g(t) = A + B (t_c - t)^beta + C (t_c - t)^beta cos(omega ln(t_c - t) + phi).
 *
 * Amplitudes are in price units, t_c in years, phi in radians.
 */
struct LPParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double tc = 1.0;
    double beta = 0.5;
    double omega = 10.0;
    double phi = 1.0;

    static constexpr std::size_t kSize = 7;
    static constexpr std::array<std::string_view, kSize> kNames{"A", "B", "C", "t_c", "beta", "omega", "phi"};

    std::array<double, kSize> to_array() const { return {A, B, C, tc, beta, omega, phi}; }
    static LPParams from_array(const std::array<double, kSize>& v) { return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]}; }

    friend bool operator==(const LPParams&, const LPParams&) = default;
};

/// Trend value at time t; requires t < t_c.
inline double evaluate_trend(const LPParams& p, double t) {
    const double dt = p.tc - t;
    if (!(dt > 0.0)) throw DomainError(fmt::format("trend evaluated at t={} >= t_c={}", t, p.tc));
    const double log_dt = std::log(dt);
    const double power = std::exp(p.beta * log_dt);
    return p.A + power * (p.B + p.C * std::cos(p.omega * log_dt + p.phi));
}

/// Partial derivatives of g with respect to (A, B, C, t_c, beta, omega, phi).
inline std::array<double, LPParams::kSize> trend_gradient(const LPParams& p, double t) {
    const double dt = p.tc - t;
    if (!(dt > 0.0)) throw DomainError(fmt::format("trend evaluated at t={} >= t_c={}", t, p.tc));
    const double log_dt = std::log(dt);
    const double power = std::exp(p.beta * log_dt);
    const double angle = p.omega * log_dt + p.phi;
    const double c = std::cos(angle), s = std::sin(angle);
    const double level = power * (p.B + p.C * c);
    return {
        1.0,
        power,
        power * c,
        p.beta * level / dt - p.C * power * s * p.omega / dt,
        log_dt * level,
        -p.C * power * s * log_dt,
        -p.C * power * s,
    };
}

inline void require_beyond_sample(const LPParams& p, std::span<const double> t) {
    if (!t.empty() && !(p.tc > t.back()))
        throw DomainError(fmt::format("t_c={} does not lie beyond the last observation time {}", p.tc, t.back()));
}

/// Fitted trend at every observation time.
inline std::vector<double> fitted_trend(const LPParams& p, std::span<const double> t) {
    require_beyond_sample(p, t);
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = evaluate_trend(p, t[i]);
    return out;
}

/// Observed minus fitted: u_t = p_t - g(t).
inline std::vector<double> residuals(const LPParams& p, const PriceSeries& series) {
    auto fit = fitted_trend(p, series.times());
    const auto prices = series.prices();
    for (std::size_t i = 0; i < fit.size(); ++i) fit[i] = prices[i] - fit[i];
    return fit;
}

inline double sse(const LPParams& p, std::span<const double> t, std::span<const double> prices) {
    require_beyond_sample(p, t);
    double total = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = prices[i] - evaluate_trend(p, t[i]);
        total += r * r;
    }
    return total;
}

inline double sse(const LPParams& p, const PriceSeries& series) { return sse(p, series.times(), series.prices()); }

/**
 * Default search box for the trend parameters.
 *
 * beta, omega and phi use the premise ranges (0,1), (5,15), (0,2*pi).
 * Amplitudes scale with the largest price; t_c ranges from one trading day
 * to one year past the last observation.
 */
inline Bounds<LPParams::kSize> default_lp_bounds(const PriceSeries& series) {
    const double pmax = series.max_price();
    const double tl = series.last_time();
    return {{
        {0.0, 3.0 * pmax},
        {-3.0 * pmax, 0.0},
        {-pmax, pmax},
        {tl + 1.0 / kTradingDaysPerYear, tl + 1.0},
        {0.0, 1.0},
        {5.0, 15.0},
        {0.0, 2.0 * std::numbers::pi},
    }};
}

/// Premise check used on reported estimates. C != 0 is left to the t-test.
inline bool satisfies_premises(const LPParams& p, double last_time) {
    return p.A > 0.0 && p.B < 0.0 && p.beta > 0.0 && p.beta < 1.0 && p.omega > 5.0 && p.omega < 15.0 && p.phi > 0.0 &&
           p.phi < 2.0 * std::numbers::pi && p.tc > last_time;
}

}  // namespace lpg
