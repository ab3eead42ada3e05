#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include <fmt/format.h>

#include "lpgarch/error.hpp"

namespace lpg {

/// Closed parameter interval [lower, upper] with lower < upper.
struct Interval {
    double lower = 0.0;
    double upper = 1.0;

    double width() const { return upper - lower; }
    bool contains_open(double v) const { return v > lower && v < upper; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

template <std::size_t N>
using Bounds = std::array<Interval, N>;

inline void require_valid(const Interval& iv, std::string_view what = "interval") {
    if (!(iv.lower < iv.upper) || !std::isfinite(iv.lower) || !std::isfinite(iv.upper))
        throw InputError(fmt::format("{} [{}, {}] must satisfy a < b", what, iv.lower, iv.upper));
}

/// Logistic map of the real line onto (a, b):
///   b * e^x / (1 + e^x) + a * (1 - e^x / (1 + e^x)).
inline double to_constrained(double x, double a, double b) {
    if (!(a < b)) throw InputError(fmt::format("bound interval [{}, {}] must satisfy a < b", a, b));
    // Both branches evaluate s = e^x / (1 + e^x) without overflow.
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return b * s + a * (1.0 - s);
}

/// Inverse of to_constrained; y must lie strictly inside (a, b).
inline double to_unconstrained(double y, double a, double b) {
    if (!(a < b)) throw InputError(fmt::format("bound interval [{}, {}] must satisfy a < b", a, b));
    if (!(y > a && y < b)) throw InputError(fmt::format("value {} is outside the open interval ({}, {})", y, a, b));
    // log(s / (1 - s)) with s = (y - a) / (b - a), written to avoid cancellation near b.
    return std::log(y - a) - std::log(b - y);
}

/// d(to_constrained)/dx.
inline double constrained_slope(double x, double a, double b) {
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return (b - a) * s * (1.0 - s);
}

/**
 * Coordinate-wise map between an unconstrained vector and a box.
 *
 * Unconstrained coordinates are clamped to +/-kLimit before mapping so that
 * saturated coordinates still land strictly inside their interval.
 */
template <std::size_t N>
struct BoxTransform {
    static constexpr double kLimit = 30.0;
    Bounds<N> bounds;

    explicit BoxTransform(const Bounds<N>& b) : bounds(b) {
        for (const auto& iv : bounds) require_valid(iv, "bound");
    }

    template <class Vec>
    std::array<double, N> to_box(const Vec& x) const {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            const double xi = std::clamp(static_cast<double>(x[i]), -kLimit, kLimit);
            out[i] = to_constrained(xi, bounds[i].lower, bounds[i].upper);
        }
        return out;
    }

    std::array<double, N> to_free(const std::array<double, N>& y) const {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = to_unconstrained(y[i], bounds[i].lower, bounds[i].upper);
        return out;
    }
};

}  // namespace lpg
