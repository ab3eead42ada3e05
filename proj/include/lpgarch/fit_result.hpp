#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "lpgarch/transform.hpp"

namespace lpg {

/// Outcome of a model fit. `objective` is the SSE for the log-periodic fit
/// and the log-likelihood for the extended fit.
template <class Params>
struct FitResult {
    Params params{};
    double objective = 0.0;
    bool converged = false;
    std::size_t gsa_evaluations = 0;
    std::size_t bfgs_iterations = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

/// Names of parameters lying within `tolerance * width` of a bound endpoint.
template <std::size_t N>
std::vector<std::string> boundary_warnings(const std::array<double, N>& values, const Bounds<N>& bounds,
                                           const std::array<std::string_view, N>& names, double tolerance = 1e-6) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < N; ++i) {
        const double w = bounds[i].width();
        const double lo = values[i] - bounds[i].lower, hi = bounds[i].upper - values[i];
        if (lo <= tolerance * w || hi <= tolerance * w)
            out.push_back(fmt::format("boundary contact: {} = {} (bound [{}, {}])", names[i], values[i], bounds[i].lower,
                                      bounds[i].upper));
    }
    return out;
}

}  // namespace lpg
