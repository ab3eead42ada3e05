#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "lpgarch/error.hpp"
#include "lpgarch/parallel.hpp"

namespace lpg {

using Vector = Eigen::VectorXd;
using CostFunction = std::function<double(const Vector&)>;
using GradientFunction = std::function<Vector(const Vector&)>;

/**
 * Generalized Simulated Annealing settings.
 *
 * `max_iterations` counts cost evaluations per restart. One annealing step
 * is a chain of 2*dim proposals (dim full-vector moves, then one move per
 * coordinate); temperatures follow
 *   T(k) = T0 * (2^(qv-1) - 1) / ((1+k)^(qv-1) - 1),  k = 1, 2, ...
 * with T0 = visit_t0 for the visiting distribution and T0 = t0 (cost units)
 * for acceptance. When t0 is unset it becomes the standard deviation of the
 * cost over 50 uniform samples of the search box.
 */
struct GsaConfig {
    double qv = 2.62;
    double qa = -5.0;
    std::optional<double> t0;
    double visit_t0 = 5230.0;
    double search_radius = 5.0;
    std::size_t max_iterations = 20000;
    std::size_t restarts = 5;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (!(qv > 1.0 && qv < 3.0)) throw InputError(fmt::format("GSA qv must lie in (1, 3), got {}", qv));
        if (!(qa < 1.0)) throw InputError(fmt::format("GSA qa must be below 1, got {}", qa));
        if (t0 && !(*t0 > 0.0)) throw InputError("GSA t0 must be positive");
        if (!(visit_t0 > 0.0)) throw InputError("GSA visiting temperature must be positive");
        if (!(search_radius > 0.0)) throw InputError("GSA search radius must be positive");
        if (max_iterations < 1) throw InputError("GSA max_iterations must be at least 1");
        if (restarts < 1) throw InputError("GSA restarts must be at least 1");
    }
};

struct BfgsConfig {
    double gradient_tolerance = 1e-6;
    double step_tolerance = 1e-12;
    std::size_t max_iterations = 1000;

    void validate() const {
        if (!(gradient_tolerance > 0.0) || !(step_tolerance > 0.0) || max_iterations < 1)
            throw InputError("BFGS tolerances and iteration budget must be positive");
    }
};

struct GsaResult {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::size_t best_restart = 0;
    double t0 = 0.0;
    std::vector<Vector> restart_x;       ///< best point of each restart
    std::vector<double> restart_value;
};

struct BfgsResult {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::string message;
};

namespace detail {

// Tsallis visiting distribution, one coordinate per draw.
class VisitingDistribution {
public:
    explicit VisitingDistribution(double qv) : qv_(qv) {
        const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
        const double f3 = std::exp((2.0 - qv) * std::numbers::ln2 / (qv - 1.0));
        factor4_p_ = std::sqrt(std::numbers::pi) * f2 / (f3 * (3.0 - qv));
        const double f5 = 1.0 / (qv - 1.0) - 0.5;
        const double d1 = 2.0 - f5;
        factor6_ = std::numbers::pi * (1.0 - f5) / std::sin(std::numbers::pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
    }

    template <class Rng>
    double draw(double temperature, Rng& rng) const {
        constexpr double kTailLimit = 1e8;
        std::normal_distribution<double> normal;
        const double factor1 = std::exp(std::log(temperature) / (qv_ - 1.0));
        const double factor4 = factor4_p_ * factor1;
        const double sigma = std::exp(-(qv_ - 1.0) * std::log(factor6_ / factor4) / (3.0 - qv_));
        const double x = normal(rng) * sigma;
        const double y = normal(rng);
        const double den = std::exp((qv_ - 1.0) * std::log(std::fabs(y)) / (3.0 - qv_));
        double v = x / den;
        if (!(v <= kTailLimit)) v = kTailLimit * std::uniform_real_distribution<double>{}(rng);
        if (v < -kTailLimit) v = -kTailLimit * std::uniform_real_distribution<double>{}(rng);
        return v;
    }

private:
    double qv_;
    double factor4_p_ = 0.0;
    double factor6_ = 0.0;
};

// Folds v into [-r, r) periodically.
inline double wrap(double v, double r) {
    const double w = 2.0 * r;
    double a = std::fmod(v + r, w);
    if (a < 0.0) a += w;
    return a - r;
}

inline double schedule_ratio(double qv, std::size_t k) {
    const double num = std::exp((qv - 1.0) * std::numbers::ln2) - 1.0;
    const double den = std::exp((qv - 1.0) * std::log(static_cast<double>(k) + 1.0)) - 1.0;
    return num / den;
}

struct RestartOutcome {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

template <class Rng>
Vector uniform_point(std::size_t dim, double r, Rng& rng) {
    std::uniform_real_distribution<double> u(-r, r);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
    return x;
}

inline RestartOutcome anneal(const CostFunction& cost, std::size_t dim, const GsaConfig& cfg, double t0,
                             const std::optional<Vector>& start, std::uint64_t stream) {
    auto rng = stream_rng(cfg.seed, stream);
    const VisitingDistribution visiting(cfg.qv);
    std::uniform_real_distribution<double> unit;

    RestartOutcome out;
    Vector current;
    double current_value = std::numeric_limits<double>::infinity();
    // Initial sample; draws until the cost is finite.
    constexpr std::size_t kMaxInitialDraws = 1000;
    for (std::size_t attempt = 0; attempt < kMaxInitialDraws; ++attempt) {
        current = (start && attempt == 0) ? *start : uniform_point(dim, cfg.search_radius, rng);
        current_value = cost(current);
        ++out.evaluations;
        if (std::isfinite(current_value)) break;
    }
    if (!std::isfinite(current_value)) return out;
    out.x = current;
    out.value = current_value;

    const auto d = static_cast<Eigen::Index>(dim);
    for (std::size_t step = 1; out.evaluations < cfg.max_iterations; ++step) {
        const double ratio = schedule_ratio(cfg.qv, step);
        const double t_visit = cfg.visit_t0 * ratio;
        const double t_accept = t0 * ratio;
        for (Eigen::Index j = 0; j < 2 * d && out.evaluations < cfg.max_iterations; ++j) {
            Vector candidate = current;
            if (j < d) {
                for (Eigen::Index i = 0; i < d; ++i)
                    candidate[i] = wrap(current[i] + visiting.draw(t_visit, rng), cfg.search_radius);
            } else {
                const Eigen::Index i = j - d;
                candidate[i] = wrap(current[i] + visiting.draw(t_visit, rng), cfg.search_radius);
            }
            const double value = cost(candidate);
            ++out.evaluations;
            if (!std::isfinite(value)) continue;
            bool accept = value < current_value;
            if (!accept) {
                const double bracket = 1.0 - (1.0 - cfg.qa) * (value - current_value) / t_accept;
                const double prob = bracket <= 0.0 ? 0.0 : std::exp(std::log(bracket) / (1.0 - cfg.qa));
                accept = unit(rng) <= prob;
            }
            if (accept) {
                current = std::move(candidate);
                current_value = value;
                if (current_value < out.value) {
                    out.value = current_value;
                    out.x = current;
                }
            }
        }
    }
    return out;
}

}  // namespace detail

/**
 * Generalized Simulated Annealing (Tsallis-Stariolo) over an unbounded
 * vector. Proposals are folded into the box [-search_radius, search_radius]^dim.
 *
 * Each restart r draws from stream_rng(seed, r); restarts may run in
 * parallel and the lowest cost wins, ties going to the lowest restart index.
 * With max_iterations == 1 the result is the initial sample.
 */
inline GsaResult gsa_minimize(const CostFunction& cost, std::size_t dim, const GsaConfig& config,
                              const std::optional<Vector>& start = std::nullopt) {
    config.validate();
    if (dim < 1) throw InputError("GSA dimension must be at least 1");
    if (start && static_cast<std::size_t>(start->size()) != dim) throw InputError("GSA start has the wrong dimension");

    double t0 = config.t0.value_or(0.0);
    if (!config.t0) {
        auto rng = stream_rng(config.seed, 0xA11CEull);
        std::vector<double> samples;
        for (int i = 0; i < 50; ++i) {
            const double v = cost(detail::uniform_point(dim, config.search_radius, rng));
            if (std::isfinite(v)) samples.push_back(v);
        }
        if (samples.size() >= 2) {
            double mean = 0.0;
            for (double v : samples) mean += v;
            mean /= static_cast<double>(samples.size());
            double ss = 0.0;
            for (double v : samples) ss += (v - mean) * (v - mean);
            t0 = std::sqrt(ss / static_cast<double>(samples.size() - 1));
        }
        if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = 1.0;
    }

    std::vector<detail::RestartOutcome> outcomes(config.restarts);
    parallel_for(config.restarts, config.threads, [&](std::size_t r) {
        outcomes[r] = detail::anneal(cost, dim, config, t0, r == 0 ? start : std::nullopt, r);
    });

    GsaResult result;
    result.t0 = t0;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        result.evaluations += outcomes[r].evaluations;
        result.restart_x.push_back(outcomes[r].x);
        result.restart_value.push_back(outcomes[r].value);
        if (!std::isfinite(outcomes[r].value)) continue;
        const bool better = !std::isfinite(result.value) ||
                            outcomes[r].value < result.value - 1e-12 * std::fabs(result.value);
        if (better) {
            result.value = outcomes[r].value;
            result.x = outcomes[r].x;
            result.best_restart = r;
        }
    }
    if (!std::isfinite(result.value))
        throw NumericalError(fmt::format("GSA: cost was non-finite at every sampled point ({} evaluations)",
                                         result.evaluations));
    return result;
}

/// Central differences with step 1e-6 * (1 + |x_i|); falls back to a
/// one-sided difference when one side is non-finite.
inline Vector numeric_gradient(const CostFunction& cost, const Vector& x, double fx, std::size_t* evaluations = nullptr) {
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::fabs(x[i]));
        probe[i] = x[i] + h;
        const double up = cost(probe);
        probe[i] = x[i] - h;
        const double down = cost(probe);
        probe[i] = x[i];
        if (evaluations) *evaluations += 2;
        if (std::isfinite(up) && std::isfinite(down))
            g[i] = (up - down) / (2.0 * h);
        else if (std::isfinite(up))
            g[i] = (up - fx) / h;
        else if (std::isfinite(down))
            g[i] = (fx - down) / h;
        else
            g[i] = 0.0;
    }
    return g;
}

/**
 * BFGS with an inverse-Hessian update and backtracking Armijo line search.
 * Converged means the infinity norm of the gradient fell below
 * gradient_tolerance. A failed line search ends the run at the best point.
 */
inline BfgsResult bfgs_minimize(const CostFunction& cost, const Vector& start, const BfgsConfig& config,
                                const GradientFunction& gradient = {}) {
    config.validate();
    BfgsResult res;
    res.x = start;
    res.value = cost(start);
    res.evaluations = 1;
    if (!std::isfinite(res.value)) {
        res.message = "cost is non-finite at the start point";
        return res;
    }
    const auto n = start.size();
    auto grad = [&](const Vector& x, double fx) {
        return gradient ? gradient(x) : numeric_gradient(cost, x, fx, &res.evaluations);
    };

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    Vector g = grad(res.x, res.value);
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 60;

    while (true) {
        if (g.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
            res.converged = true;
            res.message = "gradient below tolerance";
            break;
        }
        if (res.iterations >= config.max_iterations) {
            res.message = "iteration limit reached";
            break;
        }
        Vector dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            fresh = true;
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        Vector trial;
        double trial_value = std::numeric_limits<double>::infinity();
        bool found = false;
        for (int k = 0; k < kMaxBacktracks; ++k, step *= 0.5) {
            trial = res.x + step * dir;
            trial_value = cost(trial);
            ++res.evaluations;
            if (std::isfinite(trial_value) && trial_value <= res.value + kArmijo * step * slope) {
                found = true;
                break;
            }
        }
        if (!found) {
            if (!fresh) {
                H.setIdentity();
                fresh = true;
                continue;
            }
            res.message = "line search failed";
            break;
        }
        const Vector s = trial - res.x;
        const Vector g_new = grad(trial, trial_value);
        const Vector y = g_new - g;
        res.x = trial;
        res.value = trial_value;
        g = g_new;
        ++res.iterations;

        if (s.lpNorm<Eigen::Infinity>() < config.step_tolerance * (1.0 + res.x.lpNorm<Eigen::Infinity>())) {
            res.converged = g.lpNorm<Eigen::Infinity>() < config.gradient_tolerance;
            res.message = "step below tolerance";
            break;
        }
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) {
                H *= sy / y.squaredNorm();
                fresh = false;
            }
            const double r = 1.0 / sy;
            const Vector Hy = H * y;
            H += (r * r * y.dot(Hy) + r) * (s * s.transpose()) - r * (Hy * s.transpose() + s * Hy.transpose());
        }
    }
    return res;
}

}  // namespace lpg
