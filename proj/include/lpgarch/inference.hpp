#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "lpgarch/argarch.hpp"
#include "lpgarch/calendar.hpp"
#include "lpgarch/parallel.hpp"
#include "lpgarch/stats.hpp"
#include "lpgarch/timeseries.hpp"

namespace lpg {

/// Negative Hessian of the log-likelihood and how trustworthy it is.
struct InformationMatrix {
    Eigen::MatrixXd matrix;        ///< symmetrized
    double asymmetry = 0.0;        ///< max |H_ij - H_ji| / max |H_ij| before symmetrizing
    Eigen::VectorXd eigenvalues;   ///< ascending
    std::array<double, FullParams::kSize> steps{};
};

namespace detail {

// Relative step, capped at 1/100 of the distance to each validity boundary.
// The nested differences then stay inside, and truncation error stays small
// where the likelihood bends sharply, e.g. alpha1 + alpha2 close to 1.
inline std::array<double, FullParams::kSize> hessian_steps(const FullParams& theta, double t_last, double relative) {
    auto v = theta.to_array();
    std::array<double, FullParams::kSize> h{};
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = relative * (1.0 + std::abs(v[i]));
    const auto& ag = theta.ag;
    const double slack = 1.0 - ag.alpha1 - ag.alpha2;
    h[3] = std::min(h[3], (theta.lp.tc - t_last) / 100.0);
    h[7] = std::min(h[7], (1.0 - std::abs(ag.rho)) / 100.0);
    h[8] = std::min(h[8], ag.alpha0 / 100.0);
    h[9] = std::min(h[9], slack / 100.0);
    h[10] = std::min(h[10], slack / 100.0);
    if (ag.alpha1 > 0.0) h[9] = std::min(h[9], ag.alpha1 / 100.0);
    if (ag.alpha2 > 0.0) h[10] = std::min(h[10], ag.alpha2 / 100.0);
    return h;
}

inline double loglik_at(const std::array<double, FullParams::kSize>& v, const PriceSeries& series) {
    return full_loglik_raw(FullParams::from_array(v), series);
}

// Central-difference gradient of lnL at v.
inline Eigen::VectorXd loglik_gradient(std::array<double, FullParams::kSize> v, const PriceSeries& series,
                                       const std::array<double, FullParams::kSize>& h) {
    Eigen::VectorXd g(FullParams::kSize);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double keep = v[j];
        v[j] = keep + h[j];
        const double up = loglik_at(v, series);
        v[j] = keep - h[j];
        const double down = loglik_at(v, series);
        v[j] = keep;
        g(static_cast<Eigen::Index>(j)) = (up - down) / (2.0 * h[j]);
    }
    return g;
}

}  // namespace detail

/**
 * Observed information -d2 lnL / d theta2 in the natural parameter space.
 * Column i is the central difference, with step h_i, of the central-difference
 * gradient; the result is symmetrized as (H + H^T)/2.
 */
inline InformationMatrix information_matrix(const FullParams& theta, const PriceSeries& series, unsigned threads = 1,
                                            double relative_step = 1e-4) {
    if (series.size() < 3) throw InputError("information matrix needs at least 3 observations");
    theta.ag.validate();
    require_beyond_sample(theta.lp, series.times());
    if (!std::isfinite(loglik(theta, series))) throw NumericalError("log-likelihood is not finite at the estimate");

    constexpr auto K = static_cast<Eigen::Index>(FullParams::kSize);
    InformationMatrix out;
    out.steps = detail::hessian_steps(theta, series.last_time(), relative_step);
    const auto v = theta.to_array();
    Eigen::MatrixXd H(K, K);
    parallel_for(FullParams::kSize, threads, [&](std::size_t i) {
        auto up = v, down = v;
        up[i] += out.steps[i];
        down[i] -= out.steps[i];
        H.col(static_cast<Eigen::Index>(i)) = (detail::loglik_gradient(up, series, out.steps) -
                                               detail::loglik_gradient(down, series, out.steps)) /
                                              (2.0 * out.steps[i]);
    });
    if (!H.allFinite()) throw NumericalError("non-finite second derivative of the log-likelihood");
    const double scale = std::max(H.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    out.asymmetry = (H - H.transpose()).cwiseAbs().maxCoeff() / scale;
    out.matrix = -(H + H.transpose()) / 2.0;
    out.eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.matrix, Eigen::EigenvaluesOnly).eigenvalues();
    return out;
}

struct InferenceRow {
    std::string name;
    double coefficient = 0.0;
    std::optional<double> se;  ///< withheld when the information matrix is not positive definite in this direction
    double t = std::nan("");
    double ci_lower = std::nan("");
    double ci_upper = std::nan("");
    bool significant = false;  ///< |t| >= z
};

struct InferenceReport {
    double level = 0.95;
    double z = 0.0;
    std::vector<InferenceRow> rows;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd eigenvalues;
    bool positive_definite = true;
    std::vector<std::string> warnings;

    const InferenceRow& row(std::string_view name) const {
        for (const auto& r : rows)
            if (r.name == name) return r;
        throw InputError(fmt::format("no inference row named '{}'", name));
    }
};

/// Two-sided normal critical value at `level`, rounded to two decimals as in
/// printed z tables (1.96 at 95%).
inline double critical_value(double level) { return std::round(normal_quantile(level) * 100.0) / 100.0; }

/// Coefficient, signed t statistic and normal confidence interval.
inline InferenceRow make_row(std::string name, double coefficient, double se, double level = 0.95) {
    if (!(se > 0.0) || !std::isfinite(se))
        throw DomainError(fmt::format("standard error of {} must be positive and finite, got {}", name, se));
    const double z = critical_value(level);
    InferenceRow r;
    r.name = std::move(name);
    r.coefficient = coefficient;
    r.se = se;
    r.t = coefficient / se;
    r.ci_lower = coefficient - z * se;
    r.ci_upper = coefficient + z * se;
    r.significant = std::abs(r.t) >= z;
    return r;
}

/// Pseudo-inverse of an information matrix and which parameters it can speak for.
struct Covariance {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd eigenvalues;    ///< of the information matrix, ascending
    std::vector<bool> withheld;     ///< loads on a non-positive direction
    std::size_t dropped = 0;        ///< eigen-directions left out
    double tolerance = 0.0;
};

/**
 * Eigen pseudo-inverse. Eigenvalues at or below 1e-10 times the largest
 * magnitude are dropped; a parameter whose unit vector has squared loading
 * above 1e-6 on the dropped directions gets no standard error.
 */
inline Covariance covariance_from_information(const Eigen::MatrixXd& info) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
    Covariance out;
    out.eigenvalues = es.eigenvalues();
    const Eigen::VectorXd& lam = out.eigenvalues;
    const Eigen::MatrixXd& V = es.eigenvectors();
    out.tolerance = 1e-10 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lam.size());
    std::vector<Eigen::Index> dropped;
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        if (lam(k) > out.tolerance) inv(k) = 1.0 / lam(k);
        else dropped.push_back(k);
    }
    out.dropped = dropped.size();
    out.matrix = V * inv.asDiagonal() * V.transpose();
    out.withheld.assign(static_cast<std::size_t>(lam.size()), false);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        double loading = 0.0;
        for (auto k : dropped) loading += V(i, k) * V(i, k);
        out.withheld[static_cast<std::size_t>(i)] = loading > 1e-6 || !(out.matrix(i, i) > 0.0);
    }
    return out;
}

/**
 * Standard errors from the inverse observed information. When the matrix is
 * not positive definite, directions with non-positive eigenvalues are
 * dropped from a pseudo-inverse and parameters loading on them get no SE.
 */
inline InferenceReport infer(const FullParams& theta, const PriceSeries& series, double level = 0.95,
                             unsigned threads = 1) {
    InferenceReport rep;
    rep.level = level;
    rep.z = critical_value(level);
    const auto info = information_matrix(theta, series, threads);
    const auto cov = covariance_from_information(info.matrix);
    rep.eigenvalues = cov.eigenvalues;
    rep.covariance = cov.matrix;
    rep.positive_definite = cov.dropped == 0;
    if (!rep.positive_definite)
        rep.warnings.push_back(fmt::format("information matrix is not positive definite: {} of {} eigenvalues <= {:.3g}",
                                           cov.dropped, cov.eigenvalues.size(), cov.tolerance));

    const auto v = theta.to_array();
    std::size_t withheld = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (cov.withheld[i]) {
            InferenceRow r;
            r.name = std::string(FullParams::kNames[i]);
            r.coefficient = v[i];
            rep.rows.push_back(std::move(r));
            rep.warnings.push_back(fmt::format("standard error of {} withheld", FullParams::kNames[i]));
            ++withheld;
            continue;
        }
        const auto ii = static_cast<Eigen::Index>(i);
        rep.rows.push_back(make_row(std::string(FullParams::kNames[i]), v[i], std::sqrt(cov.matrix(ii, ii)), level));
    }
    if (withheld == v.size()) throw NumericalError("information matrix is singular; no standard errors available");
    return rep;
}

/// Calendar window spanned by the t_c confidence interval.
inline std::pair<Date, Date> crash_window(const InferenceReport& report, const Date& origin,
                                          const BusinessCalendar& calendar = BusinessCalendar::weekends_only()) {
    const auto& r = report.row("t_c");
    if (!r.se || !std::isfinite(r.ci_lower) || !std::isfinite(r.ci_upper))
        throw DomainError("t_c has no finite confidence interval");
    return {year_to_date(r.ci_lower, origin, calendar), year_to_date(r.ci_upper, origin, calendar)};
}

/// Coefficient table: name, coefficient, standard error, t, CI bounds.
inline std::string render_inference(const InferenceReport& rep) {
    std::string out = fmt::format("{:<10}{:>14}{:>16}{:>14}{:>14}{:>14}\n", "Parameter", "Coefficient", "Std. error",
                                  "t-statistic", fmt::format("CI {:g}% lo", rep.level * 100), "CI hi");
    for (const auto& r : rep.rows) {
        if (r.se)
            out += fmt::format("{:<10}{:>14.6g}{:>16.6g}{:>14.4f}{:>14.6g}{:>14.6g}{}\n", r.name, r.coefficient, *r.se, r.t,
                               r.ci_lower, r.ci_upper, r.significant ? "" : "  (n.s.)");
        else
            out += fmt::format("{:<10}{:>14.6g}{:>16}{:>14}{:>14}{:>14}\n", r.name, r.coefficient, "withheld", "-", "-", "-");
    }
    return out;
}

}  // namespace lpg
