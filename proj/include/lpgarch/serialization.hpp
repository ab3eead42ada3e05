#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "lpgarch/argarch.hpp"
#include "lpgarch/diagnostics.hpp"
#include "lpgarch/inference.hpp"
#include "lpgarch/synth.hpp"

namespace lpg {

using Json = nlohmann::ordered_json;

namespace detail {

// NaN and infinities become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double number_from(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

template <std::size_t N>
Json flat_object(const std::array<double, N>& v, const std::array<std::string_view, N>& names) {
    Json j = Json::object();
    for (std::size_t i = 0; i < N; ++i) j[std::string(names[i])] = v[i];
    return j;
}

template <std::size_t N>
std::array<double, N> flat_values(const Json& j, const std::array<std::string_view, N>& names) {
    if (!j.is_object()) throw InputError("parameters must be a JSON object keyed by name");
    std::array<double, N> v{};
    for (std::size_t i = 0; i < N; ++i) {
        const std::string key(names[i]);
        if (!j.contains(key)) throw InputError(fmt::format("parameter '{}' missing", key));
        if (!j[key].is_number()) throw InputError(fmt::format("parameter '{}' is not a number", key));
        v[i] = j[key].get<double>();
    }
    return v;
}

inline Json matrix(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

inline void to_json(Json& j, const LPParams& p) { j = detail::flat_object(p.to_array(), LPParams::kNames); }
inline void from_json(const Json& j, LPParams& p) { p = LPParams::from_array(detail::flat_values(j, LPParams::kNames)); }

inline void to_json(Json& j, const ARGARCHParams& p) { j = detail::flat_object(p.to_array(), ARGARCHParams::kNames); }
inline void from_json(const Json& j, ARGARCHParams& p) {
    p = ARGARCHParams::from_array(detail::flat_values(j, ARGARCHParams::kNames));
}

inline void to_json(Json& j, const FullParams& p) { j = detail::flat_object(p.to_array(), FullParams::kNames); }
inline void from_json(const Json& j, FullParams& p) { p = FullParams::from_array(detail::flat_values(j, FullParams::kNames)); }

inline void to_json(Json& j, const GsaConfig& c) {
    j = Json{{"qv", c.qv},
             {"qa", c.qa},
             {"t0", c.t0 ? Json(*c.t0) : Json(nullptr)},
             {"visit_t0", c.visit_t0},
             {"search_radius", c.search_radius},
             {"max_iterations", c.max_iterations},
             {"restarts", c.restarts}};
}

inline void from_json(const Json& j, GsaConfig& c) {
    c.qv = j.value("qv", c.qv);
    c.qa = j.value("qa", c.qa);
    if (j.contains("t0")) c.t0 = j["t0"].is_null() ? std::nullopt : std::optional<double>(j["t0"].get<double>());
    c.visit_t0 = j.value("visit_t0", c.visit_t0);
    c.search_radius = j.value("search_radius", c.search_radius);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.restarts = j.value("restarts", c.restarts);
}

inline void to_json(Json& j, const BfgsConfig& c) {
    j = Json{{"gradient_tolerance", c.gradient_tolerance},
             {"step_tolerance", c.step_tolerance},
             {"max_iterations", c.max_iterations}};
}

inline void from_json(const Json& j, BfgsConfig& c) {
    c.gradient_tolerance = j.value("gradient_tolerance", c.gradient_tolerance);
    c.step_tolerance = j.value("step_tolerance", c.step_tolerance);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
}

/// Wall-clock time is left out so repeated runs serialize identically.
template <class Params>
void to_json(Json& j, const FitResult<Params>& f) {
    j = Json{{"params", f.params},
             {"objective", detail::number(f.objective)},
             {"converged", f.converged},
             {"gsa_evaluations", f.gsa_evaluations},
             {"bfgs_iterations", f.bfgs_iterations},
             {"seed", f.seed},
             {"warnings", f.warnings}};
}

template <class Params>
void from_json(const Json& j, FitResult<Params>& f) {
    f.params = j.at("params").get<Params>();
    f.objective = detail::number_from(j.at("objective"));
    f.converged = j.at("converged").get<bool>();
    f.gsa_evaluations = j.value("gsa_evaluations", std::size_t{0});
    f.bfgs_iterations = j.value("bfgs_iterations", std::size_t{0});
    f.seed = j.value("seed", std::uint64_t{0});
    f.warnings = j.value("warnings", std::vector<std::string>{});
}

inline void to_json(Json& j, const TestResult& t) {
    j = Json{{"statistic", detail::number(t.statistic)}, {"p_value", detail::number(t.p_value)}, {"config", t.config}};
}

inline void to_json(Json& j, const Descriptive& d) {
    j = Json{{"n", d.n},
             {"mean", detail::number(d.mean)},
             {"sd", detail::number(d.sd)},
             {"skewness", detail::number(d.skewness)},
             {"kurtosis", detail::number(d.kurtosis)}};
}

inline void to_json(Json& j, const BdsResult& b) {
    Json stat = Json::array(), p = Json::array();
    for (std::size_t d = 0; d < b.grid.dims.size(); ++d) {
        Json srow = Json::array(), prow = Json::array();
        for (std::size_t e = 0; e < b.grid.eps_multipliers.size(); ++e) {
            srow.push_back(detail::number(b.statistic[d][e]));
            prow.push_back(detail::number(b.p_value[d][e]));
        }
        stat.push_back(std::move(srow));
        p.push_back(std::move(prow));
    }
    j = Json{{"dims", b.grid.dims},
             {"eps_multipliers", b.grid.eps_multipliers},
             {"replications", b.grid.replications},
             {"seed", b.grid.seed},
             {"sd", b.sd},
             {"statistic", stat},
             {"p_value", p}};
}

inline void to_json(Json& j, const DiagnosticsReport& r) {
    j = Json{{"descriptive", r.descriptive},
             {"jarque_bera", r.jb},
             {"ljung_box_residuals", r.lb_residuals},
             {"ljung_box_squared", r.lb_squared},
             {"adf", {{"without_intercept", r.adf[0]}, {"with_intercept", r.adf[1]}}},
             {"pp", {{"without_intercept", r.pp[0]}, {"with_intercept", r.pp[1]}}},
             {"bds", r.bds ? Json(*r.bds) : Json(nullptr)}};
}

inline void to_json(Json& j, const InferenceRow& r) {
    j = Json{{"name", r.name},
             {"coefficient", r.coefficient},
             {"se", r.se ? detail::number(*r.se) : Json(nullptr)},
             {"t", detail::number(r.t)},
             {"ci_lower", detail::number(r.ci_lower)},
             {"ci_upper", detail::number(r.ci_upper)},
             {"significant", r.significant}};
}

inline void to_json(Json& j, const InferenceReport& r) {
    Json eig = Json::array();
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) eig.push_back(detail::number(r.eigenvalues(i)));
    j = Json{{"level", r.level},
             {"z", r.z},
             {"rows", r.rows},
             {"positive_definite", r.positive_definite},
             {"information_eigenvalues", eig},
             {"covariance", detail::matrix(r.covariance)},
             {"warnings", r.warnings}};
}

inline void to_json(Json& j, const ParameterSummary& s) {
    j = Json{{"name", s.name},
             {"count", s.count},
             {"bias", detail::number(s.bias)},
             {"rmse", detail::number(s.rmse)},
             {"median_abs_error", detail::number(s.median_abs_error)},
             {"ci_count", s.ci_count},
             {"coverage", detail::number(s.coverage)}};
}

inline void to_json(Json& j, const ReplicationRecord& r) {
    Json se = Json::object(), covers = Json::object();
    for (std::size_t i = 0; i < FullParams::kSize; ++i) {
        const std::string key(FullParams::kNames[i]);
        se[key] = r.se[i] ? detail::number(*r.se[i]) : Json(nullptr);
        covers[key] = r.covers[i] ? Json(*r.covers[i]) : Json(nullptr);
    }
    j = Json{{"index", r.index},
             {"fit_seed", r.fit_seed},
             {"ok", r.ok},
             {"error", r.error},
             {"converged", r.converged},
             {"basic", r.basic},
             {"estimate", r.estimate},
             {"loglik", detail::number(r.loglik)},
             {"se", se},
             {"covers", covers},
             {"lb_basic_p", detail::number(r.lb_basic_p)},
             {"lb_extended_p", detail::number(r.lb_extended_p)},
             {"lb_truth_p", detail::number(r.lb_truth_p)}};
}

inline void to_json(Json& j, const RecoveryStudy& s) {
    j = Json{{"truth", s.truth},
             {"n", s.n},
             {"replications", s.replications},
             {"seed", s.seed},
             {"gsa", s.config.gsa},
             {"bfgs", s.config.bfgs},
             {"level", s.config.level},
             {"lb_lag", s.config.lb_lag},
             {"convergence_rate", s.convergence_rate},
             {"summaries", s.summaries},
             {"records", s.records}};
}

// Readers for saved reports.

inline void from_json(const Json& j, TestResult& t) {
    t.statistic = detail::number_from(j.at("statistic"));
    t.p_value = detail::number_from(j.at("p_value"));
    t.config = j.value("config", std::map<std::string, std::string>{});
}

inline void from_json(const Json& j, Descriptive& d) {
    d.n = j.at("n").get<std::size_t>();
    d.mean = detail::number_from(j.at("mean"));
    d.sd = detail::number_from(j.at("sd"));
    d.skewness = detail::number_from(j.at("skewness"));
    d.kurtosis = detail::number_from(j.at("kurtosis"));
}

inline void from_json(const Json& j, BdsResult& b) {
    b.grid.dims = j.at("dims").get<std::vector<std::size_t>>();
    b.grid.eps_multipliers = j.at("eps_multipliers").get<std::vector<double>>();
    b.grid.replications = j.at("replications").get<std::size_t>();
    b.grid.seed = j.at("seed").get<std::uint64_t>();
    b.sd = j.at("sd").get<double>();
    auto grid = [](const Json& rows) {
        std::vector<std::vector<double>> out;
        for (const auto& row : rows) {
            out.emplace_back();
            for (const auto& v : row) out.back().push_back(detail::number_from(v));
        }
        return out;
    };
    b.statistic = grid(j.at("statistic"));
    b.p_value = grid(j.at("p_value"));
}

inline void from_json(const Json& j, DiagnosticsReport& r) {
    r.descriptive = j.at("descriptive").get<Descriptive>();
    r.jb = j.at("jarque_bera").get<TestResult>();
    r.lb_residuals = j.at("ljung_box_residuals").get<TestResult>();
    r.lb_squared = j.at("ljung_box_squared").get<TestResult>();
    r.config.lb_lag = std::stoul(r.lb_residuals.config.at("lags"));
    r.adf = {j.at("adf").at("without_intercept").get<TestResult>(), j.at("adf").at("with_intercept").get<TestResult>()};
    r.pp = {j.at("pp").at("without_intercept").get<TestResult>(), j.at("pp").at("with_intercept").get<TestResult>()};
    if (!j.at("bds").is_null()) r.bds = j.at("bds").get<BdsResult>();
}

inline void from_json(const Json& j, InferenceRow& r) {
    r.name = j.at("name").get<std::string>();
    r.coefficient = j.at("coefficient").get<double>();
    if (!j.at("se").is_null()) r.se = j.at("se").get<double>();
    r.t = detail::number_from(j.at("t"));
    r.ci_lower = detail::number_from(j.at("ci_lower"));
    r.ci_upper = detail::number_from(j.at("ci_upper"));
    r.significant = j.at("significant").get<bool>();
}

inline void from_json(const Json& j, InferenceReport& r) {
    r.level = j.at("level").get<double>();
    r.z = j.at("z").get<double>();
    r.rows = j.at("rows").get<std::vector<InferenceRow>>();
    r.positive_definite = j.at("positive_definite").get<bool>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
    const auto& eig = j.at("information_eigenvalues");
    r.eigenvalues.resize(static_cast<Eigen::Index>(eig.size()));
    for (std::size_t i = 0; i < eig.size(); ++i) r.eigenvalues(static_cast<Eigen::Index>(i)) = detail::number_from(eig[i]);
    const auto& cov = j.at("covariance");
    const auto k = static_cast<Eigen::Index>(cov.size());
    r.covariance.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            r.covariance(a, b) = detail::number_from(cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
}

}  // namespace lpg
