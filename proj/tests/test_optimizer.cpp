#include <cmath>

#include <gtest/gtest.h>

#include "lpgarch/lpfit.hpp"
#include "lpgarch/optimizer.hpp"

using namespace lpg;

namespace {

double rosenbrock(const Vector& x) {
    // Folded into (-2, 2)^2 through the logistic map so (1, 1) is interior.
    const double a = to_constrained(x[0], -2.0, 2.0), b = to_constrained(x[1], -2.0, 2.0);
    return (1 - a) * (1 - a) + 100 * (b - a * a) * (b - a * a);
}

const LPParams kTruth{385.11, -141.15, -12.04, 2.210, 0.37, 6.97, 1.41};

PriceSeries noiseless(const LPParams& p, std::size_t n) {
    std::vector<double> prices(n);
    for (std::size_t k = 0; k < n; ++k) prices[k] = evaluate_trend(p, to_year_units(k));
    return PriceSeries{business_dates(make_date(1985, 7, 1), n), prices};
}

}  // namespace

TEST(Gsa, QuadraticMinimum) {
    const CostFunction cost = [](const Vector& x) {
        const double y = to_constrained(x[0], -10.0, 10.0);
        return (y - 3) * (y - 3);
    };
    const auto r = gsa_minimize(cost, 1, GsaConfig{});
    EXPECT_NEAR(to_constrained(r.x[0], -10.0, 10.0), 3.0, 1e-2);
}

TEST(Gsa, SingleIterationReturnsInitialSample) {
    GsaConfig cfg;
    cfg.max_iterations = 1;
    cfg.restarts = 1;
    Vector start(2);
    start << 0.3, -0.2;
    const auto r = gsa_minimize(rosenbrock, 2, cfg, start);
    EXPECT_EQ(r.x, start);
    EXPECT_EQ(r.value, rosenbrock(start));
}

TEST(Gsa, RosenbrockAcrossSeeds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GsaConfig cfg;
        cfg.seed = seed;
        const auto r = gsa_minimize(rosenbrock, 2, cfg);
        EXPECT_LT(r.value, 1e-2) << "seed " << seed;
    }
}

TEST(Gsa, DeterministicGivenSeed) {
    GsaConfig cfg;
    cfg.seed = 42;
    cfg.max_iterations = 3000;
    const auto a = gsa_minimize(rosenbrock, 2, cfg);
    const auto b = gsa_minimize(rosenbrock, 2, cfg);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Gsa, ParallelRestartsMatchSerial) {
    GsaConfig cfg;
    cfg.seed = 9;
    cfg.max_iterations = 3000;
    cfg.restarts = 4;
    const auto serial = gsa_minimize(rosenbrock, 2, cfg);
    cfg.threads = 4;
    const auto parallel = gsa_minimize(rosenbrock, 2, cfg);
    EXPECT_EQ(serial.x, parallel.x);
    EXPECT_EQ(serial.best_restart, parallel.best_restart);
}

TEST(Gsa, AllNonFiniteIsAnError) {
    const CostFunction cost = [](const Vector&) { return std::nan(""); };
    GsaConfig cfg;
    cfg.max_iterations = 50;
    EXPECT_THROW(gsa_minimize(cost, 3, cfg), NumericalError);
}

TEST(Gsa, ConfigValidation) {
    GsaConfig cfg;
    cfg.qv = 3.0;
    EXPECT_THROW(cfg.validate(), InputError);
    cfg = {};
    cfg.restarts = 0;
    EXPECT_THROW(cfg.validate(), InputError);
    BfgsConfig b;
    b.gradient_tolerance = 0.0;
    EXPECT_THROW(b.validate(), InputError);
}

TEST(Bfgs, Quadratic) {
    const CostFunction cost = [](const Vector& x) { return (x[0] - 3) * (x[0] - 3); };
    const auto r = bfgs_minimize(cost, Vector::Zero(1), BfgsConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 3.0, 1e-8);
}

TEST(Bfgs, StartAtMinimum) {
    const CostFunction cost = [](const Vector& x) { return x.squaredNorm(); };
    const auto r = bfgs_minimize(cost, Vector::Zero(3), BfgsConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_EQ(r.value, 0.0);
}

TEST(Bfgs, NeverWorseThanStart) {
    Vector start(2);
    start << -1.2, 1.0;
    const auto r = bfgs_minimize(rosenbrock, start, BfgsConfig{});
    EXPECT_LE(r.value, rosenbrock(start));
    BfgsConfig tight;
    tight.max_iterations = 1;
    const auto one = bfgs_minimize(rosenbrock, start, tight);
    EXPECT_LE(one.value, rosenbrock(start));
    EXPECT_FALSE(one.converged);
}

TEST(Bfgs, NumericGradientMatchesAnalyticTrendGradient) {
    const double t = 1.3;
    const CostFunction g = [&](const Vector& x) {
        return evaluate_trend(LPParams{x[0], x[1], x[2], x[3], x[4], x[5], x[6]}, t);
    };
    const auto v = kTruth.to_array();
    const Vector x = Eigen::Map<const Vector>(v.data(), 7);
    const Vector num = numeric_gradient(g, x, g(x));
    const auto ana = trend_gradient(kTruth, t);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(num[i], ana[i], 1e-5 * std::max(1.0, std::abs(ana[i])));
}

TEST(LogPeriodicFit, RecoversNoiselessTruth) {
    const auto s = noiseless(kTruth, 544);
    const auto fit = fit_logperiodic(s);
    const auto got = fit.params.to_array(), want = kTruth.to_array();
    for (std::size_t i = 0; i < got.size(); ++i)
        EXPECT_NEAR(got[i], want[i], 1e-3 * std::abs(want[i])) << LPParams::kNames[i];
    EXPECT_NEAR(fit.params.tc, kTruth.tc, 1.0 / 252);
    EXPECT_EQ(fit.seed, GsaConfig{}.seed);
}

TEST(LogPeriodicFit, DeterministicAndMonotone) {
    const auto s = noiseless(kTruth, 200);
    GsaConfig g;
    g.max_iterations = 4000;
    g.seed = 77;
    const auto a = fit_logperiodic(s, g);
    const auto b = fit_logperiodic(s, g);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_TRUE(satisfies_premises(a.params, s.last_time()));
}

TEST(LogPeriodicFit, CandidatesSortedOnePerRestart) {
    const auto s = noiseless(kTruth, 200);
    GsaConfig g;
    g.max_iterations = 2000;
    g.seed = 78;
    const auto c = fit_logperiodic_candidates(s, default_lp_bounds(s), g, BfgsConfig{});
    ASSERT_EQ(c.size(), g.restarts);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i - 1].objective, c[i].objective);
    EXPECT_EQ(fit_logperiodic(s, g).params, c.front().params);
}

TEST(LogPeriodicFit, ConstantSeriesWarns) {
    const auto s = noiseless(LPParams{50.0, 0.0, 0.0, 3.0, 0.5, 8.0, 1.0}, 60);
    GsaConfig g;
    g.max_iterations = 2000;
    const auto fit = fit_logperiodic(s, g);
    bool warned = false;
    for (const auto& w : fit.warnings) warned |= w.find("constant") != std::string::npos;
    EXPECT_TRUE(warned);
    EXPECT_LT(fit.objective, 1e-9 * 60 * 50.0 * 50.0);
}

TEST(LogPeriodicFit, TooShort) {
    const auto s = noiseless(kTruth, 29);
    EXPECT_THROW(fit_logperiodic(s), InputError);
}
