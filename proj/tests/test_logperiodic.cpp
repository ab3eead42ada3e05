#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lpgarch/logperiodic.hpp"
#include "lpgarch/transform.hpp"
#include "reference_values.hpp"

using namespace lpg;

namespace {

const LPParams kSp500{385.11, -141.15, -12.04, 2.210, 0.37, 6.97, 1.41};

PriceSeries noiseless(const LPParams& p, std::size_t n) {
    std::vector<Date> dates;
    std::vector<double> prices;
    Date d = make_date(2001, 1, 2);
    for (std::size_t k = 0; k < n; ++k) {
        dates.push_back(d);
        prices.push_back(evaluate_trend(p, to_year_units(k)));
        d = BusinessCalendar::weekends_only().advance(d, 1);
    }
    return PriceSeries{dates, prices};
}

}  // namespace

TEST(Trend, DegenerateAmplitudes) {
    const LPParams p{10.0, 0.0, 0.0, 2.0, 0.5, 8.0, 1.0};
    for (double t : {0.0, 0.5, 1.9}) EXPECT_EQ(evaluate_trend(p, t), 10.0);
}

TEST(Trend, UnitDistanceCollapses) {
    const LPParams p{100.0, -20.0, 3.0, 1.5, 0.4, 9.0, 0.7};
    EXPECT_DOUBLE_EQ(evaluate_trend(p, p.tc - 1.0), 100.0 - 20.0 + 3.0 * std::cos(0.7));
}

TEST(Trend, ExtendedPrecisionOracle) {
    EXPECT_NEAR(evaluate_trend(kSp500, 0.0), reference::kTrendSp500AtZero, 1e-10);
}

TEST(Trend, DomainGuard) {
    EXPECT_THROW(evaluate_trend(kSp500, kSp500.tc), DomainError);
    EXPECT_THROW(evaluate_trend(kSp500, kSp500.tc + 0.1), DomainError);
}

TEST(Trend, SlopeDivergesNearCriticalTime) {
    double previous = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double gap = std::pow(10.0, -k / 2.0);
        const double t = kSp500.tc - gap, h = gap * 1e-3;
        const LPParams smooth{kSp500.A, kSp500.B, 0.0, kSp500.tc, kSp500.beta, kSp500.omega, kSp500.phi};
        const double slope = std::abs(evaluate_trend(smooth, t + h) - evaluate_trend(smooth, t - h)) / (2 * h);
        EXPECT_GT(slope, previous) << gap;
        previous = slope;
    }
}

TEST(Trend, AnalyticGradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const LPParams p{50 + 400 * u(rng), -300 * u(rng) - 1, 40 * u(rng) - 20, 2.0 + u(rng),
                         0.05 + 0.9 * u(rng), 5 + 10 * u(rng), 2 * std::numbers::pi * u(rng)};
        const double t = 1.9 * u(rng);
        const auto g = trend_gradient(p, t);
        auto v = p.to_array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double h = 1e-6 * (1 + std::abs(v[i]));
            auto up = v, down = v;
            up[i] += h;
            down[i] -= h;
            const double fd = (evaluate_trend(LPParams::from_array(up), t) - evaluate_trend(LPParams::from_array(down), t)) / (2 * h);
            EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd))) << LPParams::kNames[i];
        }
    }
}

TEST(Trend, PhasePeriodicity) {
    LPParams shifted = kSp500;
    shifted.phi += 2 * std::numbers::pi;
    for (double t : {0.0, 1.0, 2.1}) EXPECT_NEAR(evaluate_trend(shifted, t), evaluate_trend(kSp500, t), 1e-10);
}

TEST(Residuals, PerfectFitIsZero) {
    const auto s = noiseless(kSp500, 300);
    for (double r : residuals(kSp500, s)) EXPECT_EQ(r, 0.0);
    EXPECT_EQ(sse(kSp500, s), 0.0);
}

TEST(Residuals, ConstantSeries) {
    const LPParams flat{7.5, 0.0, 0.0, 3.0, 0.5, 8.0, 1.0};
    const auto s = noiseless(flat, 40);
    for (double r : residuals(flat, s)) EXPECT_EQ(r, 0.0);
}

TEST(Residuals, ReconstructPrices) {
    auto s = noiseless(kSp500, 200);
    std::vector<double> noisy(s.prices().begin(), s.prices().end());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (auto& p : noisy) p += 5 * n(rng);
    const PriceSeries ns(std::vector<Date>(s.dates().begin(), s.dates().end()), noisy);
    const auto r = residuals(kSp500, ns);
    const auto f = fitted_trend(kSp500, ns.times());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i] + f[i], noisy[i], 1e-12 * noisy[i]);
    EXPECT_GT(sse(kSp500, ns), 0.0);
}

TEST(Residuals, RequireCriticalTimeBeyondSample) {
    const auto s = noiseless(kSp500, 100);
    LPParams early = kSp500;
    early.tc = 0.2;
    EXPECT_THROW(residuals(early, s), DomainError);
}

TEST(Sse, Arithmetic) {
    // Residuals [1, -2, 3] around a flat trend.
    const LPParams flat{10.0, 0.0, 0.0, 5.0, 0.5, 8.0, 1.0};
    const std::vector<double> t{0.0, 1.0 / 252, 2.0 / 252};
    const std::vector<double> p{11.0, 8.0, 13.0};
    EXPECT_EQ(sse(flat, t, p), 14.0);
}

TEST(Sse, ExtendedPrecisionOracle) {
    const LPParams p{120.0, -35.0, 4.5, 0.09, 0.45, 8.2, 2.3};
    std::vector<double> t;
    for (std::size_t k = 0; k < reference::kSsePrices.size(); ++k) t.push_back(to_year_units(k));
    EXPECT_NEAR(sse(p, t, reference::kSsePrices), reference::kSseValue, 1e-9);
}

TEST(DefaultBounds, FollowPremises) {
    const auto s = noiseless(kSp500, 544);
    const auto b = default_lp_bounds(s);
    const double pmax = s.max_price();
    EXPECT_EQ(b[0].lower, 0.0);
    EXPECT_EQ(b[0].upper, 3 * pmax);
    EXPECT_EQ(b[1].upper, 0.0);
    EXPECT_DOUBLE_EQ(b[3].lower, s.last_time() + 1.0 / 252);
    EXPECT_DOUBLE_EQ(b[3].upper, s.last_time() + 1.0);
    EXPECT_EQ(b[5].lower, 5.0);
    EXPECT_EQ(b[5].upper, 15.0);
    EXPECT_DOUBLE_EQ(b[6].upper, 2 * std::numbers::pi);
    EXPECT_TRUE(satisfies_premises(kSp500, s.last_time()));
}

TEST(Transform, Examples) {
    EXPECT_EQ(to_constrained(0.0, 0.0, 1.0), 0.5);
    EXPECT_NEAR(to_constrained(std::log(3.0), 0.0, 10.0), 7.5, 1e-14);
    EXPECT_NEAR(to_constrained(800.0, -2.0, 5.0), 5.0, 1e-12);
    EXPECT_NEAR(to_constrained(-800.0, -2.0, 5.0), -2.0, 1e-12);
    EXPECT_EQ(to_unconstrained(3.0, 1.0, 5.0), 0.0);
    EXPECT_THROW(to_unconstrained(1.0, 1.0, 5.0), InputError);
    EXPECT_THROW(to_unconstrained(5.0, 1.0, 5.0), InputError);
    EXPECT_THROW(to_constrained(0.0, 1.0, 1.0), InputError);
}

TEST(Transform, RoundTripOnRandomTriples) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = -100 + 200 * u(rng);
        const double b = a + 1e-3 + 50 * u(rng);
        const double y = a + (b - a) * (0.001 + 0.998 * u(rng));
        EXPECT_NEAR(to_constrained(to_unconstrained(y, a, b), a, b), y, 1e-12 * std::max(1.0, std::abs(y)));
    }
}

TEST(Transform, StrictlyMonotone) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        double x1 = u(rng), x2 = u(rng);
        if (x1 == x2) continue;
        if (x1 > x2) std::swap(x1, x2);
        EXPECT_LT(to_constrained(x1, -3.0, 7.0), to_constrained(x2, -3.0, 7.0));
    }
}
