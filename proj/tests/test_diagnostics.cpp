#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lpgarch/diagnostics.hpp"
#include "lpgarch/parallel.hpp"
#include "reference_values.hpp"

using namespace lpg;
namespace ref = lpg::reference;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    auto rng = stream_rng(seed, stream);
    std::normal_distribution<double> z;
    std::vector<double> x(n);
    for (auto& v : x) v = z(rng);
    return x;
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed, std::uint64_t stream = 0) {
    auto x = gaussian(n, seed, stream);
    for (std::size_t t = 1; t < n; ++t) x[t] += rho * x[t - 1];
    return x;
}

std::vector<double> walk(std::size_t n, std::uint64_t seed, std::uint64_t stream) { return ar1(n, 1.0, seed, stream); }

// Exhaustive count of close m-history pairs, normalized like the library.
double brute_correlation(const std::vector<double>& x, std::size_t m, double eps) {
    const std::size_t pts = x.size() - m + 1;
    double close = 0;
    for (std::size_t i = 0; i < pts; ++i)
        for (std::size_t j = i + 1; j < pts; ++j) {
            bool ok = true;
            for (std::size_t k = 0; k < m; ++k) ok = ok && std::abs(x[i + k] - x[j + k]) < eps;
            close += ok;
        }
    return close / (pts * (pts - 1.0) / 2.0);
}

template <class Fn>
double rejection_rate(std::size_t sims, Fn&& p_value) {
    std::size_t rejected = 0;
    for (std::size_t s = 0; s < sims; ++s) rejected += p_value(s) < 0.05;
    return static_cast<double>(rejected) / static_cast<double>(sims);
}

}  // namespace

TEST(Acf, AlternatingSequence) {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -1.0 : 1.0;
    EXPECT_NEAR(acf(x, 1)[0], -1.0, 2.0 / 1000);
}

TEST(Acf, WhiteNoiseBand) {
    const auto x = gaussian(1000, 3);
    const auto r = acf(x, 40);
    std::size_t inside = 0;
    for (double v : r) inside += std::abs(v) < 2 / std::sqrt(1000.0);
    EXPECT_GE(inside, 35u);
}

TEST(Acf, PersistentAr) {
    EXPECT_NEAR(acf(ar1(2000, 0.9, 5), 1)[0], 0.9, 0.05);
}

TEST(Acf, Errors) {
    const std::vector<double> flat(20, 1.0);
    EXPECT_THROW(acf(flat, 2), InputError);
    const std::vector<double> tiny{1.0, 2.0};
    EXPECT_THROW(acf(tiny, 2), InputError);
}

TEST(LjungBox, ReferenceValues) {
    EXPECT_NEAR(ljung_box(ref::kArSeries, 5).statistic, ref::kLbArLag5Stat, 1e-9);
    const auto lb = ljung_box(ref::kArSeries, 20);
    EXPECT_NEAR(lb.statistic, ref::kLbArLag20Stat, 1e-9);
    EXPECT_NEAR(lb.p_value / ref::kLbArLag20P, 1.0, 1e-6);
}

TEST(LjungBox, FormulaArithmetic) {
    // Two-point alternation scaled so that r_1 is exactly computable is awkward;
    // check the closed form against the acf instead.
    const auto x = ar1(100, 0.1, 9);
    const double r1 = acf(x, 1)[0];
    EXPECT_NEAR(ljung_box(x, 1).statistic, 100.0 * 102.0 * r1 * r1 / 99.0, 1e-12);
    EXPECT_NEAR(100.0 * 102.0 * 0.01 / 99.0, 1.0303, 1e-4);
}

TEST(LjungBox, NonNegativeAndMonotoneInLag) {
    const auto x = gaussian(300, 4);
    double prev = 0.0;
    for (std::size_t L = 1; L <= 30; ++L) {
        const double q = ljung_box(x, L).statistic;
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(Descriptive, SymmetricSequence) {
    std::vector<double> x;
    for (int i = 0; i < 10; ++i) x.insert(x.end(), {-1.0, 1.0});
    const auto d = descriptive_stats(x);
    EXPECT_EQ(d.mean, 0.0);
    EXPECT_EQ(d.skewness, 0.0);
    EXPECT_EQ(d.kurtosis, 1.0);
}

TEST(Descriptive, GaussianKurtosis) {
    const auto d = descriptive_stats(gaussian(10000, 6));
    EXPECT_NEAR(d.kurtosis, 3.0, 0.15);
    EXPECT_NEAR(d.sd, 1.0, 0.03);
    const std::vector<double> three{1.0, 2.0, 3.0};
    EXPECT_THROW(descriptive_stats(three), InputError);
}

TEST(JarqueBera, PlugInValues) {
    EXPECT_EQ(jarque_bera(0.0, 3.0, 500).statistic, 0.0);
    EXPECT_EQ(jarque_bera(0.0, 3.0, 500).p_value, 1.0);
    EXPECT_DOUBLE_EQ(jarque_bera(0.0, 4.0, 600).statistic, 25.0);
    EXPECT_NEAR(jarque_bera(-0.384, 4.774, 544).statistic, 84.67, 0.05);
}

TEST(JarqueBera, MatchesMoments) {
    const auto x = ar1(400, 0.3, 8);
    const auto d = descriptive_stats(x);
    const double expected = 400.0 / 6.0 * (d.skewness * d.skewness + (d.kurtosis - 3) * (d.kurtosis - 3) / 4.0);
    EXPECT_NEAR(jarque_bera(x).statistic, expected, 1e-12 * expected);
}

TEST(MacKinnon, ReferenceValues) {
    for (std::size_t i = 0; i < ref::kMacKinnonTaus.size(); ++i) {
        EXPECT_NEAR(mackinnon_p(ref::kMacKinnonTaus[i], false), ref::kMacKinnonNoConst[i],
                    1e-9 * std::max(1e-3, ref::kMacKinnonNoConst[i]));
        EXPECT_NEAR(mackinnon_p(ref::kMacKinnonTaus[i], true), ref::kMacKinnonConst[i],
                    1e-9 * std::max(1e-3, ref::kMacKinnonConst[i]));
    }
}

TEST(Adf, ReferenceValues) {
    struct Case {
        const std::array<double, 250>& x;
        bool intercept;
        double lag3_stat, lag3_p, auto_stat;
        int auto_lag;
    };
    const Case cases[] = {
        {ref::kArSeries, false, ref::kAdfArNoConstLag3Stat, ref::kAdfArNoConstLag3P, ref::kAdfArNoConstAutoStat, ref::kAdfArNoConstAutoLag},
        {ref::kArSeries, true, ref::kAdfArConstLag3Stat, ref::kAdfArConstLag3P, ref::kAdfArConstAutoStat, ref::kAdfArConstAutoLag},
        {ref::kWalkSeries, false, ref::kAdfWalkNoConstLag3Stat, ref::kAdfWalkNoConstLag3P, ref::kAdfWalkNoConstAutoStat, ref::kAdfWalkNoConstAutoLag},
        {ref::kWalkSeries, true, ref::kAdfWalkConstLag3Stat, ref::kAdfWalkConstLag3P, ref::kAdfWalkConstAutoStat, ref::kAdfWalkConstAutoLag},
    };
    for (const auto& c : cases) {
        const auto fixed = adf_test(c.x, c.intercept, 3);
        EXPECT_NEAR(fixed.statistic, c.lag3_stat, 1e-9);
        EXPECT_NEAR(fixed.p_value, c.lag3_p, 1e-9 * std::max(1e-3, c.lag3_p));
        const auto automatic = adf_test(c.x, c.intercept, std::nullopt, 4);
        EXPECT_NEAR(automatic.statistic, c.auto_stat, 1e-9);
        EXPECT_EQ(automatic.config.at("lags"), std::to_string(c.auto_lag));
    }
}

TEST(Pp, ReferenceValues) {
    EXPECT_NEAR(pp_test(ref::kArSeries, false, 5).statistic, ref::kPpArNoConstLag5Stat, 1e-9);
    EXPECT_NEAR(pp_test(ref::kArSeries, true, 5).statistic, ref::kPpArConstLag5Stat, 1e-9);
    EXPECT_NEAR(pp_test(ref::kWalkSeries, false, 5).statistic, ref::kPpWalkNoConstLag5Stat, 1e-9);
    EXPECT_NEAR(pp_test(ref::kWalkSeries, true, 5).statistic, ref::kPpWalkConstLag5Stat, 1e-9);
    EXPECT_NEAR(pp_test(ref::kWalkSeries, true, 5).p_value, ref::kPpWalkConstLag5P, 1e-9);
    EXPECT_NEAR(pp_test(ref::kArSeries, true, 5).p_value / ref::kPpArConstLag5P, 1.0, 1e-6);
}

TEST(UnitRoot, Errors) {
    const std::vector<double> flat(100, 3.0);
    EXPECT_THROW(adf_test(flat, true), InputError);
    const std::vector<double> short_x(24, 1.0);
    EXPECT_THROW(pp_test(short_x, false), InputError);
}

TEST(UnitRoot, AdfPowerAndSize) {
    std::size_t walk_accept = 0, ar_reject = 0;
    for (std::size_t s = 0; s < 200; ++s) {
        walk_accept += adf_test(walk(500, 31, s), true).p_value > 0.10;
        ar_reject += adf_test(ar1(500, 0.5, 32, s), true).p_value < 0.01;
    }
    // Under the null P(p > 0.10) is exactly 0.90, so the acceptance count is
    // Binomial(200, 0.9); allow three standard errors below its mean.
    EXPECT_GE(walk_accept, static_cast<std::size_t>(200 * (0.90 - 3 * std::sqrt(0.09 / 200))));
    EXPECT_GE(ar_reject, 190u);
}

TEST(UnitRoot, PpPowerAndSize) {
    std::size_t white_reject = 0;
    for (std::size_t s = 0; s < 200; ++s) white_reject += pp_test(gaussian(500, 33, s), false).p_value < 0.01;
    EXPECT_GE(white_reject, 190u);
}

TEST(UnitRoot, EmpiricalSizeOnRandomWalks) {
    // 1000 series keep the Monte-Carlo standard error near 0.007.
    for (bool intercept : {false, true}) {
        EXPECT_NEAR(rejection_rate(1000, [&](std::size_t s) { return adf_test(walk(500, 34, s), intercept).p_value; }),
                    0.05, 0.02);
        EXPECT_NEAR(rejection_rate(1000, [&](std::size_t s) { return pp_test(walk(500, 35, s), intercept).p_value; }),
                    0.05, 0.02);
    }
}

TEST(IidTests, EmpiricalSizeOnGaussianNoise) {
    EXPECT_NEAR(rejection_rate(1000, [](std::size_t s) { return ljung_box(gaussian(500, 36, s), 20).p_value; }), 0.05,
                0.02);
    EXPECT_NEAR(rejection_rate(1000, [](std::size_t s) { return jarque_bera(gaussian(500, 37, s)).p_value; }), 0.05,
                0.02);
}

TEST(Bds, ReferenceValues) {
    const double sd = detail::sample_sd(ref::kBdsSeries);
    const double mult[] = {0.5, 1.0, 1.5, 2.0};
    for (std::size_t e = 0; e < 4; ++e) {
        const auto stats = bds_from_sums(correlation_sums(ref::kBdsSeries, mult[e] * sd, 6), ref::kBdsSeries.size());
        for (std::size_t m = 0; m < 5; ++m) EXPECT_NEAR(stats[m], ref::kBdsStats[e * 5 + m], 1e-9) << e << " " << m;
    }
}

TEST(Bds, CorrelationIntegralMatchesPairEnumeration) {
    const std::vector<double> toy{0.1, 0.5, 0.35, 0.9};
    for (double eps : {0.1, 0.2, 0.3, 0.5, 1.0}) {
        const auto s = correlation_sums(toy, eps, 3);
        for (std::size_t m = 1; m <= 3; ++m) EXPECT_DOUBLE_EQ(s.c[m - 1], brute_correlation(toy, m, eps)) << eps << " " << m;
    }
    const auto x = gaussian(120, 40);
    const auto s = correlation_sums(x, 0.8, 5);
    for (std::size_t m = 1; m <= 5; ++m) EXPECT_NEAR(s.c[m - 1], brute_correlation(x, m, 0.8), 1e-14);
}

TEST(Bds, IdenticalSequence) {
    const std::vector<double> flat(60, 2.0);
    const auto s = correlation_sums(flat, 0.1, 4);
    for (double c : s.c) EXPECT_EQ(c, 1.0);
    EXPECT_THROW(bds_bootstrap_pvalues(flat), InputError);
}

TEST(Bds, BoundedAndMonotoneInThreshold) {
    const auto x = gaussian(200, 41);
    std::vector<double> prev(6, 0.0);
    for (double eps = 0.05; eps < 4.0; eps += 0.25) {
        const auto s = correlation_sums(x, eps, 6);
        for (std::size_t m = 0; m < 6; ++m) {
            EXPECT_GE(s.c[m], prev[m]);
            EXPECT_LE(s.c[m], 1.0);
            prev[m] = s.c[m];
        }
    }
}

TEST(Bds, UniformNullWithinThree) {
    std::size_t inside = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto rng = stream_rng(42, s);
        std::uniform_real_distribution<double> u;
        std::vector<double> x(1000);
        for (auto& v : x) v = u(rng);
        inside += std::abs(bds_statistic(x, 2, detail::sample_sd(x))) < 3.0;
    }
    EXPECT_GE(inside, 99u);
}

TEST(Bds, Errors) {
    const auto x = gaussian(100, 43);
    EXPECT_THROW(bds_statistic(x, 2, 1e-9), InputError);
    EXPECT_THROW(bds_statistic(x, 1, 1.0), InputError);
    EXPECT_THROW(bds_statistic(gaussian(49, 1), 2, 1.0), InputError);
}

TEST(Bds, BootstrapDeterministicAndThreadIndependent) {
    const auto x = gaussian(150, 44);
    BdsGrid g;
    g.replications = 99;
    const auto a = bds_bootstrap_pvalues(x, g);
    const auto b = bds_bootstrap_pvalues(x, g);
    g.threads = 3;
    const auto c = bds_bootstrap_pvalues(x, g);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.p_value, c.p_value);
    ASSERT_EQ(a.p_value.size(), 5u);
    for (const auto& row : a.p_value) {
        ASSERT_EQ(row.size(), 4u);
        for (double p : row) {
            EXPECT_GE(p, 1.0 / 100);
            EXPECT_LE(p, 1.0);
        }
    }
}

TEST(Battery, ComposesAndRenders) {
    const auto eps = gaussian(300, 45);
    const auto levels = ar1(300, 0.8, 46);
    DiagnosticsConfig cfg;
    cfg.bds.replications = 49;
    const auto r = run_diagnostics(eps, levels, cfg);
    EXPECT_EQ(r.descriptive.n, 300u);
    EXPECT_EQ(r.lb_residuals.config.at("lags"), "20");
    EXPECT_LT(r.adf[1].p_value, 0.01);
    EXPECT_LT(r.pp[0].p_value, 0.01);
    ASSERT_TRUE(r.bds.has_value());
    const auto text = render_diagnostics(r);
    EXPECT_NE(text.find("Jarque-Bera"), std::string::npos);
    EXPECT_NE(text.find("BDS"), std::string::npos);
    cfg.run_bds = false;
    EXPECT_FALSE(run_diagnostics(eps, levels, cfg).bds.has_value());
}
