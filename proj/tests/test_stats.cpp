// Agreement statistics against hand-computed fixtures and reference values,
// plus distribution-level checks of the chi-square normality test.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "laminascope/bench.hpp"
#include "laminascope/stats.hpp"

using namespace laminascope;

namespace {

PairedMeasurements from_diffs(const std::vector<double>& d) {
    PairedMeasurements p;
    for (double x : d) {
        p.auto_mm.push_back(x);
        p.manual_mm.push_back(0.0);
    }
    return p;
}

}  // namespace

TEST(AccuracyStats, HandComputedFixture) {
    const auto s = accuracy_stats(from_diffs({0.5, -0.3, 0.1}));
    EXPECT_NEAR(s.rms_mm, 0.3415650255319866, 1e-12);  // sqrt(0.35/3)
    EXPECT_NEAR(s.mae_mm, 0.3, 1e-12);
    EXPECT_NEAR(s.mean_diff_mm, 0.1, 1e-12);
    EXPECT_NEAR(s.sd_mm, 0.4, 1e-12);
    EXPECT_NEAR(s.loa_low_mm, -0.684, 1e-9);
    EXPECT_NEAR(s.loa_high_mm, 0.884, 1e-9);
}

TEST(AccuracyStats, PerfectAgreementIsAllZero) {
    PairedMeasurements p;
    p.auto_mm = {27.0, 31.5, 24.2};
    p.manual_mm = p.auto_mm;
    const auto s = accuracy_stats(p);
    EXPECT_DOUBLE_EQ(s.rms_mm, 0.0);
    EXPECT_DOUBLE_EQ(s.mae_mm, 0.0);
    EXPECT_DOUBLE_EQ(s.loa_low_mm, 0.0);
    EXPECT_DOUBLE_EQ(s.loa_high_mm, 0.0);
}

TEST(AccuracyStats, ReportRendersReferenceRow) {
    // formatting fixture only: the published row with RMS 0.07, MAE 0.62,
    // limits of agreement -0.847 to 1.142
    AccuracyStats s;
    s.rms_mm = 0.07;
    s.mae_mm = 0.62;
    s.loa_low_mm = -0.847;
    s.loa_high_mm = 1.142;
    const std::string table = format_accuracy_table(s, 10);
    EXPECT_NE(table.find("0.070"), std::string::npos);
    EXPECT_NE(table.find("0.620"), std::string::npos);
    EXPECT_NE(table.find("-0.847"), std::string::npos);
    EXPECT_NE(table.find("1.142"), std::string::npos);
}

TEST(AccuracyStats, InvariantsOnRandomData) {
    std::mt19937 rng(8);
    std::normal_distribution<double> noise(0.4, 1.3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> d(20);
        for (double& x : d) x = noise(rng);
        const auto s = accuracy_stats(from_diffs(d));

        double max_abs = 0.0;
        for (double x : d) max_abs = std::max(max_abs, std::abs(x));
        EXPECT_LE(s.mae_mm, s.rms_mm + 1e-12);            // Jensen
        EXPECT_GE(s.rms_mm, std::abs(s.mean_diff_mm) - 1e-12);
        EXPECT_LE(s.rms_mm, max_abs + 1e-12);
        EXPECT_LE(s.loa_low_mm, s.mean_diff_mm);           // interval contains the mean
        EXPECT_GE(s.loa_high_mm, s.mean_diff_mm);
    }
}

TEST(AccuracyStats, BadInputsRejected) {
    EXPECT_THROW(accuracy_stats(from_diffs({0.1})), std::invalid_argument);
    PairedMeasurements uneven;
    uneven.auto_mm = {1.0, 2.0};
    uneven.manual_mm = {1.0};
    EXPECT_THROW(accuracy_stats(uneven), std::invalid_argument);
    PairedMeasurements nan_pair;
    nan_pair.auto_mm = {1.0, std::nan("")};
    nan_pair.manual_mm = {1.0, 2.0};
    EXPECT_THROW(accuracy_stats(nan_pair), std::invalid_argument);
}

TEST(PairedTTest, HandComputedFixture) {
    // diffs {1,1,1,1,-1}: mean 0.6, sd 0.8944, t = 1.5, dof 4, p = 0.208
    const auto r = paired_t_test(from_diffs({1, 1, 1, 1, -1}));
    EXPECT_NEAR(r.t_stat, 1.5, 1e-12);
    EXPECT_EQ(r.dof, 4);
    EXPECT_NEAR(r.p_value, 0.208, 1e-6);
}

TEST(PairedTTest, ReferencePValues) {
    // two-sided survival values cross-checked against tables
    const double nu7 = 7.0;
    const double p7 = stats_detail::incbeta(nu7 / 2.0, 0.5, nu7 / (nu7 + 4.0));  // t = 2
    EXPECT_NEAR(p7, 0.08561932856297597, 1e-8);
    const double nu12 = 12.0;
    const double p12 = stats_detail::incbeta(nu12 / 2.0, 0.5, nu12 / (nu12 + 0.25));  // t = 0.5
    EXPECT_NEAR(p12, 0.6261174762253241, 1e-8);
}

TEST(PairedTTest, ZeroVarianceRejected) {
    EXPECT_THROW(paired_t_test(from_diffs({0, 0, 0, 0})), std::invalid_argument);
    EXPECT_THROW(paired_t_test(from_diffs({2, 2, 2})), std::invalid_argument);
}

TEST(PairedTTest, SymmetricDiffsGivePOne) {
    const auto r = paired_t_test(from_diffs({-1.7, 1.7}));
    EXPECT_NEAR(r.t_stat, 0.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(PairedTTest, SymmetricUnderNegation) {
    const std::vector<double> d = {0.4, -0.2, 0.9, 0.1, 0.3, -0.6};
    std::vector<double> neg = d;
    for (double& x : neg) x = -x;
    const auto a = paired_t_test(from_diffs(d));
    const auto b = paired_t_test(from_diffs(neg));
    EXPECT_NEAR(a.t_stat, -b.t_stat, 1e-12);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
    EXPECT_GT(a.p_value, 0.0);
    EXPECT_LE(a.p_value, 1.0);
}

TEST(ChiSquare, GammaFunctionReferenceValues) {
    EXPECT_NEAR(1.0 - stats_detail::gamma_p(2.5, 5.0), 0.07523524614651217, 1e-8);
    EXPECT_NEAR(1.0 - stats_detail::gamma_p(1.5, 1.6), 0.36180502749753174, 1e-8);
    EXPECT_NEAR(stats_detail::norm_quantile(0.125), -1.1503493803760079, 1e-8);
}

TEST(ChiSquare, NormalSamplesUsuallyPass) {
    int passed = 0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        std::mt19937 rng(10'000 + seed);
        std::normal_distribution<double> dist(2.0, 0.7);
        std::vector<double> d(1000);
        for (double& x : d) x = dist(rng);
        const auto r = chi_square_normality(d, 8);
        if (r.p_value > 0.01) ++passed;
    }
    EXPECT_GE(passed, 99);
}

TEST(ChiSquare, UniformSamplesRejected) {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> d(1000);
    for (double& x : d) x = dist(rng);
    const auto r = chi_square_normality(d, 8);
    EXPECT_LT(r.p_value, 0.001);
    EXPECT_EQ(r.dof, 5);
}

TEST(ChiSquare, DegenerateInputsRejected) {
    EXPECT_THROW(chi_square_normality(std::vector<double>(100, 3.0), 8), std::invalid_argument);
    EXPECT_THROW(chi_square_normality({1.0, 2.0, 3.0}, 8), std::invalid_argument);  // too few
    std::vector<double> d(100, 0.0);
    std::mt19937 rng(1);
    std::normal_distribution<double> dist;
    for (double& x : d) x = dist(rng);
    EXPECT_THROW(chi_square_normality(d, 3), std::invalid_argument);  // dof would be 0
}
