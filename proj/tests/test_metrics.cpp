#include <gtest/gtest.h>

#include <numeric>

#include "femtopc/metrics.hpp"

using namespace femtopc;

TEST(Drmt, Examples)
{
    EXPECT_DOUBLE_EQ(drmt(1000.0, 950.0), 0.05);
    EXPECT_DOUBLE_EQ(drmt(1000.0, 1000.0), 0.0);
    EXPECT_THROW(drmt(0.0, 10.0), DomainError);
}

TEST(Arft, Examples)
{
    EXPECT_DOUBLE_EQ(arft(730.0, 730.0), 1.0);
    EXPECT_DOUBLE_EQ(arft(500.0, 1000.0), 0.5);
    EXPECT_THROW(arft(1.0, 0.0), DomainError);
}

TEST(Ratios, ScaleInvariant)
{
    for (double c : {1e-3, 2.0, 7.5e6}) {
        EXPECT_NEAR(drmt(c * 1234.0, c * 1111.0), drmt(1234.0, 1111.0), 1e-15);
        EXPECT_NEAR(arft(c * 812.0, c * 990.0), arft(812.0, 990.0), 1e-15);
    }
}

TEST(Percentile, Examples)
{
    EXPECT_DOUBLE_EQ(percentile_user_throughput(std::vector<double>(20, 42.0), 0.05), 42.0);
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    EXPECT_NEAR(percentile_user_throughput(v, 0.05), 5.95, 1e-12);
    std::vector<double> shuffled = {9.0, 3.0, 7.0, 1.0};
    EXPECT_EQ(percentile_user_throughput(shuffled, 0.0), 1.0);
    EXPECT_EQ(percentile_user_throughput(shuffled, 1.0), 9.0);
    EXPECT_THROW(percentile_user_throughput({}, 0.05), std::invalid_argument);
}

TEST(MeanCi, NormalApproximation)
{
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    const auto e = mean_ci(x);
    EXPECT_DOUBLE_EQ(e.value, 3.0);
    const double half = 1.959963984540054 * std::sqrt(2.5) / std::sqrt(5.0);
    EXPECT_NEAR(e.ci_low, 3.0 - half, 1e-12);
    EXPECT_NEAR(e.ci_high, 3.0 + half, 1e-12);
    EXPECT_EQ(e.n, 5u);
}

TEST(PairedRatios, PointValueAndInterval)
{
    const std::vector<double> ref = {100.0, 200.0, 300.0};
    const std::vector<double> alt = {90.0, 190.0, 280.0};
    const auto d = paired_drmt(ref, alt);
    EXPECT_NEAR(d.value, (600.0 - 560.0) / 600.0, 1e-12);
    EXPECT_LE(d.ci_low, d.value);
    EXPECT_GE(d.ci_high, d.value);
    const auto a = paired_arft(alt, ref);
    EXPECT_NEAR(a.value, 560.0 / 600.0, 1e-12);
    // Identical series: zero-width interval at the identity.
    const auto same = paired_drmt(ref, ref);
    EXPECT_EQ(same.value, 0.0);
    EXPECT_EQ(same.ci_low, 0.0);
    EXPECT_EQ(same.ci_high, 0.0);
}

TEST(PercentileCi, BracketsTheEstimate)
{
    std::vector<double> v(400);
    std::iota(v.begin(), v.end(), 1.0);
    const auto e = percentile_ci(v, 0.05);
    EXPECT_LE(e.ci_low, e.value);
    EXPECT_GE(e.ci_high, e.value);
    EXPECT_LT(e.ci_low, e.ci_high);
}

TEST(Spearman, RankCorrelation)
{
    const std::vector<double> x = {50, 100, 200, 400};
    EXPECT_NEAR(spearman(x, std::vector<double>{0.4, 0.3, 0.2, 0.1}), -1.0, 1e-12);
    EXPECT_NEAR(spearman(x, std::vector<double>{1, 2, 3, 4}), 1.0, 1e-12);
    // 1 - 6 sum d^2 / (n (n^2 - 1)) for distinct ranks: d = (0, 1, -1, 0).
    EXPECT_NEAR(spearman(x, std::vector<double>{1, 3, 2, 4}), 1.0 - 6.0 * 2.0 / (4.0 * 15.0), 1e-12);
    EXPECT_THROW(spearman(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}
