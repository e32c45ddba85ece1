#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "femtopc/channel.hpp"
#include "stats_oracles.hpp"

using namespace femtopc;

namespace {

double db(PowerLinear x) { return 10.0 * std::log10(x.value); }

} // namespace

TEST(PathLoss, OutdoorExamples)
{
    EXPECT_NEAR(db(path_loss_outdoor(1000.0, 2500.0, {})), 49.0 + 30.0 * std::log10(2500.0), 1e-9);
    EXPECT_NEAR(db(path_loss_outdoor(1000.0, 2500.0, {})), 150.94, 0.01);
    EXPECT_NEAR(db(path_loss_outdoor(100.0, 2500.0, {})), 110.94, 0.01);
    EXPECT_NEAR(db(path_loss_outdoor(1000.0, 2500.0, Decibel{8.0})), 158.94, 0.01);
}

TEST(PathLoss, OutdoorToIndoorExamples)
{
    EXPECT_NEAR(db(path_loss_outdoor_to_indoor(1000.0, 2500.0, {}, Decibel{4.0}, Decibel{7.0})), 161.94, 0.01);
    EXPECT_NEAR(db(path_loss_outdoor_to_indoor(1000.0, 2500.0, {}, Decibel{0.0}, Decibel{10.0})), 160.94, 0.01);
    EXPECT_DOUBLE_EQ(path_loss_outdoor_to_indoor(321.0, 2500.0, Decibel{3.0}, {}, {}).value,
                     path_loss_outdoor(321.0, 2500.0, Decibel{3.0}).value);
}

TEST(PathLoss, IndoorExamples)
{
    EXPECT_NEAR(db(path_loss_indoor(10.0, {}, {})), 67.0, 0.01);
    EXPECT_NEAR(db(path_loss_indoor(1.0, {}, {})), 30.0, 1e-12);
    EXPECT_NEAR(db(path_loss_indoor(10.0, {}, Decibel{4.0})), 71.0, 0.01);
}

TEST(PathLoss, DistanceClampedToOneMetre)
{
    EXPECT_DOUBLE_EQ(path_loss_indoor(0.2, {}, {}).value, path_loss_indoor(1.0, {}, {}).value);
    EXPECT_DOUBLE_EQ(path_loss_outdoor(0.0, 2500.0, {}).value, path_loss_outdoor(1.0, 2500.0, {}).value);
}

TEST(StaticLoss, RecomputesAndAddsWallsInDb)
{
    Rng rng(3);
    std::uniform_real_distribution<double> ud(1.0, 2000.0), us(-20.0, 20.0), ue(-10.0, 25.0);
    for (int i = 0; i < 1000; ++i) {
        const double d = ud(rng), s = us(rng), le = ue(rng), li = (i % 2) * 4.0;
        const auto o2i = make_static_loss(LinkClass::OutdoorToIndoor, d, 2500.0, Decibel{s}, Decibel{le}, Decibel{li});
        EXPECT_NEAR(o2i.recompute().value / o2i.total.value, 1.0, 1e-12);
        const double outdoor_db = db(path_loss_outdoor(d, 2500.0, Decibel{s}));
        EXPECT_NEAR(db(o2i.total), outdoor_db + le + li, 1e-9);
        const auto in = make_static_loss(LinkClass::Indoor, d, 2500.0, Decibel{s}, Decibel{le}, Decibel{li});
        EXPECT_EQ(in.external_wall.value, 0.0);
        EXPECT_NEAR(in.recompute().value / in.total.value, 1.0, 1e-12);
        const auto out = make_static_loss(LinkClass::Outdoor, d, 2500.0, Decibel{s}, Decibel{le}, Decibel{li});
        EXPECT_EQ(out.internal_wall.value, 0.0);
        EXPECT_NEAR(db(out.total), outdoor_db, 1e-9);
    }
}

TEST(Shadowing, FullyCorrelatedLimit)
{
    Rng rng(1);
    const auto s = sample_shadowing(19, {8.0, 1.0}, rng);
    for (const auto& x : s) EXPECT_DOUBLE_EQ(x.value, s.front().value);
}

TEST(Shadowing, IndependentLimit)
{
    Rng rng(2);
    std::vector<double> a, b;
    for (int i = 0; i < 100000; ++i) {
        const auto s = sample_shadowing(2, {8.0, 0.0}, rng);
        a.push_back(s[0].value);
        b.push_back(s[1].value);
    }
    EXPECT_NEAR(oracle::correlation(a, b), 0.0, 0.02);
}

TEST(Shadowing, PairwiseCorrelationMatchesRho)
{
    for (const auto& m : {kOutdoorShadowing, kIndoorShadowing}) {
        Rng rng(4);
        std::vector<double> a, b;
        for (int i = 0; i < 100000; ++i) {
            const auto s = sample_shadowing(3, m, rng);
            a.push_back(s[0].value);
            b.push_back(s[2].value);
        }
        EXPECT_NEAR(oracle::correlation(a, b), m.rho, 0.02);
    }
}

TEST(Shadowing, MarginalIsNormalKs)
{
    for (const auto& m : {kOutdoorShadowing, kIndoorShadowing}) {
        Rng rng(8);
        std::vector<double> v;
        for (int i = 0; i < 100000; ++i) v.push_back(sample_shadowing(1, m, rng)[0].value);
        EXPECT_LT(oracle::ks_normal(v, 0.0, m.sigma_db), oracle::ks_critical_001(v.size()));
    }
}

TEST(WallLoss, FixedModeOverridesSampling)
{
    WallLossModel m;
    m.fixed = true;
    m.fixed_external = Decibel{10.0};
    m.fixed_internal = Decibel{0.0};
    Rng rng(1);
    const auto w = sample_wall_losses(m, rng);
    EXPECT_EQ(w.external.value, 10.0);
    EXPECT_EQ(w.internal.value, 0.0);
}

TEST(WallLoss, SampledDistribution)
{
    WallLossModel m;
    Rng rng(6);
    std::vector<double> le;
    int fours = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto w = sample_wall_losses(m, rng);
        ASSERT_TRUE(w.internal.value == 0.0 || w.internal.value == 4.0);
        fours += w.internal.value == 4.0;
        le.push_back(w.external.value);
    }
    EXPECT_NEAR(oracle::mean(le), 7.0, 0.1);
    EXPECT_LT(oracle::ks_normal(le, 7.0, 6.0), oracle::ks_critical_001(le.size()));
    EXPECT_NEAR(fours / 100000.0, 0.5, 0.01);
}

TEST(Doppler, ThreeKmhAt2500MHz)
{
    EXPECT_NEAR(doppler_hz(3.0, 2500.0), 6.94, 0.01);
    EXPECT_NEAR(doppler_hz(3.0, 2500.0), (3.0 / 3.6) / (299792458.0 / 2.5e9), 1e-12);
}

// Ensemble of independent links sampled at 1 ms for 1 s each: 10^6 samples.
class JakesEnsemble : public ::testing::Test {
protected:
    static constexpr int kLinks = 1000;
    static constexpr int kSamples = 1000;
    static constexpr double kDt = 1e-3;

    void SetUp() override
    {
        fd_ = doppler_hz(3.0, 2500.0);
        auto spectrum = std::make_shared<const JakesSpectrum>(fd_, 16);
        Rng rng(2024);
        env_.resize(static_cast<std::size_t>(kLinks) * kSamples);
        for (int l = 0; l < kLinks; ++l) {
            JakesFading f(spectrum, rng);
            for (int s = 0; s < kSamples; ++s) {
                env_[static_cast<std::size_t>(l) * kSamples + s] = f.envelope();
                fading_advance(f, kDt);
            }
        }
    }

    std::complex<double> autocorrelation(int lag) const
    {
        std::complex<double> acc{};
        std::size_t n = 0;
        for (int l = 0; l < kLinks; ++l) {
            const auto* e = &env_[static_cast<std::size_t>(l) * kSamples];
            for (int s = 0; s + lag < kSamples; ++s) {
                acc += e[s + lag] * std::conj(e[s]);
                ++n;
            }
        }
        return acc / static_cast<double>(n);
    }

    double fd_ = 0.0;
    std::vector<std::complex<double>> env_;
};

TEST_F(JakesEnsemble, MeanPowerIsOne)
{
    double p = 0.0;
    for (const auto& h : env_) p += std::norm(h);
    EXPECT_NEAR(p / static_cast<double>(env_.size()), 1.0, 0.01);
}

TEST_F(JakesEnsemble, AutocorrelationFollowsBesselJ0)
{
    const double r0 = autocorrelation(0).real();
    EXPECT_NEAR(autocorrelation(0).real() / r0, 1.0, 1e-15);
    const int max_lag = static_cast<int>(0.5 / fd_ / kDt);
    for (int lag = 0; lag <= max_lag; lag += 4) {
        const double tau = lag * kDt;
        const double expected = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fd_ * tau);
        EXPECT_NEAR(autocorrelation(lag).real() / r0, expected, 0.05) << "tau f_d = " << tau * fd_;
    }
}

TEST(JakesFading, AdvanceMovesTime)
{
    Rng rng(1);
    JakesFading f(6.94, rng);
    EXPECT_EQ(f.time(), 0.0);
    const double g = fading_advance(f, 0.01);
    EXPECT_DOUBLE_EQ(f.time(), 0.01);
    EXPECT_DOUBLE_EQ(g, f.gain());
    EXPECT_GE(g, 0.0);
}

TEST(FadingField, ModesAgreeOnStatistics)
{
    const double fd = doppler_hz(3.0, 2500.0);
    for (auto mode : {FadingField::Mode::PerLink, FadingField::Mode::TraceBank}) {
        FadingField f(mode, 7, 40, 25, 19, fd, 4.0 / 600.0, 16);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t u = 0; u < 40; ++u) {
            for (std::size_t b = 0; b < 25; ++b) {
                for (std::int64_t t = 0; t < 400; t += 3) {
                    sum += f.uplink(u, b, t);
                    ++n;
                }
            }
        }
        EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 0.05);
        // Deterministic per seed.
        FadingField g(mode, 7, 40, 25, 19, fd, 4.0 / 600.0, 16);
        EXPECT_EQ(f.uplink(3, 4, 17), g.uplink(3, 4, 17));
        EXPECT_EQ(f.downlink(2, 5, 9), g.downlink(2, 5, 9));
    }
    FadingField flat(FadingField::Mode::Flat, 7, 4, 4, 2, fd, 4.0 / 600.0, 16);
    EXPECT_EQ(flat.uplink(1, 2, 3), 1.0);
    EXPECT_EQ(flat.downlink(1, 2, 3), 1.0);
}
