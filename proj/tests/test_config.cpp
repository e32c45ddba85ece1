#include <gtest/gtest.h>

#include "femtopc/config.hpp"

using namespace femtopc;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, DefaultsValidate)
{
    ScenarioConfig c;
    EXPECT_NO_THROW(validate(c));
    EXPECT_DOUBLE_EQ(c.frame_s(), 4.0 / 600.0);
}

TEST(Config, ParsesKeysCommentsAndLists)
{
    const auto spec = parse_config_text(R"(
# single femto D sweep
femto_layout = single
wall_loss_mode = fixed
external_wall_loss_db = 10   # dB
sweep_axis = D
sweep_values = 50, 100, 200
schemes = open_loop, closed_loop
drops = 3
femto_azimuth_deg = 90
)");
    EXPECT_EQ(spec.base.femto_layout, FemtoLayout::Single);
    EXPECT_EQ(spec.base.wall_loss_mode, WallLossMode::Fixed);
    EXPECT_DOUBLE_EQ(spec.base.external_wall_loss_db, 10.0);
    EXPECT_EQ(spec.axis, SweepAxis::D);
    EXPECT_EQ(spec.values, (std::vector<double>{50, 100, 200}));
    EXPECT_EQ(spec.schemes, (std::vector<Scheme>{Scheme::OpenLoop, Scheme::ClosedLoop}));
    EXPECT_EQ(spec.base.drops, 3);
    ASSERT_TRUE(spec.base.femto_azimuth_deg.has_value());
    EXPECT_DOUBLE_EQ(*spec.base.femto_azimuth_deg, 90.0);
}

TEST(Config, SingleSchemeWhenListAbsent)
{
    const auto spec = parse_config_text("scheme = closed_loop\n");
    EXPECT_EQ(spec.schemes, std::vector<Scheme>{Scheme::ClosedLoop});
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_NE(error_of("bogus_key = 1").find("bogus_key"), std::string::npos);
    EXPECT_NE(error_of("drops = 0").find("drops"), std::string::npos);
    EXPECT_NE(error_of("drops = many").find("drops"), std::string::npos);
    EXPECT_NE(error_of("rho_outdoor = 1.5").find("rho_outdoor"), std::string::npos);
    EXPECT_NE(error_of("scheme = fastest").find("scheme"), std::string::npos);
    EXPECT_NE(error_of("no equals sign").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("schemes = no_femto").find("schemes"), std::string::npos);
}

TEST(Config, SweepShapeRules)
{
    EXPECT_NE(error_of("sweep_axis = D\nsweep_values = 100, 50\nfemto_layout = single").find("sweep_values"),
              std::string::npos);
    EXPECT_NE(error_of("sweep_axis = D\nsweep_values = 50\nfemto_layout = multi").find("sweep_axis"),
              std::string::npos);
    EXPECT_NE(error_of("sweep_axis = M\nsweep_values = 10\nfemto_layout = single").find("sweep_axis"),
              std::string::npos);
    EXPECT_NE(error_of("sweep_axis = M\nsweep_values =\nfemto_layout = multi").find("sweep_values"),
              std::string::npos);
}

TEST(Config, ResolvedEchoRoundTrips)
{
    auto spec = parse_config_text("femto_layout = multi\nsweep_axis = M\nsweep_values = 10,30\n"
                                  "schemes = fixed_cap,open_loop\nseed = 99\nalpha = 2.5\n");
    const std::string text = to_config_text(spec);
    const auto again = parse_config_text(text);
    EXPECT_EQ(to_config_text(again), text);
    EXPECT_EQ(again.base.seed, 99u);
    EXPECT_DOUBLE_EQ(again.base.alpha, 2.5);
    EXPECT_DOUBLE_EQ(again.base.cell_radius_m, spec.base.cell_radius_m);
}
