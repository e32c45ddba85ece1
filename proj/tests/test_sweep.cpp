#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "femtopc/sweep.hpp"

using namespace femtopc;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepSpec tiny_m_sweep()
{
    SweepSpec s = fig_preset("fig4");
    s.base.drops = 2;
    s.base.warmup_frames = 20;
    s.base.ni_average_frames = 10;
    s.base.data_frames = 30;
    s.values = {1, 2, 3, 4, 5};
    return s;
}

SweepSpec tiny_d_sweep()
{
    SweepSpec s = fig_preset("fig2");
    s.base.drops = 3;
    s.base.warmup_frames = 20;
    s.base.ni_average_frames = 10;
    s.base.data_frames = 40;
    s.values = {50, 200};
    return s;
}

std::filesystem::path fresh_dir(const std::string& name)
{
    const auto dir = std::filesystem::path(::testing::TempDir()) / name;
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(Presets, Figures)
{
    const auto f2 = fig_preset("fig2");
    EXPECT_EQ(f2.schemes, (std::vector{Scheme::FixedCap, Scheme::OpenLoop, Scheme::ClosedLoop}));
    EXPECT_EQ(f2.axis, SweepAxis::D);
    EXPECT_EQ(f2.values, (std::vector<double>{50, 100, 200, 400}));
    EXPECT_EQ(f2.series_values, (std::vector<double>{1, 10}));
    EXPECT_EQ(f2.base.internal_wall_loss_db, 0.0);
    EXPECT_EQ(f2.base.wall_loss_mode, WallLossMode::Fixed);
    EXPECT_EQ(preset_metric("fig2"), "drmt");

    const auto f3 = fig_preset("fig3");
    EXPECT_EQ(f3.schemes, (std::vector{Scheme::OpenLoop, Scheme::ClosedLoop}));
    EXPECT_EQ(preset_metric("fig3"), "arft");

    const auto f5 = fig_preset("fig5");
    EXPECT_EQ(f5.axis, SweepAxis::M);
    EXPECT_EQ(f5.base.femto_layout, FemtoLayout::Multi);
    EXPECT_EQ(f5.base.wall_loss_mode, WallLossMode::Sampled);
    EXPECT_NE(preset_metric("fig5").find("5pct"), std::string::npos);

    try {
        fig_preset("fig9");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("fig2, fig3, fig4, fig5"), std::string::npos);
    }
}

TEST(ExpandPoints, SeriesTimesValues)
{
    const auto pts = expand_points(fig_preset("fig2"));
    ASSERT_EQ(pts.size(), 8u);
    EXPECT_EQ(pts[0].axis, "D@Le=1");
    EXPECT_EQ(pts[0].axis_value, 50.0);
    EXPECT_EQ(pts[0].config.external_wall_loss_db, 1.0);
    EXPECT_EQ(pts[7].axis, "D@Le=10");
    EXPECT_EQ(pts[7].config.femto_distance_m, 400.0);
    EXPECT_EQ(pts[7].config.external_wall_loss_db, 10.0);

    SweepSpec single;
    single.schemes = {Scheme::OpenLoop};
    const auto one = expand_points(single);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].axis, "none");
}

TEST(SchemesToRun, BaselinesFirst)
{
    const auto s = schemes_to_run(fig_preset("fig3"));
    EXPECT_EQ(s, (std::vector{Scheme::NoFemto, Scheme::FixedCap, Scheme::OpenLoop, Scheme::ClosedLoop}));
}

TEST(RunSweep, RowCountsForMSweep)
{
    const auto r = run_sweep(tiny_m_sweep());
    const auto rows = aggregate(r);
    for (const auto& m : metric_names()) {
        EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [&](const ResultRow& x) { return x.metric == m; }), 15);
    }
    const auto csv = results_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "scheme,axis,axis_value,metric,value,ci_low,ci_high,drops,seed");
}

TEST(RunSweep, SingleScenarioOnePoint)
{
    SweepSpec s;
    s.base.femto_layout = FemtoLayout::Single;
    s.base.drops = 1;
    s.base.warmup_frames = 10;
    s.base.ni_average_frames = 5;
    s.base.data_frames = 10;
    s.schemes = {Scheme::OpenLoop};
    const auto rows = aggregate(run_sweep(s));
    EXPECT_EQ(rows.size(), metric_names().size());
    for (const auto& r : rows) { EXPECT_EQ(r.axis, "none"); }
}

TEST(RunSweep, IdenticalAcrossParallelismAndRuns)
{
    const auto spec = tiny_d_sweep();
    const auto a = fresh_dir("sweep_a"), b = fresh_dir("sweep_b"), c = fresh_dir("sweep_c");
    write_outputs(run_sweep(spec, {1, ""}), a);
    write_outputs(run_sweep(spec, {3, ""}), b);
    write_outputs(run_sweep(spec, {1, ""}), c);
    for (const char* f : {"results.csv", "drops.csv", "users.csv", "config.resolved.txt"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    }
}

TEST(RunSweep, SchemesShareDropGeometry)
{
    const auto r = run_sweep(tiny_d_sweep());
    for (const auto& d : r.drops) {
        for (const auto& e : r.drops) {
            if (d.point == e.point && d.drop == e.drop) { EXPECT_EQ(d.seed, e.seed); }
        }
    }
}

TEST(Report, ReaggregatesToIdenticalResults)
{
    const auto dir = fresh_dir("sweep_report");
    const auto r = run_sweep(tiny_d_sweep());
    write_outputs(r, dir);
    const auto loaded = load_outputs(dir);
    EXPECT_EQ(results_csv(aggregate(loaded)), slurp(dir / "results.csv"));
    EXPECT_EQ(loaded.drops.size(), r.drops.size());
}

TEST(Report, RejectsCorruptInputs)
{
    const auto dir = fresh_dir("sweep_corrupt");
    write_outputs(run_sweep(tiny_d_sweep()), dir);
    std::ofstream(dir / "users.csv", std::ios::app) << "open_loop,99,0,macro,1\n";
    EXPECT_THROW(load_outputs(dir), std::runtime_error);
}

TEST(Trace, WritesTransmissions)
{
    const auto dir = fresh_dir("sweep_trace");
    std::filesystem::create_directories(dir);
    auto spec = tiny_d_sweep();
    spec.base.drops = 1;
    run_sweep(spec, {1, (dir / "trace.csv").string()});
    std::ifstream in(dir / "trace.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "frame,user,bs,tier,tx_power_dbm,sinr_db,rate_kbps,bits");
    EXPECT_FALSE(first.empty());
}
