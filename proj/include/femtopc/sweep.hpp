#pragma once

// Sweeps: expansion of a SweepSpec into points, paired baseline scheduling,
// a drop-level worker pool, aggregation into result rows, and the plain-text
// outputs (results.csv, drops.csv, users.csv, summary.txt, config.resolved.txt).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "femtopc/config.hpp"
#include "femtopc/engine.hpp"
#include "femtopc/log.hpp"
#include "femtopc/metrics.hpp"
#include "femtopc/random.hpp"

namespace femtopc {

struct SweepPoint {
    std::string axis;      // CSV label, e.g. "D@Le=10"
    double axis_value = 0.0;
    ScenarioConfig config;
};

inline void apply_axis(ScenarioConfig& c, SweepAxis axis, double v)
{
    switch (axis) {
    case SweepAxis::None: break;
    case SweepAxis::D: c.femto_distance_m = v; break;
    case SweepAxis::Le:
        c.wall_loss_mode = WallLossMode::Fixed;
        c.external_wall_loss_db = v;
        break;
    case SweepAxis::M: c.femtos_per_macrocell = static_cast<int>(std::lround(v)); break;
    }
}

inline std::vector<SweepPoint> expand_points(const SweepSpec& spec)
{
    std::vector<SweepPoint> out;
    const std::vector<double> series = spec.series_axis == SweepAxis::None ? std::vector<double>{0.0}
                                                                           : spec.series_values;
    const std::vector<double> values = spec.axis == SweepAxis::None ? std::vector<double>{0.0} : spec.values;
    for (double s : series) {
        for (double v : values) {
            SweepPoint p;
            p.config = spec.base;
            apply_axis(p.config, spec.series_axis, s);
            apply_axis(p.config, spec.axis, v);
            p.axis = to_string(spec.axis);
            if (spec.series_axis != SweepAxis::None) {
                p.axis += "@" + to_string(spec.series_axis) + "=" + detail::fmt_double(s);
            }
            p.axis_value = spec.axis == SweepAxis::None ? 0.0 : v;
            out.push_back(std::move(p));
        }
    }
    return out;
}

// Reported schemes plus the references DRMT (NoFemto) and ARFT (FixedCap)
// need, references first.
inline std::vector<Scheme> schemes_to_run(const SweepSpec& spec)
{
    std::vector<Scheme> out{Scheme::NoFemto, Scheme::FixedCap};
    for (Scheme s : spec.schemes) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    return out;
}

// Per-drop record; everything aggregation needs.
struct DropRecord {
    Scheme scheme = Scheme::FixedCap;
    std::size_t point = 0;
    int drop = 0;
    std::uint64_t seed = 0;
    double macro_throughput = 0.0;
    double femto_throughput = 0.0;
    std::size_t femto_cells = 0;
    std::vector<double> macro_users;
    std::vector<double> femto_users;
    long long pmax_checks = 0;
    long long pmax_violations = 0;
    long long cap_checks = 0;
    long long cap_violations = 0;
    double max_calibration_error = 0.0;
};

inline DropRecord to_record(const DropResult& r, std::size_t point, int drop)
{
    DropRecord d;
    d.scheme = r.scheme;
    d.point = point;
    d.drop = drop;
    d.seed = r.seed;
    d.macro_throughput = r.macro_throughput;
    d.femto_throughput = r.femto_throughput;
    d.femto_cells = r.femto_cells;
    d.macro_users = r.macro_user_throughput;
    d.femto_users = r.femto_user_throughput;
    d.pmax_checks = r.pmax_checks;
    d.pmax_violations = r.pmax_violations;
    d.cap_checks = r.cap_checks;
    d.cap_violations = r.cap_violations;
    d.max_calibration_error = r.max_calibration_error;
    return d;
}

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
    std::vector<DropRecord> drops; // ordered by (point, scheme, drop)
    double seconds = 0.0;
};

struct SweepOptions {
    unsigned parallelism = 1;
    std::string trace_path; // per-frame trace of the first reported job, empty: none
};

// Writes "frame,user,bs,tier,tx_power_dbm,sinr_db,rate_kbps,bits" for every
// transmission in every frame.
class TraceWriter {
public:
    TraceWriter(const std::string& path, const Network& net, const RateTable& rates)
        : out_(path), net_(net), rates_(rates)
    {
        if (!out_) throw std::runtime_error("cannot open trace file '" + path + "'");
        out_ << "frame,user,bs,tier,tx_power_dbm,sinr_db,rate_kbps,bits\n";
    }

    void operator()(const SlotLedger& l)
    {
        for (std::size_t u = 0; u < l.transmit_power.size(); ++u) {
            if (l.granted_rate[u] < 0) continue;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%lld,%zu,%d,%s,%.6f,%.6f,%.1f,%.0f\n", static_cast<long long>(l.frame), u,
                          net_.serving_bs[u], net_.is_femto_user(u) ? "femto" : "macro",
                          10.0 * std::log10(l.transmit_power[u]), 10.0 * std::log10(l.sinr[u]),
                          rates_[static_cast<std::size_t>(l.granted_rate[u])].rate_kbps, l.served_bits[u]);
            out_ << buf;
        }
    }

private:
    std::ofstream out_;
    const Network& net_;
    const RateTable& rates_;
};

inline SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt = {})
{
    validate(spec);
    SweepResult res;
    res.spec = spec;
    res.points = expand_points(spec);
    const auto schemes = schemes_to_run(spec);
    const auto drops = static_cast<std::size_t>(spec.base.drops);
    const std::size_t n_jobs = res.points.size() * schemes.size() * drops;
    res.drops.resize(n_jobs);

    // The first reported scheme's first drop at the first point gets traced.
    const std::size_t traced = opt.trace_path.empty()
                                   ? n_jobs
                                   : static_cast<std::size_t>(std::find(schemes.begin(), schemes.end(),
                                                                        spec.schemes.front()) -
                                                              schemes.begin()) *
                                         drops;

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto t0 = std::chrono::steady_clock::now();

    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= n_jobs) return;
            {
                std::lock_guard lock(failure_mu);
                if (failure) return;
            }
            const std::size_t point = j / (schemes.size() * drops);
            const std::size_t scheme = (j / drops) % schemes.size();
            const int drop = static_cast<int>(j % drops);
            try {
                ScenarioConfig c = res.points[point].config;
                c.scheme = schemes[scheme];
                const std::uint64_t seed = drop_seed(spec.base.seed, static_cast<std::uint64_t>(drop));
                DropSimulator sim(c, build_network(c, seed), seed);
                std::optional<TraceWriter> trace;
                if (j == traced) {
                    trace.emplace(opt.trace_path, sim.network(), sim.rates());
                    sim.set_observer([&trace](const SlotLedger& l) { (*trace)(l); });
                }
                res.drops[j] = to_record(sim.run(), point, drop);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
            const std::size_t k = done.fetch_add(1) + 1;
            log::debug("drop ", k, "/", n_jobs, " done");
            if (k % std::max<std::size_t>(1, n_jobs / 10) == 0) log::info("progress ", k, "/", n_jobs);
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(opt.parallelism, static_cast<unsigned>(n_jobs)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

struct ResultRow {
    Scheme scheme = Scheme::FixedCap;
    std::string axis;
    double axis_value = 0.0;
    std::string metric;
    Estimate estimate;
    std::size_t drops = 0;
    std::uint64_t seed = 0;
};

inline const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names = {"macro_avg_throughput", "femto_avg_throughput",
                                                   "macro_5pct_user_throughput", "femto_5pct_user_throughput",
                                                   "drmt", "arft"};
    return names;
}

// Drops of one (point, scheme), in drop order.
inline std::vector<const DropRecord*> select_drops(const SweepResult& r, std::size_t point, Scheme s)
{
    std::vector<const DropRecord*> out;
    for (const auto& d : r.drops) {
        if (d.point == point && d.scheme == s) out.push_back(&d);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->drop < b->drop; });
    return out;
}

inline std::vector<ResultRow> aggregate(const SweepResult& r)
{
    constexpr double kPercentile = 0.05;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < r.points.size(); ++p) {
        const auto ref_m = select_drops(r, p, Scheme::NoFemto);
        const auto ref_f = select_drops(r, p, Scheme::FixedCap);
        std::vector<double> tm0, tf0;
        for (auto* d : ref_m) tm0.push_back(d->macro_throughput);
        for (auto* d : ref_f) tf0.push_back(d->femto_throughput);
        for (Scheme s : r.spec.schemes) {
            const auto ds = select_drops(r, p, s);
            std::vector<double> tm, tf, mu, fu;
            for (auto* d : ds) {
                tm.push_back(d->macro_throughput);
                tf.push_back(d->femto_throughput);
                mu.insert(mu.end(), d->macro_users.begin(), d->macro_users.end());
                fu.insert(fu.end(), d->femto_users.begin(), d->femto_users.end());
            }
            auto row = [&](const std::string& metric, Estimate e) {
                rows.push_back({s, r.points[p].axis, r.points[p].axis_value, metric, e, ds.size(), r.spec.base.seed});
            };
            const Estimate missing{nan, nan, nan, 0};
            row("macro_avg_throughput", mean_ci(tm));
            row("femto_avg_throughput", mean_ci(tf));
            row("macro_5pct_user_throughput", mu.empty() ? missing : percentile_ci(mu, kPercentile));
            row("femto_5pct_user_throughput", fu.empty() ? missing : percentile_ci(fu, kPercentile));
            const bool m_ok = tm0.size() == tm.size() && !tm.empty() && mean_ci(tm0).value > 0.0;
            const bool f_ok = tf0.size() == tf.size() && !tf.empty() && mean_ci(tf0).value > 0.0;
            row("drmt", m_ok ? paired_drmt(tm0, tm) : missing);
            row("arft", f_ok ? paired_arft(tf, tf0) : missing);
        }
    }
    return rows;
}

inline const ResultRow* find_row(const std::vector<ResultRow>& rows, Scheme s, const std::string& axis, double v,
                                 const std::string& metric)
{
    for (const auto& r : rows) {
        if (r.scheme == s && r.axis == axis && r.axis_value == v && r.metric == metric) return &r;
    }
    return nullptr;
}

namespace detail {

inline std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string g10(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

} // namespace detail

inline constexpr const char* kResultsHeader = "scheme,axis,axis_value,metric,value,ci_low,ci_high,drops,seed";

inline std::string results_csv(const std::vector<ResultRow>& rows)
{
    std::string out = std::string(kResultsHeader) + "\n";
    for (const auto& r : rows) {
        out += to_string(r.scheme) + "," + r.axis + "," + detail::g10(r.axis_value) + "," + r.metric + "," +
               detail::g10(r.estimate.value) + "," + detail::g10(r.estimate.ci_low) + "," +
               detail::g10(r.estimate.ci_high) + "," + std::to_string(r.drops) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

inline std::string drops_csv(const SweepResult& r)
{
    std::string out = "scheme,point,axis,axis_value,drop,seed,macro_throughput,femto_throughput,femto_cells,"
                      "pmax_checks,pmax_violations,cap_checks,cap_violations,max_calibration_error\n";
    for (const auto& d : r.drops) {
        out += to_string(d.scheme) + "," + std::to_string(d.point) + "," + r.points[d.point].axis + "," +
               detail::g17(r.points[d.point].axis_value) + "," + std::to_string(d.drop) + "," +
               std::to_string(d.seed) + "," + detail::g17(d.macro_throughput) + "," +
               detail::g17(d.femto_throughput) + "," + std::to_string(d.femto_cells) + "," +
               std::to_string(d.pmax_checks) + "," + std::to_string(d.pmax_violations) + "," +
               std::to_string(d.cap_checks) + "," + std::to_string(d.cap_violations) + "," +
               detail::g17(d.max_calibration_error) + "\n";
    }
    return out;
}

// Centre-cell user throughputs, one row per user.
inline std::string users_csv(const SweepResult& r)
{
    std::string out = "scheme,point,drop,tier,throughput\n";
    for (const auto& d : r.drops) {
        const std::string prefix = to_string(d.scheme) + "," + std::to_string(d.point) + "," + std::to_string(d.drop);
        for (double t : d.macro_users) out += prefix + ",macro," + detail::g17(t) + "\n";
        for (double t : d.femto_users) out += prefix + ",femto," + detail::g17(t) + "\n";
    }
    return out;
}

struct CheckTotals {
    long long pmax_checks = 0, pmax_violations = 0, cap_checks = 0, cap_violations = 0;
    double max_calibration_error = 0.0;
};

inline CheckTotals check_totals(const SweepResult& r)
{
    CheckTotals t;
    for (const auto& d : r.drops) {
        t.pmax_checks += d.pmax_checks;
        t.pmax_violations += d.pmax_violations;
        t.cap_checks += d.cap_checks;
        t.cap_violations += d.cap_violations;
        t.max_calibration_error = std::max(t.max_calibration_error, d.max_calibration_error);
    }
    return t;
}

inline std::string summary_text(const SweepResult& r, const std::vector<ResultRow>& rows)
{
    std::ostringstream out;
    out << "femtopc sweep summary\n";
    out << "points: " << r.points.size() << "  drops/point: " << r.spec.base.drops
        << "  data frames/drop: " << r.spec.base.data_frames << "  seed: " << r.spec.base.seed << "\n";
    if (r.seconds > 0.0) out << "wall time: " << detail::g10(r.seconds) << " s\n";
    out << "\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %-12s %9s %12s %12s %12s %12s %8s %8s\n", "scheme", "axis", "value",
                  "Tm [kb/s]", "Tf [kb/s]", "Tm5% [kb/s]", "Tf5% [kb/s]", "DRMT", "ARFT");
    out << buf;
    for (std::size_t p = 0; p < r.points.size(); ++p) {
        for (Scheme s : r.spec.schemes) {
            auto v = [&](const char* m) {
                const auto* row = find_row(rows, s, r.points[p].axis, r.points[p].axis_value, m);
                return row ? row->estimate.value : std::numeric_limits<double>::quiet_NaN();
            };
            std::snprintf(buf, sizeof buf, "%-12s %-12s %9g %12.2f %12.2f %12.2f %12.2f %8.4f %8.4f\n",
                          to_string(s).c_str(), r.points[p].axis.c_str(), r.points[p].axis_value,
                          v("macro_avg_throughput") / 1e3, v("femto_avg_throughput") / 1e3,
                          v("macro_5pct_user_throughput") / 1e3, v("femto_5pct_user_throughput") / 1e3, v("drmt"),
                          v("arft"));
            out << buf;
        }
    }
    const CheckTotals t = check_totals(r);
    out << "\ninvariants\n";
    out << "  P_t <= Pmax:              " << t.pmax_violations << " violations in " << t.pmax_checks << " transmissions\n";
    out << "  open-loop cap:            " << t.cap_violations << " violations in " << t.cap_checks << " transmissions\n";
    out << "  closed-loop calibration:  max relative error " << detail::g10(t.max_calibration_error) << "\n";
    return out.str();
}

// Writes all outputs of a finished sweep into dir (created if needed).
inline void write_outputs(const SweepResult& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto rows = aggregate(r);
    detail::write_file(dir / "results.csv", results_csv(rows));
    detail::write_file(dir / "drops.csv", drops_csv(r));
    detail::write_file(dir / "users.csv", users_csv(r));
    detail::write_file(dir / "summary.txt", summary_text(r, rows));
    detail::write_file(dir / "config.resolved.txt", to_config_text(r.spec));
}

// Rebuilds a SweepResult from the files write_outputs produced.
inline SweepResult load_outputs(const std::filesystem::path& dir)
{
    SweepResult r;
    r.spec = load_config_file((dir / "config.resolved.txt").string());
    r.points = expand_points(r.spec);

    std::ifstream drops(dir / "drops.csv");
    if (!drops) throw std::runtime_error("cannot read '" + (dir / "drops.csv").string() + "'");
    std::string line;
    std::getline(drops, line);
    std::map<std::tuple<Scheme, std::size_t, int>, std::size_t> index;
    int lineno = 1;
    while (std::getline(drops, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 14) throw std::runtime_error("drops.csv line " + std::to_string(lineno) + ": expected 14 fields");
        DropRecord d;
        d.scheme = parse_scheme(c[0]);
        d.point = std::stoul(c[1]);
        d.drop = std::stoi(c[4]);
        d.seed = std::stoull(c[5]);
        d.macro_throughput = std::stod(c[6]);
        d.femto_throughput = std::stod(c[7]);
        d.femto_cells = std::stoul(c[8]);
        d.pmax_checks = std::stoll(c[9]);
        d.pmax_violations = std::stoll(c[10]);
        d.cap_checks = std::stoll(c[11]);
        d.cap_violations = std::stoll(c[12]);
        d.max_calibration_error = std::stod(c[13]);
        if (d.point >= r.points.size()) {
            throw std::runtime_error("drops.csv line " + std::to_string(lineno) + ": point index out of range");
        }
        index[{d.scheme, d.point, d.drop}] = r.drops.size();
        r.drops.push_back(std::move(d));
    }

    std::ifstream users(dir / "users.csv");
    if (!users) throw std::runtime_error("cannot read '" + (dir / "users.csv").string() + "'");
    std::getline(users, line);
    lineno = 1;
    while (std::getline(users, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 5) throw std::runtime_error("users.csv line " + std::to_string(lineno) + ": expected 5 fields");
        const auto it = index.find({parse_scheme(c[0]), std::stoul(c[1]), std::stoi(c[2])});
        if (it == index.end()) {
            throw std::runtime_error("users.csv line " + std::to_string(lineno) + ": no matching drop");
        }
        auto& d = r.drops[it->second];
        (c[3] == "femto" ? d.femto_users : d.macro_users).push_back(std::stod(c[4]));
    }
    return r;
}

// Figure presets: desk-scale defaults of ScenarioConfig with the sweep of
// the named figure.
inline std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

inline SweepSpec fig_preset(const std::string& name)
{
    SweepSpec s;
    if (name == "fig2" || name == "fig3") {
        s.base.femto_layout = FemtoLayout::Single;
        s.base.wall_loss_mode = WallLossMode::Fixed;
        s.base.internal_wall_loss_db = 0.0;
        s.axis = SweepAxis::D;
        s.values = {50, 100, 200, 400};
        s.series_axis = SweepAxis::Le;
        s.series_values = {1, 10};
        s.schemes = name == "fig2" ? std::vector{Scheme::FixedCap, Scheme::OpenLoop, Scheme::ClosedLoop}
                                   : std::vector{Scheme::OpenLoop, Scheme::ClosedLoop};
    } else if (name == "fig4" || name == "fig5") {
        s.base.femto_layout = FemtoLayout::Multi;
        s.base.wall_loss_mode = WallLossMode::Sampled;
        s.axis = SweepAxis::M;
        s.values = {10, 20, 30, 40, 50};
        s.schemes = {Scheme::FixedCap, Scheme::OpenLoop, Scheme::ClosedLoop};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
    }
    s.base.scheme = s.schemes.front();
    validate(s);
    return s;
}

// Metric the named figure plots.
inline std::string preset_metric(const std::string& name)
{
    if (name == "fig2") return "drmt";
    if (name == "fig3") return "arft";
    if (name == "fig4") return "macro_avg_throughput,femto_avg_throughput";
    if (name == "fig5") return "macro_5pct_user_throughput,femto_5pct_user_throughput";
    fig_preset(name); // throws with the list of presets
    return {};
}

} // namespace femtopc
