#pragma once

// Scenario configuration and its flat "key = value" text form.
//
// Every key mirrors a ScenarioConfig / SweepSpec field name.  Unknown keys,
// malformed values and failed validation raise ConfigError naming the field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace femtopc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { FixedCap, OpenLoop, ClosedLoop, NoFemto };
enum class FemtoLayout { Single, Multi };
enum class WallLossMode { Sampled, Fixed };
enum class FadingModel { Auto, PerLink, TraceBank, None };
enum class SweepAxis { None, D, Le, M };

inline std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::FixedCap: return "fixed_cap";
    case Scheme::OpenLoop: return "open_loop";
    case Scheme::ClosedLoop: return "closed_loop";
    case Scheme::NoFemto: return "no_femto";
    }
    return "?";
}

inline std::string to_string(FemtoLayout l) { return l == FemtoLayout::Single ? "single" : "multi"; }
inline std::string to_string(WallLossMode m) { return m == WallLossMode::Fixed ? "fixed" : "sampled"; }

inline std::string to_string(FadingModel m)
{
    switch (m) {
    case FadingModel::Auto: return "auto";
    case FadingModel::PerLink: return "per_link";
    case FadingModel::TraceBank: return "trace_bank";
    case FadingModel::None: return "none";
    }
    return "?";
}

inline std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::D: return "D";
    case SweepAxis::Le: return "Le";
    case SweepAxis::M: return "M";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view s)
{
    if (s == "fixed_cap") return Scheme::FixedCap;
    if (s == "open_loop") return Scheme::OpenLoop;
    if (s == "closed_loop") return Scheme::ClosedLoop;
    if (s == "no_femto") return Scheme::NoFemto;
    throw ConfigError("unknown scheme '" + std::string(s) +
                      "' (expected fixed_cap|open_loop|closed_loop|no_femto)");
}

inline SweepAxis parse_axis(std::string_view s)
{
    if (s == "none") return SweepAxis::None;
    if (s == "D") return SweepAxis::D;
    if (s == "Le") return SweepAxis::Le;
    if (s == "M") return SweepAxis::M;
    throw ConfigError("unknown sweep axis '" + std::string(s) + "' (expected none|D|Le|M)");
}

struct ScenarioConfig {
    Scheme scheme = Scheme::ClosedLoop;

    // Femtocell placement: one building at distance D from the centre BS, or
    // 19*M buildings spread over the whole layout.
    FemtoLayout femto_layout = FemtoLayout::Multi;
    int femtos_per_macrocell = 10;
    double femto_distance_m = 100.0;
    std::optional<double> femto_azimuth_deg; // unset: uniform azimuth

    WallLossMode wall_loss_mode = WallLossMode::Sampled;
    double external_wall_loss_db = 10.0; // fixed mode only
    double internal_wall_loss_db = 0.0;  // fixed mode only
    double external_wall_mean_db = 7.0;
    double external_wall_sd_db = 6.0;
    double internal_wall_step_db = 4.0;
    double internal_wall_probability = 0.5;

    int drops = 20;
    int warmup_frames = 200;
    int ni_average_frames = 100;
    int data_frames = 2000;
    std::uint64_t seed = 1;

    double bandwidth_hz = 1.25e6;
    double carrier_mhz = 2500.0;
    double noise_dbm = -109.0;
    double alpha = 3.0;
    double pmax_dbm = 23.0;
    double antenna_gain_dbi = 0.0;
    double macro_eirp_dbm = 43.0;
    int neighbor_list_size = 3;

    double cell_radius_m = 800.0 / std::numbers::sqrt3;
    int macro_users_per_cell = 10;
    int femto_users_per_building = 4;
    double building_size_m = 50.0;
    double min_distance_m = 1.0;

    double sigma_outdoor_db = 8.0;
    double rho_outdoor = 0.5;
    double sigma_indoor_db = 10.0;
    double rho_indoor = 0.7;

    double speed_kmh = 3.0;
    double slot_s = 1.0 / 600.0;
    int slots_per_frame = 4;
    FadingModel fading_model = FadingModel::Auto;
    int jakes_oscillators = 16;

    double pf_time_constant = 100.0;
    int broadcast_delay_frames = 1;

    std::string rate_table; // empty: built-in DO Rev. A table

    double frame_s() const { return slot_s * slots_per_frame; }
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;
    // Optional second, outer axis; only Le is meaningful (Figs. 2/3 draw one
    // D-curve per external wall loss).
    SweepAxis series_axis = SweepAxis::None;
    std::vector<double> series_values;
    std::vector<Scheme> schemes;
    ScenarioConfig base;
};

inline void validate(const ScenarioConfig& c)
{
    auto require = [](bool ok, const char* field, const std::string& why) {
        if (!ok) {
            throw ConfigError(std::string("invalid '") + field + "': " + why);
        }
    };
    auto finite = [](double v) { return std::isfinite(v); };
    require(c.drops >= 1, "drops", "must be >= 1");
    require(c.data_frames >= 1, "data_frames", "must be >= 1");
    require(c.warmup_frames >= 1, "warmup_frames", "must be >= 1");
    require(c.ni_average_frames >= 1 && c.ni_average_frames <= c.warmup_frames, "ni_average_frames",
            "must be in [1, warmup_frames]");
    require(c.femtos_per_macrocell >= 0, "femtos_per_macrocell", "must be >= 0");
    require(finite(c.femto_distance_m) && c.femto_distance_m > 0.0, "femto_distance_m", "must be > 0");
    require(c.cell_radius_m > 0.0 && finite(c.cell_radius_m), "cell_radius_m", "must be > 0");
    require(c.macro_users_per_cell >= 0, "macro_users_per_cell", "must be >= 0");
    require(c.femto_users_per_building >= 1, "femto_users_per_building", "must be >= 1");
    require(c.building_size_m > 0.0, "building_size_m", "must be > 0");
    require(c.min_distance_m > 0.0, "min_distance_m", "must be > 0");
    require(c.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
    require(c.carrier_mhz > 0.0, "carrier_mhz", "must be > 0");
    require(finite(c.noise_dbm), "noise_dbm", "must be finite");
    require(c.alpha > 0.0 && finite(c.alpha), "alpha", "must be > 0");
    require(finite(c.pmax_dbm), "pmax_dbm", "must be finite");
    require(c.neighbor_list_size >= 1, "neighbor_list_size", "must be >= 1");
    require(c.sigma_outdoor_db > 0.0, "sigma_outdoor_db", "must be > 0");
    require(c.sigma_indoor_db > 0.0, "sigma_indoor_db", "must be > 0");
    require(c.rho_outdoor >= 0.0 && c.rho_outdoor <= 1.0, "rho_outdoor", "must be in [0, 1]");
    require(c.rho_indoor >= 0.0 && c.rho_indoor <= 1.0, "rho_indoor", "must be in [0, 1]");
    require(c.external_wall_sd_db >= 0.0, "external_wall_sd_db", "must be >= 0");
    require(c.internal_wall_probability >= 0.0 && c.internal_wall_probability <= 1.0,
            "internal_wall_probability", "must be in [0, 1]");
    require(c.speed_kmh >= 0.0, "speed_kmh", "must be >= 0");
    require(c.slot_s > 0.0, "slot_s", "must be > 0");
    require(c.slots_per_frame >= 1, "slots_per_frame", "must be >= 1");
    require(c.jakes_oscillators >= 8, "jakes_oscillators", "must be >= 8");
    require(c.pf_time_constant >= 1.0, "pf_time_constant", "must be >= 1");
    require(c.broadcast_delay_frames >= 0, "broadcast_delay_frames", "must be >= 0");
    if (c.femto_layout == FemtoLayout::Single) {
        require(c.femto_distance_m + c.building_size_m / 2.0 < c.cell_radius_m, "femto_distance_m",
                "building must fit inside the centre cell");
    }
}

inline void validate(const SweepSpec& s)
{
    validate(s.base);
    if (s.schemes.empty()) {
        throw ConfigError("invalid 'schemes': at least one scheme required");
    }
    for (Scheme sc : s.schemes) {
        if (sc == Scheme::NoFemto) {
            throw ConfigError("invalid 'schemes': no_femto is the DRMT reference run, not a sweep scheme");
        }
    }
    auto increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) return false;
        }
        return true;
    };
    if (s.axis != SweepAxis::None) {
        if (s.values.empty() || !increasing(s.values)) {
            throw ConfigError("invalid 'sweep_values': must be nonempty and strictly increasing");
        }
        const bool single = s.base.femto_layout == FemtoLayout::Single;
        if ((s.axis == SweepAxis::D || s.axis == SweepAxis::Le) && !single) {
            throw ConfigError("invalid 'sweep_axis': D and Le sweeps require femto_layout = single");
        }
        if (s.axis == SweepAxis::M && single) {
            throw ConfigError("invalid 'sweep_axis': M sweep requires femto_layout = multi");
        }
    }
    if (s.series_axis != SweepAxis::None) {
        if (s.series_axis != SweepAxis::Le) {
            throw ConfigError("invalid 'series_axis': only Le is supported");
        }
        if (s.base.femto_layout != FemtoLayout::Single || s.axis == SweepAxis::Le) {
            throw ConfigError("invalid 'series_axis': Le series needs a single-femto D sweep");
        }
        if (s.series_values.empty() || !increasing(s.series_values)) {
            throw ConfigError("invalid 'series_values': must be nonempty and strictly increasing");
        }
    }
}

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string fmt_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid '" + key + "': expected a number, got '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("invalid '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Field {
    const char* name;
    std::function<void(SweepSpec&, const std::string&)> set;
    std::function<std::string(const SweepSpec&)> get;
};

#define FEMTOPC_DOUBLE(field)                                                                    \
    Field{#field, [](SweepSpec& s, const std::string& v) { s.base.field = parse_double(#field, v); }, \
          [](const SweepSpec& s) { return fmt_double(s.base.field); }}
#define FEMTOPC_INT(field)                                                                       \
    Field{#field,                                                                                \
          [](SweepSpec& s, const std::string& v) {                                               \
              s.base.field = static_cast<decltype(s.base.field)>(parse_int(#field, v));          \
          },                                                                                     \
          [](const SweepSpec& s) { return std::to_string(s.base.field); }}

inline const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        Field{"scheme", [](SweepSpec& s, const std::string& v) { s.base.scheme = parse_scheme(v); },
              [](const SweepSpec& s) { return to_string(s.base.scheme); }},
        Field{"femto_layout",
              [](SweepSpec& s, const std::string& v) {
                  if (v == "single") s.base.femto_layout = FemtoLayout::Single;
                  else if (v == "multi") s.base.femto_layout = FemtoLayout::Multi;
                  else throw ConfigError("invalid 'femto_layout': expected single|multi, got '" + v + "'");
              },
              [](const SweepSpec& s) { return to_string(s.base.femto_layout); }},
        FEMTOPC_INT(femtos_per_macrocell),
        FEMTOPC_DOUBLE(femto_distance_m),
        Field{"femto_azimuth_deg",
              [](SweepSpec& s, const std::string& v) {
                  if (v == "random") s.base.femto_azimuth_deg.reset();
                  else s.base.femto_azimuth_deg = parse_double("femto_azimuth_deg", v);
              },
              [](const SweepSpec& s) {
                  return s.base.femto_azimuth_deg ? fmt_double(*s.base.femto_azimuth_deg)
                                                  : std::string("random");
              }},
        Field{"wall_loss_mode",
              [](SweepSpec& s, const std::string& v) {
                  if (v == "fixed") s.base.wall_loss_mode = WallLossMode::Fixed;
                  else if (v == "sampled") s.base.wall_loss_mode = WallLossMode::Sampled;
                  else throw ConfigError("invalid 'wall_loss_mode': expected fixed|sampled, got '" + v + "'");
              },
              [](const SweepSpec& s) { return to_string(s.base.wall_loss_mode); }},
        FEMTOPC_DOUBLE(external_wall_loss_db),
        FEMTOPC_DOUBLE(internal_wall_loss_db),
        FEMTOPC_DOUBLE(external_wall_mean_db),
        FEMTOPC_DOUBLE(external_wall_sd_db),
        FEMTOPC_DOUBLE(internal_wall_step_db),
        FEMTOPC_DOUBLE(internal_wall_probability),
        FEMTOPC_INT(drops),
        FEMTOPC_INT(warmup_frames),
        FEMTOPC_INT(ni_average_frames),
        FEMTOPC_INT(data_frames),
        Field{"seed",
              [](SweepSpec& s, const std::string& v) {
                  s.base.seed = static_cast<std::uint64_t>(parse_int("seed", v));
              },
              [](const SweepSpec& s) { return std::to_string(s.base.seed); }},
        FEMTOPC_DOUBLE(bandwidth_hz),
        FEMTOPC_DOUBLE(carrier_mhz),
        FEMTOPC_DOUBLE(noise_dbm),
        FEMTOPC_DOUBLE(alpha),
        FEMTOPC_DOUBLE(pmax_dbm),
        FEMTOPC_DOUBLE(antenna_gain_dbi),
        FEMTOPC_DOUBLE(macro_eirp_dbm),
        FEMTOPC_INT(neighbor_list_size),
        FEMTOPC_DOUBLE(cell_radius_m),
        FEMTOPC_INT(macro_users_per_cell),
        FEMTOPC_INT(femto_users_per_building),
        FEMTOPC_DOUBLE(building_size_m),
        FEMTOPC_DOUBLE(min_distance_m),
        FEMTOPC_DOUBLE(sigma_outdoor_db),
        FEMTOPC_DOUBLE(rho_outdoor),
        FEMTOPC_DOUBLE(sigma_indoor_db),
        FEMTOPC_DOUBLE(rho_indoor),
        FEMTOPC_DOUBLE(speed_kmh),
        FEMTOPC_DOUBLE(slot_s),
        FEMTOPC_INT(slots_per_frame),
        Field{"fading_model",
              [](SweepSpec& s, const std::string& v) {
                  if (v == "auto") s.base.fading_model = FadingModel::Auto;
                  else if (v == "per_link") s.base.fading_model = FadingModel::PerLink;
                  else if (v == "trace_bank") s.base.fading_model = FadingModel::TraceBank;
                  else if (v == "none") s.base.fading_model = FadingModel::None;
                  else throw ConfigError("invalid 'fading_model': expected auto|per_link|trace_bank|none, got '" + v + "'");
              },
              [](const SweepSpec& s) { return to_string(s.base.fading_model); }},
        FEMTOPC_INT(jakes_oscillators),
        FEMTOPC_DOUBLE(pf_time_constant),
        FEMTOPC_INT(broadcast_delay_frames),
        Field{"rate_table", [](SweepSpec& s, const std::string& v) { s.base.rate_table = v; },
              [](const SweepSpec& s) { return s.base.rate_table; }},
        Field{"sweep_axis", [](SweepSpec& s, const std::string& v) { s.axis = parse_axis(v); },
              [](const SweepSpec& s) { return to_string(s.axis); }},
        Field{"sweep_values",
              [](SweepSpec& s, const std::string& v) {
                  s.values.clear();
                  for (const auto& item : split_list(v)) s.values.push_back(parse_double("sweep_values", item));
              },
              [](const SweepSpec& s) {
                  std::string out;
                  for (std::size_t i = 0; i < s.values.size(); ++i) out += (i ? "," : "") + fmt_double(s.values[i]);
                  return out;
              }},
        Field{"series_axis", [](SweepSpec& s, const std::string& v) { s.series_axis = parse_axis(v); },
              [](const SweepSpec& s) { return to_string(s.series_axis); }},
        Field{"series_values",
              [](SweepSpec& s, const std::string& v) {
                  s.series_values.clear();
                  for (const auto& item : split_list(v)) s.series_values.push_back(parse_double("series_values", item));
              },
              [](const SweepSpec& s) {
                  std::string out;
                  for (std::size_t i = 0; i < s.series_values.size(); ++i)
                      out += (i ? "," : "") + fmt_double(s.series_values[i]);
                  return out;
              }},
        Field{"schemes",
              [](SweepSpec& s, const std::string& v) {
                  s.schemes.clear();
                  for (const auto& item : split_list(v)) s.schemes.push_back(parse_scheme(item));
              },
              [](const SweepSpec& s) {
                  std::string out;
                  for (std::size_t i = 0; i < s.schemes.size(); ++i) out += (i ? "," : "") + to_string(s.schemes[i]);
                  return out;
              }},
    };
    return table;
}

#undef FEMTOPC_DOUBLE
#undef FEMTOPC_INT

} // namespace detail

// Parses the flat text form.  Lines are `key = value`; '#' starts a comment.
// When `schemes` is absent the single `scheme` is used.
inline SweepSpec parse_config_text(std::string_view text)
{
    SweepSpec spec;
    bool schemes_given = false;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        bool found = false;
        for (const auto& f : detail::fields()) {
            if (key == f.name) {
                f.set(spec, value);
                found = true;
                break;
            }
        }
        if (!found) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (key == "schemes") schemes_given = true;
    }
    if (!schemes_given) spec.schemes = {spec.base.scheme};
    validate(spec);
    return spec;
}

inline SweepSpec load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Every key with its resolved value, parseable by parse_config_text.
inline std::string to_config_text(const SweepSpec& spec)
{
    std::string out;
    for (const auto& f : detail::fields()) {
        out += std::string(f.name) + " = " + f.get(spec) + "\n";
    }
    return out;
}

} // namespace femtopc
