#pragma once

// DO Rev. A uplink rate formats and the per-BS proportional-fair scheduler.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "femtopc/config.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

struct RateFormat {
    int payload_bits = 0;
    double rate_kbps = 0.0;     // payload over one 4-slot frame
    Decibel required_ebnt;      // Eb/Nt for 1% FER
    Decibel required_sinr;      // required_ebnt - 10 log10(W / rate)
};

inline Decibel required_sinr(const RateFormat& f, double bandwidth_hz)
{
    return Decibel{f.required_ebnt.value - 10.0 * std::log10(bandwidth_hz / (f.rate_kbps * 1000.0))};
}

class RateTable {
public:
    RateTable(std::vector<RateFormat> formats, double bandwidth_hz) : formats_(std::move(formats))
    {
        if (formats_.empty()) {
            throw ConfigError("rate table is empty");
        }
        for (std::size_t i = 0; i < formats_.size(); ++i) {
            auto& f = formats_[i];
            if (f.payload_bits <= 0 || !(f.rate_kbps > 0.0)) {
                throw ConfigError("rate table row " + std::to_string(i) + ": payload and rate must be positive");
            }
            if (i > 0 && !(f.rate_kbps > formats_[i - 1].rate_kbps)) {
                throw ConfigError("rate table rows must be sorted by strictly increasing rate");
            }
            f.required_sinr = femtopc::required_sinr(f, bandwidth_hz);
        }
    }

    std::size_t size() const { return formats_.size(); }
    const RateFormat& operator[](std::size_t i) const { return formats_[i]; }
    std::span<const RateFormat> formats() const { return formats_; }

    // Highest-rate format whose SINR requirement is met.  Formats are scanned
    // from the top so a non-monotone requirement column cannot hide a rate.
    std::optional<std::size_t> select_rate(Decibel sinr) const
    {
        for (std::size_t i = formats_.size(); i-- > 0;) {
            if (formats_[i].required_sinr.value <= sinr.value) return i;
        }
        return std::nullopt;
    }

private:
    std::vector<RateFormat> formats_;
};

inline std::vector<RateFormat> do_rev_a_formats()
{
    return {
        {128, 19.2, Decibel{5.6}, {}},    {256, 38.4, Decibel{5.7}, {}},    {512, 76.8, Decibel{5.8}, {}},
        {1024, 153.6, Decibel{7.0}, {}},  {2048, 307.2, Decibel{5.4}, {}},  {4096, 614.4, Decibel{6.3}, {}},
        {8192, 1228.8, Decibel{5.5}, {}}, {12288, 1843.2, Decibel{11.4}, {}},
    };
}

// Rows of "payload_bits rate_kbps ebnt_db", whitespace or comma separated,
// '#' comments allowed.
inline std::vector<RateFormat> parse_rate_table(const std::string& text)
{
    std::vector<RateFormat> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream row(line);
        RateFormat f;
        double ebnt = 0.0;
        if (!(row >> f.payload_bits)) continue;
        if (!(row >> f.rate_kbps >> ebnt)) {
            throw ConfigError("rate table line " + std::to_string(lineno) + ": expected payload_bits rate_kbps ebnt_db");
        }
        f.required_ebnt = Decibel{ebnt};
        out.push_back(f);
    }
    return out;
}

inline RateTable make_rate_table(const ScenarioConfig& config)
{
    if (config.rate_table.empty()) {
        return RateTable(do_rev_a_formats(), config.bandwidth_hz);
    }
    std::ifstream in(config.rate_table);
    if (!in) {
        throw ConfigError("invalid 'rate_table': cannot open '" + config.rate_table + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return RateTable(parse_rate_table(ss.str()), config.bandwidth_hz);
}

// Exponentially averaged served throughput of the users of one BS.
struct PfState {
    static constexpr double kInitialAverage = 1.0; // bit/s, keeps the PF metric finite

    std::vector<double> average_throughput;
    double time_constant = 100.0; // frames

    PfState() = default;
    PfState(std::size_t n_users, double tc) : average_throughput(n_users, kInitialAverage), time_constant(tc) {}
};

struct PfCandidate {
    std::size_t user = 0;      // index into PfState
    double instantaneous_rate = 0.0; // bit/s
};

// argmax of rate / average; the earliest candidate wins ties.
inline std::size_t pf_schedule(std::span<const PfCandidate> candidates, const PfState& state)
{
    if (candidates.empty()) {
        throw std::invalid_argument("pf_schedule: no candidates");
    }
    std::size_t best = candidates.front().user;
    double best_metric = -1.0;
    for (const auto& c : candidates) {
        const double avg = std::max(state.average_throughput[c.user], PfState::kInitialAverage);
        const double metric = c.instantaneous_rate / avg;
        if (metric > best_metric) {
            best_metric = metric;
            best = c.user;
        }
    }
    return best;
}

// scheduled < 0: nobody transmitted this frame.
inline void pf_update(PfState& state, long scheduled, double served_bits, double frame_s)
{
    const double w = 1.0 / state.time_constant;
    for (std::size_t i = 0; i < state.average_throughput.size(); ++i) {
        double& avg = state.average_throughput[i];
        avg *= 1.0 - w;
        if (static_cast<long>(i) == scheduled) {
            avg += w * (served_bits / frame_s);
        }
    }
}

} // namespace femtopc
