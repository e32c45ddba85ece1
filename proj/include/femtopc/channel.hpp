#pragma once

// Propagation losses for the three link classes, correlated log-normal
// shadowing, wall penetration losses, and modified-Jakes fast fading.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "femtopc/log.hpp"
#include "femtopc/random.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

enum class LinkClass { Outdoor, OutdoorToIndoor, Indoor };

namespace detail {

inline double clamp_distance(double d, double min_d = 1.0)
{
    if (d < min_d) {
        log::debug("distance ", d, " m clamped to ", min_d, " m");
        return min_d;
    }
    return d;
}

} // namespace detail

// L = 10^4.9 (d/1000)^4 f^3 10^(S/10), d in m, f in MHz.
inline PowerLinear path_loss_outdoor(double d_m, double f_mhz, Decibel shadow)
{
    const double d = detail::clamp_distance(d_m);
    const double km = d / 1000.0;
    return {std::pow(10.0, 4.9) * (km * km * km * km) * (f_mhz * f_mhz * f_mhz) *
            std::pow(10.0, shadow.value / 10.0)};
}

inline PowerLinear path_loss_outdoor_to_indoor(double d_m, double f_mhz, Decibel shadow, Decibel internal_wall,
                                               Decibel external_wall)
{
    return path_loss_outdoor(d_m, f_mhz, shadow) *
           std::pow(10.0, (internal_wall.value + external_wall.value) / 10.0);
}

// L = 10^3 d^3.7 10^(S/10) 10^(Li/10).
inline PowerLinear path_loss_indoor(double d_m, Decibel shadow, Decibel internal_wall)
{
    const double d = detail::clamp_distance(d_m);
    return {1e3 * std::pow(d, 3.7) * std::pow(10.0, shadow.value / 10.0) *
            std::pow(10.0, internal_wall.value / 10.0)};
}

// One link's static loss with the components it was built from.
struct StaticLoss {
    LinkClass link_class = LinkClass::Outdoor;
    double distance_m = 1.0;
    double frequency_mhz = 2500.0;
    Decibel shadow;
    Decibel external_wall; // OutdoorToIndoor only
    Decibel internal_wall; // OutdoorToIndoor and Indoor
    PowerLinear total;

    PowerLinear recompute() const
    {
        switch (link_class) {
        case LinkClass::Outdoor: return path_loss_outdoor(distance_m, frequency_mhz, shadow);
        case LinkClass::OutdoorToIndoor:
            return path_loss_outdoor_to_indoor(distance_m, frequency_mhz, shadow, internal_wall, external_wall);
        case LinkClass::Indoor: return path_loss_indoor(distance_m, shadow, internal_wall);
        }
        return total;
    }
};

inline StaticLoss make_static_loss(LinkClass cls, double d_m, double f_mhz, Decibel shadow, Decibel external_wall = {},
                                   Decibel internal_wall = {})
{
    StaticLoss s{cls, d_m, f_mhz, shadow, {}, {}, {}};
    if (cls == LinkClass::OutdoorToIndoor) s.external_wall = external_wall;
    if (cls != LinkClass::Outdoor) s.internal_wall = internal_wall;
    s.total = s.recompute();
    return s;
}

struct ShadowingModel {
    double sigma_db = 8.0;
    double rho = 0.5;
};

inline constexpr ShadowingModel kOutdoorShadowing{8.0, 0.5};
inline constexpr ShadowingModel kIndoorShadowing{10.0, 0.7};

// S_k = sigma (sqrt(rho) a + sqrt(1 - rho) b_k): one common draw per user and
// an independent draw per link, so any two links of the user correlate by rho.
inline std::vector<Decibel> sample_shadowing(std::size_t n_links, const ShadowingModel& model, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const double common = normal(rng);
    const double wc = std::sqrt(model.rho);
    const double wi = std::sqrt(1.0 - model.rho);
    std::vector<Decibel> out(n_links);
    for (auto& s : out) {
        s = Decibel{model.sigma_db * (wc * common + wi * normal(rng))};
    }
    return out;
}

struct WallLossModel {
    bool fixed = false;
    Decibel fixed_external{10.0};
    Decibel fixed_internal{0.0};
    double external_mean_db = 7.0;
    double external_sd_db = 6.0;
    double internal_step_db = 4.0;
    double internal_probability = 0.5;
};

struct WallLoss {
    Decibel external;
    Decibel internal;
};

// Le ~ N(7, 6^2) dB, Li = 4 I with I ~ Bernoulli(0.5).  Negative Le draws are kept.
inline WallLoss sample_wall_losses(const WallLossModel& model, Rng& rng)
{
    if (model.fixed) {
        return {model.fixed_external, model.fixed_internal};
    }
    std::normal_distribution<double> le(model.external_mean_db, model.external_sd_db);
    std::bernoulli_distribution li(model.internal_probability);
    const double external = le(rng);
    const double internal = li(rng) ? model.internal_step_db : 0.0;
    return {Decibel{external}, Decibel{internal}};
}

inline double doppler_hz(double speed_kmh, double carrier_mhz)
{
    constexpr double c = 299792458.0;
    const double v = speed_kmh / 3.6;
    const double lambda = c / (carrier_mhz * 1e6);
    return v / lambda;
}

// Oscillator set of the modified Jakes (Dent) generator shared by all links:
//   h(t) = sqrt(2/N0) sum_n exp(j beta_n) cos(w_d cos(alpha_n) t + theta_n)
// with alpha_n = 2 pi (n - 1/2) / (4 N0), beta_n = pi n / N0.  Links differ only
// in their random phases theta_n.  E|h|^2 = 1.
class JakesSpectrum {
public:
    JakesSpectrum(double doppler_hz, int oscillators) : doppler_(doppler_hz), omega_(oscillators), coef_(oscillators)
    {
        const int n0 = oscillators;
        const double scale = std::sqrt(2.0 / n0);
        for (int n = 1; n <= n0; ++n) {
            const double alpha = 2.0 * std::numbers::pi * (n - 0.5) / (4.0 * n0);
            const double beta = std::numbers::pi * n / n0;
            omega_[n - 1] = 2.0 * std::numbers::pi * doppler_hz * std::cos(alpha);
            coef_[n - 1] = scale * std::complex<double>(std::cos(beta), std::sin(beta));
        }
    }

    int oscillators() const { return static_cast<int>(omega_.size()); }
    double doppler() const { return doppler_; }

    std::complex<double> envelope(double t, const double* phases) const
    {
        std::complex<double> h{};
        for (std::size_t n = 0; n < omega_.size(); ++n) {
            h += coef_[n] * std::cos(omega_[n] * t + phases[n]);
        }
        return h;
    }

    double gain(double t, const double* phases) const { return std::norm(envelope(t, phases)); }

private:
    double doppler_;
    std::vector<double> omega_;
    std::vector<std::complex<double>> coef_;
};

// One link's fading process with its own time cursor.
class JakesFading {
public:
    JakesFading(std::shared_ptr<const JakesSpectrum> spectrum, Rng& rng) : spectrum_(std::move(spectrum))
    {
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        phases_.resize(static_cast<std::size_t>(spectrum_->oscillators()));
        for (auto& p : phases_) p = u(rng);
    }

    JakesFading(double doppler_hz, Rng& rng, int oscillators = 16)
        : JakesFading(std::make_shared<const JakesSpectrum>(doppler_hz, oscillators), rng)
    {
    }

    double time() const { return time_; }
    std::complex<double> envelope() const { return spectrum_->envelope(time_, phases_.data()); }
    double gain() const { return spectrum_->gain(time_, phases_.data()); }

    // Moves the process forward by dt seconds and returns the new power gain.
    double advance(double dt)
    {
        time_ += dt;
        return gain();
    }

private:
    std::shared_ptr<const JakesSpectrum> spectrum_;
    std::vector<double> phases_;
    double time_ = 0.0;
};

inline double fading_advance(JakesFading& process, double dt) { return process.advance(dt); }

// Fast-fading gains for every (user, BS) uplink and (macro BS, user) downlink of
// a drop, sampled at frame boundaries.
//
// PerLink evaluates an independent Jakes process per link.  TraceBank draws
// every link from a bank of pre-generated Jakes traces at a per-link random
// offset; it is used when the link count makes per-link state too large.
// Flat is a unit gain everywhere (static channel).
class FadingField {
public:
    enum class Mode { PerLink, TraceBank, Flat };

    static constexpr std::size_t kTraceCount = 128;
    static constexpr std::size_t kTraceLength = 4096; // frames, power of two

    FadingField(Mode mode, std::uint64_t seed, std::size_t n_users, std::size_t n_bs, std::size_t n_macro,
                double doppler_hz, double frame_s, int oscillators)
        : mode_(mode), seed_(seed), n_users_(n_users), n_bs_(n_bs), n_macro_(n_macro), frame_s_(frame_s),
          spectrum_(std::make_shared<const JakesSpectrum>(doppler_hz, oscillators))
    {
        if (mode_ == Mode::PerLink) {
            const auto n0 = static_cast<std::size_t>(oscillators);
            uplink_phases_.resize(n_users * n_bs * n0);
            downlink_phases_.resize(n_users * n_macro * n0);
            for (std::size_t u = 0; u < n_users; ++u) {
                for (std::size_t b = 0; b < n_bs; ++b) {
                    fill_phases(&uplink_phases_[(u * n_bs + b) * n0], link_key(u, b, 0), n0);
                }
                for (std::size_t b = 0; b < n_macro; ++b) {
                    fill_phases(&downlink_phases_[(u * n_macro + b) * n0], link_key(u, b, 1), n0);
                }
            }
        } else if (mode_ == Mode::TraceBank) {
            Rng rng = make_rng(seed, Stream::FadingBank);
            bank_.resize(kTraceCount * kTraceLength);
            for (std::size_t i = 0; i < kTraceCount; ++i) {
                JakesFading proc(spectrum_, rng);
                for (std::size_t s = 0; s < kTraceLength; ++s) {
                    bank_[i * kTraceLength + s] = static_cast<float>(proc.gain());
                    proc.advance(frame_s_);
                }
            }
            uplink_slots_.resize(n_users * n_bs);
            downlink_slots_.resize(n_users * n_macro);
            for (std::size_t u = 0; u < n_users; ++u) {
                for (std::size_t b = 0; b < n_bs; ++b) uplink_slots_[u * n_bs + b] = slot_of(link_key(u, b, 0));
                for (std::size_t b = 0; b < n_macro; ++b) downlink_slots_[u * n_macro + b] = slot_of(link_key(u, b, 1));
            }
        }
    }

    Mode mode() const { return mode_; }
    double frame_s() const { return frame_s_; }
    const JakesSpectrum& spectrum() const { return *spectrum_; }

    // Power gain of the user -> BS link at the end of frame `frame`.
    double uplink(std::size_t user, std::size_t bs, std::int64_t frame) const
    {
        if (mode_ == Mode::PerLink) {
            const auto n0 = static_cast<std::size_t>(spectrum_->oscillators());
            return spectrum_->gain(time_of(frame), &uplink_phases_[(user * n_bs_ + bs) * n0]);
        }
        if (mode_ == Mode::Flat) return 1.0;
        return bank_lookup(uplink_slots_[user * n_bs_ + bs], frame);
    }

    double downlink(std::size_t macro_bs, std::size_t user, std::int64_t frame) const
    {
        if (mode_ == Mode::PerLink) {
            const auto n0 = static_cast<std::size_t>(spectrum_->oscillators());
            return spectrum_->gain(time_of(frame), &downlink_phases_[(user * n_macro_ + macro_bs) * n0]);
        }
        if (mode_ == Mode::Flat) return 1.0;
        return bank_lookup(downlink_slots_[user * n_macro_ + macro_bs], frame);
    }

    // Bank-mode fast path: the uplink slot table of one transmitting user.
    const std::uint32_t* uplink_slot_row(std::size_t user) const { return &uplink_slots_[user * n_bs_]; }
    double bank_lookup(std::uint32_t slot, std::int64_t frame) const
    {
        const std::size_t trace = slot / kTraceLength;
        const std::size_t offset = slot % kTraceLength;
        const std::size_t s = (offset + static_cast<std::size_t>(frame)) & (kTraceLength - 1);
        return static_cast<double>(bank_[trace * kTraceLength + s]);
    }

private:
    double time_of(std::int64_t frame) const { return static_cast<double>(frame + 1) * frame_s_; }

    std::uint64_t link_key(std::size_t user, std::size_t bs, std::uint64_t direction) const
    {
        return hash_combine(hash_combine(hash_combine(hash_combine(seed_, static_cast<std::uint64_t>(Stream::Fading)),
                                                      direction),
                                         user),
                            bs);
    }

    static void fill_phases(double* out, std::uint64_t key, std::size_t n0)
    {
        for (std::size_t n = 0; n < n0; ++n) {
            const std::uint64_t h = hash_combine(key, n);
            out[n] = 2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
        }
    }

    static std::uint32_t slot_of(std::uint64_t key)
    {
        return static_cast<std::uint32_t>(key % (kTraceCount * kTraceLength));
    }

    Mode mode_;
    std::uint64_t seed_;
    std::size_t n_users_, n_bs_, n_macro_;
    double frame_s_;
    std::shared_ptr<const JakesSpectrum> spectrum_;
    std::vector<double> uplink_phases_, downlink_phases_;
    std::vector<float> bank_;
    std::vector<std::uint32_t> uplink_slots_, downlink_slots_;
};

} // namespace femtopc
