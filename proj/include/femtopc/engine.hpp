#pragma once

// Frame-level simulation of one drop.
//
// A drop is: geometry and static link losses, a warm-up with femto users
// silent (NI(0) baselines and downlink loss estimates are averaged over its
// tail), femto activation, then the data frames.  Each frame every BS
// schedules one user by proportional fair, users set their power from the
// broadcast NI of their serving BS, SINRs are evaluated against the aggregate
// interference of every other transmitter in the network, and the measured NI
// is broadcast for later frames.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "femtopc/channel.hpp"
#include "femtopc/config.hpp"
#include "femtopc/deployment.hpp"
#include "femtopc/linkadapt.hpp"
#include "femtopc/powerctl.hpp"
#include "femtopc/random.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

// Static description of one drop: who is served by whom and the linear
// link gain (antenna gains over static loss) of every user -> BS pair.
// BS indices: macro BSs first, then one femto BS per building.  User
// indices: macro users first, then femto users.
struct Network {
    std::size_t n_macro_bs = 0;
    std::size_t n_bs = 0;
    std::size_t n_macro_users = 0;
    std::size_t n_users = 0;

    std::vector<int> serving_bs;                     // per user
    std::vector<std::vector<std::size_t>> served;    // per BS, ascending user index
    std::vector<double> link_gain;                   // n_users x n_bs
    std::vector<bool> center_bs;                     // BS counted in statistics

    Topology topology; // empty for hand-built networks

    bool is_femto_user(std::size_t u) const { return u >= n_macro_users; }
    bool is_femto_bs(std::size_t b) const { return b >= n_macro_bs; }
    double gain(std::size_t u, std::size_t b) const { return link_gain[u * n_bs + b]; }
    double loss(std::size_t u, std::size_t b) const { return 1.0 / link_gain[u * n_bs + b]; }
    const double* gain_row(std::size_t u) const { return &link_gain[u * n_bs]; }
};

// Builds a network from explicit serving assignments and static losses
// (linear, n_users x n_bs).  Used for small hand-made scenarios.
inline Network make_network(std::size_t n_macro_bs, std::size_t n_femto_bs, std::size_t n_macro_users,
                            std::vector<int> serving, const std::vector<double>& static_loss)
{
    Network net;
    net.n_macro_bs = n_macro_bs;
    net.n_bs = n_macro_bs + n_femto_bs;
    net.n_macro_users = n_macro_users;
    net.n_users = serving.size();
    if (static_loss.size() != net.n_users * net.n_bs) {
        throw std::invalid_argument("make_network: loss matrix must be n_users x n_bs");
    }
    net.serving_bs = std::move(serving);
    net.served.assign(net.n_bs, {});
    for (std::size_t u = 0; u < net.n_users; ++u) {
        const int b = net.serving_bs[u];
        if (b < 0 || static_cast<std::size_t>(b) >= net.n_bs) {
            throw std::invalid_argument("make_network: serving BS out of range");
        }
        if (net.is_femto_user(u) != net.is_femto_bs(static_cast<std::size_t>(b))) {
            throw std::invalid_argument("make_network: macro users must be served by macro BSs and femto by femto");
        }
        net.served[static_cast<std::size_t>(b)].push_back(u);
    }
    net.link_gain.resize(static_loss.size());
    for (std::size_t i = 0; i < static_loss.size(); ++i) {
        if (!(static_loss[i] > 0.0)) throw std::invalid_argument("make_network: losses must be positive");
        net.link_gain[i] = 1.0 / static_loss[i];
    }
    net.center_bs.assign(net.n_bs, true);
    return net;
}

inline WallLossModel wall_model_from(const ScenarioConfig& c)
{
    WallLossModel m;
    m.fixed = c.wall_loss_mode == WallLossMode::Fixed;
    m.fixed_external = Decibel{c.external_wall_loss_db};
    m.fixed_internal = Decibel{c.internal_wall_loss_db};
    m.external_mean_db = c.external_wall_mean_db;
    m.external_sd_db = c.external_wall_sd_db;
    m.internal_step_db = c.internal_wall_step_db;
    m.internal_probability = c.internal_wall_probability;
    return m;
}

// Static loss of every user -> BS link of a dropped topology.
//
//   macro user -> macro BS         outdoor
//   macro user -> femto BS         outdoor-to-indoor, walls of that building
//   femto user -> macro BS         outdoor-to-indoor, walls of its own building
//   femto user -> own femto BS     indoor
//   femto user -> other femto BS   outdoor-to-indoor, both buildings' external walls
//
// Shadowing of the outdoor-class links of one user shares a common component
// (sigma_outdoor, rho_outdoor); the indoor link uses the indoor parameters.
inline StaticLoss link_static_loss(const ScenarioConfig& c, const Topology& topo, std::size_t u, std::size_t b,
                                   Decibel outdoor_shadow, Decibel indoor_shadow, WallLoss own_walls,
                                   WallLoss target_walls)
{
    const std::size_t n_macro_bs = topo.layout.size();
    const std::size_t n_macro_users = topo.macro_users.size();
    const bool femto_user = u >= n_macro_users;
    const bool femto_bs = b >= n_macro_bs;
    const Point up = femto_user ? topo.femto_users[u - n_macro_users].position : topo.macro_users[u].position;
    const Point bp = femto_bs ? topo.buildings[b - n_macro_bs].femto_bs_position : topo.layout.bs_positions[b];
    const double d = std::max(distance(up, bp), c.min_distance_m);
    const double f = c.carrier_mhz;
    if (!femto_user) {
        if (!femto_bs) return make_static_loss(LinkClass::Outdoor, d, f, outdoor_shadow);
        return make_static_loss(LinkClass::OutdoorToIndoor, d, f, outdoor_shadow, target_walls.external,
                                target_walls.internal);
    }
    const auto own_building = static_cast<std::size_t>(topo.femto_users[u - n_macro_users].building);
    if (!femto_bs) {
        return make_static_loss(LinkClass::OutdoorToIndoor, d, f, outdoor_shadow, own_walls.external,
                                own_walls.internal);
    }
    if (b - n_macro_bs == own_building) {
        return make_static_loss(LinkClass::Indoor, d, f, indoor_shadow, {}, own_walls.internal);
    }
    return make_static_loss(LinkClass::OutdoorToIndoor, d, f, outdoor_shadow,
                            own_walls.external + target_walls.external, target_walls.internal);
}

inline Network build_network(const ScenarioConfig& c, Topology topo)
{
    Network net;
    net.n_macro_bs = topo.layout.size();
    net.n_bs = net.n_macro_bs + topo.buildings.size();
    net.n_macro_users = topo.macro_users.size();
    net.n_users = net.n_macro_users + topo.femto_users.size();
    net.link_gain.resize(net.n_users * net.n_bs);

    const double antenna = std::pow(10.0, 2.0 * c.antenna_gain_dbi / 10.0);
    const ShadowingModel outdoor{c.sigma_outdoor_db, c.rho_outdoor};
    const ShadowingModel indoor{c.sigma_indoor_db, c.rho_indoor};
    const WallLossModel walls = wall_model_from(c);
    const std::size_t n_femto_bs = topo.buildings.size();

    std::vector<WallLoss> target(n_femto_bs);
    for (std::size_t u = 0; u < net.n_users; ++u) {
        const bool femto_user = u >= net.n_macro_users;
        Rng shadow_rng = make_rng(topo.rng_seed, Stream::Shadowing, u);
        const auto outdoor_shadow = sample_shadowing(net.n_bs, outdoor, shadow_rng);
        Decibel indoor_shadow{};
        if (femto_user) {
            Rng indoor_rng = make_rng(topo.rng_seed, Stream::Shadowing, (std::uint64_t{1} << 40) + u);
            indoor_shadow = sample_shadowing(1, indoor, indoor_rng).front();
        }
        Rng wall_rng = make_rng(topo.rng_seed, Stream::Walls, u);
        WallLoss own{};
        if (femto_user) own = sample_wall_losses(walls, wall_rng);
        for (auto& w : target) w = sample_wall_losses(walls, wall_rng);

        for (std::size_t b = 0; b < net.n_bs; ++b) {
            const WallLoss tw = b >= net.n_macro_bs ? target[b - net.n_macro_bs] : WallLoss{};
            const StaticLoss s = link_static_loss(c, topo, u, b, outdoor_shadow[b], indoor_shadow, own, tw);
            net.link_gain[u * net.n_bs + b] = antenna / s.total.value;
        }
    }

    const auto assoc = associate_macro_users(net.n_macro_users, net.n_macro_bs, [&](std::size_t u, std::size_t k) {
        return 1.0 / net.link_gain[u * net.n_bs + k];
    });
    net.serving_bs.resize(net.n_users);
    for (std::size_t u = 0; u < net.n_macro_users; ++u) {
        net.serving_bs[u] = assoc[u];
        topo.macro_users[u].serving_bs = assoc[u];
    }
    for (std::size_t i = 0; i < topo.femto_users.size(); ++i) {
        net.serving_bs[net.n_macro_users + i] = static_cast<int>(net.n_macro_bs) + topo.femto_users[i].building;
    }
    net.served.assign(net.n_bs, {});
    for (std::size_t u = 0; u < net.n_users; ++u) {
        net.served[static_cast<std::size_t>(net.serving_bs[u])].push_back(u);
    }
    net.center_bs.assign(net.n_bs, false);
    net.center_bs[0] = true;
    for (std::size_t i = 0; i < n_femto_bs; ++i) {
        net.center_bs[net.n_macro_bs + i] = topo.buildings[i].cell == 0;
    }
    net.topology = std::move(topo);
    return net;
}

inline Network build_network(const ScenarioConfig& c, std::uint64_t seed)
{
    return build_network(c, drop_topology(c, seed));
}

inline FadingField make_fading_field(const ScenarioConfig& c, const Network& net, std::uint64_t seed)
{
    constexpr std::size_t kPerLinkLimit = 50000;
    FadingField::Mode mode = FadingField::Mode::PerLink;
    if (c.fading_model == FadingModel::None) {
        mode = FadingField::Mode::Flat;
    } else if (c.fading_model == FadingModel::TraceBank ||
        (c.fading_model == FadingModel::Auto && net.n_users * net.n_bs > kPerLinkLimit)) {
        mode = FadingField::Mode::TraceBank;
    }
    return FadingField(mode, seed, net.n_users, net.n_bs, net.n_macro_bs, doppler_hz(c.speed_kmh, c.carrier_mhz),
                       c.frame_s(), c.jakes_oscillators);
}

struct Transmission {
    std::size_t user = 0;
    std::size_t bs = 0;     // serving BS
    double power_mw = 0.0;
};

// NI at every BS and SINR of every transmission in one frame.
// NI_b = noise + sum over transmissions not served by b of P_j G_jb g_jb.
inline void compute_uplink_sinr(const Network& net, const FadingField& fading, std::int64_t frame,
                                std::span<const Transmission> tx, double noise_mw, std::vector<double>& ni,
                                std::vector<double>& sinr)
{
    ni.assign(net.n_bs, noise_mw);
    sinr.assign(tx.size(), 0.0);
    std::vector<double> desired(tx.size(), 0.0);
    const bool bank = fading.mode() == FadingField::Mode::TraceBank;
    const bool flat = fading.mode() == FadingField::Mode::Flat;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const auto& t = tx[i];
        const double* g = net.gain_row(t.user);
        if (flat) {
            for (std::size_t b = 0; b < net.n_bs; ++b) {
                const double rx = t.power_mw * g[b];
                if (b == t.bs) desired[i] = rx;
                else ni[b] += rx;
            }
        } else if (bank) {
            const std::uint32_t* slots = fading.uplink_slot_row(t.user);
            for (std::size_t b = 0; b < net.n_bs; ++b) {
                const double rx = t.power_mw * g[b] * fading.bank_lookup(slots[b], frame);
                if (b == t.bs) desired[i] = rx;
                else ni[b] += rx;
            }
        } else {
            for (std::size_t b = 0; b < net.n_bs; ++b) {
                const double rx = t.power_mw * g[b] * fading.uplink(t.user, b, frame);
                if (b == t.bs) desired[i] = rx;
                else ni[b] += rx;
            }
        }
    }
    for (std::size_t i = 0; i < tx.size(); ++i) {
        sinr[i] = desired[i] / ni[tx[i].bs];
    }
}

struct SlotLedger {
    std::int64_t frame = 0;
    bool femtos_active = false;
    std::vector<double> ni_measured;    // per BS, mW
    std::vector<double> ni_broadcast;   // per BS, value users acted on this frame
    std::vector<long> scheduled;        // per BS, user or -1
    std::vector<double> transmit_power; // per user, mW (0: silent)
    std::vector<double> sinr;           // per user, linear (0: silent)
    std::vector<int> granted_rate;      // per user, rate-table row or -1
    std::vector<double> served_bits;    // per user
    std::vector<double> pmax;           // per user, mW
};

struct NiReport {
    std::int64_t frame = 0;
    std::vector<PowerLinear> ni; // per macro BS
    std::vector<int> j;          // per macro BS
};

// NI of every macro BS from a frame's ledger plus J_k counts from the k*
// reports of the active femto users.
inline NiReport broadcast_ni_and_j(const SlotLedger& ledger, std::size_t n_macro_bs,
                                   std::span<const std::size_t> k_star_reports)
{
    NiReport r;
    r.frame = ledger.frame;
    r.ni.resize(n_macro_bs);
    for (std::size_t k = 0; k < n_macro_bs; ++k) r.ni[k] = PowerLinear{ledger.ni_measured[k]};
    r.j.assign(n_macro_bs, 0);
    for (std::size_t k : k_star_reports) {
        if (k < n_macro_bs) ++r.j[k];
    }
    return r;
}

struct DropResult {
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::FixedCap;
    int data_frames = 0;
    double frame_s = 0.0;

    std::vector<double> user_bits;        // per user over the data frames
    std::vector<int> serving_bs;
    std::vector<bool> femto_user;

    // Centre-cell statistics.
    double macro_throughput = 0.0;                 // bit/s of users served by BS 0
    double femto_throughput = 0.0;                 // bit/s per centre femtocell, averaged
    std::size_t femto_cells = 0;                   // centre femtocells
    std::vector<double> macro_user_throughput;     // users served by BS 0
    std::vector<double> femto_user_throughput;     // users of centre femtocells

    // Invariant ledgers.
    long long pmax_checks = 0;
    long long pmax_violations = 0;     // P_t > hard cap
    long long cap_checks = 0;
    long long cap_violations = 0;      // open loop: P_t / L_min > alpha N0WF / J
    double max_calibration_error = 0.0; // closed loop: |beta NI(0) - I_th| / I_th
    long long min_ni_violations = 0;   // NI below the noise floor
};

// Runs one drop frame by frame.  Construct, then warm_up(), activate_femtos(),
// and step() for each data frame; or call run().
class DropSimulator {
public:
    using Observer = std::function<void(const SlotLedger&)>;

    DropSimulator(const ScenarioConfig& config, Network network, std::uint64_t seed)
        : DropSimulator(config, std::move(network), seed, make_rate_table(config))
    {
    }

    DropSimulator(const ScenarioConfig& config, Network network, std::uint64_t seed, RateTable rates)
        : config_(config), net_(std::move(network)), seed_(seed),
          fading_(make_fading_field(config, net_, seed)), rates_(std::move(rates)),
          params_(PcParams::from_config(config))
    {
        noise_ = params_.noise_floor.value;
        pmax_hard_ = params_.pmax_hard.value;
        eirp_ = db_to_linear(Decibel{config.macro_eirp_dbm}).value;
        pf_.reserve(net_.n_bs);
        for (std::size_t b = 0; b < net_.n_bs; ++b) pf_.emplace_back(net_.served[b].size(), config.pf_time_constant);
        femto_states_.resize(net_.n_users - net_.n_macro_users);
        user_bits_.assign(net_.n_users, 0.0);
        ni0_sum_.assign(net_.n_macro_bs, 0.0);
        rx_sum_.assign((net_.n_users - net_.n_macro_users) * net_.n_macro_bs, 0.0);
        ledger_.ni_measured.assign(net_.n_bs, noise_);
        ledger_.ni_broadcast.assign(net_.n_bs, noise_);
        ledger_.scheduled.assign(net_.n_bs, -1);
        ledger_.transmit_power.assign(net_.n_users, 0.0);
        ledger_.sinr.assign(net_.n_users, 0.0);
        ledger_.granted_rate.assign(net_.n_users, -1);
        ledger_.served_bits.assign(net_.n_users, 0.0);
        ledger_.pmax.assign(net_.n_users, pmax_hard_);
    }

    const Network& network() const { return net_; }
    const FadingField& fading() const { return fading_; }
    const RateTable& rates() const { return rates_; }
    const PcParams& params() const { return params_; }
    const SlotLedger& ledger() const { return ledger_; }
    std::int64_t frame() const { return frame_; }
    bool femtos_active() const { return femtos_active_; }
    const std::vector<FemtoPowerState>& femto_states() const { return femto_states_; }
    const std::vector<double>& ni0() const { return ni0_; }
    const std::vector<std::size_t>& k_star_reports() const { return k_star_bs_; }
    const std::vector<int>& j_counts() const { return j_; }

    void set_observer(Observer obs) { observer_ = std::move(obs); }

    void warm_up()
    {
        const int window_start = config_.warmup_frames - config_.ni_average_frames;
        for (int i = 0; i < config_.warmup_frames; ++i) {
            step();
            if (i >= window_start) accumulate_warmup_window();
        }
        ni0_.resize(net_.n_macro_bs);
        for (std::size_t k = 0; k < net_.n_macro_bs; ++k) ni0_[k] = ni0_sum_[k] / config_.ni_average_frames;
        warmed_up_ = true;
    }

    // Neighbour-loss estimation, k*, J and the per-user controllers.
    void activate_femtos()
    {
        if (!warmed_up_) throw std::logic_error("activate_femtos before warm_up");
        const std::size_t n_femto = net_.n_users - net_.n_macro_users;
        const auto k_list = static_cast<std::size_t>(std::min<int>(config_.neighbor_list_size,
                                                                   static_cast<int>(net_.n_macro_bs)));
        k_star_bs_.assign(n_femto, 0);
        std::vector<NeighborEstimate> estimates(n_femto);
        std::vector<std::vector<std::size_t>> lists(n_femto);
        for (std::size_t i = 0; i < n_femto; ++i) {
            std::vector<PowerLinear> e(net_.n_macro_bs, PowerLinear{eirp_});
            std::vector<PowerLinear> r(net_.n_macro_bs);
            for (std::size_t k = 0; k < net_.n_macro_bs; ++k) {
                r[k] = PowerLinear{rx_sum_[i * net_.n_macro_bs + k] / config_.ni_average_frames};
            }
            // Neighbour list: the K macro BSs with the smallest estimated loss, in BS order.
            std::vector<std::size_t> order(net_.n_macro_bs);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
            order.resize(k_list);
            std::sort(order.begin(), order.end());
            std::vector<PowerLinear> le, lr;
            for (std::size_t k : order) {
                le.push_back(e[k]);
                lr.push_back(r[k]);
            }
            estimates[i] = estimate_neighbors(le, lr);
            lists[i] = order;
            k_star_bs_[i] = order[estimates[i].k_star];
        }
        j_.assign(net_.n_macro_bs, 0);
        for (std::size_t k : k_star_bs_) ++j_[k];

        const PmaxMode mode = pmax_mode_for(config_.scheme);
        for (std::size_t i = 0; i < n_femto; ++i) {
            const std::size_t k = k_star_bs_[i];
            femto_states_[i] = FemtoPowerState(mode, params_, estimates[i], k, j_[k], PowerLinear{ni0_[k]});
            if (mode == PmaxMode::ClosedLoop) {
                const double ol = open_loop_threshold(params_, j_[k]).value;
                const double err = std::abs(femto_states_[i].ith0().value - ol) / ol;
                max_calibration_error_ = std::max(max_calibration_error_, err);
            }
        }
        neighbor_lists_ = std::move(lists);
        femtos_active_ = config_.scheme != Scheme::NoFemto;
        data_frame_ = 0;
    }

    // One 4-slot frame.
    const SlotLedger& step()
    {
        const std::int64_t t = frame_;
        const std::vector<double>& bcast = broadcast_for(t);

        std::fill(ledger_.transmit_power.begin(), ledger_.transmit_power.end(), 0.0);
        std::fill(ledger_.sinr.begin(), ledger_.sinr.end(), 0.0);
        std::fill(ledger_.granted_rate.begin(), ledger_.granted_rate.end(), -1);
        std::fill(ledger_.served_bits.begin(), ledger_.served_bits.end(), 0.0);
        std::fill(ledger_.scheduled.begin(), ledger_.scheduled.end(), -1);
        ledger_.ni_broadcast = bcast;

        if (femtos_active_) {
            for (std::size_t i = 0; i < femto_states_.size(); ++i) {
                auto& st = femto_states_[i];
                ledger_.pmax[net_.n_macro_users + i] = st.update(PowerLinear{bcast[st.k_star_bs()]}).value;
            }
        }

        tx_.clear();
        tx_rate_.clear();
        for (std::size_t b = 0; b < net_.n_bs; ++b) {
            if (net_.is_femto_bs(b) && !femtos_active_) continue;
            const auto& users = net_.served[b];
            if (users.empty()) continue;
            cand_.clear();
            cand_rate_.clear();
            for (std::size_t li = 0; li < users.size(); ++li) {
                const std::size_t u = users[li];
                const double g_prev = fading_.uplink(u, b, t - 1) * net_.gain(u, b);
                const double pred = ledger_.pmax[u] * g_prev / bcast[b];
                const auto rate = pred > 0.0 ? rates_.select_rate(Decibel{10.0 * std::log10(pred)})
                                             : std::optional<std::size_t>{};
                cand_.push_back({li, rate ? rates_[*rate].rate_kbps * 1000.0 : 0.0});
                cand_rate_.push_back(rate ? static_cast<int>(*rate) : -1);
            }
            const std::size_t pick = pf_schedule(cand_, pf_[b]);
            if (cand_rate_[pick] < 0) continue; // nobody can close the link
            const std::size_t u = users[pick];
            const RateFormat& fmt = rates_[static_cast<std::size_t>(cand_rate_[pick])];
            const double g_prev = fading_.uplink(u, b, t - 1) * net_.gain(u, b);
            const PowerLinear pr = required_power(PowerLinear{1.0 / g_prev}, PowerLinear{bcast[b]},
                                                  db_to_linear(fmt.required_sinr));
            const double pt = cap_power(pr, PowerLinear{ledger_.pmax[u]}).value;
            tx_.push_back({u, b, pt});
            tx_rate_.push_back(cand_rate_[pick]);
            ledger_.scheduled[b] = static_cast<long>(pick);
        }

        compute_uplink_sinr(net_, fading_, t, tx_, noise_, ledger_.ni_measured, sinr_);
        if (config_.broadcast_delay_frames == 0) {
            // Zero-delay option: powers are re-targeted once to the NI of the
            // current frame, schedule and rates unchanged.
            ledger_.ni_broadcast = ledger_.ni_measured;
            for (std::size_t i = 0; i < tx_.size(); ++i) {
                const RateFormat& fmt = rates_[static_cast<std::size_t>(tx_rate_[i])];
                const double g_prev = fading_.uplink(tx_[i].user, tx_[i].bs, t - 1) * net_.gain(tx_[i].user, tx_[i].bs);
                const PowerLinear pr = required_power(PowerLinear{1.0 / g_prev},
                                                      PowerLinear{ledger_.ni_measured[tx_[i].bs]},
                                                      db_to_linear(fmt.required_sinr));
                tx_[i].power_mw = cap_power(pr, PowerLinear{ledger_.pmax[tx_[i].user]}).value;
            }
            compute_uplink_sinr(net_, fading_, t, tx_, noise_, ledger_.ni_measured, sinr_);
        }

        std::vector<double>& bits = ledger_.served_bits;
        for (std::size_t i = 0; i < tx_.size(); ++i) {
            const auto& x = tx_[i];
            const RateFormat& fmt = rates_[static_cast<std::size_t>(tx_rate_[i])];
            ledger_.transmit_power[x.user] = x.power_mw;
            ledger_.sinr[x.user] = sinr_[i];
            ledger_.granted_rate[x.user] = tx_rate_[i];
            const double sinr_db = sinr_[i] > 0.0 ? 10.0 * std::log10(sinr_[i]) : -std::numeric_limits<double>::infinity();
            bits[x.user] = sinr_db >= fmt.required_sinr.value ? fmt.payload_bits : 0.0;
        }
        for (std::size_t b = 0; b < net_.n_bs; ++b) {
            if (net_.is_femto_bs(b) && !femtos_active_) continue;
            const long pick = ledger_.scheduled[b];
            const double served = pick >= 0 ? bits[net_.served[b][static_cast<std::size_t>(pick)]] : 0.0;
            pf_update(pf_[b], pick, served, config_.frame_s());
        }
        // Convert scheduled entries from local to user indices for the ledger.
        for (std::size_t b = 0; b < net_.n_bs; ++b) {
            if (ledger_.scheduled[b] >= 0) {
                ledger_.scheduled[b] = static_cast<long>(net_.served[b][static_cast<std::size_t>(ledger_.scheduled[b])]);
            }
        }

        if (femtos_active_ || warmed_up_) record_checks();
        if (warmed_up_) {
            for (std::size_t u = 0; u < net_.n_users; ++u) user_bits_[u] += bits[u];
            ++data_frame_;
        }

        history_.push_back(ledger_.ni_measured);
        const auto keep = static_cast<std::size_t>(std::max(config_.broadcast_delay_frames, 1));
        while (history_.size() > keep) history_.pop_front();

        ledger_.frame = t;
        ledger_.femtos_active = femtos_active_;
        if (observer_) observer_(ledger_);
        ++frame_;
        return ledger_;
    }

    DropResult run()
    {
        warm_up();
        activate_femtos();
        for (int i = 0; i < config_.data_frames; ++i) step();
        return result();
    }

    DropResult result() const
    {
        DropResult r;
        r.seed = seed_;
        r.scheme = config_.scheme;
        r.data_frames = static_cast<int>(data_frame_);
        r.frame_s = config_.frame_s();
        r.user_bits = user_bits_;
        r.serving_bs = net_.serving_bs;
        r.femto_user.resize(net_.n_users);
        const double duration = std::max<double>(1.0, static_cast<double>(data_frame_)) * config_.frame_s();
        double femto_sum = 0.0;
        for (std::size_t u = 0; u < net_.n_users; ++u) {
            r.femto_user[u] = net_.is_femto_user(u);
            const auto b = static_cast<std::size_t>(net_.serving_bs[u]);
            if (!net_.center_bs[b]) continue;
            const double tput = user_bits_[u] / duration;
            if (net_.is_femto_user(u)) {
                r.femto_user_throughput.push_back(tput);
                femto_sum += tput;
            } else {
                r.macro_user_throughput.push_back(tput);
                r.macro_throughput += tput;
            }
        }
        for (std::size_t b = net_.n_macro_bs; b < net_.n_bs; ++b) {
            if (net_.center_bs[b]) ++r.femto_cells;
        }
        r.femto_throughput = r.femto_cells ? femto_sum / static_cast<double>(r.femto_cells) : 0.0;
        r.pmax_checks = pmax_checks_;
        r.pmax_violations = pmax_violations_;
        r.cap_checks = cap_checks_;
        r.cap_violations = cap_violations_;
        r.max_calibration_error = max_calibration_error_;
        r.min_ni_violations = ni_violations_;
        return r;
    }

private:
    const std::vector<double>& broadcast_for(std::int64_t)
    {
        // history_ holds the most recent max(delay, 1) measurements, oldest
        // first, so frame t acts on the NI measured in frame t - delay.
        if (history_.size() < static_cast<std::size_t>(std::max(config_.broadcast_delay_frames, 1))) {
            if (initial_.empty()) initial_.assign(net_.n_bs, noise_);
            return initial_;
        }
        return history_.front();
    }

    void accumulate_warmup_window()
    {
        for (std::size_t k = 0; k < net_.n_macro_bs; ++k) ni0_sum_[k] += ledger_.ni_measured[k];
        const std::int64_t t = frame_ - 1;
        for (std::size_t i = 0; i + net_.n_macro_users < net_.n_users; ++i) {
            const std::size_t u = net_.n_macro_users + i;
            for (std::size_t k = 0; k < net_.n_macro_bs; ++k) {
                rx_sum_[i * net_.n_macro_bs + k] += eirp_ * net_.gain(u, k) * fading_.downlink(k, u, t);
            }
        }
    }

    void record_checks()
    {
        for (std::size_t b = 0; b < net_.n_bs; ++b) {
            if (ledger_.ni_measured[b] < noise_) ++ni_violations_;
        }
        for (const auto& x : tx_) {
            ++pmax_checks_;
            if (x.power_mw > pmax_hard_) ++pmax_violations_;
            if (femtos_active_ && net_.is_femto_user(x.user)) {
                const auto& st = femto_states_[x.user - net_.n_macro_users];
                if (st.mode() == PmaxMode::OpenLoop) {
                    ++cap_checks_;
                    const double interference =
                        estimated_crosstier_interference(PowerLinear{x.power_mw}, st.neighbor().l_min).value;
                    const double limit = open_loop_threshold(params_, st.j()).value;
                    if (interference > limit * (1.0 + 1e-9)) ++cap_violations_;
                }
            }
        }
    }

    ScenarioConfig config_;
    Network net_;
    std::uint64_t seed_;
    FadingField fading_;
    RateTable rates_;
    PcParams params_;
    double noise_ = 0.0;
    double pmax_hard_ = 0.0;
    double eirp_ = 0.0;

    std::vector<PfState> pf_;
    std::vector<FemtoPowerState> femto_states_;
    std::vector<std::size_t> k_star_bs_;
    std::vector<std::vector<std::size_t>> neighbor_lists_;
    std::vector<int> j_;
    std::vector<double> ni0_, ni0_sum_, rx_sum_;
    std::vector<double> user_bits_;
    std::deque<std::vector<double>> history_;
    std::vector<double> initial_;
    SlotLedger ledger_;
    Observer observer_;

    std::vector<Transmission> tx_;
    std::vector<int> tx_rate_;
    std::vector<PfCandidate> cand_;
    std::vector<int> cand_rate_;
    std::vector<double> sinr_;

    std::int64_t frame_ = 0;
    std::int64_t data_frame_ = 0;
    bool warmed_up_ = false;
    bool femtos_active_ = false;

    long long pmax_checks_ = 0, pmax_violations_ = 0, cap_checks_ = 0, cap_violations_ = 0, ni_violations_ = 0;
    double max_calibration_error_ = 0.0;
};

inline DropResult run_drop(const ScenarioConfig& config, std::uint64_t seed)
{
    DropSimulator sim(config, build_network(config, seed), seed);
    return sim.run();
}

} // namespace femtopc
