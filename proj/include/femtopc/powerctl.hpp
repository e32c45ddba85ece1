#pragma once

// Uplink transmit-power rules.
//
// Every user runs the conventional open-loop rule P_r = L * NI * gamma0 capped
// at its maximum power.  Femto users additionally tighten that maximum so the
// interference they put on the most exposed macro BS (k*) stays under a
// threshold: fixed (open loop) or adapted to the macro BS's broadcast NI
// (closed loop).  Everything here is in the linear domain.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "femtopc/config.hpp"
#include "femtopc/log.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

struct PcParams {
    double alpha = 3.0;            // allowed interference-to-noise ratio
    PowerLinear noise_floor;       // N0 W F, mW
    PowerLinear pmax_hard;         // device limit, mW

    static PcParams from_config(const ScenarioConfig& c)
    {
        return {c.alpha, db_to_linear(Decibel{c.noise_dbm}), db_to_linear(Decibel{c.pmax_dbm})};
    }
};

inline PowerLinear required_power(PowerLinear loss, PowerLinear ni, PowerLinear gamma0)
{
    return loss * ni * gamma0;
}

inline PowerLinear cap_power(PowerLinear required, PowerLinear pmax) { return min(required, pmax); }

struct NeighborEstimate {
    std::vector<PowerLinear> eirp;     // E_k
    std::vector<PowerLinear> received; // R_k, time-averaged
    std::vector<PowerLinear> loss;     // L_k = E_k / R_k
    std::size_t k_star = 0;            // position in the list
    PowerLinear l_min;
};

inline NeighborEstimate estimate_neighbors(std::span<const PowerLinear> eirp, std::span<const PowerLinear> received)
{
    if (eirp.empty() || eirp.size() != received.size()) {
        throw ConfigError("estimate_neighbors: neighbour list must be nonempty with matching E/R lengths");
    }
    NeighborEstimate est;
    est.eirp.assign(eirp.begin(), eirp.end());
    est.received.assign(received.begin(), received.end());
    est.loss.resize(eirp.size());
    for (std::size_t k = 0; k < eirp.size(); ++k) {
        est.loss[k] = eirp[k] / received[k];
        if (k == 0 || est.loss[k] < est.l_min) {
            est.l_min = est.loss[k];
            est.k_star = k;
        }
    }
    return est;
}

// I_th = alpha N0WF / J.  J counts the requesting user itself, so J = 0 is
// treated as 1.
inline PowerLinear open_loop_threshold(const PcParams& params, int j)
{
    if (j < 1) {
        log::debug("open_loop_threshold: J = ", j, " treated as 1");
        j = 1;
    }
    return params.alpha * params.noise_floor / static_cast<double>(j);
}

inline PowerLinear open_loop_pmax(PowerLinear threshold, PowerLinear l_min, PowerLinear pmax_hard)
{
    return min(threshold * l_min, pmax_hard);
}

// Adaptive threshold: frozen at beta NI(0) while the measured NI sits at or
// above its femto-silent baseline, raised by beta (NI(0) - NI(n)) below it.
inline PowerLinear closed_loop_threshold(PowerLinear ni0, PowerLinear ni_n, PowerLinear ith0, double beta, long n)
{
    if (n == 0 || ni_n >= ni0) {
        return beta * ni0;
    }
    return ith0 + beta * (ni0 - ni_n);
}

inline PowerLinear closed_loop_pmax(PowerLinear threshold, PowerLinear l_min, PowerLinear pmax_hard)
{
    return min(threshold * l_min, pmax_hard);
}

// beta such that beta NI(0) equals the open-loop threshold.
inline double calibrate_beta(const PcParams& params, int j, PowerLinear ni0_kstar)
{
    if (j < 1) j = 1;
    if (!(ni0_kstar.value > 0.0)) {
        throw DomainError("calibrate_beta: NI(0) must be positive");
    }
    return params.alpha * params.noise_floor.value / (static_cast<double>(j) * ni0_kstar.value);
}

inline PowerLinear estimated_crosstier_interference(PowerLinear tx_power, PowerLinear l_min) { return tx_power / l_min; }

enum class PmaxMode { FixedCap, OpenLoop, ClosedLoop };

inline PmaxMode pmax_mode_for(Scheme s)
{
    switch (s) {
    case Scheme::OpenLoop: return PmaxMode::OpenLoop;
    case Scheme::ClosedLoop: return PmaxMode::ClosedLoop;
    default: return PmaxMode::FixedCap;
    }
}

// Maximum-power controller of one femto user.
class FemtoPowerState {
public:
    FemtoPowerState() = default;

    // k_star_bs: network index of the macro BS at neighbor.k_star;
    // ni0_kstar: its femto-silent NI baseline.
    FemtoPowerState(PmaxMode mode, const PcParams& params, NeighborEstimate neighbor, std::size_t k_star_bs, int j,
                    PowerLinear ni0_kstar)
        : mode_(mode), params_(params), neighbor_(std::move(neighbor)), k_star_bs_(k_star_bs), j_(std::max(j, 1)),
          ni0_(ni0_kstar)
    {
        ith_ol_ = open_loop_threshold(params_, j_);
        if (mode_ == PmaxMode::ClosedLoop) {
            beta_ = calibrate_beta(params_, j_, ni0_);
            ith0_ = beta_ * ni0_;
        } else {
            ith0_ = ith_ol_;
        }
        update(ni0_);
        step_ = 0;
    }

    PmaxMode mode() const { return mode_; }
    const NeighborEstimate& neighbor() const { return neighbor_; }
    std::size_t k_star_bs() const { return k_star_bs_; }
    int j() const { return j_; }
    double beta() const { return beta_; }
    PowerLinear ni0() const { return ni0_; }
    PowerLinear ith0() const { return ith0_; }
    PowerLinear open_loop_threshold_value() const { return ith_ol_; }
    PowerLinear threshold() const { return ith_; }
    PowerLinear current_pmax() const { return pmax_; }
    long step() const { return step_; }

    // Recomputes P_max from the latest NI broadcast of k* and advances n.
    PowerLinear update(PowerLinear ni_kstar)
    {
        switch (mode_) {
        case PmaxMode::FixedCap:
            ith_ = ith_ol_;
            pmax_ = params_.pmax_hard;
            break;
        case PmaxMode::OpenLoop:
            ith_ = ith_ol_;
            pmax_ = open_loop_pmax(ith_, neighbor_.l_min, params_.pmax_hard);
            break;
        case PmaxMode::ClosedLoop:
            ith_ = closed_loop_threshold(ni0_, ni_kstar, ith0_, beta_, step_);
            pmax_ = closed_loop_pmax(ith_, neighbor_.l_min, params_.pmax_hard);
            break;
        }
        ++step_;
        return pmax_;
    }

private:
    PmaxMode mode_ = PmaxMode::FixedCap;
    PcParams params_;
    NeighborEstimate neighbor_;
    std::size_t k_star_bs_ = 0;
    int j_ = 1;
    PowerLinear ni0_;
    double beta_ = 0.0;
    PowerLinear ith0_;
    PowerLinear ith_ol_;
    PowerLinear ith_;
    PowerLinear pmax_;
    long step_ = 0;
};

} // namespace femtopc
