#pragma once

// Scenarios shared by the engine tests and the acceptance run.

#include <cmath>
#include <vector>

#include "femtopc/engine.hpp"

namespace fixture {

// Three BSs (two macro, one femto) and six users: four macro users split
// between the macro BSs and two femto users in the femtocell.  Losses are
// hand-picked in dB so that every kind of link appears.
inline femtopc::Network miniature_network()
{
    const std::vector<double> loss_db = {
        // BS0    BS1    BS2(femto)
        105.0, 128.0, 131.0, // user 0 -> BS0
        112.0, 125.0, 122.0, // user 1 -> BS0
        127.0, 101.0, 140.0, // user 2 -> BS1
        124.0, 115.0, 135.0, // user 3 -> BS1
        118.0, 133.0, 62.0,  // user 4 -> BS2 (femto)
        121.0, 129.0, 70.0,  // user 5 -> BS2 (femto)
    };
    std::vector<double> loss(loss_db.size());
    for (std::size_t i = 0; i < loss.size(); ++i) loss[i] = std::pow(10.0, loss_db[i] / 10.0);
    return femtopc::make_network(2, 1, 4, {0, 0, 1, 1, 2, 2}, loss);
}

inline femtopc::ScenarioConfig miniature_config(femtopc::Scheme scheme)
{
    femtopc::ScenarioConfig c;
    c.scheme = scheme;
    c.warmup_frames = 20;
    c.ni_average_frames = 10;
    c.data_frames = 100;
    c.fading_model = femtopc::FadingModel::PerLink;
    return c;
}

// Noise plus every scheduled transmitter not served by b, summed from the
// ledger's powers and the network's losses.
inline std::vector<double> brute_force_ni(const femtopc::Network& net, const femtopc::FadingField& fading,
                                          const femtopc::SlotLedger& l, double noise_mw)
{
    std::vector<double> ni(net.n_bs, noise_mw);
    for (std::size_t b = 0; b < net.n_bs; ++b) {
        for (std::size_t u = 0; u < net.n_users; ++u) {
            if (l.transmit_power[u] <= 0.0) continue;
            if (static_cast<std::size_t>(net.serving_bs[u]) == b) continue;
            ni[b] += l.transmit_power[u] * fading.uplink(u, b, l.frame) / net.loss(u, b);
        }
    }
    return ni;
}

} // namespace fixture
