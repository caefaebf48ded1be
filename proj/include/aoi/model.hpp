#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aoi {

/// Scalar problem definition shared by the solver, the baselines, and the
/// simulator.  `m` is the belief truncation depth (number of belief columns
/// minus one); pass the result of choose_m() for automatic selection.
struct ModelParams {
    double lambda = 0.1;   ///< energy arrival probability per slot, in (0, 1]
    double p = 0.5;        ///< request probability per slot, in [0, 1]
    int battery = 1;       ///< battery capacity B, >= 1
    int delta_max = 2;     ///< AoI cap in slots, >= 2
    int m = 1;             ///< belief truncation depth M, >= 1
    double theta = 1e-7;   ///< RVIA span threshold, > 0

    void validate() const;
};

/// Fully observed environment state.  `b_tilde` is the battery level at the
/// beginning of the most recent slot whose update packet was received.
struct EnvState {
    int b = 0;
    int r = 0;
    int delta = 1;
    int b_tilde = 1;
};

/// min{b + e - d, B}.  Sending with an empty battery violates energy
/// causality and is rejected.
inline int battery_step(int b, int e, int d, int capacity) {
    if (b < 0 || b > capacity)
        throw std::invalid_argument("battery level out of range");
    if (d == 1 && b == 0)
        throw std::invalid_argument("cannot send an update from an empty battery");
    return std::min(b + e - d, capacity);
}

/// 1 on a received update, otherwise min{delta + 1, delta_max}.
inline int aoi_step(int delta, int d, int delta_max) {
    if (d == 1) return 1;
    return std::min(delta + 1, delta_max);
}

/// Age seen by the requesting users this slot:
/// r * min{(1 - d) * delta + 1, delta_max}.
inline int on_demand_aoi(int r, int d, int delta, int delta_max) {
    return r * std::min((1 - d) * delta + 1, delta_max);
}

/// Cost of taking action `a` in state `s`; the sensor transmits only when
/// commanded with a nonempty battery (d = a * 1{b >= 1}).
inline int immediate_cost(const EnvState& s, int a, int delta_max) {
    const int d = (s.b >= 1) ? a : 0;
    return on_demand_aoi(s.r, d, s.delta, delta_max);
}

} // namespace aoi
