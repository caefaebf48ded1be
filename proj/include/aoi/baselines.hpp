#pragma once

#include <cstdint>
#include <vector>

#include "aoi/belief.hpp"
#include "aoi/model.hpp"
#include "aoi/solver.hpp"

namespace aoi {

/// Request-aware greedy: command exactly when there is a request.
inline int greedy_action(int r) { return r; }

/// Optimal policy for the fully observed benchmark where the edge node knows
/// the exact battery level each slot.  Solved with the same RVIA core over
/// states s = (b, r, delta).
struct ExactMdpPolicy {
    ModelParams params;
    double mu = 0.0;                   ///< command penalty used in the solve
    std::vector<std::uint8_t> table;   ///< action per flattened state
    std::vector<double> h;
    double c_star_exact = 0.0;
    std::int64_t iterations = 0;
    double span_final = 0.0;

    int index(int b, int r, int delta) const {
        return (b * 2 + r) * params.delta_max + (delta - 1);
    }
    int action(int b, int r, int delta) const {
        return table[static_cast<size_t>(index(b, r, delta))];
    }
    int state_count() const { return (params.battery + 1) * 2 * params.delta_max; }
};

/// Transition matrices and cost vectors of the fully observed MDP,
/// reconstructed by conditioning the partial-knowledge kernel on the true
/// battery level.  `mu` adds a per-command penalty to the action-1 costs.
struct ExactKernel {
    CsrMatrix p0;
    CsrMatrix p1;
    std::vector<double> c0;
    std::vector<double> c1;
};
ExactKernel build_exact_kernel(const ModelParams& params, double mu = 0.0);

ExactMdpPolicy exact_mdp_solve(const ModelParams& params, double mu = 0.0,
                               std::int64_t max_iterations = 100000);

/// Most likely battery level: argmax of the belief, ties to the lowest level.
int mle_battery(const Belief& beta);

/// Acts as the exact-knowledge policy would at the most likely battery level.
inline int mle_action(const ExactMdpPolicy& exact, const Belief& beta, int r, int delta) {
    return exact.action(mle_battery(beta), r, delta);
}

} // namespace aoi
