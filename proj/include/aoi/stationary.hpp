#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoi/sparse.hpp"

namespace aoi {

/// Row-stochastic chain obtained by selecting, for every state, the row of
/// p0 or p1 named by the policy.
CsrMatrix induced_chain(const CsrMatrix& p0, const CsrMatrix& p1,
                        std::span<const std::uint8_t> policy);

struct StationaryOptions {
    double tol = 1e-13;                   ///< max-norm change per sweep
    std::int64_t max_iterations = 200000;
};

struct StationaryResult {
    std::vector<double> distribution;
    std::int64_t iterations = 0;
    double delta_final = 0.0;
    bool converged = false;
};

/// Stationary distribution by power iteration on the transposed chain,
/// started from the uniform distribution.  Assumes a uni-chain; see
/// count_recurrent_classes for a structural check on small instances.
StationaryResult stationary_distribution(const CsrMatrix& chain,
                                         const StationaryOptions& opts = {});

/// dist . values
double expected_value(std::span<const double> dist, std::span<const double> values);

/// Number of closed recurrent classes of the chain (terminal strongly
/// connected components over edges with positive probability).  Intended
/// for small instances; the uni-chain assumption holds iff this is 1.
int count_recurrent_classes(const CsrMatrix& chain);

} // namespace aoi
