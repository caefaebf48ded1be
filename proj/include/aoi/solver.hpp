#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aoi/belief.hpp"
#include "aoi/model.hpp"
#include "aoi/sparse.hpp"

namespace aoi {

/// Raised when an iterative solve hits its iteration cap or produces a
/// non-finite value.  Carries the last observed span in the message.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flattened index over belief-states z = (belief row, belief col, r, delta).
/// Index 0 is (0, 0, r=0, delta=1), the reference state.
class BeliefStateIndexer {
public:
    BeliefStateIndexer() = default;
    BeliefStateIndexer(int belief_rows, int belief_cols, int delta_max)
        : belief_rows_(belief_rows), belief_cols_(belief_cols), delta_max_(delta_max) {}

    int belief_rows() const { return belief_rows_; }
    int belief_cols() const { return belief_cols_; }
    int delta_max() const { return delta_max_; }
    int belief_count() const { return belief_rows_ * belief_cols_; }
    int size() const { return belief_count() * 2 * delta_max_; }

    int flatten(int belief_linear, int r, int delta) const {
        return (belief_linear * 2 + r) * delta_max_ + (delta - 1);
    }
    int flatten(int row, int col, int r, int delta) const {
        return flatten(row * belief_cols_ + col, r, delta);
    }

    struct State {
        int row;
        int col;
        int r;
        int delta;
    };
    State unflatten(int z) const {
        const int delta = z % delta_max_ + 1;
        z /= delta_max_;
        const int r = z % 2;
        const int belief = z / 2;
        return {belief / belief_cols_, belief % belief_cols_, r, delta};
    }

private:
    int belief_rows_ = 0;
    int belief_cols_ = 1;
    int delta_max_ = 1;
};

/// Per-action transition matrices and cost vectors of the belief-MDP.
/// Every row of p0 stores exactly 2 entries and every row of p1 exactly
/// 2(B+1) entries (explicit zeros included); rows sum to one.
struct SparseKernel {
    BeliefStateIndexer idx;
    CsrMatrix p0;
    CsrMatrix p1;
    std::vector<double> c0;
    std::vector<double> c1;
    int stored_per_row_p0 = 0;  ///< structural count, asserted pre-merge
    int stored_per_row_p1 = 0;
};

/// c(z,0) = r min{delta+1, delta_max};
/// c(z,1) = r [beta_0 min{delta+1, delta_max} + (1 - beta_0)].
std::pair<std::vector<double>, std::vector<double>>
build_cost_vectors(const TruncatedBeliefSpace& space, const ModelParams& params);

/// Action-0 rows put mass (1-p), p on (Lambda beta, r', min{delta+1, dmax});
/// action-1 rows put (1-p) beta_0, p beta_0 on (rho^0, r', min{delta+1,
/// dmax}) and (1-p) beta_j, p beta_j on (rho^j, r', 1) for j = 1..B.
std::pair<CsrMatrix, CsrMatrix>
build_transition_matrices(const TruncatedBeliefSpace& space, const ModelParams& params);

SparseKernel build_kernel(const TruncatedBeliefSpace& space, const ModelParams& params);

/// Q(z,a) = c(z,a) + row_a(z) . h
std::pair<double, double> q_values(const SparseKernel& kernel, int z, std::span<const double> h);

struct RviaOptions {
    double theta = 1e-7;
    std::int64_t max_iterations = 100000;
    /// Optional initial value vector (default all zeros).
    const std::vector<double>* warm_start = nullptr;
};

/// Observed bound on the fixed-point residual relative to theta; the solve
/// result's residual satisfies residual <= kRviaResidualFactor * theta on
/// converged instances.
inline constexpr double kRviaResidualFactor = 10.0;

struct SolveResult {
    double c_star = 0.0;            ///< optimal average cost, V(z_ref) at convergence
    std::vector<double> h;          ///< relative values, h(z_ref) = 0
    std::vector<std::uint8_t> policy;  ///< argmin_a Q(z,a); ties prefer a = 0
    std::int64_t iterations = 0;
    double span_final = 0.0;
    double residual = 0.0;          ///< max_z |min_a Q(z,a) - c_star - h(z)|
};

/// Relative value iteration in vector form:
///   v(i) = min_a [c^a + P^a h(i-1)],  h(i) = v(i) - v(i)[z_ref],
/// stopping when sp(v(i) - v(i-1)) < theta.
SolveResult rvia_solve(const CsrMatrix& p0, const CsrMatrix& p1,
                       const std::vector<double>& c0, const std::vector<double>& c1,
                       int z_ref, const RviaOptions& opts = {});

/// Convenience overload using the kernel's reference state (index 0).
SolveResult rvia_solve(const SparseKernel& kernel, const RviaOptions& opts = {});

/// Per-belief AoI command thresholds of a solved policy (r = 1 side).
struct ThresholdProfile {
    static constexpr int kNever = -1;
    /// Smallest delta with action 1, or kNever; indexed by belief linear index.
    std::vector<int> threshold;
    struct Violation {
        int row;
        int col;
        int delta;  ///< first delta where the action drops back to 0
    };
    std::vector<Violation> violations;  ///< non-monotone-in-delta beliefs
};

ThresholdProfile policy_threshold_profile(std::span<const std::uint8_t> policy,
                                          const BeliefStateIndexer& idx);

/// True if the policy commands in any r = 0 state.
bool commands_without_request(std::span<const std::uint8_t> policy,
                              const BeliefStateIndexer& idx);

} // namespace aoi
