#include "aoi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aoi {

namespace {

// Sums duplicate columns within each row in place.  The belief-MDP rows
// never produce duplicates (the rho^0 target differs from every rho^j
// target in the AoI component), so this normally leaves the matrix intact;
// the structural pre-merge count is asserted by the caller.
void merge_row_duplicates(CsrMatrix& a) {
    std::int64_t write = 0;
    std::vector<std::int64_t> ptr(a.row_ptr.size());
    ptr[0] = 0;
    for (int r = 0; r < a.rows; ++r) {
        const std::int64_t begin = write;
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            bool merged = false;
            for (std::int64_t w = begin; w < write; ++w) {
                if (a.col[w] == a.col[k]) {
                    a.val[w] += a.val[k];
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                a.col[write] = a.col[k];
                a.val[write] = a.val[k];
                ++write;
            }
        }
        ptr[r + 1] = write;
    }
    a.row_ptr = std::move(ptr);
    a.col.resize(static_cast<size_t>(write));
    a.val.resize(static_cast<size_t>(write));
}

} // namespace

std::pair<std::vector<double>, std::vector<double>>
build_cost_vectors(const TruncatedBeliefSpace& space, const ModelParams& params) {
    params.validate();
    const BeliefStateIndexer idx(space.rows(), space.cols(), params.delta_max);
    std::vector<double> c0(static_cast<size_t>(idx.size()), 0.0);
    std::vector<double> c1(static_cast<size_t>(idx.size()), 0.0);

    for (int bl = 0; bl < idx.belief_count(); ++bl) {
        const double beta0 = space.at(space.from_linear(bl))[0];
        for (int delta = 1; delta <= params.delta_max; ++delta) {
            const double aged = std::min(delta + 1, params.delta_max);
            // r = 0 entries stay zero.
            c0[idx.flatten(bl, 1, delta)] = aged;
            c1[idx.flatten(bl, 1, delta)] = beta0 * aged + (1.0 - beta0);
        }
    }
    return {std::move(c0), std::move(c1)};
}

std::pair<CsrMatrix, CsrMatrix>
build_transition_matrices(const TruncatedBeliefSpace& space, const ModelParams& params) {
    params.validate();
    const BeliefStateIndexer idx(space.rows(), space.cols(), params.delta_max);
    const int n = idx.size();
    const int capacity = space.capacity();
    const double p = params.p;

    const int per_row0 = 2;
    const int per_row1 = 2 * (capacity + 1);

    CsrMatrix p0;
    p0.rows = p0.cols = n;
    p0.row_ptr.resize(static_cast<size_t>(n) + 1);
    p0.col.resize(static_cast<size_t>(n) * per_row0);
    p0.val.resize(static_cast<size_t>(n) * per_row0);

    CsrMatrix p1;
    p1.rows = p1.cols = n;
    p1.row_ptr.resize(static_cast<size_t>(n) + 1);
    p1.col.resize(static_cast<size_t>(n) * per_row1);
    p1.val.resize(static_cast<size_t>(n) * per_row1);

    for (int z = 0; z < n; ++z) {
        p0.row_ptr[z] = static_cast<std::int64_t>(z) * per_row0;
        p1.row_ptr[z] = static_cast<std::int64_t>(z) * per_row1;
    }
    p0.row_ptr[n] = static_cast<std::int64_t>(n) * per_row0;
    p1.row_ptr[n] = static_cast<std::int64_t>(n) * per_row1;

#pragma omp parallel for schedule(static)
    for (int z = 0; z < n; ++z) {
        const auto s = idx.unflatten(z);
        const int aged = std::min(s.delta + 1, params.delta_max);

        // a = 0: belief advances one column, AoI ages, request resamples.
        const int next_bl = s.row * space.cols() + std::min(s.col + 1, space.depth());
        std::int64_t k = p0.row_ptr[z];
        p0.col[k] = idx.flatten(next_bl, 0, aged);
        p0.val[k] = 1.0 - p;
        p0.col[k + 1] = idx.flatten(next_bl, 1, aged);
        p0.val[k + 1] = p;

        // a = 1: the empty-battery slice lands on rho^0 with an aged AoI;
        // level j >= 1 delivers an update, resetting AoI to 1 on rho^j.
        const Belief& beta = space.at(s.row, s.col);
        const int rho0_bl = 1 * space.cols();  // rho^0 == rho^1 at (1, 0)
        k = p1.row_ptr[z];
        p1.col[k] = idx.flatten(rho0_bl, 0, aged);
        p1.val[k] = (1.0 - p) * beta[0];
        p1.col[k + 1] = idx.flatten(rho0_bl, 1, aged);
        p1.val[k + 1] = p * beta[0];
        k += 2;
        for (int j = 1; j <= capacity; ++j, k += 2) {
            const int bl = j * space.cols();
            p1.col[k] = idx.flatten(bl, 0, 1);
            p1.val[k] = (1.0 - p) * beta[static_cast<size_t>(j)];
            p1.col[k + 1] = idx.flatten(bl, 1, 1);
            p1.val[k + 1] = p * beta[static_cast<size_t>(j)];
        }
    }

    // Structural counts hold pre-merge by construction.
    for (int z = 0; z < n; ++z) {
        if (p0.row_nnz(z) != per_row0 || p1.row_nnz(z) != per_row1)
            throw std::logic_error("kernel row has unexpected stored entry count");
    }
    merge_row_duplicates(p0);
    merge_row_duplicates(p1);
    return {std::move(p0), std::move(p1)};
}

SparseKernel build_kernel(const TruncatedBeliefSpace& space, const ModelParams& params) {
    SparseKernel kernel;
    kernel.idx = BeliefStateIndexer(space.rows(), space.cols(), params.delta_max);
    auto [c0, c1] = build_cost_vectors(space, params);
    auto [p0, p1] = build_transition_matrices(space, params);
    kernel.c0 = std::move(c0);
    kernel.c1 = std::move(c1);
    kernel.p0 = std::move(p0);
    kernel.p1 = std::move(p1);
    kernel.stored_per_row_p0 = 2;
    kernel.stored_per_row_p1 = 2 * space.rows();
    return kernel;
}

std::pair<double, double> q_values(const SparseKernel& kernel, int z, std::span<const double> h) {
    double q0 = kernel.c0[static_cast<size_t>(z)];
    for (std::int64_t k = kernel.p0.row_ptr[z]; k < kernel.p0.row_ptr[z + 1]; ++k)
        q0 += kernel.p0.val[k] * h[static_cast<size_t>(kernel.p0.col[k])];
    double q1 = kernel.c1[static_cast<size_t>(z)];
    for (std::int64_t k = kernel.p1.row_ptr[z]; k < kernel.p1.row_ptr[z + 1]; ++k)
        q1 += kernel.p1.val[k] * h[static_cast<size_t>(kernel.p1.col[k])];
    return {q0, q1};
}

SolveResult rvia_solve(const CsrMatrix& p0, const CsrMatrix& p1,
                       const std::vector<double>& c0, const std::vector<double>& c1,
                       int z_ref, const RviaOptions& opts) {
    const int n = p0.rows;
    if (p1.rows != n || static_cast<int>(c0.size()) != n || static_cast<int>(c1.size()) != n)
        throw std::invalid_argument("kernel size mismatch");
    if (z_ref < 0 || z_ref >= n) throw std::invalid_argument("z_ref out of range");
    if (!(opts.theta > 0.0)) throw std::invalid_argument("theta must be > 0");

    std::vector<double> v(static_cast<size_t>(n), 0.0);
    if (opts.warm_start) {
        if (static_cast<int>(opts.warm_start->size()) != n)
            throw std::invalid_argument("warm start size mismatch");
        v = *opts.warm_start;
    }
    std::vector<double> h(static_cast<size_t>(n));
    const double v0_ref = v[static_cast<size_t>(z_ref)];
    for (int z = 0; z < n; ++z) h[static_cast<size_t>(z)] = v[static_cast<size_t>(z)] - v0_ref;

    std::vector<double> q0(static_cast<size_t>(n)), q1(static_cast<size_t>(n));
    std::vector<double> v_new(static_cast<size_t>(n));

    double span = 0.0;
    std::int64_t it = 0;
    bool converged = false;
    while (it < opts.max_iterations) {
        ++it;
        spmv(p0, h.data(), q0.data());
        spmv(p1, h.data(), q1.data());

        double d_max = -std::numeric_limits<double>::infinity();
        double d_min = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : d_max) reduction(min : d_min)
        for (int z = 0; z < n; ++z) {
            const double val = std::min(c0[static_cast<size_t>(z)] + q0[static_cast<size_t>(z)],
                                        c1[static_cast<size_t>(z)] + q1[static_cast<size_t>(z)]);
            v_new[static_cast<size_t>(z)] = val;
            const double d = val - v[static_cast<size_t>(z)];
            d_max = std::max(d_max, d);
            d_min = std::min(d_min, d);
        }
        span = d_max - d_min;
        if (!std::isfinite(span))
            throw NumericalError("rvia_solve: non-finite values at iteration " + std::to_string(it));

        const double v_ref = v_new[static_cast<size_t>(z_ref)];
#pragma omp parallel for schedule(static)
        for (int z = 0; z < n; ++z)
            h[static_cast<size_t>(z)] = v_new[static_cast<size_t>(z)] - v_ref;
        v.swap(v_new);

        if (span < opts.theta) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("rvia_solve: iteration limit " + std::to_string(opts.max_iterations) +
                             " exceeded, last span " + std::to_string(span));

    SolveResult result;
    result.c_star = v[static_cast<size_t>(z_ref)];
    result.iterations = it;
    result.span_final = span;
    result.policy.resize(static_cast<size_t>(n));

    spmv(p0, h.data(), q0.data());
    spmv(p1, h.data(), q1.data());
    double resid = 0.0;
#pragma omp parallel for schedule(static) reduction(max : resid)
    for (int z = 0; z < n; ++z) {
        const double qa0 = c0[static_cast<size_t>(z)] + q0[static_cast<size_t>(z)];
        const double qa1 = c1[static_cast<size_t>(z)] + q1[static_cast<size_t>(z)];
        result.policy[static_cast<size_t>(z)] = qa1 < qa0 ? 1 : 0;
        resid = std::max(resid, std::abs(std::min(qa0, qa1) - result.c_star -
                                         h[static_cast<size_t>(z)]));
    }
    result.residual = resid;
    result.h = std::move(h);
    return result;
}

SolveResult rvia_solve(const SparseKernel& kernel, const RviaOptions& opts) {
    return rvia_solve(kernel.p0, kernel.p1, kernel.c0, kernel.c1, 0, opts);
}

ThresholdProfile policy_threshold_profile(std::span<const std::uint8_t> policy,
                                          const BeliefStateIndexer& idx) {
    ThresholdProfile profile;
    profile.threshold.assign(static_cast<size_t>(idx.belief_count()), ThresholdProfile::kNever);
    for (int bl = 0; bl < idx.belief_count(); ++bl) {
        int first = ThresholdProfile::kNever;
        for (int delta = 1; delta <= idx.delta_max(); ++delta) {
            const bool command = policy[static_cast<size_t>(idx.flatten(bl, 1, delta))] == 1;
            if (command && first == ThresholdProfile::kNever) first = delta;
            if (!command && first != ThresholdProfile::kNever) {
                profile.violations.push_back(
                    {bl / idx.belief_cols(), bl % idx.belief_cols(), delta});
                break;
            }
        }
        profile.threshold[static_cast<size_t>(bl)] = first;
    }
    return profile;
}

bool commands_without_request(std::span<const std::uint8_t> policy,
                              const BeliefStateIndexer& idx) {
    for (int bl = 0; bl < idx.belief_count(); ++bl)
        for (int delta = 1; delta <= idx.delta_max(); ++delta)
            if (policy[static_cast<size_t>(idx.flatten(bl, 0, delta))] == 1) return true;
    return false;
}

} // namespace aoi
