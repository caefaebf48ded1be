#include "aoi/baselines.hpp"

#include <algorithm>

namespace aoi {

namespace {

struct Entry {
    int state;
    double mass;
};

void push_row(CsrMatrix& m, const std::vector<Entry>& entries) {
    for (const Entry& e : entries) {
        m.col.push_back(e.state);
        m.val.push_back(e.mass);
    }
    m.row_ptr.push_back(static_cast<std::int64_t>(m.col.size()));
}

} // namespace

ExactKernel build_exact_kernel(const ModelParams& params, double mu) {
    params.validate();
    const int capacity = params.battery;
    const int dmax = params.delta_max;
    const int n = (capacity + 1) * 2 * dmax;
    auto index = [dmax](int b, int r, int delta) { return (b * 2 + r) * dmax + (delta - 1); };

    ExactKernel kernel;
    kernel.p0.rows = kernel.p0.cols = n;
    kernel.p1.rows = kernel.p1.cols = n;
    kernel.p0.row_ptr.push_back(0);
    kernel.p1.row_ptr.push_back(0);
    kernel.c0.assign(static_cast<size_t>(n), 0.0);
    kernel.c1.assign(static_cast<size_t>(n), 0.0);

    const double lam = params.lambda;
    const double p = params.p;
    std::vector<Entry> row;

    for (int b = 0; b <= capacity; ++b) {
        for (int r = 0; r <= 1; ++r) {
            for (int delta = 1; delta <= dmax; ++delta) {
                const int z = index(b, r, delta);
                const int aged = std::min(delta + 1, dmax);
                kernel.c0[static_cast<size_t>(z)] = r * static_cast<double>(aged);
                kernel.c1[static_cast<size_t>(z)] =
                    (b >= 1 ? r * 1.0 : r * static_cast<double>(aged)) + mu;

                // a = 0: battery may harvest, AoI ages.
                row.clear();
                for (int rp = 0; rp <= 1; ++rp) {
                    const double pr = rp ? p : 1.0 - p;
                    if (b == capacity) {
                        row.push_back({index(capacity, rp, aged), pr});
                    } else {
                        row.push_back({index(b, rp, aged), pr * (1.0 - lam)});
                        row.push_back({index(b + 1, rp, aged), pr * lam});
                    }
                }
                push_row(kernel.p0, row);

                // a = 1: a nonempty battery sends (AoI resets, one unit
                // spent); an empty battery behaves like a = 0.
                row.clear();
                for (int rp = 0; rp <= 1; ++rp) {
                    const double pr = rp ? p : 1.0 - p;
                    if (b == 0) {
                        row.push_back({index(0, rp, aged), pr * (1.0 - lam)});
                        row.push_back({index(1, rp, aged), pr * lam});
                    } else {
                        row.push_back({index(b - 1, rp, 1), pr * (1.0 - lam)});
                        row.push_back({index(b, rp, 1), pr * lam});
                    }
                }
                push_row(kernel.p1, row);
            }
        }
    }
    return kernel;
}

ExactMdpPolicy exact_mdp_solve(const ModelParams& params, double mu,
                               std::int64_t max_iterations) {
    const ExactKernel kernel = build_exact_kernel(params, mu);
    RviaOptions opts;
    opts.theta = params.theta;
    opts.max_iterations = max_iterations;
    SolveResult result = rvia_solve(kernel.p0, kernel.p1, kernel.c0, kernel.c1, 0, opts);

    ExactMdpPolicy policy;
    policy.params = params;
    policy.mu = mu;
    policy.table = std::move(result.policy);
    policy.h = std::move(result.h);
    policy.c_star_exact = result.c_star;
    policy.iterations = result.iterations;
    policy.span_final = result.span_final;
    return policy;
}

int mle_battery(const Belief& beta) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(beta.size()); ++j)
        if (beta[static_cast<size_t>(j)] > beta[static_cast<size_t>(best)]) best = j;
    return best;
}

} // namespace aoi
