#include "aoi/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stack>
#include <stdexcept>

namespace aoi {

CsrMatrix induced_chain(const CsrMatrix& p0, const CsrMatrix& p1,
                        std::span<const std::uint8_t> policy) {
    if (p0.rows != p1.rows || static_cast<int>(policy.size()) != p0.rows)
        throw std::invalid_argument("policy size mismatch");
    CsrMatrix chain;
    chain.rows = p0.rows;
    chain.cols = p0.cols;
    chain.row_ptr.resize(static_cast<size_t>(chain.rows) + 1);
    chain.row_ptr[0] = 0;
    for (int z = 0; z < chain.rows; ++z) {
        const CsrMatrix& src = policy[static_cast<size_t>(z)] ? p1 : p0;
        chain.row_ptr[z + 1] = chain.row_ptr[z] + src.row_nnz(z);
    }
    chain.col.resize(static_cast<size_t>(chain.row_ptr[chain.rows]));
    chain.val.resize(static_cast<size_t>(chain.row_ptr[chain.rows]));
    for (int z = 0; z < chain.rows; ++z) {
        const CsrMatrix& src = policy[static_cast<size_t>(z)] ? p1 : p0;
        std::int64_t w = chain.row_ptr[z];
        for (std::int64_t k = src.row_ptr[z]; k < src.row_ptr[z + 1]; ++k, ++w) {
            chain.col[w] = src.col[k];
            chain.val[w] = src.val[k];
        }
    }
    return chain;
}

StationaryResult stationary_distribution(const CsrMatrix& chain, const StationaryOptions& opts) {
    const int n = chain.rows;
    const CsrMatrix pt = transpose(chain);

    StationaryResult result;
    result.distribution.assign(static_cast<size_t>(n), 1.0 / n);
    std::vector<double> next(static_cast<size_t>(n));

    // Lazy damping: iterating 0.9 P + 0.1 I keeps the stationary vector and
    // removes periodicity, so deterministic cycles converge too.
    constexpr double kDamping = 0.9;
    for (std::int64_t it = 1; it <= opts.max_iterations; ++it) {
        spmv(pt, result.distribution.data(), next.data());

        double delta = 0.0;
        double mass = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) reduction(+ : mass)
        for (int z = 0; z < n; ++z) {
            next[static_cast<size_t>(z)] =
                kDamping * next[static_cast<size_t>(z)] +
                (1.0 - kDamping) * result.distribution[static_cast<size_t>(z)];
            delta = std::max(delta,
                             std::abs(next[static_cast<size_t>(z)] -
                                      result.distribution[static_cast<size_t>(z)]));
            mass += next[static_cast<size_t>(z)];
        }
        // Renormalize to absorb rounding drift.
        const double inv = 1.0 / mass;
        for (int z = 0; z < n; ++z) next[static_cast<size_t>(z)] *= inv;

        result.distribution.swap(next);
        result.iterations = it;
        result.delta_final = delta;
        if (delta < opts.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

double expected_value(std::span<const double> dist, std::span<const double> values) {
    double acc = 0.0;
    for (size_t i = 0; i < dist.size(); ++i) acc += dist[i] * values[i];
    return acc;
}

namespace {

// Iterative Tarjan over positive-probability edges.
struct TarjanState {
    const CsrMatrix& g;
    std::vector<int> index, lowlink, component;
    std::vector<bool> on_stack;
    std::stack<int> stack;
    int next_index = 0;
    int components = 0;

    explicit TarjanState(const CsrMatrix& graph)
        : g(graph),
          index(static_cast<size_t>(graph.rows), -1),
          lowlink(static_cast<size_t>(graph.rows), 0),
          component(static_cast<size_t>(graph.rows), -1),
          on_stack(static_cast<size_t>(graph.rows), false) {}

    void run(int root) {
        struct Frame {
            int v;
            std::int64_t edge;
        };
        std::vector<Frame> frames;
        frames.push_back({root, g.row_ptr[root]});
        index[root] = lowlink[root] = next_index++;
        stack.push(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            bool descended = false;
            while (f.edge < g.row_ptr[f.v + 1]) {
                const std::int64_t k = f.edge++;
                if (g.val[k] <= 0.0) continue;
                const int w = g.col[k];
                if (index[w] < 0) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push_back({w, g.row_ptr[w]});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[f.v] = std::min(lowlink[f.v], index[w]);
            }
            if (descended) continue;

            if (lowlink[f.v] == index[f.v]) {
                int w;
                do {
                    w = stack.top();
                    stack.pop();
                    on_stack[w] = false;
                    component[w] = components;
                } while (w != f.v);
                ++components;
            }
            const int v = f.v;
            frames.pop_back();
            if (!frames.empty())
                lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        }
    }
};

} // namespace

int count_recurrent_classes(const CsrMatrix& chain) {
    TarjanState tarjan(chain);
    for (int v = 0; v < chain.rows; ++v)
        if (tarjan.index[v] < 0) tarjan.run(v);

    // A class is recurrent iff it has no positive-probability edge leaving it.
    std::vector<bool> closed(static_cast<size_t>(tarjan.components), true);
    for (int v = 0; v < chain.rows; ++v) {
        for (std::int64_t k = chain.row_ptr[v]; k < chain.row_ptr[v + 1]; ++k) {
            if (chain.val[k] <= 0.0) continue;
            if (tarjan.component[v] != tarjan.component[chain.col[k]])
                closed[static_cast<size_t>(tarjan.component[v])] = false;
        }
    }
    int count = 0;
    for (bool c : closed) count += c ? 1 : 0;
    return count;
}

} // namespace aoi
