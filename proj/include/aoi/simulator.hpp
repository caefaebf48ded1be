#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "aoi/baselines.hpp"
#include "aoi/belief.hpp"
#include "aoi/model.hpp"
#include "aoi/solver.hpp"

namespace aoi {

/// SplitMix64.  Streams are derived from (seed, stream id), so per-episode
/// and per-sensor sequences are independent of thread count and of each
/// other; identical seeds reproduce traces bit for bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double prob) { return next_double() < prob; }

    /// Uniform in [0, bound); rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % bound;
        }
    }

private:
    std::uint64_t state_;
};

/// Stream `stream` of the generator family seeded by `seed`.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return SplitMix64(z ^ (z >> 31));
}

struct EpisodeConfig {
    std::int64_t slots = 1000000;
    int episodes = 10;
    std::uint64_t seed = 1;
    std::int64_t warmup = -1;  ///< slots discarded before averaging; -1 = 1% of slots

    std::int64_t resolved_warmup() const { return warmup < 0 ? slots / 100 : warmup; }
    void validate() const;
};

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double command_rate = 0.0;  ///< mean executed commands per slot
    std::vector<double> per_episode;
};

/// What a policy sees when it is asked for an action.  `true_battery` is
/// read only by the exact-knowledge benchmark.
struct PolicyView {
    BeliefIndex belief;
    const Belief* belief_vec;
    int r;
    int delta;
    int b_tilde;
    int true_battery;
};
using PolicyFn = std::function<int(const PolicyView&)>;

/// Index-space form of the belief update: a no-command advances the column
/// (saturating at M); a command resets to row 1 (rho^0 == rho^1) when no
/// update arrived and to row b_tilde' when one did.
BeliefIndex belief_tracker_step(BeliefIndex idx, int a, const Observation& obs,
                                const TruncatedBeliefSpace& space);

/// One sensor's ground-truth state plus the edge node's tracked knowledge.
struct SensorEnv {
    int b = 0;
    int delta = 1;
    int b_tilde = 1;
    BeliefIndex belief{0, 0};

    void reset(const ModelParams& params) {
        b = 0;
        delta = 1;
        b_tilde = params.battery;
        belief = {0, 0};
    }

    /// Applies executed action `a` with pre-drawn request `r` and harvest
    /// `e`; returns this slot's on-demand AoI cost.
    int step(int a, int r, int e, const ModelParams& params, const TruncatedBeliefSpace& space) {
        const int d = (b >= 1) ? a : 0;
        const int cost = on_demand_aoi(r, d, delta, params.delta_max);
        const int delta_next = aoi_step(delta, d, params.delta_max);
        if (d == 1) b_tilde = b;
        belief = belief_tracker_step(belief, a, Observation{0, delta_next, b_tilde}, space);
        b = battery_step(b, e, d, params.battery);
        delta = delta_next;
        return cost;
    }
};

/// Runs `policy` against the true dynamics and estimates the average
/// on-demand AoI.  Episodes use independent RNG streams and may run in
/// parallel; aggregation is ordered by episode index.  When `trace` is given
/// the first episode is recorded as CSV rows (t, b, r, delta, b_tilde, a, d,
/// cost), capped at `trace_limit` slots, and episodes run serially.
CostEstimate simulate(const PolicyFn& policy, const ModelParams& params,
                      const TruncatedBeliefSpace& space, const EpisodeConfig& config,
                      std::ostream* trace = nullptr, std::int64_t trace_limit = 0);

PolicyFn make_pomdp_policy(std::vector<std::uint8_t> policy, BeliefStateIndexer idx);
PolicyFn make_greedy_policy();
PolicyFn make_exact_policy(ExactMdpPolicy exact);
PolicyFn make_mle_policy(ExactMdpPolicy exact);

} // namespace aoi
