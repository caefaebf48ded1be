#include "aoi/simulator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace aoi {

void EpisodeConfig::validate() const {
    if (slots < 1) throw std::invalid_argument("slots must be >= 1");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (resolved_warmup() >= slots)
        throw std::invalid_argument("warmup must be smaller than slots");
}

BeliefIndex belief_tracker_step(BeliefIndex idx, int a, const Observation& obs,
                                const TruncatedBeliefSpace& space) {
    if (a == 0) {
        if (obs.delta == 1)
            throw std::invalid_argument("inconsistent observation: delta' = 1 without a command");
        return space.step_no_command(idx);
    }
    if (obs.delta > 1) return space.reset_no_update();
    return space.reset_after_update(obs.b_tilde);
}

namespace {

struct EpisodeAccum {
    double cost_mean = 0.0;
    double command_mean = 0.0;
};

EpisodeAccum run_episode(const PolicyFn& policy, const ModelParams& params,
                         const TruncatedBeliefSpace& space, const EpisodeConfig& config,
                         int episode, std::ostream* trace, std::int64_t trace_limit) {
    // Stream layout matches the multi-sensor engine at K = 1: sensor stream
    // first, one reserved stream per episode after it.
    SplitMix64 rng = make_stream(config.seed, static_cast<std::uint64_t>(episode) * 2);
    SensorEnv env;
    env.reset(params);

    const std::int64_t warmup = config.resolved_warmup();
    std::int64_t cost_sum = 0;
    std::int64_t command_sum = 0;

    for (std::int64_t t = 1; t <= config.slots; ++t) {
        const int r = rng.bernoulli(params.p) ? 1 : 0;
        const PolicyView view{env.belief, &space.at(env.belief), r, env.delta, env.b_tilde, env.b};
        const int a = policy(view);
        const int e = rng.bernoulli(params.lambda) ? 1 : 0;

        if (trace && t <= trace_limit) {
            const int d = (env.b >= 1) ? a : 0;
            *trace << t << ',' << env.b << ',' << r << ',' << env.delta << ',' << env.b_tilde
                   << ',' << a << ',' << d << ','
                   << on_demand_aoi(r, d, env.delta, params.delta_max) << '\n';
        }

        const int cost = env.step(a, r, e, params, space);
        if (t > warmup) {
            cost_sum += cost;
            command_sum += a;
        }
    }

    const double denom = static_cast<double>(config.slots - warmup);
    return {static_cast<double>(cost_sum) / denom, static_cast<double>(command_sum) / denom};
}

} // namespace

CostEstimate simulate(const PolicyFn& policy, const ModelParams& params,
                      const TruncatedBeliefSpace& space, const EpisodeConfig& config,
                      std::ostream* trace, std::int64_t trace_limit) {
    params.validate();
    config.validate();

    std::vector<EpisodeAccum> episodes(static_cast<size_t>(config.episodes));
    if (trace) {
        for (int e = 0; e < config.episodes; ++e)
            episodes[static_cast<size_t>(e)] = run_episode(policy, params, space, config, e,
                                                           e == 0 ? trace : nullptr, trace_limit);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int e = 0; e < config.episodes; ++e)
            episodes[static_cast<size_t>(e)] =
                run_episode(policy, params, space, config, e, nullptr, 0);
    }

    CostEstimate est;
    est.per_episode.reserve(episodes.size());
    double cost_acc = 0.0;
    double command_acc = 0.0;
    for (const EpisodeAccum& ep : episodes) {
        est.per_episode.push_back(ep.cost_mean);
        cost_acc += ep.cost_mean;
        command_acc += ep.command_mean;
    }
    est.mean = cost_acc / config.episodes;
    est.command_rate = command_acc / config.episodes;
    if (config.episodes > 1) {
        double ss = 0.0;
        for (double m : est.per_episode) ss += (m - est.mean) * (m - est.mean);
        est.std_error = std::sqrt(ss / (config.episodes - 1)) / std::sqrt(config.episodes);
    }
    return est;
}

PolicyFn make_pomdp_policy(std::vector<std::uint8_t> policy, BeliefStateIndexer idx) {
    return [policy = std::move(policy), idx](const PolicyView& view) {
        return static_cast<int>(
            policy[static_cast<size_t>(idx.flatten(view.belief.row, view.belief.col, view.r,
                                                   view.delta))]);
    };
}

PolicyFn make_greedy_policy() {
    return [](const PolicyView& view) { return greedy_action(view.r); };
}

PolicyFn make_exact_policy(ExactMdpPolicy exact) {
    return [exact = std::move(exact)](const PolicyView& view) {
        return exact.action(view.true_battery, view.r, view.delta);
    };
}

PolicyFn make_mle_policy(ExactMdpPolicy exact) {
    return [exact = std::move(exact)](const PolicyView& view) {
        return mle_action(exact, *view.belief_vec, view.r, view.delta);
    };
}

} // namespace aoi
