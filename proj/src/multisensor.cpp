#include "aoi/multisensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "aoi/stationary.hpp"

namespace aoi {

int default_truncation_depth(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("lambda must be in (0, 1]");
    const int depth = static_cast<int>(std::ceil(1.25 / lambda));
    return std::clamp(depth, 4, 256);
}

void MultiModel::validate() const {
    if (sensors < 1) throw std::invalid_argument("sensors must be >= 1");
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    if (static_cast<int>(per_sensor.size()) != sensors)
        throw std::invalid_argument("per_sensor size must equal sensors");
    for (const ModelParams& params : per_sensor) params.validate();
}

MultiModel make_multi_model(int sensors, int budget, const ModelParams& base,
                            std::span<const double> lambda_cycle,
                            std::span<const int> depth_cycle) {
    if (lambda_cycle.empty()) throw std::invalid_argument("lambda cycle must be nonempty");
    MultiModel model;
    model.sensors = sensors;
    model.budget = budget;
    model.per_sensor.reserve(static_cast<size_t>(sensors));
    for (int k = 0; k < sensors; ++k) {
        ModelParams params = base;
        params.lambda = lambda_cycle[static_cast<size_t>(k) % lambda_cycle.size()];
        params.m = depth_cycle.empty()
                       ? default_truncation_depth(params.lambda)
                       : depth_cycle[static_cast<size_t>(k) % depth_cycle.size()];
        model.per_sensor.push_back(params);
    }
    model.validate();
    return model;
}

MultiPolicyKind parse_multi_policy_kind(const std::string& name) {
    if (name == "relax-truncate") return MultiPolicyKind::kRelaxTruncate;
    if (name == "greedy-n") return MultiPolicyKind::kGreedyN;
    if (name == "lower-bound") return MultiPolicyKind::kLowerBound;
    if (name == "exact-relax-truncate") return MultiPolicyKind::kExactRelaxTruncate;
    throw std::invalid_argument("unknown multi policy kind: " + name);
}

std::string to_string(MultiPolicyKind kind) {
    switch (kind) {
        case MultiPolicyKind::kRelaxTruncate: return "relax-truncate";
        case MultiPolicyKind::kGreedyN: return "greedy-n";
        case MultiPolicyKind::kLowerBound: return "lower-bound";
        case MultiPolicyKind::kExactRelaxTruncate: return "exact-relax-truncate";
    }
    return "?";
}

namespace {

// Long-run averages of the original cost and the command indicator under a
// fixed policy, by stationary distribution when the chain is small enough
// and by seeded simulation otherwise.
struct PolicyAverages {
    double cost = 0.0;
    double rate = 0.0;
    bool from_simulation = false;
};

PolicyAverages evaluate_policy(const CsrMatrix& p0, const CsrMatrix& p1,
                               const std::vector<double>& c0, const std::vector<double>& c1,
                               const std::vector<std::uint8_t>& policy,
                               const BisectOptions& opts) {
    const int n = p0.rows;
    if (n <= opts.stationary_state_cap) {
        const CsrMatrix chain = induced_chain(p0, p1, policy);
        const StationaryResult stat = stationary_distribution(chain);
        if (stat.converged) {
            PolicyAverages avg;
            for (int z = 0; z < n; ++z) {
                const double mass = stat.distribution[static_cast<size_t>(z)];
                if (policy[static_cast<size_t>(z)]) {
                    avg.rate += mass;
                    avg.cost += mass * c1[static_cast<size_t>(z)];
                } else {
                    avg.cost += mass * c0[static_cast<size_t>(z)];
                }
            }
            return avg;
        }
    }
    return {0.0, 0.0, true};  // caller must simulate
}

} // namespace

PerSensorSolve lagrangian_per_sensor_solve(const ModelParams& params, double mu,
                                           const TruncatedBeliefSpace& space,
                                           const SparseKernel& kernel, const BisectOptions& opts,
                                           const std::vector<double>* warm_start) {
    if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");

    std::vector<double> c1_mu = kernel.c1;
    for (double& c : c1_mu) c += mu;

    RviaOptions rvia;
    rvia.theta = opts.theta;
    rvia.max_iterations = opts.max_rvia_iterations;
    rvia.warm_start = warm_start;

    PerSensorSolve out;
    out.solve = rvia_solve(kernel.p0, kernel.p1, kernel.c0, c1_mu, 0, rvia);

    PolicyAverages avg =
        evaluate_policy(kernel.p0, kernel.p1, kernel.c0, kernel.c1, out.solve.policy, opts);
    if (avg.from_simulation) {
        EpisodeConfig sim;
        sim.slots = opts.rate_sim_slots;
        sim.episodes = 1;
        sim.seed = opts.rate_sim_seed;
        const CostEstimate est =
            simulate(make_pomdp_policy(out.solve.policy, kernel.idx), params, space, sim);
        avg.cost = est.mean;
        avg.rate = est.command_rate;
    }
    out.cost = avg.cost;
    out.command_rate = avg.rate;
    out.rate_from_simulation = avg.from_simulation;
    return out;
}

namespace {

struct TypeContext {
    ModelParams params;
    int members = 0;
    // partial-battery flavor
    std::shared_ptr<TruncatedBeliefSpace> space;
    SparseKernel kernel;
    std::vector<double> warm;
    // exact flavor
    ExactKernel exact_kernel;
    // last evaluation
    std::vector<std::uint8_t> policy;
    ExactMdpPolicy exact;
    double cost = 0.0;
    double rate = 0.0;
};

void solve_type_at(TypeContext& type, double mu, const BisectOptions& opts, bool exact_battery) {
    if (exact_battery) {
        std::vector<double> c1_mu = type.exact_kernel.c1;
        for (double& c : c1_mu) c += mu;
        RviaOptions rvia;
        rvia.theta = opts.theta;
        rvia.max_iterations = opts.max_rvia_iterations;
        rvia.warm_start = type.warm.empty() ? nullptr : &type.warm;
        SolveResult result = rvia_solve(type.exact_kernel.p0, type.exact_kernel.p1,
                                        type.exact_kernel.c0, c1_mu, 0, rvia);
        type.warm = result.h;
        const PolicyAverages avg =
            evaluate_policy(type.exact_kernel.p0, type.exact_kernel.p1, type.exact_kernel.c0,
                            type.exact_kernel.c1, result.policy, opts);
        if (avg.from_simulation)
            throw NumericalError("stationary evaluation failed on an exact-battery chain");
        type.exact.params = type.params;
        type.exact.mu = mu;
        type.exact.table = std::move(result.policy);
        type.exact.h = std::move(result.h);
        type.exact.c_star_exact = result.c_star;
        type.exact.iterations = result.iterations;
        type.exact.span_final = result.span_final;
        type.cost = avg.cost;
        type.rate = avg.rate;
        return;
    }
    const std::vector<double>* warm = type.warm.empty() ? nullptr : &type.warm;
    PerSensorSolve solve =
        lagrangian_per_sensor_solve(type.params, mu, *type.space, type.kernel, opts, warm);
    type.warm = solve.solve.h;
    type.policy = std::move(solve.solve.policy);
    type.cost = solve.cost;
    type.rate = solve.command_rate;
}

} // namespace

RelaxedPolicy bisect_multiplier(const MultiModel& model, const BisectOptions& opts,
                                bool exact_battery) {
    model.validate();

    // Group sensors into types sharing a full parameter set.
    std::map<std::tuple<double, double, int, int, int>, int> type_index;
    std::vector<TypeContext> types;
    std::vector<int> type_of(static_cast<size_t>(model.sensors));
    for (int k = 0; k < model.sensors; ++k) {
        const ModelParams& params = model.per_sensor[static_cast<size_t>(k)];
        const auto key = std::make_tuple(params.lambda, params.p, params.battery,
                                         params.delta_max, params.m);
        auto [it, inserted] = type_index.try_emplace(key, static_cast<int>(types.size()));
        if (inserted) {
            TypeContext type;
            type.params = params;
            types.push_back(std::move(type));
        }
        types[static_cast<size_t>(it->second)].members += 1;
        type_of[static_cast<size_t>(k)] = it->second;
    }

    for (TypeContext& type : types) {
        if (exact_battery) {
            type.exact_kernel = build_exact_kernel(type.params, 0.0);
        } else {
            type.space = std::make_shared<TruncatedBeliefSpace>(TruncatedBeliefSpace::build(
                TruncatedBeliefSpace::uniform_belief(type.params.battery), type.params.lambda,
                type.params.battery, type.params.m));
            type.kernel = build_kernel(*type.space, type.params);
        }
    }

    auto aggregate_rate_at = [&](double mu) {
        const int count = static_cast<int>(types.size());
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < count; ++t)
            solve_type_at(types[static_cast<size_t>(t)], mu, opts, exact_battery);
        double rate = 0.0;
        for (const TypeContext& type : types) rate += type.members * type.rate;
        return rate;
    };

    const double budget = opts.rate_budget_override > 0.0 ? opts.rate_budget_override
                                                          : static_cast<double>(model.budget);
    double mu_star = 0.0;
    double rate = aggregate_rate_at(0.0);

    if (rate > budget) {
        // One command's saving persists over the whole AoI climb, so the
        // dominating penalty scales with p * delta_max^2.
        double hi_bound = 0.0;
        for (const ModelParams& params : model.per_sensor)
            hi_bound = std::max(
                hi_bound, params.p * static_cast<double>(params.delta_max) * params.delta_max);
        double hi = std::max(hi_bound, 1.0);
        double rate_hi = aggregate_rate_at(hi);
        int expansions = 0;
        while (rate_hi > budget) {
            // Cannot persist: the rate vanishes as the penalty dominates.
            hi *= 2.0;
            rate_hi = aggregate_rate_at(hi);
            if (++expansions > 60)
                throw NumericalError("bisect_multiplier: failed to bracket the budget");
        }

        double lo = 0.0;
        while (hi - lo > opts.mu_resolution && budget - rate_hi > opts.rate_tol) {
            const double mid = 0.5 * (lo + hi);
            const double rate_mid = aggregate_rate_at(mid);
            if (rate_mid > budget) {
                lo = mid;
            } else {
                hi = mid;
                rate_hi = rate_mid;
            }
        }
        mu_star = hi;
        // Leave every type solved at the returned multiplier.
        rate = aggregate_rate_at(mu_star);
    }

    RelaxedPolicy relaxed;
    relaxed.exact_battery = exact_battery;
    relaxed.mu_star = mu_star;
    relaxed.aggregate_rate = rate;
    relaxed.slack = budget - rate;
    relaxed.type_of = std::move(type_of);
    relaxed.types.reserve(types.size());
    double cost_sum = 0.0;
    for (TypeContext& type : types) {
        cost_sum += type.members * type.cost;
        SensorTypeSolve solved;
        solved.params = type.params;
        solved.members = type.members;
        solved.space = type.space;
        if (!exact_battery) solved.idx = type.kernel.idx;
        solved.policy = std::move(type.policy);
        solved.exact = std::move(type.exact);
        solved.cost = type.cost;
        solved.command_rate = type.rate;
        relaxed.types.push_back(std::move(solved));
    }
    relaxed.relaxed_cost = cost_sum / model.sensors;
    return relaxed;
}

std::vector<int> truncate_commands(std::vector<int> requested, int budget, SplitMix64& rng) {
    if (budget < 0) throw std::invalid_argument("budget must be >= 0");
    if (static_cast<int>(requested.size()) <= budget) return requested;
    for (int i = 0; i < budget; ++i) {
        const std::uint64_t span = requested.size() - static_cast<std::uint64_t>(i);
        const int j = i + static_cast<int>(rng.uniform_int(span));
        std::swap(requested[static_cast<size_t>(i)], requested[static_cast<size_t>(j)]);
    }
    requested.resize(static_cast<size_t>(budget));
    std::sort(requested.begin(), requested.end());
    return requested;
}

namespace {

struct MultiEpisodeResult {
    double cost_mean = 0.0;
    double commands_mean = 0.0;
    std::int64_t max_commands = 0;
};

MultiEpisodeResult run_multi_episode(const MultiModel& model, MultiPolicyKind kind,
                                     const RelaxedPolicy* relaxed,
                                     const std::vector<int>& type_of,
                                     const std::vector<const TruncatedBeliefSpace*>& spaces,
                                     const EpisodeConfig& config, int episode) {
    const int sensors = model.sensors;
    const int budget = model.budget;
    const std::uint64_t base = static_cast<std::uint64_t>(episode) *
                               (static_cast<std::uint64_t>(sensors) + 1);

    std::vector<SplitMix64> streams;
    streams.reserve(static_cast<size_t>(sensors));
    for (int k = 0; k < sensors; ++k) streams.push_back(make_stream(config.seed, base + k));
    SplitMix64 truncation_stream = make_stream(config.seed, base + sensors);

    std::vector<SensorEnv> envs(static_cast<size_t>(sensors));
    for (int k = 0; k < sensors; ++k)
        envs[static_cast<size_t>(k)].reset(model.per_sensor[static_cast<size_t>(k)]);

    std::vector<int> requests(static_cast<size_t>(sensors));
    std::vector<std::uint8_t> actions(static_cast<size_t>(sensors));
    std::vector<int> over_budget_ids;

    const std::int64_t warmup = config.resolved_warmup();
    std::int64_t cost_sum = 0;
    std::int64_t command_sum = 0;
    std::int64_t max_commands = 0;

    // Per-delta request counts for the greedy-N largest-AoI selection.
    int dmax = 0;
    for (const ModelParams& params : model.per_sensor) dmax = std::max(dmax, params.delta_max);
    std::vector<int> delta_count(static_cast<size_t>(dmax) + 1);

    for (std::int64_t t = 1; t <= config.slots; ++t) {
        for (int k = 0; k < sensors; ++k)
            requests[static_cast<size_t>(k)] =
                streams[static_cast<size_t>(k)].bernoulli(model.per_sensor[static_cast<size_t>(k)].p)
                    ? 1
                    : 0;

        int desired = 0;
        if (kind == MultiPolicyKind::kGreedyN) {
            for (int k = 0; k < sensors; ++k) {
                actions[static_cast<size_t>(k)] =
                    static_cast<std::uint8_t>(requests[static_cast<size_t>(k)]);
                desired += requests[static_cast<size_t>(k)];
            }
            if (desired > budget) {
                // Keep the budget-many largest AoIs, ties to lower sensor ids.
                std::fill(delta_count.begin(), delta_count.end(), 0);
                for (int k = 0; k < sensors; ++k)
                    if (actions[static_cast<size_t>(k)])
                        ++delta_count[static_cast<size_t>(envs[static_cast<size_t>(k)].delta)];
                int remaining = budget;
                int cutoff = dmax + 1;
                int at_cutoff = 0;
                for (int d = dmax; d >= 1; --d) {
                    if (delta_count[static_cast<size_t>(d)] <= remaining) {
                        remaining -= delta_count[static_cast<size_t>(d)];
                    } else {
                        cutoff = d;
                        at_cutoff = remaining;
                        break;
                    }
                }
                for (int k = 0; k < sensors; ++k) {
                    if (!actions[static_cast<size_t>(k)]) continue;
                    const int delta = envs[static_cast<size_t>(k)].delta;
                    if (delta > cutoff) continue;
                    if (delta == cutoff && at_cutoff > 0) {
                        --at_cutoff;
                        continue;
                    }
                    actions[static_cast<size_t>(k)] = 0;
                }
            }
        } else {
            const bool exact = kind == MultiPolicyKind::kExactRelaxTruncate;
            for (int k = 0; k < sensors; ++k) {
                const SensorEnv& env = envs[static_cast<size_t>(k)];
                const SensorTypeSolve& type =
                    relaxed->types[static_cast<size_t>(type_of[static_cast<size_t>(k)])];
                int a;
                if (exact) {
                    a = type.exact.action(env.b, requests[static_cast<size_t>(k)], env.delta);
                } else {
                    a = type.policy[static_cast<size_t>(type.idx.flatten(
                        env.belief.row, env.belief.col, requests[static_cast<size_t>(k)],
                        env.delta))];
                }
                actions[static_cast<size_t>(k)] = static_cast<std::uint8_t>(a);
                desired += a;
            }
            const bool truncating = kind != MultiPolicyKind::kLowerBound;
            if (truncating && desired > budget) {
                over_budget_ids.clear();
                for (int k = 0; k < sensors; ++k)
                    if (actions[static_cast<size_t>(k)]) over_budget_ids.push_back(k);
                const std::vector<int> kept =
                    truncate_commands(over_budget_ids, budget, truncation_stream);
                std::fill(actions.begin(), actions.end(), 0);
                for (int k : kept) actions[static_cast<size_t>(k)] = 1;
            }
        }

        std::int64_t executed = 0;
        std::int64_t slot_cost = 0;
        for (int k = 0; k < sensors; ++k) {
            const ModelParams& params = model.per_sensor[static_cast<size_t>(k)];
            const int e = streams[static_cast<size_t>(k)].bernoulli(params.lambda) ? 1 : 0;
            const int a = actions[static_cast<size_t>(k)];
            executed += a;
            slot_cost += envs[static_cast<size_t>(k)].step(
                a, requests[static_cast<size_t>(k)], e, params,
                *spaces[static_cast<size_t>(type_of[static_cast<size_t>(k)])]);
        }
        max_commands = std::max(max_commands, executed);
        if (t > warmup) {
            cost_sum += slot_cost;
            command_sum += executed;
        }
    }

    const double denom = static_cast<double>(config.slots - warmup);
    MultiEpisodeResult result;
    result.cost_mean = static_cast<double>(cost_sum) / (denom * sensors);
    result.commands_mean = static_cast<double>(command_sum) / denom;
    result.max_commands = max_commands;
    return result;
}

} // namespace

MultiEstimate multi_simulate(const MultiModel& model, MultiPolicyKind kind,
                             const RelaxedPolicy* relaxed, const EpisodeConfig& config) {
    model.validate();
    config.validate();

    const bool needs_relaxed = kind != MultiPolicyKind::kGreedyN;
    if (needs_relaxed) {
        if (relaxed == nullptr)
            throw std::invalid_argument("multi_simulate: this policy kind needs a relaxed solve");
        const bool want_exact = kind == MultiPolicyKind::kExactRelaxTruncate;
        if (relaxed->exact_battery != want_exact)
            throw std::invalid_argument("multi_simulate: relaxed solve flavor mismatch");
        if (static_cast<int>(relaxed->type_of.size()) != model.sensors)
            throw std::invalid_argument("multi_simulate: relaxed solve sensor count mismatch");
    }

    // Belief tracking runs for every kind, so every kind needs spaces.
    std::vector<int> type_of;
    std::vector<std::shared_ptr<const TruncatedBeliefSpace>> owned;
    std::vector<const TruncatedBeliefSpace*> spaces;
    if (needs_relaxed && !relaxed->exact_battery) {
        type_of = relaxed->type_of;
        for (const SensorTypeSolve& type : relaxed->types) spaces.push_back(type.space.get());
    } else {
        std::map<std::pair<double, int>, int> index;
        type_of.resize(static_cast<size_t>(model.sensors));
        for (int k = 0; k < model.sensors; ++k) {
            const ModelParams& params = model.per_sensor[static_cast<size_t>(k)];
            const auto key = std::make_pair(params.lambda, params.m);
            auto [it, inserted] = index.try_emplace(key, static_cast<int>(owned.size()));
            if (inserted) {
                owned.push_back(std::make_shared<TruncatedBeliefSpace>(TruncatedBeliefSpace::build(
                    TruncatedBeliefSpace::uniform_belief(params.battery), params.lambda,
                    params.battery, params.m)));
                spaces.push_back(owned.back().get());
            }
            type_of[static_cast<size_t>(k)] = it->second;
        }
        if (needs_relaxed) {
            // Exact flavor: policy lookup is by type_of from the relaxed solve.
            type_of = relaxed->type_of;
            // spaces were grouped by (lambda, m), which matches the solve's
            // grouping whenever p/battery/delta_max are shared; rebuild
            // per solve type to stay aligned.
            owned.clear();
            spaces.clear();
            for (const SensorTypeSolve& type : relaxed->types) {
                owned.push_back(std::make_shared<TruncatedBeliefSpace>(TruncatedBeliefSpace::build(
                    TruncatedBeliefSpace::uniform_belief(type.params.battery), type.params.lambda,
                    type.params.battery, type.params.m)));
                spaces.push_back(owned.back().get());
            }
        }
    }

    std::vector<MultiEpisodeResult> episodes(static_cast<size_t>(config.episodes));
#pragma omp parallel for schedule(dynamic)
    for (int e = 0; e < config.episodes; ++e)
        episodes[static_cast<size_t>(e)] =
            run_multi_episode(model, kind, relaxed, type_of, spaces, config, e);

    MultiEstimate est;
    est.per_episode_cost.reserve(episodes.size());
    double cost_acc = 0.0;
    double command_acc = 0.0;
    for (const MultiEpisodeResult& ep : episodes) {
        est.per_episode_cost.push_back(ep.cost_mean);
        cost_acc += ep.cost_mean;
        command_acc += ep.commands_mean;
        est.max_commands_in_slot = std::max(est.max_commands_in_slot, ep.max_commands);
    }
    est.cost_mean = cost_acc / config.episodes;
    est.commands_mean = command_acc / config.episodes;
    if (config.episodes > 1) {
        double ss = 0.0;
        for (double m : est.per_episode_cost) ss += (m - est.cost_mean) * (m - est.cost_mean);
        est.cost_std_error =
            std::sqrt(ss / (config.episodes - 1)) / std::sqrt(config.episodes);
    }
    est.feasible = est.max_commands_in_slot <= model.budget;
    return est;
}

} // namespace aoi
