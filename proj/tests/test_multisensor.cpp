#include "doctest.h"

#include <cmath>

#include "aoi/multisensor.hpp"

using namespace aoi;

namespace {

ModelParams small_base() {
    ModelParams base;
    base.lambda = 0.3;
    base.p = 0.8;
    base.battery = 1;
    base.delta_max = 8;
    base.m = 4;
    base.theta = 1e-9;
    return base;
}

} // namespace

TEST_CASE("truncate_commands keeps everything under budget") {
    SplitMix64 rng = make_stream(1, 0);
    CHECK(truncate_commands({3, 5, 9}, 5, rng) == std::vector<int>{3, 5, 9});
    CHECK(truncate_commands({1, 2, 3, 4, 5}, 0, rng).empty());
}

TEST_CASE("truncate_commands picks uniformly") {
    SplitMix64 rng = make_stream(99, 0);
    const std::vector<int> requested{0, 1, 2, 3};
    std::vector<int> hits(4, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        for (int k : truncate_commands(requested, 2, rng)) ++hits[static_cast<size_t>(k)];
    }
    for (int k = 0; k < 4; ++k) {
        const double freq = static_cast<double>(hits[static_cast<size_t>(k)]) / draws;
        CHECK(freq == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("default truncation depth shrinks as the harvest rate grows") {
    CHECK(default_truncation_depth(0.01) >= default_truncation_depth(0.02));
    CHECK(default_truncation_depth(0.05) >= default_truncation_depth(0.1));
    CHECK(default_truncation_depth(1.0) >= 4);
}

TEST_CASE("make_multi_model cycles rates") {
    const auto model = make_multi_model(20, 3, small_base(), kLambdaCycle);
    CHECK(model.per_sensor[0].lambda == 0.01);
    CHECK(model.per_sensor[10].lambda == 0.01);
    CHECK(model.per_sensor[9].lambda == 0.10);
    CHECK(model.gamma() == doctest::Approx(0.15));
}

TEST_CASE("zero penalty reproduces the unconstrained policy") {
    const ModelParams params = small_base();
    const auto space = TruncatedBeliefSpace::build(TruncatedBeliefSpace::uniform_belief(1),
                                                   params.lambda, params.battery, params.m);
    const SparseKernel kernel = build_kernel(space, params);
    RviaOptions solve_opts;
    solve_opts.theta = 1e-9;
    const SolveResult unconstrained = rvia_solve(kernel, solve_opts);

    BisectOptions opts;
    opts.theta = 1e-9;
    const PerSensorSolve at_zero = lagrangian_per_sensor_solve(params, 0.0, space, kernel, opts);
    CHECK(at_zero.solve.policy == unconstrained.policy);
    CHECK(at_zero.solve.c_star == doctest::Approx(unconstrained.c_star).epsilon(1e-9));
}

TEST_CASE("a dominating penalty suppresses every command") {
    const ModelParams params = small_base();
    const auto space = TruncatedBeliefSpace::build(TruncatedBeliefSpace::uniform_belief(1),
                                                   params.lambda, params.battery, params.m);
    const SparseKernel kernel = build_kernel(space, params);
    // A command's saving persists over the AoI climb, so the dominating
    // penalty scales with p * delta_max^2, not with one slot's cost.
    const double mu = params.p * params.delta_max * params.delta_max;
    BisectOptions opts;
    opts.theta = 1e-9;
    const PerSensorSolve solve = lagrangian_per_sensor_solve(params, mu, space, kernel, opts);
    CHECK(solve.command_rate == 0.0);
    for (std::uint8_t a : solve.solve.policy) CHECK(a == 0);
}

TEST_CASE("command rate is nonincreasing in the penalty") {
    const ModelParams params = small_base();
    const auto space = TruncatedBeliefSpace::build(TruncatedBeliefSpace::uniform_belief(1),
                                                   params.lambda, params.battery, params.m);
    const SparseKernel kernel = build_kernel(space, params);
    BisectOptions opts;
    opts.theta = 1e-9;

    double prev = 2.0;
    for (double mu : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 6.4}) {
        const PerSensorSolve solve = lagrangian_per_sensor_solve(params, mu, space, kernel, opts);
        CHECK(solve.command_rate <= prev + 1e-9);
        prev = solve.command_rate;
    }
}

TEST_CASE("bisection matches a dense penalty grid on a two-sensor toy") {
    ModelParams base = small_base();
    base.delta_max = 4;
    base.m = 2;
    const auto model = make_multi_model(2, 1, base, std::array<double, 1>{0.3},
                                        std::array<int, 1>{2});

    BisectOptions opts;
    opts.theta = 1e-9;
    opts.rate_budget_override = 0.4;  // gamma = 0.2 as a time-average budget
    opts.rate_tol = 1e-6;
    opts.mu_resolution = 1e-5;
    const RelaxedPolicy relaxed = bisect_multiplier(model, opts);
    CHECK(relaxed.aggregate_rate <= 0.4 + 1e-12);
    CHECK(relaxed.slack >= 0.0);

    // Dense grid over the multiplier: the smallest grid point whose
    // aggregate rate fits the budget brackets mu_star.
    const auto space = TruncatedBeliefSpace::build(TruncatedBeliefSpace::uniform_belief(1),
                                                   base.lambda, base.battery, base.m);
    const SparseKernel kernel = build_kernel(space, base);
    const double step = 0.01;
    double grid_mu = -1.0;
    for (double mu = 0.0; mu <= base.p * base.delta_max * base.delta_max + step; mu += step) {
        const PerSensorSolve solve = lagrangian_per_sensor_solve(base, mu, space, kernel, opts);
        if (2.0 * solve.command_rate <= 0.4) {
            grid_mu = mu;
            break;
        }
    }
    REQUIRE(grid_mu >= 0.0);
    CHECK(relaxed.mu_star == doctest::Approx(grid_mu).epsilon(0.0).scale(1.0).epsilon(step));
    CHECK(std::abs(relaxed.mu_star - grid_mu) <= step + opts.mu_resolution);
}

TEST_CASE("K = 1 multi-sensor run reduces to the single-sensor simulator") {
    ModelParams base = small_base();
    const auto model = make_multi_model(1, 1, base, std::array<double, 1>{0.3},
                                        std::array<int, 1>{4});
    BisectOptions opts;
    opts.theta = 1e-9;
    const RelaxedPolicy relaxed = bisect_multiplier(model, opts);
    CHECK(relaxed.mu_star == 0.0);  // one sensor, budget one: never binding

    EpisodeConfig config;
    config.slots = 30000;
    config.episodes = 3;
    config.seed = 5;
    const MultiEstimate multi =
        multi_simulate(model, MultiPolicyKind::kRelaxTruncate, &relaxed, config);

    const auto& type = relaxed.types[0];
    const CostEstimate single = simulate(make_pomdp_policy(type.policy, type.idx),
                                         model.per_sensor[0], *type.space, config);
    CHECK(multi.cost_mean == single.mean);
    CHECK(multi.per_episode_cost == single.per_episode);
    CHECK(multi.feasible);
}

TEST_CASE("per-slot feasibility and the cost ordering on a small network") {
    ModelParams base = small_base();
    base.battery = 2;
    base.delta_max = 16;
    base.m = 6;
    base.theta = 1e-8;
    const auto model = make_multi_model(10, 2, base, std::array<double, 2>{0.05, 0.1},
                                        std::array<int, 2>{24, 12});

    BisectOptions opts;
    opts.theta = 1e-8;
    const RelaxedPolicy relaxed = bisect_multiplier(model, opts);

    EpisodeConfig config;
    config.slots = 60000;
    config.episodes = 4;
    config.seed = 31;
    const MultiEstimate rt = multi_simulate(model, MultiPolicyKind::kRelaxTruncate, &relaxed, config);
    const MultiEstimate lb = multi_simulate(model, MultiPolicyKind::kLowerBound, &relaxed, config);
    const MultiEstimate greedy = multi_simulate(model, MultiPolicyKind::kGreedyN, nullptr, config);

    CHECK(rt.feasible);
    CHECK(rt.max_commands_in_slot <= model.budget);
    CHECK(greedy.max_commands_in_slot <= model.budget);

    auto leq = [](const MultiEstimate& a, const MultiEstimate& b) {
        const double slack =
            3.0 * std::sqrt(a.cost_std_error * a.cost_std_error +
                            b.cost_std_error * b.cost_std_error);
        return a.cost_mean <= b.cost_mean + slack;
    };
    CHECK(leq(lb, rt));
    CHECK(leq(rt, greedy));
}

TEST_CASE("relaxed-solve flavor mismatches are rejected") {
    ModelParams base = small_base();
    const auto model = make_multi_model(2, 1, base, std::array<double, 1>{0.3});
    BisectOptions opts;
    opts.theta = 1e-9;
    const RelaxedPolicy relaxed = bisect_multiplier(model, opts);
    EpisodeConfig config;
    config.slots = 100;
    config.episodes = 1;
    CHECK_THROWS_AS(
        multi_simulate(model, MultiPolicyKind::kExactRelaxTruncate, &relaxed, config),
        std::invalid_argument);
    CHECK_THROWS_AS(multi_simulate(model, MultiPolicyKind::kRelaxTruncate, nullptr, config),
                    std::invalid_argument);
}

TEST_CASE("exact-battery relax-truncate runs and stays feasible") {
    ModelParams base = small_base();
    const auto model = make_multi_model(6, 1, base, std::array<double, 2>{0.2, 0.4},
                                        std::array<int, 2>{6, 4});
    BisectOptions opts;
    opts.theta = 1e-9;
    const RelaxedPolicy relaxed = bisect_multiplier(model, opts, true);
    CHECK(relaxed.exact_battery);
    CHECK(relaxed.aggregate_rate <= model.budget + 1e-9);

    EpisodeConfig config;
    config.slots = 20000;
    config.episodes = 2;
    config.seed = 8;
    const MultiEstimate est =
        multi_simulate(model, MultiPolicyKind::kExactRelaxTruncate, &relaxed, config);
    CHECK(est.feasible);
}
