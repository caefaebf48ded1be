#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aoi/baselines.hpp"
#include "aoi/model.hpp"
#include "aoi/simulator.hpp"
#include "aoi/solver.hpp"

namespace aoi {

/// Heterogeneous energy-harvesting rates, assigned to sensors cyclically:
/// sensors 1, 11, ... get 0.01, sensors 2, 12, ... get 0.02, and so on.
inline constexpr std::array<double, 10> kLambdaCycle = {0.01, 0.02, 0.03, 0.04, 0.05,
                                                        0.06, 0.07, 0.08, 0.09, 0.10};

/// Truncation depth at which policy quality empirically saturates; scales
/// inversely with the harvesting rate.
int default_truncation_depth(double lambda);

/// K coupled sensors under the per-slot budget: at most `budget` commands
/// may be issued in any slot.
struct MultiModel {
    int sensors = 1;
    int budget = 1;
    std::vector<ModelParams> per_sensor;

    double gamma() const { return static_cast<double>(budget) / sensors; }
    void validate() const;
};

/// Cyclic assignment of lambda (and optionally truncation depth) over a base
/// parameter set.  An empty depth cycle applies default_truncation_depth.
MultiModel make_multi_model(int sensors, int budget, const ModelParams& base,
                            std::span<const double> lambda_cycle,
                            std::span<const int> depth_cycle = {});

enum class MultiPolicyKind {
    kRelaxTruncate,       ///< relaxed per-sensor optima + per-slot truncation
    kGreedyN,             ///< commands the N largest-AoI requested sensors
    kLowerBound,          ///< relaxed optima with the budget ignored
    kExactRelaxTruncate,  ///< exact-battery relaxed optima + truncation
};

MultiPolicyKind parse_multi_policy_kind(const std::string& name);
std::string to_string(MultiPolicyKind kind);

struct BisectOptions {
    double rate_tol = 1e-3;       ///< accept when budget - aggregate rate <= tol
    double mu_resolution = 1e-4;  ///< or when the bracket narrows to this width
    /// Aggregate-rate budget for the relaxed (time-average) constraint;
    /// 0 uses the model's per-slot budget.  Fractional values are meaningful
    /// here even though the per-slot budget is integral.
    double rate_budget_override = 0.0;
    double theta = 1e-6;
    std::int64_t max_rvia_iterations = 500000;
    /// Largest state count evaluated by the stationary distribution; larger
    /// chains fall back to a seeded simulation of rate_sim_slots slots.
    int stationary_state_cap = 20000;
    std::int64_t rate_sim_slots = 1000000;
    std::uint64_t rate_sim_seed = 0x0a015eedULL;
};

/// One distinct sensor parameterization; sensors sharing parameters share a
/// single solve.
struct SensorTypeSolve {
    ModelParams params;
    int members = 0;
    // partial-battery flavor
    std::shared_ptr<const TruncatedBeliefSpace> space;
    BeliefStateIndexer idx;
    std::vector<std::uint8_t> policy;
    // exact-battery flavor
    ExactMdpPolicy exact;
    double cost = 0.0;          ///< long-run original cost per slot at mu
    double command_rate = 0.0;  ///< long-run average of a at mu
};

/// Optimal policy of the time-average-relaxed problem at the bisected
/// multiplier, kept on the feasible side of the budget (aggregate rate <=
/// budget, residual slack recorded).
struct RelaxedPolicy {
    bool exact_battery = false;
    double mu_star = 0.0;
    double aggregate_rate = 0.0;
    double slack = 0.0;
    double relaxed_cost = 0.0;  ///< mean per-sensor cost of the relaxed optimum
    std::vector<int> type_of;   ///< sensor -> index into types
    std::vector<SensorTypeSolve> types;
};

struct PerSensorSolve {
    SolveResult solve;
    double cost = 0.0;
    double command_rate = 0.0;
    bool rate_from_simulation = false;
};

/// Solves the single-sensor belief-MDP with command penalty mu (modified
/// cost c(z,a) + mu a) and evaluates the long-run original cost and command
/// rate of the resulting policy.
PerSensorSolve lagrangian_per_sensor_solve(const ModelParams& params, double mu,
                                           const TruncatedBeliefSpace& space,
                                           const SparseKernel& kernel,
                                           const BisectOptions& opts = {},
                                           const std::vector<double>* warm_start = nullptr);

/// Bisection on the Lagrange multiplier over [0, p delta_max] (expanded if
/// needed) against the aggregate command-rate budget.  Returns mu = 0 when
/// the constraint is already slack.
RelaxedPolicy bisect_multiplier(const MultiModel& model, const BisectOptions& opts = {},
                                bool exact_battery = false);

/// Uniformly random budget-sized subset when over budget; identity otherwise.
std::vector<int> truncate_commands(std::vector<int> requested, int budget, SplitMix64& rng);

struct MultiEstimate {
    double cost_mean = 0.0;  ///< per-sensor per-slot on-demand AoI
    double cost_std_error = 0.0;
    double commands_mean = 0.0;  ///< executed commands per slot
    std::vector<double> per_episode_cost;
    std::int64_t max_commands_in_slot = 0;
    bool feasible = true;  ///< max executed commands never exceeded the budget
};

/// Runs K parallel single-sensor environments coupled only through the
/// per-slot truncation draw.  `relaxed` is required for every kind except
/// kGreedyN and must match the requested flavor.
MultiEstimate multi_simulate(const MultiModel& model, MultiPolicyKind kind,
                             const RelaxedPolicy* relaxed, const EpisodeConfig& config);

} // namespace aoi
