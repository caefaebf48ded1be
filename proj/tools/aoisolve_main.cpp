// aoisolve — command-line front end: solves single-sensor instances, runs
// seeded simulations and parameter sweeps, handles the multi-sensor
// relax-then-truncate experiments, and dumps policy-structure grids.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aoi/baselines.hpp"
#include "aoi/belief.hpp"
#include "aoi/config.hpp"
#include "aoi/exports.hpp"
#include "aoi/io.hpp"
#include "aoi/model.hpp"
#include "aoi/multisensor.hpp"
#include "aoi/simulator.hpp"
#include "aoi/solver.hpp"

namespace {

using nlohmann::json;

struct FlagValues {
    std::string config_path;
    double lambda = 0.0;
    double p = 0.0;
    int battery = 0;
    int delta_max = 0;
    int m = 0;
    double m_auto_eps = 0.0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    std::int64_t slots = 0;
    int episodes = 0;
    std::int64_t warmup = 0;
    double gamma = 0.0;
    int sensors = 0;
    int budget = 0;
    std::string policy;
    std::string out;
    std::int64_t trace_slots = 0;
    bool timing = false;
};

void add_common_flags(CLI::App* sub, FlagValues& flags) {
    sub->add_option("--config", flags.config_path,
                    "JSON config file with flat keys; flags override file values");
    sub->add_option("--lambda", flags.lambda, "energy arrival probability per slot, (0,1]");
    sub->add_option("--p", flags.p, "request probability per slot, [0,1]");
    sub->add_option("--battery", flags.battery, "battery capacity B");
    sub->add_option("--delta-max", flags.delta_max, "AoI cap");
    auto* m_opt = sub->add_option("--m", flags.m, "belief truncation depth (omit for auto)");
    auto* eps_opt =
        sub->add_option("--m-auto-eps", flags.m_auto_eps, "auto depth tolerance (default 1e-4)");
    m_opt->excludes(eps_opt);
    eps_opt->excludes(m_opt);
    sub->add_option("--theta", flags.theta, "RVIA span threshold");
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--slots", flags.slots, "slots per episode");
    sub->add_option("--episodes", flags.episodes, "episode count");
    sub->add_option("--warmup", flags.warmup, "warmup slots discarded (default 1% of slots)");
    sub->add_option("--gamma", flags.gamma, "normalized per-slot budget N/K");
    sub->add_option("--sensors", flags.sensors, "sensor count K");
    sub->add_option("--budget", flags.budget, "per-slot command budget N");
    sub->add_option("--policy", flags.policy, "policy to run (see README)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--trace-slots", flags.trace_slots, "emit a per-slot trace CSV, capped here");
    sub->add_flag("--timing", flags.timing, "include wall-clock timing in JSON artifacts");
}

aoi::RunConfig build_config(const CLI::App* sub, const FlagValues& flags) {
    aoi::RunConfig config;
    if (sub->count("--config")) config = aoi::load_config_file(flags.config_path);
    if (sub->count("--lambda")) config.lambda = flags.lambda;
    if (sub->count("--p")) config.p = flags.p;
    if (sub->count("--battery")) config.battery = flags.battery;
    if (sub->count("--delta-max")) config.delta_max = flags.delta_max;
    if (sub->count("--m")) config.m = flags.m;
    if (sub->count("--m-auto-eps")) {
        config.m = 0;
        config.m_auto_eps = flags.m_auto_eps;
    }
    if (sub->count("--theta")) config.theta = flags.theta;
    if (sub->count("--seed")) config.seed = flags.seed;
    if (sub->count("--slots")) config.slots = flags.slots;
    if (sub->count("--episodes")) config.episodes = flags.episodes;
    if (sub->count("--warmup")) config.warmup = flags.warmup;
    if (sub->count("--gamma")) config.gamma = flags.gamma;
    if (sub->count("--sensors")) config.sensors = flags.sensors;
    if (sub->count("--budget")) config.budget = flags.budget;
    if (sub->count("--policy")) config.policy = flags.policy;
    if (sub->count("--out")) config.out = flags.out;
    if (sub->count("--trace-slots")) config.trace_slots = flags.trace_slots;
    if (sub->count("--timing")) config.timing = flags.timing;
    return config;
}

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

std::ofstream open_artifact(const aoi::RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out);
    const std::filesystem::path path = std::filesystem::path(config.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

json base_document(const aoi::RunConfig& config, const std::string& mode) {
    json doc;
    doc["tool"] = aoi::kToolName;
    doc["version"] = aoi::kToolVersion;
    doc["config"] = config.to_json(mode);
    return doc;
}

struct SolveBundle {
    aoi::ModelParams params;
    aoi::TruncatedBeliefSpace space;
    aoi::SparseKernel kernel;
    aoi::SolveResult result;
};

aoi::Belief initial_belief(const aoi::RunConfig& config, const aoi::ModelParams& params) {
    if (config.beta0.empty()) return aoi::TruncatedBeliefSpace::uniform_belief(params.battery);
    if (static_cast<int>(config.beta0.size()) != params.battery + 1)
        throw std::invalid_argument("beta0 must have battery+1 entries");
    return config.beta0;
}

SolveBundle solve_pomdp(const aoi::RunConfig& config, double lambda) {
    SolveBundle bundle;
    bundle.params = config.resolve_model(lambda);
    bundle.space = aoi::TruncatedBeliefSpace::build(initial_belief(config, bundle.params),
                                                    bundle.params.lambda, bundle.params.battery,
                                                    bundle.params.m);
    bundle.kernel = aoi::build_kernel(bundle.space, bundle.params);
    aoi::RviaOptions opts;
    opts.theta = bundle.params.theta;
    bundle.result = aoi::rvia_solve(bundle.kernel, opts);
    return bundle;
}

int run_solve(const aoi::RunConfig& config) {
    const Stopwatch watch;
    const SolveBundle bundle = solve_pomdp(config, config.lambda);
    const std::string header = aoi::artifact_header(config.to_json("solve").dump());

    json doc = base_document(config, "solve");
    doc["result"] = {
        {"c_star", bundle.result.c_star},
        {"iterations", bundle.result.iterations},
        {"span_final", bundle.result.span_final},
        {"residual", bundle.result.residual},
        {"m", bundle.params.m},
        {"state_count", bundle.kernel.idx.size()},
        {"nnz_p0", bundle.kernel.p0.nnz()},
        {"nnz_p1", bundle.kernel.p1.nnz()},
        {"timing_ms", nullptr},
    };
    if (config.timing) doc["result"]["timing_ms"] = watch.elapsed_ms();

    open_artifact(config, "summary.json") << doc.dump(2) << "\n";
    {
        auto out = open_artifact(config, "policy.csv");
        aoi::write_policy_csv(out, bundle.kernel.idx, bundle.result.policy, header);
    }
    {
        auto out = open_artifact(config, "values.csv");
        aoi::write_values_csv(out, bundle.kernel.idx, bundle.result.h, header);
    }
    std::cout << "solve: c_star=" << aoi::format_double(bundle.result.c_star)
              << " m=" << bundle.params.m << " iterations=" << bundle.result.iterations
              << " span=" << aoi::format_double(bundle.result.span_final) << "\n";
    return 0;
}

aoi::PolicyFn make_named_policy(const std::string& name, const aoi::RunConfig& config,
                                std::optional<SolveBundle>& bundle_out,
                                const aoi::ModelParams& params) {
    if (name == "greedy") return aoi::make_greedy_policy();
    if (name == "pomdp") {
        bundle_out = solve_pomdp(config, config.lambda);
        return aoi::make_pomdp_policy(bundle_out->result.policy, bundle_out->kernel.idx);
    }
    if (name == "exact") return aoi::make_exact_policy(aoi::exact_mdp_solve(params));
    if (name == "mle") return aoi::make_mle_policy(aoi::exact_mdp_solve(params));
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected pomdp, greedy, exact, or mle)");
}

int run_simulate(const aoi::RunConfig& config) {
    const Stopwatch watch;
    const aoi::ModelParams params = config.resolve_model();
    std::optional<SolveBundle> bundle;
    const aoi::PolicyFn policy = make_named_policy(config.policy, config, bundle, params);
    const aoi::TruncatedBeliefSpace space =
        bundle ? bundle->space
               : aoi::TruncatedBeliefSpace::build(initial_belief(config, params), params.lambda,
                                                  params.battery, params.m);

    const aoi::EpisodeConfig episodes = config.episode_config();
    const std::string header = aoi::artifact_header(config.to_json("simulate").dump());

    aoi::CostEstimate estimate;
    if (config.trace_slots > 0) {
        auto trace = open_artifact(config, "trace.csv");
        trace << header << "\n";
        trace << "t,b,r,delta,b_tilde,a,d,cost\n";
        estimate = aoi::simulate(policy, params, space, episodes, &trace, config.trace_slots);
    } else {
        estimate = aoi::simulate(policy, params, space, episodes);
    }

    json doc = base_document(config, "simulate");
    doc["result"] = {
        {"policy", config.policy},
        {"mean", estimate.mean},
        {"stderr", estimate.std_error},
        {"command_rate", estimate.command_rate},
        {"per_episode", estimate.per_episode},
        {"timing_ms", nullptr},
    };
    if (bundle) doc["result"]["c_star"] = bundle->result.c_star;
    if (config.timing) doc["result"]["timing_ms"] = watch.elapsed_ms();
    open_artifact(config, "estimate.json") << doc.dump(2) << "\n";

    std::cout << "simulate: policy=" << config.policy
              << " mean=" << aoi::format_double(estimate.mean)
              << " stderr=" << aoi::format_double(estimate.std_error) << "\n";
    return 0;
}

int run_sweep(const aoi::RunConfig& config) {
    if (config.sweep_param != "lambda" && config.sweep_param != "p")
        throw std::invalid_argument("sweep_param must be \"lambda\" or \"p\"");
    if (config.sweep_values.empty())
        throw std::invalid_argument("sweep_values must be nonempty");

    struct Row {
        double value;
        std::string policy;
        std::string solver_cost;
        double sim_mean;
        double sim_stderr;
    };
    const int points = static_cast<int>(config.sweep_values.size());
    std::vector<std::vector<Row>> rows(static_cast<size_t>(points));
    std::string failure;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < points; ++i) {
        try {
            const double value = config.sweep_values[static_cast<size_t>(i)];
            aoi::RunConfig point = config;
            if (config.sweep_param == "lambda")
                point.lambda = value;
            else
                point.p = value;

            const SolveBundle bundle = solve_pomdp(point, point.lambda);
            const aoi::ExactMdpPolicy exact = aoi::exact_mdp_solve(bundle.params);
            const aoi::EpisodeConfig episodes = point.episode_config();

            auto run = [&](const std::string& name, const aoi::PolicyFn& policy,
                           const std::string& solver_cost) {
                const aoi::CostEstimate est =
                    aoi::simulate(policy, bundle.params, bundle.space, episodes);
                rows[static_cast<size_t>(i)].push_back(
                    {value, name, solver_cost, est.mean, est.std_error});
            };
            run("pomdp", aoi::make_pomdp_policy(bundle.result.policy, bundle.kernel.idx),
                aoi::format_double(bundle.result.c_star));
            run("greedy", aoi::make_greedy_policy(), "");
            run("exact", aoi::make_exact_policy(exact), aoi::format_double(exact.c_star_exact));
            run("mle", aoi::make_mle_policy(exact), "");
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw std::runtime_error("sweep point failed: " + failure);

    auto out = open_artifact(config, "sweep.csv");
    out << aoi::artifact_header(config.to_json("sweep").dump()) << "\n";
    out << "param,value,policy,solver_cost,sim_mean,sim_stderr\n";
    for (const auto& point_rows : rows) {
        for (const Row& row : point_rows) {
            out << config.sweep_param << ',' << aoi::format_double(row.value) << ',' << row.policy
                << ',' << row.solver_cost << ',' << aoi::format_double(row.sim_mean) << ','
                << aoi::format_double(row.sim_stderr) << "\n";
        }
    }
    std::cout << "sweep: " << points << " points x 4 policies written\n";
    return 0;
}

int run_multi(const aoi::RunConfig& config) {
    const int budget = config.resolve_budget();
    aoi::ModelParams base;
    base.lambda = config.lambda;  // replaced by the cycle
    base.p = config.p;
    base.battery = config.battery;
    base.delta_max = config.delta_max;
    base.theta = config.theta;
    base.m = 1;

    std::vector<double> cycle = config.lambdas;
    if (cycle.empty()) cycle.assign(aoi::kLambdaCycle.begin(), aoi::kLambdaCycle.end());
    std::vector<int> depths;
    if (config.m > 0) depths.assign(1, config.m);
    const aoi::MultiModel model =
        aoi::make_multi_model(config.sensors, budget, base, cycle, depths);

    std::vector<aoi::MultiPolicyKind> kinds;
    if (config.policy == "all" || config.policy == "pomdp") {
        kinds = {aoi::MultiPolicyKind::kRelaxTruncate, aoi::MultiPolicyKind::kGreedyN,
                 aoi::MultiPolicyKind::kLowerBound, aoi::MultiPolicyKind::kExactRelaxTruncate};
    } else {
        kinds = {aoi::parse_multi_policy_kind(config.policy)};
    }

    aoi::BisectOptions bisect;
    bisect.theta = config.theta;

    std::optional<aoi::RelaxedPolicy> relaxed;
    std::optional<aoi::RelaxedPolicy> relaxed_exact;
    for (aoi::MultiPolicyKind kind : kinds) {
        if ((kind == aoi::MultiPolicyKind::kRelaxTruncate ||
             kind == aoi::MultiPolicyKind::kLowerBound) &&
            !relaxed)
            relaxed = aoi::bisect_multiplier(model, bisect, false);
        if (kind == aoi::MultiPolicyKind::kExactRelaxTruncate && !relaxed_exact)
            relaxed_exact = aoi::bisect_multiplier(model, bisect, true);
    }

    const aoi::EpisodeConfig episodes = config.episode_config();
    auto out = open_artifact(config, "multi.csv");
    out << aoi::artifact_header(config.to_json("multi").dump()) << "\n";
    out << "sensors,gamma,policy,cost_mean,cost_stderr,commands_mean,mu_star,feasible\n";

    for (aoi::MultiPolicyKind kind : kinds) {
        const aoi::RelaxedPolicy* solve = nullptr;
        double mu = 0.0;
        if (kind == aoi::MultiPolicyKind::kRelaxTruncate ||
            kind == aoi::MultiPolicyKind::kLowerBound) {
            solve = &*relaxed;
            mu = relaxed->mu_star;
        } else if (kind == aoi::MultiPolicyKind::kExactRelaxTruncate) {
            solve = &*relaxed_exact;
            mu = relaxed_exact->mu_star;
        }
        const aoi::MultiEstimate est = aoi::multi_simulate(model, kind, solve, episodes);
        out << model.sensors << ',' << aoi::format_double(model.gamma()) << ','
            << aoi::to_string(kind) << ',' << aoi::format_double(est.cost_mean) << ','
            << aoi::format_double(est.cost_std_error) << ','
            << aoi::format_double(est.commands_mean) << ',' << aoi::format_double(mu) << ','
            << (est.feasible ? 1 : 0) << "\n";
        std::cout << "multi: policy=" << aoi::to_string(kind)
                  << " cost=" << aoi::format_double(est.cost_mean)
                  << " commands=" << aoi::format_double(est.commands_mean) << "\n";
    }
    return 0;
}

int run_policy_dump(const aoi::RunConfig& config) {
    const SolveBundle bundle = solve_pomdp(config, config.lambda);
    const std::string header = aoi::artifact_header(config.to_json("policy-dump").dump());

    {
        auto out = open_artifact(config, "grid_r0.csv");
        aoi::write_policy_grid_csv(out, bundle.kernel.idx, bundle.result.policy, 0, header);
    }
    {
        auto out = open_artifact(config, "grid_r1.csv");
        aoi::write_policy_grid_csv(out, bundle.kernel.idx, bundle.result.policy, 1, header);
    }
    {
        const aoi::ThresholdProfile profile =
            aoi::policy_threshold_profile(bundle.result.policy, bundle.kernel.idx);
        auto out = open_artifact(config, "thresholds.csv");
        aoi::write_thresholds_csv(out, profile, bundle.kernel.idx, header);
    }
    {
        auto out = open_artifact(config, "beliefs.csv");
        aoi::write_beliefs_csv(out, bundle.space, header);
    }
    std::cout << "policy-dump: c_star=" << aoi::format_double(bundle.result.c_star)
              << " grids written to " << config.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"status-updating policy solver and simulator for energy-harvesting sensors"};
    app.require_subcommand(1);

    FlagValues flags;
    CLI::App* solve = app.add_subcommand("solve", "solve one instance, emit policy + summary");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of a policy");
    CLI::App* sweep = app.add_subcommand("sweep", "cost vs lambda or p, one CSV row per policy");
    CLI::App* multi = app.add_subcommand("multi", "multi-sensor relax-then-truncate experiments");
    CLI::App* dump = app.add_subcommand("policy-dump", "policy-structure grids");
    for (CLI::App* sub : {solve, simulate, sweep, multi, dump}) add_common_flags(sub, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const aoi::RunConfig config = build_config(sub, flags);
        if (sub == solve) return run_solve(config);
        if (sub == simulate) return run_simulate(config);
        if (sub == sweep) return run_sweep(config);
        if (sub == multi) return run_multi(config);
        return run_policy_dump(config);
    } catch (const aoi::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
