#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aoi/model.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

/// Resolved run parameters: defaults, overlaid by the JSON config file,
/// overlaid by explicit command-line flags.  Unknown config keys are
/// rejected.
struct RunConfig {
    // model
    double lambda = 0.06;
    double p = 0.8;
    int battery = 2;
    int delta_max = 64;
    int m = 0;  ///< 0 selects auto mode via choose_m(m_auto_eps)
    double m_auto_eps = 1e-4;
    double theta = 1e-7;
    std::vector<double> beta0;  ///< optional initial belief; empty = uniform

    // episodes
    std::uint64_t seed = 1;
    std::int64_t slots = 1000000;
    int episodes = 10;
    std::int64_t warmup = -1;

    // multi-sensor
    int sensors = 100;
    int budget = 0;       ///< explicit per-slot budget; 0 defers to gamma
    double gamma = 0.1;   ///< normalized budget, used when budget == 0
    std::vector<double> lambdas;  ///< per-sensor rate cycle; empty = default

    // run control
    std::string policy = "pomdp";
    std::string out = "out";
    std::string sweep_param;  ///< "lambda" or "p"
    std::vector<double> sweep_values;
    std::int64_t trace_slots = 0;
    bool timing = false;

    /// Overlays values from a flat-key JSON object; rejects unknown keys.
    void apply_json(const nlohmann::json& doc);

    /// Model parameters with the truncation depth resolved (choose_m when
    /// auto); lambda may be overridden for sweep points.
    ModelParams resolve_model(double lambda_override) const;
    ModelParams resolve_model() const { return resolve_model(lambda); }

    EpisodeConfig episode_config() const;

    /// Per-slot budget resolved from `budget` or round(gamma * sensors).
    int resolve_budget() const;

    /// Full resolved configuration as a JSON object (embedded in artifacts).
    nlohmann::json to_json(const std::string& mode) const;
};

RunConfig load_config_file(const std::string& path);

} // namespace aoi
