#include "aoi/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "aoi/belief.hpp"
#include "aoi/multisensor.hpp"

namespace aoi {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& doc, const char* key, T& out) {
    if (auto it = doc.find(key); it != doc.end()) {
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
        }
    }
}

} // namespace

void RunConfig::apply_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

    static const char* known[] = {
        "lambda", "p",       "battery",  "delta_max",   "m",           "m_auto_eps",
        "theta",  "beta0",   "seed",     "slots",       "episodes",    "warmup",
        "sensors", "budget", "gamma",    "lambdas",     "policy",      "out",
        "sweep_param", "sweep_values",   "trace_slots", "timing",
    };
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("unknown config key '" + key + "'");
    }

    read_field(doc, "lambda", lambda);
    read_field(doc, "p", p);
    read_field(doc, "battery", battery);
    read_field(doc, "delta_max", delta_max);
    if (auto it = doc.find("m"); it != doc.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "auto")
                throw std::invalid_argument("config key 'm' must be an integer or \"auto\"");
            m = 0;
        } else if (it->is_number_integer()) {
            m = it->get<int>();
            if (m < 1) throw std::invalid_argument("config key 'm' must be >= 1 or \"auto\"");
        } else {
            throw std::invalid_argument("config key 'm' must be an integer or \"auto\"");
        }
    }
    read_field(doc, "m_auto_eps", m_auto_eps);
    read_field(doc, "theta", theta);
    read_field(doc, "beta0", beta0);
    read_field(doc, "seed", seed);
    read_field(doc, "slots", slots);
    read_field(doc, "episodes", episodes);
    read_field(doc, "warmup", warmup);
    read_field(doc, "sensors", sensors);
    read_field(doc, "budget", budget);
    read_field(doc, "gamma", gamma);
    read_field(doc, "lambdas", lambdas);
    read_field(doc, "policy", policy);
    read_field(doc, "out", out);
    read_field(doc, "sweep_param", sweep_param);
    read_field(doc, "sweep_values", sweep_values);
    read_field(doc, "trace_slots", trace_slots);
    read_field(doc, "timing", timing);
}

ModelParams RunConfig::resolve_model(double lambda_override) const {
    ModelParams params;
    params.lambda = lambda_override;
    params.p = p;
    params.battery = battery;
    params.delta_max = delta_max;
    params.theta = theta;
    params.m = 1;  // placeholder for validation before choose_m
    params.validate();
    params.m = (m > 0) ? m : choose_m(params.lambda, params.battery, m_auto_eps);
    return params;
}

EpisodeConfig RunConfig::episode_config() const {
    EpisodeConfig config;
    config.slots = slots;
    config.episodes = episodes;
    config.seed = seed;
    config.warmup = warmup;
    config.validate();
    return config;
}

int RunConfig::resolve_budget() const {
    if (budget > 0) return budget;
    const int n = static_cast<int>(std::llround(gamma * sensors));
    if (n < 1)
        throw std::invalid_argument("resolved budget round(gamma * sensors) must be >= 1");
    return n;
}

nlohmann::json RunConfig::to_json(const std::string& mode) const {
    json doc;
    doc["mode"] = mode;
    doc["lambda"] = lambda;
    doc["p"] = p;
    doc["battery"] = battery;
    doc["delta_max"] = delta_max;
    if (m > 0)
        doc["m"] = m;
    else
        doc["m"] = "auto";
    doc["m_auto_eps"] = m_auto_eps;
    doc["theta"] = theta;
    doc["beta0"] = beta0;
    doc["seed"] = seed;
    doc["slots"] = slots;
    doc["episodes"] = episodes;
    doc["warmup"] = warmup;
    doc["sensors"] = sensors;
    doc["budget"] = budget;
    doc["gamma"] = gamma;
    doc["lambdas"] = lambdas.empty()
                         ? std::vector<double>(kLambdaCycle.begin(), kLambdaCycle.end())
                         : lambdas;
    doc["policy"] = policy;
    doc["out"] = out;
    doc["sweep_param"] = sweep_param;
    doc["sweep_values"] = sweep_values;
    doc["trace_slots"] = trace_slots;
    doc["timing"] = timing;
    return doc;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    RunConfig config;
    config.apply_json(doc);
    return config;
}

} // namespace aoi
