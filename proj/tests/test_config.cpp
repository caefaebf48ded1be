#include "doctest.h"

#include <nlohmann/json.hpp>

#include "aoi/config.hpp"
#include "aoi/io.hpp"

using namespace aoi;
using nlohmann::json;

TEST_CASE("unknown config keys are rejected by name") {
    RunConfig config;
    const json doc{{"lambda", 0.1}, {"lamda", 0.2}};
    try {
        config.apply_json(doc);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("lamda") != std::string::npos);
    }
}

TEST_CASE("m accepts integers and \"auto\"") {
    RunConfig config;
    config.apply_json(json{{"m", 12}});
    CHECK(config.m == 12);
    config.apply_json(json{{"m", "auto"}});
    CHECK(config.m == 0);
    CHECK_THROWS_AS(config.apply_json(json{{"m", "most"}}), std::invalid_argument);
    CHECK_THROWS_AS(config.apply_json(json{{"m", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(config.apply_json(json{{"m", 2.5}}), std::invalid_argument);
}

TEST_CASE("later overlays override earlier values") {
    RunConfig config;
    config.apply_json(json{{"lambda", 0.04}, {"p", 0.5}});
    config.apply_json(json{{"lambda", 0.08}});
    CHECK(config.lambda == 0.08);
    CHECK(config.p == 0.5);
}

TEST_CASE("resolve_model selects the truncation depth automatically") {
    RunConfig config;
    config.lambda = 1.0;
    config.battery = 2;
    config.m = 0;
    config.m_auto_eps = 1e-6;
    CHECK(config.resolve_model().m == 2);
    config.m = 7;
    CHECK(config.resolve_model().m == 7);
}

TEST_CASE("infeasible model parameters are rejected with an explanation") {
    RunConfig config;
    config.lambda = 0.0;
    try {
        config.resolve_model();
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("lambda") != std::string::npos);
    }
}

TEST_CASE("budget resolution") {
    RunConfig config;
    config.sensors = 100;
    config.gamma = 0.15;
    CHECK(config.resolve_budget() == 15);
    config.budget = 7;
    CHECK(config.resolve_budget() == 7);
    config.budget = 0;
    config.gamma = 0.001;
    CHECK_THROWS_AS(config.resolve_budget(), std::invalid_argument);
}

TEST_CASE("config echo is complete and stable") {
    RunConfig config;
    const json doc = config.to_json("solve");
    CHECK(doc.at("mode") == "solve");
    CHECK(doc.at("m") == "auto");
    CHECK(doc.at("lambdas").size() == 10);
    CHECK(doc.dump() == config.to_json("solve").dump());
}

TEST_CASE("format_double round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(10.069733995770218)) == 10.069733995770218);
}
