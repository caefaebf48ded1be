#include "doctest.h"

#include "aoi/model.hpp"

using namespace aoi;

TEST_CASE("battery_step follows min{b+e-d, B}") {
    CHECK(battery_step(1, 1, 1, 2) == 1);  // harvest cancels spend
    CHECK(battery_step(2, 1, 0, 2) == 2);  // saturation at capacity
    CHECK(battery_step(0, 1, 0, 2) == 1);  // pure harvest
    CHECK_THROWS_AS(battery_step(0, 0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(battery_step(3, 0, 0, 2), std::invalid_argument);
}

TEST_CASE("battery_step stays in [0, B]") {
    const int capacity = 3;
    for (int b = 0; b <= capacity; ++b)
        for (int e = 0; e <= 1; ++e)
            for (int d = 0; d <= (b >= 1 ? 1 : 0); ++d) {
                const int next = battery_step(b, e, d, capacity);
                CHECK(next >= 0);
                CHECK(next <= capacity);
            }
}

TEST_CASE("aoi_step resets on delivery and saturates") {
    CHECK(aoi_step(5, 1, 64) == 1);
    CHECK(aoi_step(64, 0, 64) == 64);
    CHECK(aoi_step(3, 0, 64) == 4);
    for (int delta = 1; delta <= 64; ++delta)
        for (int d = 0; d <= 1; ++d) {
            const int next = aoi_step(delta, d, 64);
            CHECK(next >= 1);
            CHECK(next <= 64);
        }
}

TEST_CASE("on_demand_aoi counts only requested slots") {
    CHECK(on_demand_aoi(0, 0, 10, 64) == 0);
    CHECK(on_demand_aoi(1, 1, 10, 64) == 1);
    CHECK(on_demand_aoi(1, 0, 63, 64) == 64);
}

TEST_CASE("immediate_cost applies d = a * 1{b >= 1}") {
    CHECK(immediate_cost({0, 1, 7, 1}, 1, 64) == 8);  // empty battery, command fails
    CHECK(immediate_cost({2, 1, 7, 1}, 1, 64) == 1);
    CHECK(immediate_cost({2, 0, 7, 1}, 1, 64) == 0);
}

TEST_CASE("commanding an empty sensor changes nothing") {
    for (int r = 0; r <= 1; ++r)
        for (int delta = 1; delta <= 16; ++delta) {
            const EnvState s{0, r, delta, 1};
            CHECK(immediate_cost(s, 1, 16) == immediate_cost(s, 0, 16));
        }
}

TEST_CASE("immediate_cost range is {0} or [1, delta_max]") {
    const int dmax = 16;
    for (int b = 0; b <= 2; ++b)
        for (int r = 0; r <= 1; ++r)
            for (int delta = 1; delta <= dmax; ++delta)
                for (int a = 0; a <= 1; ++a) {
                    const int c = immediate_cost({b, r, delta, 1}, a, dmax);
                    CHECK((c == 0 || (c >= 1 && c <= dmax)));
                    if (r == 0) CHECK(c == 0);
                }
}

TEST_CASE("ModelParams validation") {
    ModelParams ok{0.5, 0.5, 2, 16, 4, 1e-7};
    CHECK_NOTHROW(ok.validate());
    auto bad = ok;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.lambda = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.p = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.delta_max = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.m = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.theta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
