#include "doctest.h"

#include "aoi/stationary.hpp"

using namespace aoi;

namespace {

CsrMatrix dense_rows(const std::vector<std::vector<double>>& rows) {
    CsrMatrix a;
    a.rows = static_cast<int>(rows.size());
    a.cols = static_cast<int>(rows[0].size());
    a.row_ptr.push_back(0);
    for (const auto& row : rows) {
        for (int j = 0; j < a.cols; ++j) {
            a.col.push_back(j);
            a.val.push_back(row[static_cast<size_t>(j)]);
        }
        a.row_ptr.push_back(static_cast<std::int64_t>(a.col.size()));
    }
    return a;
}

} // namespace

TEST_CASE("two-state chain has the analytic stationary distribution") {
    const CsrMatrix chain = dense_rows({{0.9, 0.1}, {0.4, 0.6}});
    const StationaryResult stat = stationary_distribution(chain);
    REQUIRE(stat.converged);
    CHECK(stat.distribution[0] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(stat.distribution[1] == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("periodic chains converge through the damped iteration") {
    const CsrMatrix cycle = dense_rows({{0.0, 1.0}, {1.0, 0.0}});
    const StationaryResult stat = stationary_distribution(cycle);
    REQUIRE(stat.converged);
    CHECK(stat.distribution[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("expected_value is the stationary average") {
    const std::vector<double> dist{0.8, 0.2};
    const std::vector<double> values{1.0, 11.0};
    CHECK(expected_value(dist, values) == doctest::Approx(3.0));
}

TEST_CASE("induced_chain selects rows by policy") {
    const CsrMatrix p0 = dense_rows({{1.0, 0.0}, {1.0, 0.0}});
    const CsrMatrix p1 = dense_rows({{0.0, 1.0}, {0.0, 1.0}});
    const std::vector<std::uint8_t> policy{1, 0};
    const CsrMatrix chain = induced_chain(p0, p1, policy);
    CHECK(chain.val[static_cast<size_t>(chain.row_ptr[0])] == 0.0);      // row 0 from p1
    CHECK(chain.val[static_cast<size_t>(chain.row_ptr[0]) + 1] == 1.0);
    CHECK(chain.val[static_cast<size_t>(chain.row_ptr[1])] == 1.0);      // row 1 from p0
}

TEST_CASE("count_recurrent_classes") {
    // A single loop plus a transient state feeding it.
    const CsrMatrix uni = dense_rows({{0.0, 1.0, 0.0}, {0.0, 0.5, 0.5}, {0.0, 0.5, 0.5}});
    CHECK(count_recurrent_classes(uni) == 1);

    // Two disjoint closed classes.
    const CsrMatrix two = dense_rows({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(count_recurrent_classes(two) == 2);

    // Two states cycling plus an absorbing third: cycle and loop both closed.
    const CsrMatrix mixed =
        dense_rows({{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
    CHECK(count_recurrent_classes(mixed) == 2);
}
