#include "doctest.h"

#include "aoi/simulator.hpp"
#include "aoi/sparse.hpp"
#include "support/oracles.hpp"

using namespace aoi;

namespace {

CsrMatrix random_csr(int rows, int cols, int per_row, SplitMix64& rng) {
    CsrMatrix a;
    a.rows = rows;
    a.cols = cols;
    a.row_ptr.push_back(0);
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < per_row; ++k) {
            a.col.push_back(static_cast<std::int32_t>(rng.uniform_int(cols)));
            a.val.push_back(rng.next_double() * 2.0 - 1.0);
        }
        a.row_ptr.push_back(static_cast<std::int64_t>(a.col.size()));
    }
    return a;
}

} // namespace

TEST_CASE("parallel spmv is bitwise identical to the serial reference") {
    SplitMix64 rng = make_stream(3, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const int rows = 1 + static_cast<int>(rng.uniform_int(300));
        const int cols = 1 + static_cast<int>(rng.uniform_int(300));
        const CsrMatrix a = random_csr(rows, cols, 1 + static_cast<int>(rng.uniform_int(8)), rng);
        std::vector<double> x(static_cast<size_t>(cols));
        for (double& v : x) v = rng.next_double();
        std::vector<double> y_serial(static_cast<size_t>(rows)), y_par(static_cast<size_t>(rows));
        spmv_serial(a, x.data(), y_serial.data());
        spmv(a, x.data(), y_par.data());
        CHECK(y_serial == y_par);
    }
}

TEST_CASE("spmv matches a dense oracle") {
    SplitMix64 rng = make_stream(4, 0);
    const CsrMatrix a = random_csr(40, 25, 5, rng);
    std::vector<double> x(25);
    for (double& v : x) v = rng.next_double();

    const Matrix dense = test::csr_to_dense(a);
    const std::vector<double> expected = test::matvec(dense, x);
    std::vector<double> y(40);
    spmv(a, x.data(), y.data());
    for (int r = 0; r < 40; ++r)
        CHECK(y[static_cast<size_t>(r)] == doctest::Approx(expected[static_cast<size_t>(r)]).epsilon(1e-12));
}

TEST_CASE("transpose round-trips and preserves entries") {
    SplitMix64 rng = make_stream(5, 0);
    const CsrMatrix a = random_csr(30, 50, 4, rng);
    const CsrMatrix t = transpose(a);
    CHECK(t.rows == a.cols);
    CHECK(t.cols == a.rows);
    CHECK(t.nnz() == a.nnz());

    const Matrix da = test::csr_to_dense(a);
    const Matrix dt = test::csr_to_dense(t);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) CHECK(da(i, j) == dt(j, i));

    const CsrMatrix back = transpose(t);
    CHECK(test::max_abs_diff(test::csr_to_dense(back), da) == 0.0);
}
