#pragma once

// Test-only reference computations, kept independent of the library paths
// they are used to check.

#include <cmath>
#include <vector>

#include "aoi/belief.hpp"
#include "aoi/sparse.hpp"

namespace aoi::test {

inline Matrix identity(int n) {
    Matrix eye(n, n);
    for (int i = 0; i < n; ++i) eye(i, i) = 1.0;
    return eye;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k)
            for (int j = 0; j < b.cols; ++j) out(i, j) += a(i, k) * b(k, j);
    return out;
}

/// Lambda^m by repeated multiplication of the one-step matrix.
inline Matrix matrix_power_bruteforce(const Matrix& a, int m) {
    Matrix out = identity(a.rows);
    for (int i = 0; i < m; ++i) out = matmul(a, out);
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) d = std::max(d, std::abs(a.data[i] - b.data[i]));
    return d;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(static_cast<size_t>(a.rows), 0.0);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) y[static_cast<size_t>(i)] += a(i, j) * x[static_cast<size_t>(j)];
    return y;
}

inline Matrix csr_to_dense(const CsrMatrix& a) {
    Matrix out(a.rows, a.cols);
    for (int r = 0; r < a.rows; ++r)
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            out(r, a.col[k]) += a.val[k];
    return out;
}

} // namespace aoi::test
