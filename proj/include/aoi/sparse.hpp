#pragma once

#include <cstdint>
#include <vector>

namespace aoi {

/// Compressed sparse row matrix.  Explicit zeros are kept: the stored count
/// per row is part of the transition-kernel contract.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int64_t> row_ptr;  // size rows + 1
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
    std::int64_t row_nnz(int r) const { return row_ptr[r + 1] - row_ptr[r]; }

    double row_sum(int r) const {
        double s = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k];
        return s;
    }
};

/// y = A x.  Serial reference; kept for tests and the kernel benchmark.
void spmv_serial(const CsrMatrix& a, const double* x, double* y);

/// y = A x, rows distributed over OpenMP threads.  Each row is accumulated
/// serially, so the result is bitwise identical to spmv_serial at any thread
/// count.
void spmv(const CsrMatrix& a, const double* x, double* y);

CsrMatrix transpose(const CsrMatrix& a);

} // namespace aoi
