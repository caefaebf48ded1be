#include "aoi/sparse.hpp"

namespace aoi {

void spmv_serial(const CsrMatrix& a, const double* x, double* y) {
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

void spmv(const CsrMatrix& a, const double* x, double* y) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

CsrMatrix transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.rows = a.cols;
    t.cols = a.rows;
    t.row_ptr.assign(static_cast<size_t>(t.rows) + 1, 0);
    t.col.resize(a.col.size());
    t.val.resize(a.val.size());

    for (std::int64_t k = 0; k < a.nnz(); ++k) ++t.row_ptr[a.col[k] + 1];
    for (int r = 0; r < t.rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];

    std::vector<std::int64_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < a.rows; ++r) {
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            const std::int64_t pos = next[a.col[k]]++;
            t.col[pos] = r;
            t.val[pos] = a.val[k];
        }
    }
    return t;
}

} // namespace aoi
