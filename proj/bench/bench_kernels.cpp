// Kernel benchmark: serial reference vs OpenMP paths for the sparse
// matrix-vector product, plus an end-to-end solve timing.
//
//   ./aoi_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aoi/belief.hpp"
#include "aoi/model.hpp"
#include "aoi/simulator.hpp"
#include "aoi/solver.hpp"

using namespace aoi;

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 200;

#ifdef _OPENMP
    std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    const ModelParams params{0.06, 0.8, 2, 64, 32, 1e-7};
    const auto space = TruncatedBeliefSpace::build(TruncatedBeliefSpace::uniform_belief(2),
                                                   params.lambda, params.battery, params.m);
    const SparseKernel kernel = build_kernel(space, params);
    const int n = kernel.idx.size();
    std::printf("instance: %d states, nnz(P0)=%lld nnz(P1)=%lld\n", n,
                static_cast<long long>(kernel.p0.nnz()), static_cast<long long>(kernel.p1.nnz()));

    SplitMix64 rng = make_stream(1, 0);
    std::vector<double> x(static_cast<size_t>(n));
    for (double& v : x) v = rng.next_double();
    std::vector<double> y(static_cast<size_t>(n));

    auto bench_spmv = [&](const char* name, void (*kernel_fn)(const CsrMatrix&, const double*,
                                                              double*),
                          const CsrMatrix& matrix) {
        kernel_fn(matrix, x.data(), y.data());  // warm up
        const auto start = clock_type::now();
        for (int i = 0; i < repeats; ++i) kernel_fn(matrix, x.data(), y.data());
        const double total = ms_since(start);
        std::printf("%-24s %8.3f ms/op  (%.2f GFLOP/s)\n", name, total / repeats,
                    2.0 * static_cast<double>(matrix.nnz()) * repeats / total / 1e6);
    };

    bench_spmv("spmv_serial(P1)", spmv_serial, kernel.p1);
    bench_spmv("spmv_omp(P1)   ", spmv, kernel.p1);
    bench_spmv("spmv_serial(P0)", spmv_serial, kernel.p0);
    bench_spmv("spmv_omp(P0)   ", spmv, kernel.p0);

    {
        const auto start = clock_type::now();
        const SolveResult result = rvia_solve(kernel);
        const double total = ms_since(start);
        std::printf("rvia_solve               %8.1f ms   (%lld iterations, c*=%.6f)\n", total,
                    static_cast<long long>(result.iterations), result.c_star);
    }

    {
        EpisodeConfig config;
        config.slots = 1000000;
        config.episodes = 4;
        const SolveResult solve = rvia_solve(kernel);
        const PolicyFn policy = make_pomdp_policy(solve.policy, kernel.idx);
        const auto start = clock_type::now();
        const CostEstimate est = simulate(policy, params, space, config);
        const double total = ms_since(start);
        std::printf("simulate 4x1e6 slots     %8.1f ms   (mean=%.4f, %.1f Mslot/s)\n", total,
                    est.mean, 4.0 * 1e6 / total / 1e3);
    }
    return 0;
}
