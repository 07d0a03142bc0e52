#include <sgsn/sgsn.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace sgsn;

Matrix gaussian(Rng &rng, Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = rng.normal();
    return M;
}

Vector gaussian(Rng &rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.normal();
    return v;
}

void BM_ProxG(benchmark::State &state) {
    Rng rng(1);
    const Vector u = gaussian(rng, state.range(0));
    const ProxParams p(0.5, 0.3);
    for (auto _ : state)
        benchmark::DoNotOptimize(prox_g(u, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxG)->Arg(1 << 10)->Arg(1 << 16);

// q₊ = q₋ = q/2 samples with 20 features.
AucOperator auc_operator(Index q) {
    Rng rng(2);
    return AucOperator(gaussian(rng, q / 2, 20), gaussian(rng, q - q / 2, 20));
}

void BM_AucForward(benchmark::State &state) {
    const auto A = auc_operator(state.range(0));
    Rng rng(3);
    const Vector x = gaussian(rng, A.cols());
    Vector y(A.rows());
    for (auto _ : state) {
        A.forward(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * A.rows());
}
BENCHMARK(BM_AucForward)->Arg(200)->Arg(1000);

void BM_AucAdjoint(benchmark::State &state) {
    const auto A = auc_operator(state.range(0));
    Rng rng(4);
    const Vector z = gaussian(rng, A.rows());
    Vector y(A.cols());
    for (auto _ : state) {
        A.adjoint(z, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * A.rows());
}
BENCHMARK(BM_AucAdjoint)->Arg(200)->Arg(1000);

void BM_AucAdjointRestricted(benchmark::State &state) {
    const auto A = auc_operator(1000);
    std::vector<Index> rows;
    for (Index i = 0; i < A.rows(); i += state.range(0))
        rows.push_back(i);
    const IndexSet T(std::move(rows));
    Rng rng(5);
    const Vector zT = gaussian(rng, T.size());
    Vector y(A.cols());
    for (auto _ : state) {
        A.adjoint_restricted(T, zT, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["support"] = static_cast<double>(T.size());
}
BENCHMARK(BM_AucAdjointRestricted)->Arg(10)->Arg(1000);

void BM_SolveExample1(benchmark::State &state) {
    const auto ds = gen_example1(state.range(0), 20, 0.2, 0, 7);
    auto tp = build_auc_problem(ds.positives(), ds.negatives());
    tp.config.vdo_rel_tol = 0;
    tp.config.vdo_change_tol = 0;
    tp.config.vdo_abs_tol = 1e-4;
    int iterations = 0;
    for (auto _ : state) {
        const auto r = solve(tp.problem, tp.config);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.F_star);
    }
    state.counters["iterations"] = iterations;
}
BENCHMARK(BM_SolveExample1)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
