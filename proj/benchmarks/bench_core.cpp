#include <cuntzlab/cuntz.hpp>
#include <cuntzlab/field.hpp>
#include <cuntzlab/measure.hpp>
#include <cuntzlab/villadsen.hpp>

#include "support/generators.hpp"

#include <benchmark/benchmark.h>

using namespace cuntzlab;

static void BM_HermitianEig(benchmark::State& state) {
    testsupport::Rng rng(1);
    const int n = static_cast<int>(state.range(0));
    const Matrix m = testsupport::random_psd(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hermitian_eig(m));
    }
}
BENCHMARK(BM_HermitianEig)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_CutDownField(benchmark::State& state) {
    testsupport::Rng rng(2);
    const SpaceRef space = make_grid({2}, 3);
    const MatrixField a = testsupport::random_psd_field(space, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cut_down(a, 0.2));
    }
}
BENCHMARK(BM_CutDownField)->Arg(2)->Arg(4)->Arg(8);

static void BM_WellSupportedApproximant(benchmark::State& state) {
    testsupport::Rng rng(3);
    const SpaceRef space = testsupport::line_space(6);
    const MatrixField a = testsupport::random_psd_field(space, 3, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(well_supported_approximant(a, 0.4));
    }
}
BENCHMARK(BM_WellSupportedApproximant);

static void BM_WitnessSearch(benchmark::State& state) {
    testsupport::Rng rng(4);
    const SpaceRef space = testsupport::line_space(4);
    const MatrixField b = testsupport::random_psd_field(space, 3, rng);
    const MatrixField a = cut_down(b, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(witness_search(a, b, static_cast<int>(state.range(0)), 100, 7));
    }
}
BENCHMARK(BM_WitnessSearch)->Arg(2)->Arg(8);

static void BM_VilladsenStageTable(benchmark::State& state) {
    VilladsenParams p;
    p.m0 = 1;
    p.n0 = 1;
    p.target_r = make_rational(1, 2);
    BigInt n(10000000);
    for (int j = 1; j <= 40; ++j) {
        p.n_seq.push_back(n);
        p.l_seq.emplace_back(j == 1 ? 1 : 0);
        n *= 2;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(stage_table(p, 40));
    }
}
BENCHMARK(BM_VilladsenStageTable);

static void BM_IntertwineDefectMeasure(benchmark::State& state) {
    testsupport::Rng rng(5);
    std::vector<DiscreteMeasure1D> marginals;
    for (int c = 0; c < 20; ++c) {
        DiscreteMeasure1D m;
        m.atoms = {{Rational(0), make_rational(1, 4)}, {make_rational(1, 2), make_rational(3, 4)}};
        marginals.push_back(std::move(m));
    }
    const MarginalMeasure mu = MarginalMeasure::product(std::move(marginals));
    for (auto _ : state) {
        const MarginalMeasure via =
            intertwine_apply(intertwine_apply(mu, IntertwineDirection::delta, 2, 5, 20),
                             IntertwineDirection::gamma, 2, 5, 20);
        const MarginalMeasure direct = pushforward(mu, 10, 0, {}, false);
        benchmark::DoNotOptimize(total_variation(via, direct));
    }
}
BENCHMARK(BM_IntertwineDefectMeasure);

BENCHMARK_MAIN();
