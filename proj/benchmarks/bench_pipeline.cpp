#include <benchmark/benchmark.h>

#include "modalshm/beam.hpp"
#include "modalshm/frf.hpp"
#include "modalshm/loewner.hpp"
#include "modalshm/stabilization.hpp"

using namespace modalshm;

namespace {

FrfDataset beam_frf(double duration_s) {
    const BeamConfig config = default_beam_config();
    const GlobalSystem system = assemble(config, DamageScenario::baseline(config.n_elements));
    std::vector<TimeSeriesSet> runs;
    runs.push_back(simulate_step_response(system, {1, Direction::y, 1.0}, 16384.0, duration_s));
    runs.push_back(simulate_step_response(system, {1, Direction::z, 1.0}, 16384.0, duration_s));
    return estimate_frf(runs);
}

}  // namespace

static void BM_AssembleBeam(benchmark::State& state) {
    const BeamConfig config = default_beam_config();
    const auto scenario = DamageScenario::baseline(config.n_elements);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble(config, scenario));
    }
}
BENCHMARK(BM_AssembleBeam)->Unit(benchmark::kMicrosecond);

static void BM_SimulateStep(benchmark::State& state) {
    const BeamConfig config = default_beam_config();
    const GlobalSystem system = assemble(config, DamageScenario::baseline(config.n_elements));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            simulate_step_response(system, {1, Direction::y, 1.0}, 16384.0, 1.0));
    }
}
BENCHMARK(BM_SimulateStep)->Unit(benchmark::kMillisecond);

static void BM_EstimateFrf(benchmark::State& state) {
    const BeamConfig config = default_beam_config();
    const GlobalSystem system = assemble(config, DamageScenario::baseline(config.n_elements));
    std::vector<TimeSeriesSet> runs;
    runs.push_back(simulate_step_response(system, {1, Direction::y, 1.0}, 16384.0, 2.0));
    runs.push_back(simulate_step_response(system, {1, Direction::z, 1.0}, 16384.0, 2.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_frf(runs));
    }
}
BENCHMARK(BM_EstimateFrf)->Unit(benchmark::kMillisecond);

static void BM_BuildPencil(benchmark::State& state) {
    const auto frf = decimate_bins(select_band(beam_frf(1.0), 1.0, 4000.0),
                                   state.range(0));
    const auto directions =
        generate_directions(1, frf.n_inputs(), frf.n_outputs(), frf.n_bins() / 2,
                            (frf.n_bins() + 1) / 2);
    const auto sets = partition(frf, directions);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_pencil(sets));
    }
}
BENCHMARK(BM_BuildPencil)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_PencilSvd(benchmark::State& state) {
    const auto frf = decimate_bins(select_band(beam_frf(1.0), 1.0, 4000.0),
                                   state.range(0));
    const auto directions =
        generate_directions(1, frf.n_inputs(), frf.n_outputs(), frf.n_bins() / 2,
                            (frf.n_bins() + 1) / 2);
    const auto pencil = build_pencil(partition(frf, directions));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_pencil_svd(pencil));
    }
}
BENCHMARK(BM_PencilSvd)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_RealizeAndExtract(benchmark::State& state) {
    const auto frf = decimate_bins(select_band(beam_frf(1.0), 1.0, 4000.0), 512);
    const auto directions =
        generate_directions(1, frf.n_inputs(), frf.n_outputs(), frf.n_bins() / 2,
                            (frf.n_bins() + 1) / 2);
    const auto svd = compute_pencil_svd(build_pencil(partition(frf, directions)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_modes(realize(svd, 50), {1.0, 4000.0}));
    }
}
BENCHMARK(BM_RealizeAndExtract)->Unit(benchmark::kMillisecond);

static void BM_SweepBaseline(benchmark::State& state) {
    const auto frf = beam_frf(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(frf, {24, 50, 2}, 1, {1.0, 4000.0}));
    }
}
BENCHMARK(BM_SweepBaseline)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
