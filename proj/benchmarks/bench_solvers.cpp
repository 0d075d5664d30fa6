#include <benchmark/benchmark.h>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/dual_game.hpp"
#include "ergoswitch/elliptic.hpp"
#include "ergoswitch/parabolic.hpp"

using namespace ergoswitch;

static void BM_Hamiltonian(benchmark::State& state) {
    const SwitchingModel model = preset("robust_drift");
    const Grid grid(-5.0, 5.0, static_cast<int>(state.range(0)));
    const DiscreteGenerator gen(model, grid);
    ValueField v(grid.size(), model.regimes(), 1.0);
    ValueField out;
    for (auto _ : state) {
        gen.hamiltonian(v, out);
        benchmark::DoNotOptimize(out.values().data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size() * model.regimes() * model.control_count());
}
BENCHMARK(BM_Hamiltonian)->Arg(201)->Arg(801);

static void BM_ParabolicStep(benchmark::State& state) {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-5.0, 5.0, static_cast<int>(state.range(0)));
    const DiscreteGenerator gen(model, grid);
    const double dt = 0.9 * cfl_bound(gen);
    ValueField v(grid.size(), model.regimes(), 0.0);
    ValueField scratch;
    for (auto _ : state) {
        step_parabolic_in_place(v, dt, gen, scratch);
        benchmark::DoNotOptimize(v.values().data());
    }
}
BENCHMARK(BM_ParabolicStep)->Arg(201)->Arg(801);

static void BM_EllipticSolve(benchmark::State& state) {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-5.0, 5.0, 201);
    for (auto _ : state) {
        auto solve = solve_elliptic(model, grid, 0.1, geometric_schedule(12), 5e-4);
        benchmark::DoNotOptimize(solve.field.values().data());
    }
}
BENCHMARK(BM_EllipticSolve)->Unit(benchmark::kMillisecond);

static void BM_McPath(benchmark::State& state) {
    const SwitchingModel model = preset("ou_quadratic");
    const IntensityPolicy policy{RegimeIntensity::constant({1.0}), ControlIntensity::constant({1.0})};
    McConfig cfg;
    std::uint64_t p = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_path(model, 0.0, 0, 0, policy, 1.0, cfg, path_seed(1, p++)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.horizon / cfg.dt));
}
BENCHMARK(BM_McPath)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
