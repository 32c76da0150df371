#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <vector>

#include "oran/rng.hpp"
#include "oran/scenario/config.hpp"
#include "oran/scenario/runner.hpp"
#include "oran/xapp/bmm.hpp"
#include "oran/xapp/ssd.hpp"
#include "oran/xapp/ts.hpp"

using namespace oran;

static void BM_Dbscan(benchmark::State& state) {
    Rng rng(1);
    std::vector<xapp::AnomalyPoint> pts;
    for (int i = 0; i < state.range(0); ++i) pts.push_back({rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)});
    for (auto _ : state) benchmark::DoNotOptimize(xapp::dbscan(pts, 0.5, 4));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_NoiseModelQuery(benchmark::State& state) {
    Rng rng(2);
    std::vector<xapp::AnomalyPoint> hist;
    for (int i = 0; i < 2016; ++i) hist.push_back({rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)});
    const xapp::NoiseModel model(hist, 0.5, 4);
    for (auto _ : state) benchmark::DoNotOptimize(model.is_noise({rng.uniform(-3, 3), rng.uniform(-3, 3)}));
}
BENCHMARK(BM_NoiseModelQuery);

static void BM_TsDecide(benchmark::State& state) {
    std::map<std::string, double> rsrp;
    policy::TsPreferenceBody prefs;
    for (int i = 0; i < state.range(0); ++i) {
        const std::string id = "c" + std::to_string(i);
        rsrp[id] = -70.0 - i;
        if (i % 3 == 0) prefs.cells[id] = policy::CellLabel::Avoid;
    }
    const std::optional<std::string> serving = "c1";
    for (auto _ : state) benchmark::DoNotOptimize(xapp::decide(rsrp, serving, &prefs, 3.0, 1.0));
}
BENCHMARK(BM_TsDecide)->Arg(2)->Arg(8)->Arg(32);

static void BM_SelectBeam(benchmark::State& state) {
    xapp::GridParams g;
    g.origin = {0.0, 0.0};
    g.cell_size_m = 2.0;
    g.nx = 50;
    g.ny = 100;
    xapp::RemGrid rem(g, 8);
    Rng rng(3);
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const auto bin = *rem.bin_of({ix * 2.0 + 1.0, iy * 2.0 + 1.0});
            std::vector<double> r(8);
            for (auto& v : r) v = rng.uniform(-110.0, -70.0);
            rem.add_rsrp(bin, r);
            rem.add_motion(bin, {25.0, 90.0});
        }
    }
    xapp::SelectParams p;
    p.horizon = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(xapp::select_beam("u", {50.0, 20.0}, 0, rem, p));
}
BENCHMARK(BM_SelectBeam)->Arg(5)->Arg(25)->Arg(100);

static void BM_ConflictScenario(benchmark::State& state) {
    auto cfg = scenario::load_scenario(std::string(ORAN_SOURCE_DIR) + "/scenarios/conflict_ts_bmm.json");
    cfg.duration_s = 5.0;
    for (auto _ : state) benchmark::DoNotOptimize(scenario::run_scenario(cfg));
}
BENCHMARK(BM_ConflictScenario)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
