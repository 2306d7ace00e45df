#include <benchmark/benchmark.h>

#include "nhtopo/pipeline.hpp"

using namespace nhtopo;

namespace {

const ModelParams kExp1{1, 1, 0, 0.3, 0.5};
const double kShow = -0.448 * pi;

void BM_Eigensystem(benchmark::State& st) {
  const ComplexField h = eval_field(kExp1, kShow);
  for (auto _ : st) benchmark::DoNotOptimize(eigensystem(h));
}
BENCHMARK(BM_Eigensystem);

void BM_Windings(benchmark::State& st) {
  const KGrid g(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(windings(kExp1, g));
}
BENCHMARK(BM_Windings)->Arg(181)->Arg(721)->Arg(2881);

void BM_LongTimeAverage(benchmark::State& st) {
  const EigenSystem es = eigensystem(eval_field(kExp1, kShow));
  for (auto _ : st) benchmark::DoNotOptimize(long_time_phi(es, {2.0, 1.0}, Side::right));
}
BENCHMARK(BM_LongTimeAverage);

void BM_DilatedSchedule(benchmark::State& st) {
  const ComplexField h = eval_field(kExp1, kShow);
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(dilated_schedule(h, 2.0, 3.0 / n, n));
}
BENCHMARK(BM_DilatedSchedule)->Arg(1000)->Arg(4000);

void BM_TrotterEvolve(benchmark::State& st) {
  const ComplexField h = eval_field(kExp1, kShow);
  const DilatedSchedule s = dilated_schedule(h, 2.0, 0.003, 1000);
  const DilatedState psi = prepare_dilated_state(Vec2(1, 0), 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(trotter_evolve(s, psi));
}
BENCHMARK(BM_TrotterEvolve);

void BM_PulseSimulation(benchmark::State& st) {
  const ComplexField h = eval_field(kExp1, kShow);
  const auto pulses = compile_pulses(dilated_schedule(h, 2.0, 0.003, 1000), kDefaultCouplingHz);
  const DilatedState psi = prepare_dilated_state(Vec2(1, 0), 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(simulate_pulses(pulses, 0.003, kDefaultCouplingHz, psi));
}
BENCHMARK(BM_PulseSimulation);

void BM_Fit(benchmark::State& st) {
  const EigenSystem es = eigensystem(eval_field(kExp1, kShow));
  std::vector<double> t;
  for (int i = 0; i < 30; ++i) t.push_back(3.0 * i / 29);
  const TextureSeries s = texture_series(es, right_state(es, 2.0, 1.0), t);
  FitConfig cfg;
  cfg.nominal_E = es.E_plus;
  for (auto _ : st) benchmark::DoNotOptimize(fit_series(s, cfg));
}
BENCHMARK(BM_Fit);

void BM_ScanFit(benchmark::State& st) {
  ScenarioConfig c;
  c.mode = Mode::fit;
  c.seed = 1;
  for (auto _ : st) benchmark::DoNotOptimize(run_scan(c));
}
BENCHMARK(BM_ScanFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
