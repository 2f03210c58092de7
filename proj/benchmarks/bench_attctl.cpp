#include <benchmark/benchmark.h>

#include "attctl/control_laws.hpp"
#include "attctl/dynamics.hpp"
#include "attctl/sim_harness.hpp"

namespace {

using namespace attctl;

void BM_StepRK4(benchmark::State& state) {
  const Scenario sc = maneuver_180_e3(Representation::quaternion);
  BodyState s = BodyState::from_quaternion(sc.initial_attitude, Vec3(0.3, -0.2, 0.5));
  const Vec3 moment(1e-3, -2e-3, 5e-4);
  for (auto _ : state) {
    s = step(s, moment, sc.inertia, sc.integrator);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StepRK4);

void BM_MomentQuaternion(benchmark::State& state) {
  const Scenario sc = maneuver_180_e3(Representation::quaternion);
  const BodyState s = BodyState::from_quaternion(sc.initial_attitude, Vec3(0.3, -0.2, 0.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment_quaternion(s, sc.desired, 0.0, sc.gains, sc.inertia));
  }
}
BENCHMARK(BM_MomentQuaternion);

void BM_MomentRotation(benchmark::State& state) {
  const Scenario sc = maneuver_180_e3(Representation::so3);
  const BodyState s = BodyState::from_quaternion(sc.initial_attitude, Vec3(0.3, -0.2, 0.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment_rotation(s, sc.desired, 0.0, sc.gains, sc.K, sc.inertia));
  }
}
BENCHMARK(BM_MomentRotation);

void BM_RunScenario(benchmark::State& state) {
  Scenario sc = maneuver_180_e3(state.range(0) == 0 ? Representation::quaternion
                                                    : Representation::so3);
  sc.duration = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(sc));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(sc.step_count()));
}
BENCHMARK(BM_RunScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
