#include "secjam/planner.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace secjam;

namespace {

struct Instance {
  Scenario s;
  Trajectory traj;
  PowerProfile power;
};

Instance make_instance(int slots) {
  Instance in{default_paper_scenario(slots), {}, {}};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-500.0, 500.0), p(0.0, 2.0);
  for (int k = 0; k < slots + 2; ++k) {
    in.traj.tx.emplace_back(u(rng), u(rng));
    in.traj.jam.emplace_back(u(rng), u(rng));
  }
  for (int k = 0; k < slots; ++k) {
    in.power.tx.push_back(p(rng));
    in.power.jam.push_back(p(rng));
  }
  return in;
}

void slot_rates(benchmark::State& state, Exec exec) {
  const auto in = make_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_slot_rates(in.traj, in.power, in.s, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void power_subproblem(benchmark::State& state, Exec exec) {
  const auto in = make_instance(static_cast<int>(state.range(0)));
  PowerSubproblemState st;
  st.gains = evaluate_slot_gains(in.traj, in.s);
  st.local = constant_power(in.s);
  const auto problem = build_power_problem(st, in.s.p_ave, in.s.p_peak, interior_power(st.local, in.s.p_ave, in.s.p_peak));
  convex::SolverOptions o;
  o.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(convex::solve(problem, o));
}

void trajectory_round(benchmark::State& state, Exec exec) {
  const auto s = default_paper_scenario(static_cast<int>(state.range(0)));
  const auto traj = default_fly_hover_fly(s);
  ScaOptions o;
  o.max_iterations = 1;
  o.solver.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_trajectory(constant_power(s), traj, s, o));
}

}  // namespace

BENCHMARK_CAPTURE(slot_rates, serial, Exec::serial)->Arg(200)->Arg(20000)->Arg(200000);
BENCHMARK_CAPTURE(slot_rates, parallel, Exec::parallel)->Arg(200)->Arg(20000)->Arg(200000);
BENCHMARK_CAPTURE(power_subproblem, serial, Exec::serial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(power_subproblem, parallel, Exec::parallel)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(trajectory_round, serial, Exec::serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(trajectory_round, parallel, Exec::parallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
