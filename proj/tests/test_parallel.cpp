#include "secjam/planner.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace secjam;

TEST_CASE("slot kernels: parallel matches serial bit for bit") {
  auto s = default_paper_scenario(20000);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  Trajectory t;
  PowerProfile p;
  for (int k = 0; k < s.num_slots + 2; ++k) {
    t.tx.push_back(oracle::in_disk(rng, {100, 0}, 600));
    t.jam.push_back(oracle::in_disk(rng, {100, 0}, 600));
  }
  for (int k = 0; k < s.num_slots; ++k) {
    p.tx.push_back(u(rng));
    p.jam.push_back(u(rng));
  }
  const auto a = evaluate_slot_rates(t, p, s, Exec::serial);
  const auto b = evaluate_slot_rates(t, p, s, Exec::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].rbar == b[k].rbar);
    CHECK(a[k].re_ub == b[k].re_ub);
  }
  const auto ga = evaluate_slot_gains(t, s, Exec::serial);
  const auto gb = evaluate_slot_gains(t, s, Exec::parallel);
  for (std::size_t k = 0; k < ga.size(); ++k) CHECK(ga[k].h1 == gb[k].h1);
  CHECK(objective(t, p, s, Exec::serial).avg_rbar == objective(t, p, s, Exec::parallel).avg_rbar);
}

TEST_CASE("subproblem solves: parallel term evaluation matches serial") {
  const auto s = default_paper_scenario(200);
  const auto traj = default_fly_hover_fly(s);
  ScaOptions serial, parallel;
  serial.solver.exec = Exec::serial;
  parallel.solver.exec = Exec::parallel;

  const auto pa = optimize_power(traj, constant_power(s), s, serial);
  const auto pb = optimize_power(traj, constant_power(s), s, parallel);
  CHECK(pa.power.tx == pb.power.tx);
  CHECK(pa.power.jam == pb.power.jam);
  CHECK(pa.history.objective == pb.history.objective);

  const auto ta = optimize_trajectory(pa.power, traj, s, serial);
  const auto tb = optimize_trajectory(pa.power, traj, s, parallel);
  CHECK(ta.traj.tx == tb.traj.tx);
  CHECK(ta.traj.jam == tb.traj.jam);
  CHECK(ta.history.objective == tb.history.objective);
}
