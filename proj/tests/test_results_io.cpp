#include "secjam/results_io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace secjam;

namespace fs = std::filesystem;

TEST_CASE("plan files reload to the same objective") {
  const auto s = default_paper_scenario(104);
  const auto plan = optimize(s);
  const auto dir = fs::temp_directory_path() / "secjam_io_test";
  fs::remove_all(dir);
  write_plan(dir, plan, s, 0.0);

  const auto traj = read_csv(dir / "trajectory.csv");
  CHECK(traj.header.size() == 11u);
  CHECK(traj.header[0] == "slot");
  CHECK(traj.header[10] == "rtilde");
  REQUIRE(traj.rows.size() == static_cast<std::size_t>(s.num_slots + 2));
  CHECK(traj.rows.front()[traj.column("p1_w")].empty());
  CHECK(traj.rows.back()[traj.column("rbar")].empty());
  CHECK_FALSE(traj.rows[1][traj.column("rbar")].empty());

  const auto loaded = load_trajectory_csv(dir / "trajectory.csv");
  CHECK(loaded.traj.tx == plan.traj.tx);
  CHECK(loaded.power.jam == plan.power.jam);

  const auto summary = read_csv(dir / "summary.csv");
  REQUIRE(summary.rows.size() == 1u);
  const auto& row = summary.rows[0];
  CHECK(row[summary.column("scheme")] == "proposed");
  CHECK(std::stod(row[summary.column("horizon_s")]) == 104.0);
  CHECK(std::stod(row[summary.column("eps_m")]) == 10.0);
  CHECK(std::stod(row[summary.column("wall_ms")]) == 0.0);
  const double avg = std::stod(row[summary.column("avg_rbar")]);
  CHECK(std::abs(objective(loaded.traj, loaded.power, s).avg_rbar - avg) <= 1e-8);
  CHECK(std::stoi(row[summary.column("outer_rounds")]) == plan.outer_rounds);

  const auto conv = read_csv(dir / "convergence.csv");
  CHECK(conv.header == std::vector<std::string>{"round", "phase", "inner_iter", "objective"});
  CHECK(conv.rows.size() == plan.trace.size());
  for (const auto& r : conv.rows) CHECK((r[1] == "power" || r[1] == "traj"));
  fs::remove_all(dir);
}

TEST_CASE("csv quoting") {
  SweepRow r;
  r.param = "horizon_s";
  r.value = 102;
  r.status = "error";
  r.summary.scheme = "proposed";
  r.dir = "horizon_s_102/proposed";
  r.message = "bad \"thing\", really";
  const auto t = parse_csv(format_sweep_csv({r}));
  REQUIRE(t.rows.size() == 1u);
  CHECK(t.rows[0].size() == t.header.size());
  CHECK(t.rows[0][t.column("message")] == r.message);
  CHECK(t.rows[0][t.column("avg_rbar")].empty());
}

TEST_CASE("atomic write replaces the file") {
  const auto path = fs::temp_directory_path() / "secjam_atomic.txt";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  const auto t = read_csv(path);
  CHECK(t.header == std::vector<std::string>{"two"});
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
  fs::remove(path);
}
