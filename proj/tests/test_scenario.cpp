#include "secjam/scenario.hpp"

#include <doctest.h>

using namespace secjam;

namespace {

bool mentions(const ValidationReport& r, const std::string& field) {
  for (const auto& v : r.violations)
    if (v.field == field) return true;
  return false;
}

}  // namespace

TEST_CASE("reference scenario values") {
  const auto s = default_paper_scenario(200);
  CHECK(s.num_slots == 200);
  CHECK(s.slot_duration == 1.0);
  CHECK(s.p_ave == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.p_peak == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.gamma0 == doctest::Approx(1e8).epsilon(1e-15));
  CHECK(s.gn_location == Point2(0, 0));
  CHECK(s.est_eve_location == Point2(200, 0));
  CHECK(s.eve_uncertainty == 10.0);
  CHECK(s.altitude_tx == 100.0);
  CHECK(s.altitude_jam == 110.0);
  CHECK(s.max_step_tx() == 10.0);
  CHECK(s.start_tx == Point2(100, 500));
  CHECK(s.end_jam == Point2(100, -500));
  CHECK(validate(s).ok());
  CHECK(default_paper_scenario(102).num_slots == 102);
}

TEST_CASE("reach bound") {
  auto s = default_paper_scenario(98);
  const auto r = validate(s);
  REQUIRE_FALSE(r.ok());
  CHECK(mentions(r, "start_tx/end_tx"));
  CHECK(r.to_string().find("1000") != std::string::npos);
  CHECK(r.to_string().find("990") != std::string::npos);

  CHECK_FALSE(validate(default_paper_scenario(1)).ok());
  CHECK(validate(default_paper_scenario(99)).ok());  // exactly 100 steps of 10 m
  for (int t = 102; t <= 400; t += 7) CHECK(validate(default_paper_scenario(t)).ok());
}

TEST_CASE("invariant violations name their field") {
  auto base = default_paper_scenario(200);
  struct Case {
    void (*mutate)(Scenario&);
    const char* field;
  };
  const Case cases[] = {
      {[](Scenario& s) { s.p_peak = s.p_ave / 2; }, "p_peak"},
      {[](Scenario& s) { s.eve_uncertainty = -1; }, "eve_eps_m"},
      {[](Scenario& s) { s.altitude_tx = 0; }, "h1_m"},
      {[](Scenario& s) { s.altitude_jam = -5; }, "h2_m"},
      {[](Scenario& s) { s.gamma0 = 0; }, "gamma0"},
      {[](Scenario& s) { s.p_ave = 0; }, "p_ave"},
      {[](Scenario& s) { s.num_slots = 0; }, "horizon_s"},
      {[](Scenario& s) { s.slot_duration = 0; }, "slot_s"},
      {[](Scenario& s) { s.speed_jam = 0; }, "v2_mps"},
  };
  for (const auto& c : cases) {
    Scenario s = base;
    c.mutate(s);
    const auto r = validate(s);
    CHECK_FALSE(r.ok());
    CHECK_MESSAGE(mentions(r, c.field), c.field);
  }
}

TEST_CASE("trajectory and power checks") {
  const auto s = default_paper_scenario(120);
  Trajectory t;
  for (int k = 0; k <= s.num_slots + 1; ++k) {
    const double f = static_cast<double>(k) / (s.num_slots + 1);
    t.tx.push_back(s.start_tx + f * (s.end_tx - s.start_tx));
    t.jam.push_back(s.start_jam + f * (s.end_jam - s.start_jam));
  }
  CHECK(check_trajectory(t, s).ok());
  auto bad = t;
  bad.tx[5].x() += 30;
  CHECK_FALSE(check_trajectory(bad, s).ok());
  bad = t;
  bad.jam.back().y() += 1e-9;
  CHECK_FALSE(check_trajectory(bad, s).ok());

  PowerProfile p{std::vector<double>(s.num_slots, s.p_ave), std::vector<double>(s.num_slots, 0.0)};
  CHECK(check_power(p, s).ok());
  p.tx[0] = s.p_peak * 1.01;
  CHECK_FALSE(check_power(p, s).ok());
  p.tx[0] = s.p_ave + 1e-3;
  CHECK_FALSE(check_power(p, s).ok());  // average exceeds the budget
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(30) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0) == doctest::Approx(1e-3));
  CHECK(watts_to_dbm(4.0) == doctest::Approx(36.0206).epsilon(1e-5));
  CHECK(db_to_linear(80) == doctest::Approx(1e8));
}
