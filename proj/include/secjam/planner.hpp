#pragma once

#include "secjam/power_sca.hpp"
#include "secjam/trajectory_sca.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secjam {

enum class Scheme { proposed, fhf_constant, fhf_adaptive };

const char* to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class Phase { power, traj };

const char* to_string(Phase phase);

/// One accepted iterate of an inner SCA loop; inner_iter 0 is the loop's start point.
struct TraceEntry {
  int round = 0;
  Phase phase = Phase::power;
  int inner_iter = 0;
  double objective = 0.0;
};

struct Plan {
  Scheme scheme = Scheme::proposed;
  Trajectory traj;
  PowerProfile power;
  std::vector<SlotRates> rates;
  double avg_rbar = 0.0;
  double avg_rtilde = 0.0;
  std::vector<TraceEntry> trace;
  int outer_rounds = 0;
  bool failed = false;  // a subproblem solver failed; the plan is the last good iterate
  std::string message;
};

struct PlannerOptions {
  int max_rounds = 30;
  double rel_tol = 1e-4;
  ScaOptions power;
  ScaOptions traj;
};

class InfeasibleHover : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-speed straight flight to the hover point, hover, max-speed straight flight
/// to the end point. The last step of each leg may be shorter than the limit.
/// Throws InfeasibleHover if the two legs need more than N+1 steps for either UAV.
Trajectory fly_hover_fly(const Scenario& s, const Point2& hover_tx, const Point2& hover_jam);

/// Transmitter hovers above the GN and the jammer above the eavesdropper estimate.
/// A UAV that cannot reach its hover point in time flies the straight start-end
/// path at constant speed instead.
Trajectory default_fly_hover_fly(const Scenario& s);

PowerProfile constant_power(const Scenario& s);

/// Alternating power / trajectory optimization from the default fly-hover-fly
/// trajectory with constant power.
Plan optimize(const Scenario& s, const PlannerOptions& options = {});

/// fhf_constant or fhf_adaptive on the default fly-hover-fly trajectory.
Plan baseline(const Scenario& s, Scheme scheme, const PlannerOptions& options = {});

/// Dispatches to optimize() or baseline().
Plan run_scheme(const Scenario& s, Scheme scheme, const PlannerOptions& options = {});

}  // namespace secjam
