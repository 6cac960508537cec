#pragma once

#include "secjam/channel.hpp"
#include "secjam/sca.hpp"

#include <span>
#include <vector>

namespace secjam {

/// Power allocation for fixed trajectories, solved by successive convex approximation.
///
/// The per-slot secrecy rate is written as a difference of concave logarithms
/// of the powers. Each SCA iteration keeps the concave part exact, replaces the
/// subtracted concave part by its tangent at the current powers, and solves the
/// resulting concave maximization over all 2N powers jointly.
struct PowerSubproblemState {
  PowerProfile local;
  std::vector<SlotGains> gains;
  int iteration = 0;
  std::vector<double> history;
};

/// r0 - re_ub expanded into four logarithms; identical to slot_rates().rbar.
double rbar_power_form(double p1, double p2, const SlotGains& g);

/// Concave lower bound of rbar_power_form, tight at (p1_local, p2_local).
double surrogate_power(double p1, double p2, const SlotGains& g, double p1_local, double p2_local);

double surrogate_power(double p1, double p2, const PowerSubproblemState& state, int slot);

/// The convex program of one SCA step: variables are interleaved (p1[n], p2[n]).
/// `start` must be strictly inside the power constraints.
convex::ConvexProblem build_power_problem(const PowerSubproblemState& state, double p_ave,
                                          double p_peak, const PowerProfile& start);

/// Pulls a feasible profile strictly inside 0 < p < P_peak, mean(p) < P_ave.
PowerProfile interior_power(const PowerProfile& p, double p_ave, double p_peak);

struct PowerResult {
  PowerProfile power;
  ScaHistory history;
};

/// Runs SCA from `init` until the true average objective stalls. Slots whose
/// secrecy rate is still negative afterwards get p1 = 0, which can only help.
PowerResult optimize_power(std::span<const SlotGains> gains, const PowerProfile& init, double p_ave,
                           double p_peak, const ScaOptions& options = {});

PowerResult optimize_power(const Trajectory& traj, const PowerProfile& init, const Scenario& s,
                           const ScaOptions& options = {});

}  // namespace secjam
