#pragma once

#include "secjam/convex_solver.hpp"

#include <string>
#include <vector>

namespace secjam {

struct ScaOptions {
  int max_iterations = 50;
  double rel_tol = 1e-4;  // stop when the true objective improves by less than this, relatively
  convex::SolverOptions solver = tight_solver();

  // The subproblem optimum must be resolved well below the SCA stop rule.
  static convex::SolverOptions tight_solver() {
    convex::SolverOptions o;
    o.tol_kkt = 1e-9;
    return o;
  }
};

enum class ScaStatus { converged, max_iterations, solver_failure };

const char* to_string(ScaStatus status);

/// What one convex subproblem solve reported, without the solution vector.
struct SolveSummary {
  convex::SolveStatus status = convex::SolveStatus::numerical_failure;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  int newton_steps = 0;
};

struct ScaHistory {
  /// True average objective of every accepted iterate; entry 0 is the start.
  std::vector<double> objective;
  std::vector<SolveSummary> solves;
  ScaStatus status = ScaStatus::converged;
  std::string message;

  int iterations() const { return static_cast<int>(objective.size()) - 1; }
};

}  // namespace secjam
