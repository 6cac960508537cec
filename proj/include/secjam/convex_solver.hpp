#pragma once

#include "secjam/parallel.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace secjam::convex {

/// A smooth convex function of a small subset of the problem variables.
///
/// `eval` receives the gathered local values, must fill `grad` (size k) and,
/// when `hess` is non-empty, the dense row-major k x k Hessian. It returns the
/// value. Evaluators are called concurrently for different terms and must be
/// reentrant.
struct Term {
  using Eval =
      std::function<double(std::span<const double> x, std::span<double> grad, std::span<double> hess)>;

  std::vector<int> vars;
  Eval eval;
  bool linear = false;  // Hessian identically zero; never asked for one
};

struct LinearEquality {
  std::vector<int> vars;
  std::vector<double> coeffs;
  double rhs = 0.0;
};

/// minimize sum(objective) s.t. every constraint <= 0, lower <= x <= upper, equalities.
struct ConvexProblem {
  int dimension = 0;
  std::vector<Term> objective;
  std::vector<Term> constraints;
  std::vector<double> lower;  // empty, or one entry per variable (-inf allowed)
  std::vector<double> upper;  // empty, or one entry per variable (+inf allowed)
  std::vector<LinearEquality> equalities;
  std::vector<double> initial;  // strictly feasible
};

enum class SolveStatus { converged, max_iterations, numerical_failure };

const char* to_string(SolveStatus status);

struct SolveReport {
  std::vector<double> x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double initial_objective = std::numeric_limits<double>::quiet_NaN();
  /// max(stationarity, complementarity), both divided by max(1, |objective|).
  double kkt_residual = std::numeric_limits<double>::infinity();
  double stationarity = std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();
  double max_violation = std::numeric_limits<double>::infinity();
  int iterations = 0;  // Newton steps
  int barrier_stages = 0;
  SolveStatus status = SolveStatus::numerical_failure;
  std::string message;

  bool converged() const { return status == SolveStatus::converged; }
};

struct SolverOptions {
  double tol_kkt = 1e-6;
  double tol_feas = 1e-8;
  int max_outer = 200;          // barrier stages
  int max_newton_stage = 100;   // Newton steps per stage
  int max_newton_total = 3000;
  double mu_factor = 10.0;
  Exec exec = Exec::automatic;
};

/// Log-barrier interior point method with damped Newton centering.
SolveReport solve(const ConvexProblem& problem, const SolverOptions& options = {});

/// Same path as `solve`, but the returned point never has a larger objective
/// than the initial point: if the run does not converge, the best iterate seen
/// is returned with the run's status.
SolveReport solve_descent_only(const ConvexProblem& problem, const SolverOptions& options = {});

/// Worst relative error of analytic term gradients against central
/// differences, relative to each term's gradient max-norm.
double check_gradients(const ConvexProblem& problem, std::span<const double> point, double h);

/// Same comparison for the term Hessians (finite differences of gradients).
double check_hessians(const ConvexProblem& problem, std::span<const double> point, double h);

/// Largest f((x+y)/2) - (f(x)+f(y))/2 over random pairs near `center` and every
/// term. Pairs are drawn inside a box of half-width `radius[i]` and shrunk
/// toward `center` until strictly feasible.
double midpoint_convexity_violation(const ConvexProblem& problem, std::span<const double> center,
                                    std::span<const double> radius, int samples, std::uint64_t seed);

/// True when x satisfies all constraints and bounds strictly.
bool strictly_feasible(const ConvexProblem& problem, std::span<const double> x);

}  // namespace secjam::convex
