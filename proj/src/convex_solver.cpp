#include "secjam/convex_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace secjam::convex {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Linear constraints wider than this enter the Newton matrix as rank-one updates.
constexpr std::size_t kDenseLimit = 32;

// Term values, gradients and Hessians for every objective and constraint term,
// stored in flat per-term slices so the terms can be evaluated concurrently.
class TermBank {
 public:
  explicit TermBank(const ConvexProblem& p) : p_(p) {
    for (const auto& t : p.objective) add(&t);
    num_objective_ = terms_.size();
    for (const auto& t : p.constraints) add(&t);
    local_x_.resize(grad_off_.back());
    grad_.resize(grad_off_.back());
    hess_.resize(hess_off_.back());
    values_.resize(terms_.size());
  }

  std::size_t size() const { return terms_.size(); }
  std::size_t num_objective() const { return num_objective_; }
  const Term& term(std::size_t j) const { return *terms_[j]; }
  double value(std::size_t j) const { return values_[j]; }
  std::span<const double> grad(std::size_t j) const {
    return {grad_.data() + grad_off_[j], grad_off_[j + 1] - grad_off_[j]};
  }
  std::span<const double> hess(std::size_t j) const {
    return {hess_.data() + hess_off_[j], hess_off_[j + 1] - hess_off_[j]};
  }
  bool wide_linear(std::size_t j) const {
    return terms_[j]->linear && terms_[j]->vars.size() > kDenseLimit;
  }

  void evaluate(const double* x, bool with_hess, Exec exec) {
    parallel_for(terms_.size(), exec, [&](std::size_t j) {
      const Term& t = *terms_[j];
      const std::size_t k = t.vars.size();
      double* lx = local_x_.data() + grad_off_[j];
      for (std::size_t a = 0; a < k; ++a) lx[a] = x[t.vars[a]];
      std::span<double> g(grad_.data() + grad_off_[j], k);
      std::span<double> h;
      if (with_hess && !t.linear) h = {hess_.data() + hess_off_[j], k * k};
      values_[j] = t.eval({lx, k}, g, h);
    });
  }

 private:
  void add(const Term* t) {
    if (grad_off_.empty()) {
      grad_off_.push_back(0);
      hess_off_.push_back(0);
    }
    const std::size_t k = t->vars.size();
    terms_.push_back(t);
    grad_off_.push_back(grad_off_.back() + k);
    hess_off_.push_back(hess_off_.back() + (t->linear ? 0 : k * k));
  }

  const ConvexProblem& p_;
  std::vector<const Term*> terms_;
  std::size_t num_objective_ = 0;
  std::vector<std::size_t> grad_off_, hess_off_;
  std::vector<double> local_x_, grad_, hess_, values_;
};

struct PointEval {
  bool strict = false;
  double f0 = 0.0;
  double phi = 0.0;
};

class BarrierModel {
 public:
  BarrierModel(const ConvexProblem& p, Exec exec) : p_(p), bank_(p), exec_(exec) {
    const int n = p.dimension;
    lower_ = p.lower.empty() ? VectorXd::Constant(n, -INFINITY)
                             : Eigen::Map<const VectorXd>(p.lower.data(), n).eval();
    upper_ = p.upper.empty() ? VectorXd::Constant(n, INFINITY)
                             : Eigen::Map<const VectorXd>(p.upper.data(), n).eval();
    for (std::size_t j = bank_.num_objective(); j < bank_.size(); ++j)
      if (bank_.wide_linear(j)) wide_.push_back(j);
  }

  int dimension() const { return p_.dimension; }
  std::size_t num_constraints() const {
    std::size_t m = bank_.size() - bank_.num_objective();
    for (int i = 0; i < p_.dimension; ++i)
      m += std::isfinite(lower_[i]) + std::isfinite(upper_[i]);
    return m;
  }

  PointEval evaluate(const VectorXd& x, bool with_hess) {
    PointEval e;
    for (int i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i]) || !(x[i] > lower_[i]) || !(x[i] < upper_[i])) return e;
    }
    bank_.evaluate(x.data(), with_hess, exec_);
    x_ = x;
    for (std::size_t j = 0; j < bank_.num_objective(); ++j) e.f0 += bank_.value(j);
    for (std::size_t j = bank_.num_objective(); j < bank_.size(); ++j) {
      const double c = bank_.value(j);
      if (!(c < 0.0)) return e;
      e.phi -= std::log(-c);
    }
    for (int i = 0; i < x.size(); ++i) {
      if (std::isfinite(lower_[i])) e.phi -= std::log(x[i] - lower_[i]);
      if (std::isfinite(upper_[i])) e.phi -= std::log(upper_[i] - x[i]);
    }
    e.strict = std::isfinite(e.f0) && std::isfinite(e.phi);
    return e;
  }

  void gradients(VectorXd& g0, VectorXd& gphi) const {
    const int n = p_.dimension;
    g0.setZero(n);
    gphi.setZero(n);
    for (std::size_t j = 0; j < bank_.size(); ++j) {
      const auto& vars = bank_.term(j).vars;
      const auto g = bank_.grad(j);
      if (j < bank_.num_objective()) {
        for (std::size_t a = 0; a < vars.size(); ++a) g0[vars[a]] += g[a];
      } else {
        const double inv = 1.0 / -bank_.value(j);
        for (std::size_t a = 0; a < vars.size(); ++a) gphi[vars[a]] += g[a] * inv;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lower_[i])) gphi[i] -= 1.0 / (x_[i] - lower_[i]);
      if (std::isfinite(upper_[i])) gphi[i] += 1.0 / (upper_[i] - x_[i]);
    }
  }

  /// Lower triangle of H0 + mu * Hphi, minus the wide rank-one pieces that go to `wide`.
  void hessian(double mu, std::vector<Triplet>& trip, MatrixXd& wide) const {
    const int n = p_.dimension;
    trip.clear();
    for (int i = 0; i < n; ++i) {
      double d = 0.0;
      if (std::isfinite(lower_[i])) d += 1.0 / ((x_[i] - lower_[i]) * (x_[i] - lower_[i]));
      if (std::isfinite(upper_[i])) d += 1.0 / ((upper_[i] - x_[i]) * (upper_[i] - x_[i]));
      trip.emplace_back(i, i, mu * d);
    }
    for (std::size_t j = 0; j < bank_.size(); ++j) {
      if (bank_.wide_linear(j)) continue;
      const auto& vars = bank_.term(j).vars;
      const std::size_t k = vars.size();
      const auto g = bank_.grad(j);
      const auto h = bank_.hess(j);
      const bool objective_term = j < bank_.num_objective();
      double w_outer = 0.0, w_hess = 1.0;
      if (!objective_term) {
        const double s = -bank_.value(j);
        w_outer = mu / (s * s);
        w_hess = mu / s;
      }
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          if (vars[a] < vars[b]) continue;
          double v = w_outer * g[a] * g[b];
          if (!h.empty()) v += w_hess * h[a * k + b];
          trip.emplace_back(vars[a], vars[b], v);
        }
      }
    }
    wide.setZero(n, static_cast<Eigen::Index>(wide_.size()));
    for (std::size_t c = 0; c < wide_.size(); ++c) {
      const std::size_t j = wide_[c];
      const auto& vars = bank_.term(j).vars;
      const auto g = bank_.grad(j);
      const double w = std::sqrt(mu) / -bank_.value(j);
      for (std::size_t a = 0; a < vars.size(); ++a) wide(vars[a], c) += w * g[a];
    }
  }

  double objective_at_last() const {
    double f = 0.0;
    for (std::size_t j = 0; j < bank_.num_objective(); ++j) f += bank_.value(j);
    return f;
  }

 private:
  const ConvexProblem& p_;
  TermBank bank_;
  Exec exec_;
  VectorXd lower_, upper_, x_;
  std::vector<std::size_t> wide_;
};

// Solves the equality-constrained Newton system with H = S + U U^T, S sparse.
class NewtonSolver {
 public:
  NewtonSolver(int n, const std::vector<LinearEquality>& eqs) : n_(n) {
    if (!eqs.empty()) {
      A_.setZero(static_cast<Eigen::Index>(eqs.size()), n);
      for (std::size_t r = 0; r < eqs.size(); ++r)
        for (std::size_t a = 0; a < eqs[r].vars.size(); ++a)
          A_(static_cast<Eigen::Index>(r), eqs[r].vars[a]) += eqs[r].coeffs[a];
      aat_.compute(A_ * A_.transpose());
    }
  }

  bool factor(const std::vector<Triplet>& trip, const MatrixXd& wide) {
    S_.resize(n_, n_);
    S_.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(S_);
      analyzed_ = true;
    }
    double max_diag = 0.0;
    for (int i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::abs(S_.coeff(i, i)));
    double shift = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      if (shift > 0.0) {
        SpMat shifted = S_;
        for (int i = 0; i < n_; ++i) shifted.coeffRef(i, i) += shift;
        ldlt_.factorize(shifted);
      } else {
        ldlt_.factorize(S_);
      }
      if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().minCoeff() > 0.0) break;
      shift = shift == 0.0 ? 1e-12 * std::max(1.0, max_diag) : shift * 100.0;
      if (attempt == 11) return false;
    }
    shift_ = shift;
    U_ = wide;
    if (U_.cols() > 0) {
      W_ = ldlt_.solve(U_);
      cap_.compute(MatrixXd::Identity(U_.cols(), U_.cols()) + U_.transpose() * W_);
    }
    if (A_.rows() > 0) {
      Y_ = apply_inverse_matrix(A_.transpose());
      kkt_.compute(A_ * Y_);
    }
    return true;
  }

  VectorXd apply_inverse(const VectorXd& v) const {
    VectorXd y = apply_inverse_once(v);
    // One step of iterative refinement; barrier curvature near active bounds
    // spans many decades and the low-rank correction loses digits.
    const VectorXd r = v - multiply(y);
    y += apply_inverse_once(r);
    return y;
  }

  /// Newton direction for gradient G; stays in the null space of the equalities.
  VectorXd direction(const VectorXd& G) const {
    VectorXd hg = apply_inverse(G);
    if (A_.rows() == 0) return -hg;
    const VectorXd w = kkt_.solve(-(A_ * hg));
    return -(hg + Y_ * w);
  }

  /// max-norm of G + A^T nu with nu the least-squares multiplier.
  double stationarity(const VectorXd& G) const {
    if (A_.rows() == 0) return G.lpNorm<Eigen::Infinity>();
    const VectorXd nu = aat_.solve(-(A_ * G));
    return (G + A_.transpose() * nu).lpNorm<Eigen::Infinity>();
  }

  double equality_violation(const VectorXd& x, const std::vector<LinearEquality>& eqs) const {
    double worst = 0.0;
    for (std::size_t r = 0; r < eqs.size(); ++r)
      worst = std::max(worst, std::abs(A_.row(static_cast<Eigen::Index>(r)).dot(x) - eqs[r].rhs));
    return worst;
  }

 private:
  VectorXd apply_inverse_once(const VectorXd& v) const {
    VectorXd y = ldlt_.solve(v);
    if (U_.cols() > 0) y -= W_ * cap_.solve(U_.transpose() * y);
    return y;
  }

  // (S + shift + U U^T) y with the shift actually used in the factorization.
  VectorXd multiply(const VectorXd& y) const {
    VectorXd out = S_.selfadjointView<Eigen::Lower>() * y + shift_ * y;
    if (U_.cols() > 0) out += U_ * (U_.transpose() * y);
    return out;
  }

  MatrixXd apply_inverse_matrix(const MatrixXd& B) const {
    MatrixXd out(B.rows(), B.cols());
    for (Eigen::Index c = 0; c < B.cols(); ++c) out.col(c) = apply_inverse(B.col(c));
    return out;
  }

  int n_;
  bool analyzed_ = false;
  SpMat S_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  double shift_ = 0.0;
  MatrixXd U_, W_, A_, Y_;
  Eigen::LDLT<MatrixXd> cap_, kkt_, aat_;
};

SolveReport fail(SolveReport r, std::string msg) {
  r.status = SolveStatus::numerical_failure;
  r.message = std::move(msg);
  return r;
}

SolveReport run_barrier(const ConvexProblem& p, const SolverOptions& opt, VectorXd* best_x,
                        double* best_f) {
  SolveReport rep;
  const int n = p.dimension;
  if (static_cast<int>(p.initial.size()) != n || (!p.lower.empty() && static_cast<int>(p.lower.size()) != n) ||
      (!p.upper.empty() && static_cast<int>(p.upper.size()) != n)) {
    return fail(rep, "dimension mismatch");
  }
  rep.x = p.initial;

  BarrierModel model(p, opt.exec);
  NewtonSolver newton(n, p.equalities);
  VectorXd x = Eigen::Map<const VectorXd>(p.initial.data(), n);

  PointEval cur = model.evaluate(x, true);
  if (!cur.strict) return fail(rep, "initial point is not strictly feasible");
  const double eq_viol0 = newton.equality_violation(x, p.equalities);
  if (eq_viol0 > opt.tol_feas * std::max(1.0, x.lpNorm<Eigen::Infinity>()))
    return fail(rep, "initial point violates the equality constraints");

  rep.initial_objective = cur.f0;
  *best_x = x;
  *best_f = cur.f0;

  VectorXd g0, gphi;
  model.gradients(g0, gphi);

  // Start where the barrier and objective gradients balance in the least-squares sense.
  const double scale0 = std::max(1.0, std::abs(cur.f0));
  // Final barrier weight sits at half the tolerance so complementarity passes with margin.
  const double mu_goal = 0.5 * opt.tol_kkt;
  const double target0 = mu_goal * scale0;
  double mu = 1.0;
  if (const double gg = gphi.squaredNorm(); gg > 0.0) mu = -g0.dot(gphi) / gg;
  if (!std::isfinite(mu)) mu = scale0;
  // Starting too close to the central path end stalls damped Newton near active constraints.
  mu = std::clamp(mu, std::max(target0, 1e-3 * scale0), 1e3 * scale0);

  std::vector<Triplet> trip;
  MatrixXd wide;
  int stage = 0;
  for (; stage < opt.max_outer; ++stage) {
    const bool final_stage = mu <= mu_goal * std::max(1.0, std::abs(cur.f0)) * (1.0 + 1e-12);
    bool centered = false;
    for (int it = 0; it < opt.max_newton_stage; ++it) {
      if (rep.iterations >= opt.max_newton_total) break;
      const VectorXd G = g0 + mu * gphi;
      const double F = cur.f0 + mu * cur.phi;
      model.hessian(mu, trip, wide);
      if (!newton.factor(trip, wide)) return fail(rep, "Newton matrix factorization failed");
      const VectorXd dx = newton.direction(G);
      const double lambda2 = -G.dot(dx);
      if (!std::isfinite(lambda2)) return fail(rep, "non-finite Newton decrement");
      const double lambda_sc2 = std::max(lambda2, 0.0) / mu;  // self-concordant scaling

      const double scale = std::max(1.0, std::abs(cur.f0));
      const bool stationary = newton.stationarity(G) <= 0.5 * opt.tol_kkt * scale;
      if (lambda_sc2 <= (final_stage ? 1e-9 : 1e-4) && (!final_stage || stationary)) {
        centered = true;
        break;
      }

      // Damped Newton with backtracking; pure Newton once inside the quadratic region.
      double alpha = 1.0;
      PointEval next;
      VectorXd xn;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        xn = x + alpha * dx;
        next = model.evaluate(xn, true);
        if (next.strict) {
          const double Fn = next.f0 + mu * next.phi;
          if (lambda_sc2 < 1e-2 || Fn <= F - 0.01 * alpha * lambda2) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        model.evaluate(x, true);  // restore term state at x
        if (lambda_sc2 <= 1e-6 || std::abs(lambda2) <= 1e-13 * std::max(1.0, std::abs(F))) {
          centered = true;  // at rounding level
          break;
        }
        return fail(rep, "line search collapsed");
      }
      x = xn;
      cur = next;
      model.gradients(g0, gphi);
      ++rep.iterations;
      if (cur.f0 < *best_f) {
        *best_f = cur.f0;
        *best_x = x;
      }
    }

    rep.barrier_stages = stage + 1;
    const double scale = std::max(1.0, std::abs(cur.f0));
    rep.x.assign(x.data(), x.data() + n);
    rep.objective = cur.f0;
    rep.complementarity = mu / scale;
    rep.stationarity = newton.stationarity(g0 + mu * gphi) / scale;
    rep.kkt_residual = std::max(rep.complementarity, rep.stationarity);
    rep.max_violation = newton.equality_violation(x, p.equalities);

    if (!centered) {
      rep.status = SolveStatus::max_iterations;
      rep.message = "Newton iteration limit reached";
      return rep;
    }
    if (mu <= mu_goal * scale * (1.0 + 1e-12)) {
      if (rep.kkt_residual <= opt.tol_kkt && rep.max_violation <= opt.tol_feas) {
        rep.status = SolveStatus::converged;
        return rep;
      }
      if (final_stage) {
        rep.status = SolveStatus::max_iterations;
        rep.message = "stationarity tolerance not reached";
        return rep;
      }
    }
    mu = std::max(mu / opt.mu_factor, mu_goal * scale);
  }
  rep.status = SolveStatus::max_iterations;
  rep.message = "barrier stage limit reached";
  return rep;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

SolveReport solve(const ConvexProblem& problem, const SolverOptions& options) {
  VectorXd best_x;
  double best_f = 0.0;
  return run_barrier(problem, options, &best_x, &best_f);
}

SolveReport solve_descent_only(const ConvexProblem& problem, const SolverOptions& options) {
  VectorXd best_x;
  double best_f = INFINITY;
  SolveReport rep = run_barrier(problem, options, &best_x, &best_f);
  if (!std::isfinite(rep.initial_objective)) return rep;  // infeasible start
  if (rep.converged() && rep.objective <= rep.initial_objective) return rep;
  if (rep.converged()) {
    rep.status = SolveStatus::max_iterations;
    rep.message = "converged point worse than the initial point";
  }
  if (best_x.size() == problem.dimension) {
    rep.x.assign(best_x.data(), best_x.data() + best_x.size());
    rep.objective = best_f;
  }
  return rep;
}

bool strictly_feasible(const ConvexProblem& problem, std::span<const double> x) {
  BarrierModel model(problem, Exec::serial);
  return model.evaluate(Eigen::Map<const VectorXd>(x.data(), problem.dimension), false).strict;
}

namespace {

template <class Fn>
void for_each_term(const ConvexProblem& p, Fn&& fn) {
  for (const auto& t : p.objective) fn(t);
  for (const auto& t : p.constraints) fn(t);
}

std::vector<double> gather(const Term& t, std::span<const double> x) {
  std::vector<double> out(t.vars.size());
  for (std::size_t a = 0; a < t.vars.size(); ++a) out[a] = x[t.vars[a]];
  return out;
}

}  // namespace

double check_gradients(const ConvexProblem& problem, std::span<const double> point, double h) {
  double worst = 0.0;
  for_each_term(problem, [&](const Term& t) {
    const std::size_t k = t.vars.size();
    std::vector<double> x = gather(t, point), g(k), scratch(k);
    t.eval(x, g, {});
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    for (std::size_t a = 0; a < k; ++a) {
      const double x0 = x[a];
      x[a] = x0 + h;
      const double fp = t.eval(x, scratch, {});
      x[a] = x0 - h;
      const double fm = t.eval(x, scratch, {});
      x[a] = x0;
      const double fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[a]) / std::max({gmax, std::abs(fd), 1e-8}));
    }
  });
  return worst;
}

double check_hessians(const ConvexProblem& problem, std::span<const double> point, double h) {
  double worst = 0.0;
  for_each_term(problem, [&](const Term& t) {
    if (t.linear) return;
    const std::size_t k = t.vars.size();
    std::vector<double> x = gather(t, point), g(k), H(k * k), gp(k), gm(k);
    t.eval(x, g, H);
    double hmax = 0.0;
    for (double v : H) hmax = std::max(hmax, std::abs(v));
    for (std::size_t b = 0; b < k; ++b) {
      const double x0 = x[b];
      x[b] = x0 + h;
      t.eval(x, gp, {});
      x[b] = x0 - h;
      t.eval(x, gm, {});
      x[b] = x0;
      for (std::size_t a = 0; a < k; ++a) {
        const double fd = (gp[a] - gm[a]) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - H[a * k + b]) / std::max({hmax, std::abs(fd), 1e-8}));
      }
    }
  });
  return worst;
}

double midpoint_convexity_violation(const ConvexProblem& problem, std::span<const double> center,
                                    std::span<const double> radius, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto n = static_cast<std::size_t>(problem.dimension);
  auto draw = [&]() {
    std::vector<double> dir(n), x(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = unit(rng) * radius[i];
    for (double shrink = 1.0; shrink > 1e-12; shrink *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) x[i] = center[i] + shrink * dir[i];
      if (strictly_feasible(problem, x)) return x;
    }
    return std::vector<double>(center.begin(), center.end());
  };
  double worst = -INFINITY;
  for (int s = 0; s < samples; ++s) {
    const auto x = draw();
    const auto y = draw();
    std::vector<double> mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (x[i] + y[i]);
    for_each_term(problem, [&](const Term& t) {
      std::vector<double> g(t.vars.size());
      const double fx = t.eval(gather(t, x), g, {});
      const double fy = t.eval(gather(t, y), g, {});
      const double fm = t.eval(gather(t, mid), g, {});
      worst = std::max(worst, fm - 0.5 * (fx + fy));
    });
  }
  return worst;
}

}  // namespace secjam::convex
