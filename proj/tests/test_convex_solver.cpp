#include "secjam/convex_solver.hpp"

#include "solver_builders.hpp"

#include <doctest.h>

#include <random>

using namespace secjam::convex;

TEST_CASE("active linear constraint") {
  ConvexProblem p;
  p.dimension = 1;
  p.objective.push_back(build::square(0, 3.0));
  p.constraints.push_back(build::affine({0}, {1.0}, 2.0));
  p.initial = {0.0};
  const auto r = solve(p);
  REQUIRE(r.converged());
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.kkt_residual <= 1e-6);
  CHECK(r.objective <= r.initial_objective);
}

TEST_CASE("log objective on the positive half-line") {
  ConvexProblem p;
  p.dimension = 1;
  Term t;
  t.vars = {0};
  t.eval = [](std::span<const double> x, std::span<double> g, std::span<double> h) {
    g[0] = -1.0 / x[0] + 1.0;
    if (!h.empty()) h[0] = 1.0 / (x[0] * x[0]);
    return -std::log(x[0]) + x[0];
  };
  p.objective.push_back(t);
  p.lower = {0.0};
  p.upper = {INFINITY};
  p.initial = {0.5};
  const auto r = solve(p);
  REQUIRE(r.converged());
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("projection onto the unit disk") {
  ConvexProblem p;
  p.dimension = 2;
  p.objective.push_back(build::square(0, 5.0));
  p.objective.push_back(build::square(1, 0.0));
  p.constraints.push_back(build::disk(0, 1, 0.0, 0.0, 1.0));
  p.initial = {0.0, 0.0};
  const auto r = solve(p);
  REQUIRE(r.converged());
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(r.x[1]) < 1e-6);
}

TEST_CASE("linear equality") {
  // min (x-1)^2 + (y-2)^2 + (z-3)^2 s.t. x + y + z = 2, x >= 0; the bound is active with multiplier 1
  ConvexProblem p;
  p.dimension = 3;
  for (int i = 0; i < 3; ++i) p.objective.push_back(build::square(i, i + 1.0));
  p.equalities.push_back({{0, 1, 2}, {1.0, 1.0, 1.0}, 2.0});
  p.lower = {0.0, -INFINITY, -INFINITY};
  p.initial = {0.5, 0.5, 1.0};
  const auto r = solve(p);
  REQUIRE(r.converged());
  CHECK(std::abs(r.x[0]) <= 1e-5);
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.x[2] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(r.x[0] + r.x[1] + r.x[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.max_violation <= 1e-8);
}

TEST_CASE("grid oracle on random two-variable programs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = build::random_2d(rng);
    const auto r = solve(p);
    REQUIRE(r.converged());
    CHECK(r.kkt_residual <= 1e-6);
    CHECK(build::feasible(p, r.x));
    double grid = INFINITY;
    for (int i = 0; i <= 1000; ++i)
      for (int j = 0; j <= 1000; ++j) {
        const double x[2] = {i * 1e-3, j * 1e-3};
        if (build::feasible(p, x)) grid = std::min(grid, build::total(p, x));
      }
    // Barrier gap is at most (#constraints) * mu; the 1e-3 grid misses a curved
    // boundary by up to spacing * |grad f|.
    CHECK(r.objective <= grid + 1e-5 * std::max(1.0, std::abs(grid)));
    CHECK(r.objective >= grid - 1e-2);
  }
}

TEST_CASE("gradient and Hessian checks") {
  ConvexProblem p;
  p.dimension = 2;
  p.objective.push_back(build::square(0, 1.5, 3.0));
  p.objective.push_back(build::softplus(0, 1, 1.2, -0.7, 2.0));
  p.constraints.push_back(build::disk(0, 1, 0.1, 0.2, 2.0));
  const double at[2] = {0.3, -0.4};
  CHECK(check_gradients(p, at, 1e-5) <= 1e-6);
  CHECK(check_hessians(p, at, 1e-5) <= 1e-6);

  // a deliberately wrong gradient is caught
  Term bad = build::square(0, 0.0);
  auto inner = bad.eval;
  bad.eval = [inner](std::span<const double> x, std::span<double> g, std::span<double> h) {
    const double v = inner(x, g, h);
    g[0] *= 1.01;
    return v;
  };
  ConvexProblem q;
  q.dimension = 1;
  q.objective.push_back(bad);
  const double one[1] = {1.0};
  CHECK(check_gradients(q, one, 1e-5) > 1e-3);
}

TEST_CASE("convexity guard") {
  std::mt19937_64 rng(3);
  const auto p = build::random_2d(rng);
  const double c[2] = {0.5, 0.5}, r[2] = {0.5, 0.5};
  CHECK(midpoint_convexity_violation(p, c, r, 500, 1) <= 1e-9);

  ConvexProblem concave;
  concave.dimension = 1;
  concave.objective.push_back(build::square(0, 0.0, -1.0));
  concave.initial = {0.0};
  const double c1[1] = {0.0}, r1[1] = {1.0};
  CHECK(midpoint_convexity_violation(concave, c1, r1, 50, 1) > 1e-3);
}

TEST_CASE("descent-only mode") {
  SUBCASE("agrees with solve when solve converges") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = build::random_2d(rng);
      const auto a = solve(p);
      const auto b = solve_descent_only(p);
      REQUIRE(a.converged());
      REQUIRE(b.converged());
      CHECK(a.x == b.x);
    }
  }
  SUBCASE("iteration-starved stress instance stays feasible and never ascends") {
    // Optimum pinned against a barrier wall with a badly scaled objective.
    ConvexProblem p;
    p.dimension = 2;
    p.objective.push_back(build::square(0, 10.0, 1e6));
    p.objective.push_back(build::square(1, -10.0, 1e-6));
    p.constraints.push_back(build::disk(0, 1, 0.0, 0.0, 1.0));
    p.initial = {0.999999, 0.0};
    SolverOptions o;
    o.max_newton_total = 4;
    const auto r = solve_descent_only(p, o);
    CHECK(r.status == SolveStatus::max_iterations);
    CHECK(build::feasible(p, r.x));
    CHECK(build::total(p, r.x) <= build::total(p, p.initial));
  }
  SUBCASE("infeasible start") {
    ConvexProblem p;
    p.dimension = 1;
    p.objective.push_back(build::square(0, 3.0));
    p.constraints.push_back(build::affine({0}, {1.0}, 2.0));
    p.initial = {2.5};
    const auto r = solve_descent_only(p);
    CHECK(r.status == SolveStatus::numerical_failure);
    CHECK_FALSE(strictly_feasible(p, p.initial));
  }
}

TEST_CASE("wide linear constraint and many variables") {
  // min sum (x_i - t_i)^2 s.t. mean(x) <= 0.2, 0 <= x <= 1
  const int n = 300;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ConvexProblem p;
  p.dimension = n;
  std::vector<int> vars;
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) {
    t[i] = u(rng);
    p.objective.push_back(build::square(i, t[i]));
    vars.push_back(i);
  }
  p.constraints.push_back(build::affine(vars, std::vector<double>(n, 1.0 / n), 0.2));
  p.lower.assign(n, 0.0);
  p.upper.assign(n, 1.0);
  p.initial.assign(n, 0.1);
  const auto r = solve(p);
  REQUIRE(r.converged());
  // KKT: x_i = max(t_i - nu, 0) with mean = 0.2; find nu by bisection
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double nu = 0.5 * (lo + hi);
    double m = 0;
    for (double ti : t) m += std::max(ti - nu, 0.0);
    (m / n > 0.2 ? lo : hi) = nu;
  }
  // Barrier terms shift each coordinate by about mu / distance-to-bound.
  double exact = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = std::max(t[i] - lo, 0.0);
    exact += (xi - t[i]) * (xi - t[i]);
    CHECK(std::abs(r.x[i] - xi) <= 1e-2);
  }
  // A barrier point at weight mu is within (number of barrier terms) * mu of optimal.
  const double mu = r.complementarity * std::max(1.0, std::abs(r.objective));
  CHECK(r.objective >= exact - 1e-8);
  CHECK(r.objective <= exact + (2 * n + 1) * mu);
}
