#pragma once

// Independent reference computations for the tests. Nothing here calls the
// closed forms in channel.hpp; every quantity is rebuilt from the link model.

#include "secjam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using secjam::Point2;
using secjam::Scenario;

inline double gain(const Point2& uav, double altitude, const Point2& ground, double gamma0) {
  const double dx = uav.x() - ground.x(), dy = uav.y() - ground.y();
  return gamma0 / (dx * dx + dy * dy + altitude * altitude);
}

inline double gn_rate(const Point2& q1, const Point2& q2, double p1, double p2, const Scenario& s) {
  const double sig = gain(q1, s.altitude_tx, s.gn_location, s.gamma0) * p1;
  const double jam = gain(q2, s.altitude_jam, s.gn_location, s.gamma0) * p2;
  return std::log2(1.0 + sig / (jam + 1.0));
}

inline double eve_rate(const Point2& q1, const Point2& q2, double p1, double p2, const Point2& we,
                       const Scenario& s) {
  const double sig = gain(q1, s.altitude_tx, we, s.gamma0) * p1;
  const double jam = gain(q2, s.altitude_jam, we, s.gamma0) * p2;
  return std::log2(1.0 + sig / (jam + 1.0));
}

/// Uniform draw from the disk of radius r around c.
template <class Rng>
Point2 in_disk(Rng& rng, const Point2& c, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho = r * std::sqrt(u(rng));
  const double phi = 2.0 * M_PI * u(rng);
  return c + rho * Point2(std::cos(phi), std::sin(phi));
}

/// Largest transmitter gain over a dense polar grid of the uncertainty disk
/// (rings include the centre and the boundary) plus the point closest to q1.
inline double max_tx_gain_over_disk(const Point2& q1, const Scenario& s, int rings = 200, int spokes = 720) {
  double best = gain(q1, s.altitude_tx, s.est_eve_location, s.gamma0);
  for (int i = 1; i <= rings; ++i) {
    const double r = s.eve_uncertainty * i / rings;
    for (int j = 0; j < spokes; ++j) {
      const double phi = 2.0 * M_PI * j / spokes;
      const Point2 we = s.est_eve_location + r * Point2(std::cos(phi), std::sin(phi));
      best = std::max(best, gain(q1, s.altitude_tx, we, s.gamma0));
    }
  }
  return best;
}

inline double min_jam_gain_over_disk(const Point2& q2, const Scenario& s, int spokes = 3600) {
  double best = gain(q2, s.altitude_jam, s.est_eve_location, s.gamma0);
  for (int j = 0; j < spokes; ++j) {
    const double phi = 2.0 * M_PI * j / spokes;
    const Point2 we = s.est_eve_location + s.eve_uncertainty * Point2(std::cos(phi), std::sin(phi));
    best = std::min(best, gain(q2, s.altitude_jam, we, s.gamma0));
  }
  return best;
}

/// Worst-case secrecy rate of one slot, rebuilt from the two disk extrema.
inline double worst_case_rbar(const Point2& q1, const Point2& q2, double p1, double p2, const Scenario& s) {
  const double g1 = gain(q1, s.altitude_tx, s.gn_location, s.gamma0);
  const double g2 = gain(q2, s.altitude_jam, s.gn_location, s.gamma0);
  // extrema along the line through the estimate, which is where they sit
  const Point2 v1 = q1 - s.est_eve_location;
  const double d1 = std::max(v1.norm() - s.eve_uncertainty, 0.0);
  const double d2 = (q2 - s.est_eve_location).norm() + s.eve_uncertainty;
  const double h1 = s.gamma0 / (d1 * d1 + s.altitude_tx * s.altitude_tx);
  const double h2 = s.gamma0 / (d2 * d2 + s.altitude_jam * s.altitude_jam);
  return std::log2(1.0 + g1 * p1 / (1.0 + g2 * p2)) - std::log2(1.0 + h1 * p1 / (1.0 + h2 * p2));
}

struct GridBest {
  double value = -std::numeric_limits<double>::infinity();
  double x = 0.0, y = 0.0;
};

/// Exhaustive maximization of f over [0, hi]^2 with (steps+1)^2 nodes.
template <class F>
GridBest grid_max_2d(F&& f, double hi_x, double hi_y, int steps) {
  GridBest best;
  for (int i = 0; i <= steps; ++i) {
    const double x = hi_x * i / steps;
    for (int j = 0; j <= steps; ++j) {
      const double y = hi_y * j / steps;
      const double v = f(x, y);
      if (v > best.value) best = {v, x, y};
    }
  }
  return best;
}

/// Integer-metre lattice points of the lens reachable from both a and b in one step of length v.
inline std::vector<Point2> reachable_lattice(const Point2& a, const Point2& b, double v, double res = 1.0) {
  std::vector<Point2> out;
  const double lo_x = std::min(a.x(), b.x()) - v, hi_x = std::max(a.x(), b.x()) + v;
  const double lo_y = std::min(a.y(), b.y()) - v, hi_y = std::max(a.y(), b.y()) + v;
  for (double x = std::floor(lo_x); x <= hi_x; x += res)
    for (double y = std::floor(lo_y); y <= hi_y; y += res) {
      const Point2 p(x, y);
      if ((p - a).norm() <= v && (p - b).norm() <= v) out.push_back(p);
    }
  return out;
}

}  // namespace oracle
