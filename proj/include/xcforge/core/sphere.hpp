#pragma once

#include "xcforge/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xcforge {

// angle between two nonzero vectors, accurate near 0 and pi
inline double angle_between(const Point& x, const Point& y) {
  const Point xu = x / x.norm();
  const Point yu = y / y.norm();
  return 2.0 * std::atan2((xu - yu).norm(), (xu + yu).norm());
}

inline double spherical_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "dimension mismatch");
  if (std::abs(x.norm() - 1.0) > tol_geom || std::abs(y.norm() - 1.0) > tol_geom)
    throw Error(ErrorCode::NotOnSphere, "spherical_distance needs unit vectors");
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

// arccos(t) for t in [0,1] without the loss of accuracy near t = 1
inline double stable_acos(double t) {
  return 2.0 * std::asin(std::sqrt(std::max(0.0, (1.0 - t) * 0.5)));
}

inline Cap smaller_cap_of_hyperplane(const Hyperplane& h) {
  const double na = h.normal.norm();
  if (!(na > 0.0)) throw Error(ErrorCode::DegenerateInput, "zero normal");
  double t = h.offset / na;
  // planes through nearly coincident sphere points can round onto the sphere; treat as touching
  if (std::abs(t) >= 1.0 + tol_geom)
    throw Error(ErrorCode::NoIntersection, "hyperplane misses the open unit ball");
  t = std::clamp(t, -1.0, 1.0);
  Cap c;
  c.center = (t < 0.0 ? -1.0 : 1.0) * h.normal / na;
  c.radius = stable_acos(std::abs(t));
  return c;
}

inline bool encapsulated(const Hyperplane& h, const Cap& c) {
  const Cap s = smaller_cap_of_hyperplane(h);
  return spherical_distance(c.center, s.center) + s.radius <= c.radius + tol_geom;
}

// membership in the solid cap {x in B : x . center >= cos radius}
inline bool in_solid_cap(const Point& x, const Cap& c, double tol = tol_geom) {
  return x.norm() <= 1.0 + tol && x.dot(c.center) >= std::cos(c.radius) - tol;
}

}  // namespace xcforge
