#pragma once

#include "xcforge/core/factorization.hpp"
#include "xcforge/core/io.hpp"
#include "xcforge/core/simplex.hpp"
#include "xcforge/core/slack.hpp"
#include "xcforge/core/sphere.hpp"
#include "xcforge/core/types.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace xcforge {

struct Lampshade {
  Point apex;
  double eps = 0.0;
  int dim = 0;
  Hyperplane hz;                      // a.x <= cos(2 eps)
  std::vector<Point> pz;              // k vertices on Z
  std::vector<Hyperplane> halfspaces;  // hz first, then one side per facet of P_Z
  std::vector<Point> rays;            // z_i - a

  int k() const { return static_cast<int>(pz.size()); }
  int R() const { return 2 * k(); }
  Point centre_z() const { return std::cos(2.0 * eps) * apex; }
  double radius_z() const { return std::sin(2.0 * eps); }
};

struct ConicCoeffs {
  std::vector<double> vertex_weights;
  std::vector<double> ray_weights;
  double residual = 0.0;
};

enum class ConicMode { Point, Direction };

namespace detail {

// orthonormal basis of the complement of a unit vector in R^3
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> complement_basis(const Eigen::Vector3d& a) {
  Eigen::Vector3d e = std::abs(a(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d u = (e - e.dot(a) * a).normalized();
  return {u, a.cross(u)};
}

inline Hyperplane origin_side(Point n, double off) {
  if (off < 0.0) {
    n = -n;
    off = -off;
  }
  const double s = n.norm();
  return Hyperplane{n / s, off / s};
}

}  // namespace detail

inline Lampshade build_lampshade(const Point& a, double eps, int d) {
  if (d != 2 && d != 3) throw Error(ErrorCode::UnsupportedDimension, "lampshades exist for d = 2, 3");
  if (a.size() != d) throw Error(ErrorCode::ShapeMismatch, "apex dimension");
  if (std::abs(a.norm() - 1.0) > tol_geom) throw Error(ErrorCode::NotOnSphere, "apex must be a unit vector");
  if (!(eps > 0.0 && eps < std::numbers::pi / 5.0)) throw Error(ErrorCode::BadRadius, "epsilon must lie in (0, pi/5)");
  Lampshade Q;
  Q.apex = a / a.norm();
  Q.eps = eps;
  Q.dim = d;
  Q.hz = Hyperplane{Q.apex, std::cos(2.0 * eps)};
  const Point b = Q.centre_z();
  const double r = Q.radius_z();
  if (d == 2) {
    Point e(2);
    e << -Q.apex(1), Q.apex(0);
    Q.pz = {b + r * e, b - r * e};
  } else {
    auto [u, v] = detail::complement_basis(Q.apex.head<3>());
    for (int i = 0; i < 8; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 8.0;
      Q.pz.push_back(b + r * (std::cos(t) * Point(u) + std::sin(t) * Point(v)));
    }
  }
  Q.halfspaces.push_back(Q.hz);
  for (std::size_t i = 0; i < Q.pz.size(); ++i) {
    const Point d1 = Q.pz[i] - Q.apex;
    Point n(d);
    if (d == 2) {
      n << -d1(1), d1(0);
    } else {
      const Point d2 = Q.pz[(i + 1) % Q.pz.size()] - Q.apex;
      n = Point(Eigen::Vector3d(d1.head<3>().cross(d2.head<3>())));
    }
    Q.halfspaces.push_back(detail::origin_side(n, n.dot(Q.apex)));
    Q.rays.push_back(d1);
  }
  for (const auto& h : Q.halfspaces) {
    if (!(h.offset > tol_geom)) throw Error(ErrorCode::DegenerateInput, "origin not strictly inside the lampshade");
    for (const auto& z : Q.pz)
      if (h.slack(z) < -tol_geom) throw Error(ErrorCode::DegenerateInput, "lampshade generator outside a halfspace");
  }
  return Q;
}

// distance from the centre of Z to the relative boundary of P_Z inside H_Z
inline double pz_inradius(const Lampshade& Q) {
  const Point b = Q.centre_z();
  if (Q.dim == 2) return std::min((Q.pz[0] - b).norm(), (Q.pz[1] - b).norm());
  double m = 1e300;
  for (int i = 0; i < Q.k(); ++i) {
    const Point p = Q.pz[i], q = Q.pz[(i + 1) % Q.k()];
    const Point dir = (q - p).normalized();
    const Point w = b - p;
    m = std::min(m, (w - w.dot(dir) * dir).norm());
  }
  return m;
}

// largest spherical distance from the apex to the smaller-cap centre of a boundary hyperplane
inline double cone_geometry_max_distance(const Lampshade& Q) {
  double m = 0.0;
  for (const auto& h : Q.halfspaces) m = std::max(m, spherical_distance(Q.apex, smaller_cap_of_hyperplane(h).center));
  return m;
}

inline bool inside_lampshade(const Lampshade& Q, const Point& p, double tol = tol_geom) {
  for (const auto& h : Q.halfspaces)
    if (h.slack(p) < -tol) return false;
  return true;
}

inline bool check_condition_i(const Lampshade& Q, const Hyperplane& h) {
  if (!encapsulated(h, Cap{Q.apex, Q.eps}))
    throw Error(ErrorCode::PreconditionViolated, "hyperplane not encapsulated by the apex cap");
  bool pos = true, neg = true;
  for (const auto& z : Q.pz) {
    const double s = h.slack(z);
    pos = pos && s > tol_geom;
    neg = neg && s < -tol_geom;
  }
  for (const auto& r : Q.rays) {
    const double s = -h.normal.dot(r);
    pos = pos && s >= -tol_geom;
    neg = neg && s <= tol_geom;
  }
  return pos || neg;
}

inline bool check_condition_ii(const Lampshade& Q, const Point& x, const Point& y, const std::vector<double>& ts) {
  if (!in_solid_cap(x, Cap{Q.apex, Q.eps}))
    throw Error(ErrorCode::PreconditionViolated, "x is not in the solid cap X");
  if (y.norm() > 1.0 + tol_geom || y.dot(Q.apex) > std::cos(5.0 * Q.eps) + tol_geom)
    throw Error(ErrorCode::PreconditionViolated, "y is not in Y");
  for (double t : ts) {
    if (t < 0.0) throw Error(ErrorCode::PreconditionViolated, "t must be nonnegative");
    const Point p = y + t * (y - x);
    if (!inside_lampshade(Q, p, tol_geom * (1.0 + t))) return false;
  }
  return true;
}

// Conic decomposition over the 2k generators; reuses its LP buffers across calls.
class ConicSolver {
 public:
  explicit ConicSolver(const Lampshade& Q) : Q_(Q), lp_(1e-10) {
    m_ = Q.dim + 1;
    n_ = Q.R();
    A_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
    for (int j = 0; j < Q.k(); ++j) {
      for (int i = 0; i < Q.dim; ++i) {
        A_[static_cast<std::size_t>(i) * n_ + j] = Q.pz[j](i);
        A_[static_cast<std::size_t>(i) * n_ + Q.k() + j] = Q.rays[j](i);
      }
      A_[static_cast<std::size_t>(Q.dim) * n_ + j] = 1.0;
    }
    b_.assign(m_, 0.0);
    x_.assign(n_, 0.0);
  }

  // writes the 2k weights (vertices then rays) into out; returns the residual
  double solve(const Point& target, ConicMode mode, double* out) {
    const int d = Q_.dim;
    if (mode == ConicMode::Direction && target.norm() <= tol_geom * 1e-3) {
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return target.norm();
    }
    for (int i = 0; i < d; ++i) b_[i] = target(i);
    b_[d] = mode == ConicMode::Point ? 1.0 : 0.0;
    const bool ok = lp_.solve(A_.data(), b_.data(), m_, n_, out);
    double res = 0.0;
    for (int i = 0; i < m_; ++i) {
      double s = -b_[i];
      for (int j = 0; j < n_; ++j) s += A_[static_cast<std::size_t>(i) * n_ + j] * out[j];
      res = std::max(res, std::abs(s));
    }
    if (!ok || res > tol_geom)
      throw Error(ErrorCode::NotInCone, "target outside the lampshade (residual " + std::to_string(res) + ")");
    return res;
  }

  ConicCoeffs decompose(const Point& target, ConicMode mode) {
    std::vector<double> w(n_);
    ConicCoeffs c;
    c.residual = solve(target, mode, w.data());
    c.vertex_weights.assign(w.begin(), w.begin() + Q_.k());
    c.ray_weights.assign(w.begin() + Q_.k(), w.end());
    return c;
  }

 private:
  const Lampshade& Q_;
  Phase1Simplex lp_;
  int m_ = 0, n_ = 0;
  std::vector<double> A_, b_, x_;
};

inline ConicCoeffs conic_decompose(const Point& target, const Lampshade& Q, ConicMode mode) {
  ConicSolver s(Q);
  return s.decompose(target, mode);
}

// row v is Plain (subtract_from < 0) or Subtract(x_v) with x_v = subtract_from
struct RowSpec {
  int subtract_from = -1;
};

// the block M' that shitov_factorize reproduces
inline Matrix shitov_target_block(const Polytope& P, const std::vector<int>& rows, const std::vector<int>& cols,
                                  const std::vector<RowSpec>& spec) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& h = P.facets[cols[j]].plane;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double v = clamped_slack(h, P.vertices[rows[i]]);
      if (spec[i].subtract_from >= 0) v -= clamped_slack(h, P.vertices[spec[i].subtract_from]);
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return M;
}

// Bounded-rank factorization of the (V', F') block through the lampshade generators.
inline NonnegFactorization shitov_factorize(const Polytope& P, const std::vector<int>& rows,
                                            const std::vector<int>& cols, const std::vector<RowSpec>& spec,
                                            const Lampshade& Q) {
  if (spec.size() != rows.size()) throw Error(ErrorCode::ShapeMismatch, "one row spec per row");
  NonnegFactorization F;
  const int R = Q.R(), k = Q.k();
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  if (cols.empty()) {
    F.T.resize(nr, 0);
    F.U.resize(0, 0);
    return F;
  }
  const Cap X{Q.apex, Q.eps};
  const double cos_y = std::cos(5.0 * Q.eps);
  F.U.resize(R, nc);
  for (Eigen::Index j = 0; j < nc; ++j) {
    const auto& h = P.facets[cols[static_cast<std::size_t>(j)]].plane;
    if (!encapsulated(h, X)) throw Error(ErrorCode::EncapsulationViolated, "facet not encapsulated by the apex cap");
    for (int g = 0; g < k; ++g) {
      F.U(g, j) = h.slack(Q.pz[g]);
      F.U(k + g, j) = -h.normal.dot(Q.rays[g]);
    }
  }
  if (F.U.minCoeff() < -tol_geom) throw Error(ErrorCode::EncapsulationViolated, "negative generator slack");
  F.T.resize(nr, R);
  ConicSolver solver(Q);
  std::vector<double> w(R);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const Point& v = P.vertices[rows[static_cast<std::size_t>(i)]];
    if (v.dot(Q.apex) > cos_y + tol_geom) throw Error(ErrorCode::PreconditionViolated, "row vertex is not in Y");
    const int x = spec[static_cast<std::size_t>(i)].subtract_from;
    if (x < 0) {
      solver.solve(v, ConicMode::Point, w.data());
    } else {
      if (!in_solid_cap(P.vertices[x], X)) throw Error(ErrorCode::PreconditionViolated, "x_v is not in X");
      solver.solve(v - P.vertices[x], ConicMode::Direction, w.data());
    }
    for (int g = 0; g < R; ++g) F.T(i, g) = w[g];
  }
  prune_and_clamp(F.T, F.U);
  return F;
}

inline json lampshade_to_json(const Lampshade& Q) {
  json j;
  j["apex"] = point_to_json(Q.apex);
  j["epsilon"] = Q.eps;
  j["halfspaces"] = json::array();
  for (const auto& h : Q.halfspaces) j["halfspaces"].push_back({{"normal", point_to_json(h.normal)}, {"offset", h.offset}});
  j["vertices"] = json::array();
  for (const auto& z : Q.pz) j["vertices"].push_back(point_to_json(z));
  j["rays"] = json::array();
  for (const auto& r : Q.rays) j["rays"].push_back(point_to_json(r));
  return j;
}

}  // namespace xcforge
