#pragma once

#include "xcforge/core/io.hpp"
#include "xcforge/core/sphere.hpp"
#include "xcforge/core/types.hpp"

#include <cmath>
#include <algorithm>
#include <array>
#include <cstdint>
#include <numbers>
#include <random>
#include <unordered_map>
#include <vector>

namespace xcforge {

struct CapSet {
  int dim = 0;
  double epsilon = 0.0;
  std::vector<Point> centers;
};

struct Coloring {
  std::vector<int> color;  // 0-based
  int chi = 0;
};

namespace detail {

// Uniform grid over R^d (d <= 8) for fixed-radius neighbour queries on the sphere.
class SphereGrid {
 public:
  using Key = std::array<std::int64_t, 8>;

  SphereGrid(int d, double chord) : d_(d), cell_(std::max(chord, 1e-12)) {
    if (d > 8) throw Error(ErrorCode::UnsupportedDimension, "grid supports d <= 8");
  }

  void insert(const Point& p, int id) { cells_[cell_index(p)].push_back(id); }

  // ids in the 3^d block of cells around p; f returns false to stop early
  template <class F>
  void for_near(const Point& p, F&& f) const {
    const Key base = cell_index(p);
    Key c = base;
    int total = 1;
    for (int i = 0; i < d_; ++i) total *= 3;
    for (int m = 0; m < total; ++m) {
      int r = m;
      for (int i = 0; i < d_; ++i) {
        c[i] = base[i] + (r % 3) - 1;
        r /= 3;
      }
      auto it = cells_.find(c);
      if (it == cells_.end()) continue;
      for (int id : it->second)
        if (!f(id)) return;
    }
  }

 private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };

  Key cell_index(const Point& p) const {
    Key c{};
    for (int i = 0; i < d_; ++i) c[i] = static_cast<std::int64_t>(std::floor(p(i) / cell_));
    return c;
  }

  int d_;
  double cell_;
  std::unordered_map<Key, std::vector<int>, KeyHash> cells_;
};

// angle between unit vectors, no validation
inline double unit_angle(const Point& x, const Point& y) {
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

// roughly evenly spaced points with spacing about h (circle, or Fibonacci sphere for d = 3)
inline std::vector<Point> stratified_points(int d, double h) {
  std::vector<Point> out;
  if (d == 2) {
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / h));
    for (std::size_t i = 0; i < n; ++i) {
      Point p(2);
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      p << std::cos(t), std::sin(t);
      out.push_back(p);
    }
  } else if (d == 3) {
    const auto n = static_cast<std::size_t>(std::ceil(4.0 * std::numbers::pi / (h * h)));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      Point p(3);
      p << r * std::cos(phi), r * std::sin(phi), z;
      out.push_back(p);
    }
  }
  return out;
}

inline double chord_of(double angle) { return 2.0 * std::sin(std::min(angle, std::numbers::pi) / 2.0); }

inline Point random_on_sphere(int d, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  Point p(d);
  do {
    for (int i = 0; i < d; ++i) p(i) = N(g);
  } while (p.norm() < 1e-300);
  return p / p.norm();
}

}  // namespace detail

// Greedy maximal eps/2-separated set. Candidates in `priority` are tried first, then a
// shuffled stratified lattice and circle-intersection points (d = 2, 3), then random points
// until 50|A| consecutive rejections.
inline CapSet maximal_separated_set(double eps, int d, std::mt19937_64& rng,
                                    const std::vector<Point>& priority = {}) {
  if (!(eps > 0.0 && eps < std::numbers::pi / 50.0))
    throw Error(ErrorCode::BadRadius, "epsilon must lie in (0, pi/50)");
  if (d < 2) throw Error(ErrorCode::UnsupportedDimension, "d must be at least 2");
  CapSet A;
  A.dim = d;
  A.epsilon = eps;
  const double sep = eps / 2.0;
  detail::SphereGrid grid(d, detail::chord_of(sep));
  auto try_add = [&](const Point& p) {
    bool ok = true;
    grid.for_near(p, [&](int id) {
      if (detail::unit_angle(p, A.centers[id]) < sep) ok = false;
      return ok;
    });
    if (ok) {
      grid.insert(p, static_cast<int>(A.centers.size()));
      A.centers.push_back(p);
    }
    return ok;
  };
  for (const auto& p : priority) try_add(p / p.norm());
  auto lattice = detail::stratified_points(d, eps / 4.0);
  std::shuffle(lattice.begin(), lattice.end(), rng);
  for (const auto& p : lattice) try_add(p);
  // Close the remaining holes: the open eps/2 discs cover the sphere once every pairwise
  // circle intersection point is covered. Candidates sit just outside both circles.
  if (d == 2 || d == 3) {
    const double rho = sep * (1.0 + 1e-10);
    detail::SphereGrid pairs(d, detail::chord_of(2.0 * rho));
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < A.centers.size(); ++i) {
      pairs.insert(A.centers[i], static_cast<int>(i));
      queue.push_back(i);
    }
    auto push_new = [&](std::size_t before) {
      for (std::size_t k = before; k < A.centers.size(); ++k) {
        pairs.insert(A.centers[k], static_cast<int>(k));
        queue.push_back(k);
      }
    };
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const Point a = A.centers[queue[q]];
      if (d == 2) {
        for (double s : {rho, -rho}) {
          Point p(2);
          p << std::cos(s) * a(0) - std::sin(s) * a(1), std::sin(s) * a(0) + std::cos(s) * a(1);
          const std::size_t before = A.centers.size();
          try_add(p);
          push_new(before);
        }
        continue;
      }
      std::vector<int> near;
      pairs.for_near(a, [&](int j) {
        if (static_cast<std::size_t>(j) != queue[q] && detail::unit_angle(a, A.centers[j]) < 2.0 * rho) near.push_back(j);
        return true;
      });
      for (int j : near) {
        const Point b = A.centers[j];
        const Eigen::Vector3d a3 = a.head<3>(), b3 = b.head<3>();
        const Eigen::Vector3d n = a3.cross(b3);
        if (n.norm() < 1e-15) continue;
        const double alpha = std::cos(rho) / (1.0 + a3.dot(b3));
        const double beta2 = 1.0 - 2.0 * alpha * alpha * (1.0 + a3.dot(b3));
        if (beta2 <= 0.0) continue;
        for (double sg : {1.0, -1.0}) {
          const Eigen::Vector3d x = alpha * (a3 + b3) + sg * std::sqrt(beta2) * n.normalized();
          const std::size_t before = A.centers.size();
          try_add(Point(x));
          push_new(before);
        }
      }
    }
  }
  std::size_t rejections = 0;
  while (A.centers.empty() || rejections < 50 * A.centers.size()) {
    if (try_add(detail::random_on_sphere(d, rng))) rejections = 0;
    else ++rejections;
  }
  return A;
}

// exhaustive check of the pairwise separation
inline double min_pairwise_distance(const CapSet& A) {
  double m = std::numbers::pi;
  for (std::size_t i = 0; i < A.centers.size(); ++i)
    for (std::size_t j = i + 1; j < A.centers.size(); ++j)
      m = std::min(m, detail::unit_angle(A.centers[i], A.centers[j]));
  return m;
}

// number of random probes at distance >= eps/2 from every centre (0 suggests maximality)
inline std::size_t maximality_defect(const CapSet& A, std::mt19937_64& rng, std::size_t samples) {
  detail::SphereGrid grid(A.dim, detail::chord_of(A.epsilon / 2.0));
  for (std::size_t i = 0; i < A.centers.size(); ++i) grid.insert(A.centers[i], static_cast<int>(i));
  std::size_t bad = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point p = detail::random_on_sphere(A.dim, rng);
    bool covered = false;
    grid.for_near(p, [&](int id) {
      covered = detail::unit_angle(p, A.centers[id]) < A.epsilon / 2.0;
      return !covered;
    });
    if (!covered) ++bad;
  }
  return bad;
}

inline Coloring color_caps(const CapSet& A, double separation_factor = 30.0) {
  const double sep = separation_factor * A.epsilon;
  const std::size_t n = A.centers.size();
  Coloring C;
  C.color.assign(n, -1);
  detail::SphereGrid grid(A.dim, detail::chord_of(sep));
  const bool brute = sep >= std::numbers::pi;
  std::vector<char> used;
  for (std::size_t i = 0; i < n; ++i) {
    used.assign(static_cast<std::size_t>(C.chi) + 1, 0);
    auto visit = [&](int j) {
      if (detail::unit_angle(A.centers[i], A.centers[j]) < sep) used[C.color[j]] = 1;
      return true;
    };
    if (brute)
      for (std::size_t j = 0; j < i; ++j) visit(static_cast<int>(j));
    else
      grid.for_near(A.centers[i], visit);
    int c = 0;
    while (used[c]) ++c;
    C.color[i] = c;
    C.chi = std::max(C.chi, c + 1);
    grid.insert(A.centers[i], static_cast<int>(i));
  }
  return C;
}

inline bool coloring_valid(const CapSet& A, const Coloring& C, double separation_factor = 30.0) {
  for (std::size_t i = 0; i < A.centers.size(); ++i)
    for (std::size_t j = i + 1; j < A.centers.size(); ++j)
      if (C.color[i] == C.color[j] &&
          detail::unit_angle(A.centers[i], A.centers[j]) < separation_factor * A.epsilon)
        return false;
  return true;
}

struct FacetAssignment {
  std::vector<int> owner;    // facet -> centre id, -1 if none fits
  std::vector<int> failed;   // facets with no encapsulating cap
  std::vector<double> facet_cap_radius;
};

inline FacetAssignment try_assign_facets(const Polytope& P, const CapSet& A) {
  FacetAssignment R;
  R.owner.assign(P.num_facets(), -1);
  R.facet_cap_radius.assign(P.num_facets(), 0.0);
  detail::SphereGrid grid(A.dim, detail::chord_of(A.epsilon));
  for (std::size_t i = 0; i < A.centers.size(); ++i) grid.insert(A.centers[i], static_cast<int>(i));
  for (std::size_t f = 0; f < P.num_facets(); ++f) {
    const Cap s = smaller_cap_of_hyperplane(P.facets[f].plane);
    R.facet_cap_radius[f] = s.radius;
    int best = -1;
    grid.for_near(s.center, [&](int id) {
      if ((best < 0 || id < best) && encapsulated(P.facets[f].plane, Cap{A.centers[id], A.epsilon})) best = id;
      return true;
    });
    R.owner[f] = best;
    if (best < 0) R.failed.push_back(static_cast<int>(f));
  }
  return R;
}

inline std::vector<int> assign_facets(const Polytope& P, const CapSet& A) {
  auto R = try_assign_facets(P, A);
  if (!R.failed.empty())
    throw Error(ErrorCode::NoCapFits, "facet " + std::to_string(R.failed.front()) + " fits no cap (" +
                                          std::to_string(R.failed.size()) + " facets in total)");
  return R.owner;
}

// V^a: vertices in the solid cap of radius factor*eps around each centre
inline std::vector<std::vector<int>> cap_vertex_sets(const Polytope& P, const CapSet& A, double factor) {
  const auto n = static_cast<Eigen::Index>(P.num_vertices());
  Matrix V(A.dim, n);
  for (Eigen::Index i = 0; i < n; ++i) V.col(i) = P.vertices[i];
  const double c = std::cos(std::min(factor * A.epsilon, std::numbers::pi));
  std::vector<std::vector<int>> out(A.centers.size());
  Eigen::RowVectorXd dots(n);
  for (std::size_t a = 0; a < A.centers.size(); ++a) {
    dots.noalias() = A.centers[a].transpose() * V;
    for (Eigen::Index i = 0; i < n; ++i)
      if (dots(i) >= c) out[a].push_back(static_cast<int>(i));
  }
  return out;
}

inline json capset_to_json(const CapSet& A, const Coloring* C = nullptr) {
  json j;
  j["dim"] = A.dim;
  j["epsilon"] = A.epsilon;
  j["centers"] = json::array();
  for (const auto& c : A.centers) j["centers"].push_back(point_to_json(c));
  if (C) {
    std::vector<int> one_based;
    for (int c : C->color) one_based.push_back(c + 1);
    j["colors"] = one_based;
  }
  return j;
}

}  // namespace xcforge
