#pragma once

#include "xcforge/core/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <vector>

namespace xcforge {

inline constexpr std::size_t brute_force_hull_cap = 60;

namespace detail {

inline double coord_scale(const std::vector<Point>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return std::max(s, 1.0);
}

inline void check_full_dimensional(const std::vector<Point>& pts, int d) {
  if (pts.size() < static_cast<std::size_t>(d) + 1)
    throw Error(ErrorCode::DegenerateInput, "need at least d+1 points");
  for (const auto& p : pts) {
    if (p.size() != d) throw Error(ErrorCode::ShapeMismatch, "point dimension differs from d");
    if (!p.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite coordinate");
  }
  Matrix diffs(static_cast<Eigen::Index>(pts.size()) - 1, d);
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.row(i - 1) = (pts[i] - pts[0]).transpose();
  Eigen::JacobiSVD<Matrix> svd(diffs.transpose() * diffs);
  const auto sv = svd.singularValues();
  if (sv(d - 1) <= tol_geom * tol_geom * std::max(1.0, sv(0)))
    throw Error(ErrorCode::DegenerateInput, "points lie on a common hyperplane");
}

// Builds the Polytope from raw facet planes over the input points. Incidences are
// recomputed against tol_geom and non-extreme points are dropped.
inline Polytope assemble(const std::vector<Point>& pts, int d, std::vector<Hyperplane> planes) {
  for (auto& h : planes) {
    const double nn = h.normal.norm();
    h.normal /= nn;
    h.offset /= nn;
  }
  // merge planes that coincide (sorted by offset so only near neighbours are compared)
  std::vector<std::size_t> ord(planes.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(),
            [&](std::size_t a, std::size_t b) { return planes[a].offset < planes[b].offset; });
  std::vector<char> dead(planes.size(), 0);
  for (std::size_t a = 0; a < ord.size(); ++a) {
    if (dead[ord[a]]) continue;
    for (std::size_t b = a + 1; b < ord.size(); ++b) {
      const auto& P1 = planes[ord[a]];
      const auto& P2 = planes[ord[b]];
      if (P2.offset - P1.offset > tol_geom) break;
      if ((P1.normal - P2.normal).norm() <= tol_geom) dead[ord[b]] = 1;
    }
  }
  std::vector<Hyperplane> uniq;
  for (std::size_t i = 0; i < planes.size(); ++i)
    if (!dead[i]) uniq.push_back(planes[i]);

  const auto n = static_cast<Eigen::Index>(pts.size());
  Matrix V(d, n);
  for (Eigen::Index i = 0; i < n; ++i) V.col(i) = pts[i];
  std::vector<std::vector<int>> on(uniq.size());
  std::vector<std::vector<int>> facets_of(pts.size());
  Eigen::RowVectorXd s(n);
  for (std::size_t f = 0; f < uniq.size(); ++f) {
    s.noalias() = uniq[f].normal.transpose() * V;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(uniq[f].offset - s(i)) <= tol_geom) {
        on[f].push_back(static_cast<int>(i));
        facets_of[i].push_back(static_cast<int>(f));
      }
  }
  // a point is a vertex iff the normals of its facets span R^d; duplicates keep the first copy
  std::vector<int> new_id(pts.size(), -1);
  Polytope P;
  P.dim = d;
  std::map<std::vector<int>, int> seen;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& fs = facets_of[i];
    if (fs.size() < static_cast<std::size_t>(d)) continue;
    Matrix N(d, static_cast<Eigen::Index>(fs.size()));
    for (std::size_t k = 0; k < fs.size(); ++k) N.col(static_cast<Eigen::Index>(k)) = uniq[fs[k]].normal;
    Eigen::FullPivLU<Matrix> lu(N);
    lu.setThreshold(1e-9);
    if (lu.rank() < d) continue;
    auto it = seen.find(fs);
    if (it != seen.end() && (pts[it->second] - pts[i]).norm() <= tol_geom) continue;
    seen[fs] = static_cast<int>(i);
    new_id[i] = static_cast<int>(P.vertices.size());
    P.vertices.push_back(pts[i]);
    P.source_index.push_back(static_cast<int>(i));
  }
  for (std::size_t f = 0; f < uniq.size(); ++f) {
    Facet F;
    F.plane = uniq[f];
    for (int i : on[f])
      if (new_id[i] >= 0) F.incident.push_back(new_id[i]);
    if (F.incident.size() >= static_cast<std::size_t>(d)) P.facets.push_back(std::move(F));
  }
  return P;
}

inline std::vector<Hyperplane> hull_planes_2d(const std::vector<Point>& pts, std::vector<int>* verts) {
  const std::size_t n = pts.size();
  std::size_t piv = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pts[i](1) < pts[piv](1) || (pts[i](1) == pts[piv](1) && pts[i](0) < pts[piv](0))) piv = i;
  const Point o = pts[piv];
  auto cross = [](const Point& a, const Point& b, const Point& c) {
    return (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
  };
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (i != piv) idx.push_back(i);
  // angular order around the pivot by exact orientation tests, ties by distance
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double c = cross(o, pts[a], pts[b]);
    if (c != 0.0) return c > 0.0;
    return (pts[a] - o).squaredNorm() < (pts[b] - o).squaredNorm();
  });
  std::vector<Point> st{o};
  std::vector<int> sid{static_cast<int>(piv)};
  for (std::size_t i : idx) {
    while (st.size() >= 2 && cross(st[st.size() - 2], st.back(), pts[i]) <= 0.0) {
      st.pop_back();
      sid.pop_back();
    }
    st.push_back(pts[i]);
    sid.push_back(static_cast<int>(i));
  }
  if (verts) *verts = sid;
  std::vector<Hyperplane> planes;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const Point& a = st[i];
    const Point& b = st[(i + 1) % st.size()];
    Hyperplane h;
    h.normal = Point(2);
    h.normal << b(1) - a(1), a(0) - b(0);
    if (h.normal.norm() == 0.0) continue;
    h.normal.normalize();
    h.offset = h.normal.dot(a);
    planes.push_back(h);
  }
  return planes;
}

// Randomised-order incremental hull with conflict lists (quickhull flavour).
class Hull3 {
 public:
  explicit Hull3(const std::vector<Point>& pts) : P_(pts) {
    const double s = coord_scale(pts);
    eps_ = 1e-12 * s;
  }

  std::vector<Hyperplane> run() {
    init();
    std::vector<int> stack;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) stack.push_back(f);
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      int best = -1;
      double bd = -1.0;
      for (int p : faces_[f].outside) {
        const double dd = dist(f, p);
        if (dd > bd) {
          bd = dd;
          best = p;
        }
      }
      add_point(best, f, stack);
    }
    std::vector<Hyperplane> out;
    for (const auto& F : faces_)
      if (F.alive) {
        Hyperplane h;
        h.normal = F.n;
        h.offset = F.off;
        out.push_back(h);
      }
    return out;
  }

  std::vector<int> vertex_ids() const {
    std::set<int> ids;
    for (const auto& F : faces_)
      if (F.alive) ids.insert(F.v.begin(), F.v.end());
    return {ids.begin(), ids.end()};
  }

 private:
  struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nb{};  // nb[i] is across edge (v[i], v[i+1])
    Eigen::Vector3d n;
    double off = 0.0;
    std::vector<int> outside;
    bool alive = true;
  };

  Eigen::Vector3d pt(int i) const { return P_[i].head<3>(); }
  double dist(int f, int p) const { return faces_[f].n.dot(pt(p)) - faces_[f].off; }

  int make_face(int a, int b, int c) {
    Face F;
    F.v = {a, b, c};
    Eigen::Vector3d n = (pt(b) - pt(a)).cross(pt(c) - pt(a));
    F.n = n.normalized();
    F.off = F.n.dot(pt(a));
    faces_.push_back(std::move(F));
    return static_cast<int>(faces_.size()) - 1;
  }

  void init() {
    const int n = static_cast<int>(P_.size());
    int i0 = 0, i1 = 0;
    for (int i = 0; i < n; ++i) {
      if (P_[i](0) < P_[i0](0)) i0 = i;
      if (P_[i](0) > P_[i1](0)) i1 = i;
    }
    if (i0 == i1) i1 = (i0 + 1) % n;
    int i2 = -1;
    double best = -1.0;
    const Eigen::Vector3d d01 = pt(i1) - pt(i0);
    for (int i = 0; i < n; ++i) {
      const double v = d01.cross(pt(i) - pt(i0)).norm();
      if (v > best) {
        best = v;
        i2 = i;
      }
    }
    int i3 = -1;
    best = -1.0;
    const Eigen::Vector3d nrm = d01.cross(pt(i2) - pt(i0));
    for (int i = 0; i < n; ++i) {
      const double v = std::abs(nrm.dot(pt(i) - pt(i0)));
      if (v > best) {
        best = v;
        i3 = i;
      }
    }
    if (best <= eps_) throw Error(ErrorCode::DegenerateInput, "coplanar input");
    if (nrm.dot(pt(i3) - pt(i0)) > 0) std::swap(i1, i2);
    // now i3 is below the plane (i0,i1,i2) oriented outward
    const int f0 = make_face(i0, i1, i2);
    const int f1 = make_face(i0, i3, i1);
    const int f2 = make_face(i1, i3, i2);
    const int f3 = make_face(i2, i3, i0);
    faces_[f0].nb = {f1, f2, f3};
    faces_[f1].nb = {f3, f2, f0};
    faces_[f2].nb = {f1, f3, f0};
    faces_[f3].nb = {f2, f1, f0};
    for (int i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      for (int f = 0; f < 4; ++f)
        if (dist(f, i) > eps_) {
          faces_[f].outside.push_back(i);
          break;
        }
    }
  }

  void add_point(int p, int f0, std::vector<int>& stack) {
    std::vector<int> visible{f0};
    std::vector<char> vis_flag(faces_.size(), 0);
    vis_flag[f0] = 1;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const int f = visible[k];
      for (int g : faces_[f].nb)
        if (!vis_flag[g] && dist(g, p) > eps_) {
          vis_flag[g] = 1;
          visible.push_back(g);
        }
    }
    struct HEdge {
      int a, b, outer;
    };
    std::vector<HEdge> horizon;
    for (int f : visible)
      for (int i = 0; i < 3; ++i) {
        const int g = faces_[f].nb[i];
        if (!vis_flag[g]) horizon.push_back({faces_[f].v[i], faces_[f].v[(i + 1) % 3], g});
      }
    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> created;
    for (const auto& e : horizon) {
      const int nf = make_face(e.a, e.b, p);
      created.push_back(nf);
      by_start[e.a] = nf;
      by_end[e.b] = nf;
      faces_[nf].nb[0] = e.outer;
      auto& of = faces_[e.outer];
      for (int i = 0; i < 3; ++i)
        if (of.v[i] == e.b && of.v[(i + 1) % 3] == e.a) of.nb[i] = nf;
    }
    for (std::size_t k = 0; k < horizon.size(); ++k) {
      const int nf = created[k];
      faces_[nf].nb[1] = by_start.at(horizon[k].b);
      faces_[nf].nb[2] = by_end.at(horizon[k].a);
    }
    std::vector<int> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      for (int q : faces_[f].outside)
        if (q != p) orphans.push_back(q);
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }
    for (int q : orphans)
      for (int nf : created)
        if (dist(nf, q) > eps_) {
          faces_[nf].outside.push_back(q);
          break;
        }
    for (int nf : created)
      if (!faces_[nf].outside.empty()) stack.push_back(nf);
  }

  const std::vector<Point>& P_;
  std::vector<Face> faces_;
  double eps_ = 0.0;
};

template <class F>
inline void for_each_subset(int n, int k, F&& f) {
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    f(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace detail

// Facet oracle over all d-subsets. Any dimension; small inputs only.
inline Polytope convex_hull_brute_force(const std::vector<Point>& pts, int d) {
  detail::check_full_dimensional(pts, d);
  const int n = static_cast<int>(pts.size());
  std::vector<Hyperplane> planes;
  std::set<std::vector<int>> keys;
  detail::for_each_subset(n, d, [&](const std::vector<int>& c) {
    Matrix D(d - 1, d);
    for (int i = 1; i < d; ++i) D.row(i - 1) = (pts[c[i]] - pts[c[0]]).transpose();
    Eigen::FullPivLU<Matrix> lu(D);
    lu.setThreshold(1e-10);
    if (lu.rank() < d - 1) return;
    Matrix ker = lu.kernel();
    if (ker.cols() != 1) return;
    Hyperplane h;
    h.normal = ker.col(0).normalized();
    h.offset = h.normal.dot(pts[c[0]]);
    bool pos = false, neg = false;
    std::vector<int> on;
    for (int i = 0; i < n; ++i) {
      const double s = h.slack(pts[i]);
      if (s > tol_geom) pos = true;
      else if (s < -tol_geom) neg = true;
      else on.push_back(i);
      if (pos && neg) return;
    }
    if (neg) {
      h.normal = -h.normal;
      h.offset = -h.offset;
    }
    if (keys.insert(on).second) planes.push_back(h);
  });
  return detail::assemble(pts, d, std::move(planes));
}

inline Polytope convex_hull(const std::vector<Point>& pts, int d) {
  if (d < 2) throw Error(ErrorCode::UnsupportedDimension, "d must be at least 2");
  if (d >= 4 && pts.size() > brute_force_hull_cap)
    throw Error(ErrorCode::DimensionTooLarge, "brute-force hull limited to 60 points for d >= 4");
  detail::check_full_dimensional(pts, d);
  if (d == 2 || d == 3) {
    std::vector<Hyperplane> planes;
    std::vector<int> ids;
    if (d == 2) {
      planes = detail::hull_planes_2d(pts, &ids);
    } else {
      detail::Hull3 h(pts);
      planes = h.run();
      ids = h.vertex_ids();
    }
    std::vector<Point> cand;
    std::vector<int> back;
    for (int i : ids) {
      cand.push_back(pts[i]);
      back.push_back(i);
    }
    Polytope P = detail::assemble(cand, d, std::move(planes));
    for (auto& s : P.source_index) s = back[s];
    return P;
  }
  return convex_hull_brute_force(pts, d);
}

// every input point on the feasible side of every facet
inline double max_hull_violation(const std::vector<Point>& pts, const Polytope& P) {
  double worst = 0.0;
  for (const auto& f : P.facets)
    for (const auto& p : pts) worst = std::max(worst, -f.plane.slack(p));
  return worst;
}

}  // namespace xcforge
