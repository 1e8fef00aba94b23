#pragma once

#include "xcforge/core/factorization.hpp"
#include "xcforge/core/parallel.hpp"
#include "xcforge/core/rng.hpp"
#include "xcforge/core/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace xcforge {

// min ||A x - b|| over x >= 0, given the Gram matrix G = A^T A and h = A^T b (Lawson-Hanson).
inline Eigen::VectorXd nnls_gram(const Matrix& G, const Eigen::VectorXd& h, const Eigen::VectorXd* warm = nullptr) {
  const Eigen::Index r = G.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(r);
  std::vector<char> P(static_cast<std::size_t>(r), 0);
  if (warm) {
    for (Eigen::Index i = 0; i < r; ++i) P[i] = (*warm)(i) > 0.0;
  }
  const double scale = std::max(1.0, G.diagonal().cwiseAbs().maxCoeff());
  const double tol = 1e-14 * scale;
  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < r; ++i)
      if (P[i]) idx.push_back(i);
    z.setZero(r);
    if (idx.empty()) return;
    const auto p = static_cast<Eigen::Index>(idx.size());
    Matrix Gp(p, p);
    Eigen::VectorXd hp(p);
    for (Eigen::Index a = 0; a < p; ++a) {
      hp(a) = h(idx[a]);
      for (Eigen::Index b = 0; b < p; ++b) Gp(a, b) = G(idx[a], idx[b]);
    }
    Eigen::VectorXd zp = Gp.ldlt().solve(hp);
    for (Eigen::Index a = 0; a < p; ++a) z(idx[a]) = zp(a);
  };
  Eigen::VectorXd z(r);
  if (warm) {
    solve_passive(z);
    bool ok = true;
    for (Eigen::Index i = 0; i < r; ++i)
      if (P[i] && !(z(i) > 0.0)) ok = false;
    if (ok) x = z;
    else std::fill(P.begin(), P.end(), 0);
  }
  for (int outer = 0; outer < 3 * r + 10; ++outer) {
    const Eigen::VectorXd w = h - G * x;
    Eigen::Index best = -1;
    double bw = tol;
    for (Eigen::Index i = 0; i < r; ++i)
      if (!P[i] && w(i) > bw) {
        bw = w(i);
        best = i;
      }
    if (best < 0) break;
    P[best] = 1;
    for (int inner = 0; inner < 3 * r + 10; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index i = 0; i < r; ++i)
        if (P[i] && z(i) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < r; ++i)
        if (P[i] && z(i) <= 0.0) alpha = std::min(alpha, x(i) / (x(i) - z(i)));
      x += alpha * (z - x);
      for (Eigen::Index i = 0; i < r; ++i)
        if (P[i] && x(i) <= tol) {
          P[i] = 0;
          x(i) = 0.0;
        }
    }
  }
  return x.cwiseMax(0.0);
}

struct AnlsOptions {
  int restarts = 32;
  int max_iters = 3000;
  double target = 1e-6;  // relative: max|K - TU| / (1 + max K)
  std::uint64_t seed = 1;
};

struct AnlsResult {
  NonnegFactorization F;
  double rel_err = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double rel_error(const Matrix& K, const Matrix& T, const Matrix& U) {
  const double mk = K.size() ? K.cwiseAbs().maxCoeff() : 0.0;
  if (K.size() == 0) return 0.0;
  return (K - T * U).cwiseAbs().maxCoeff() / (1.0 + mk);
}

// U <- argmin_{U >= 0} ||K - T U||, column by column
inline void nnls_update(const Matrix& T, const Matrix& K, Matrix& U) {
  const Matrix G = T.transpose() * T;
  const Matrix H = T.transpose() * K;
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    const Eigen::VectorXd warm = U.col(j);
    U.col(j) = nnls_gram(G, H.col(j), &warm);
  }
}

inline AnlsResult anls_once(const Matrix& K, int r, std::mt19937_64& g, const AnlsOptions& opt) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double s = std::sqrt(std::max(K.maxCoeff(), 1e-300) / r);
  Matrix T(K.rows(), r), U(r, K.cols());
  for (Eigen::Index i = 0; i < T.size(); ++i) T.data()[i] = s * u01(g);
  for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = s * u01(g);
  AnlsResult best;
  double prev = std::numeric_limits<double>::infinity();
  const Matrix Kt = K.transpose();
  for (int it = 0; it < opt.max_iters; ++it) {
    nnls_update(T, K, U);
    Matrix Tt = T.transpose();
    nnls_update(U.transpose(), Kt, Tt);
    T = Tt.transpose();
    // keep the two factors on the same scale
    for (int k = 0; k < r; ++k) {
      const double a = T.col(k).norm(), b = U.row(k).norm();
      if (a > 0.0 && b > 0.0) {
        const double f = std::sqrt(b / a);
        T.col(k) *= f;
        U.row(k) /= f;
      }
    }
    const double e = rel_error(K, T, U);
    if (e < best.rel_err) {
      best.rel_err = e;
      best.F.T = T;
      best.F.U = U;
    }
    if (e <= opt.target) break;
    if (it % 50 == 49) {
      if (e > prev * (1.0 - 1e-4)) break;  // stalled
      prev = e;
    }
  }
  return best;
}

}  // namespace detail

// Best of opt.restarts ANLS runs at inner dimension r. Restarts run in parallel with derived seeds.
inline AnlsResult anls(const Matrix& K, int r, const AnlsOptions& opt) {
  std::vector<AnlsResult> runs(static_cast<std::size_t>(opt.restarts));
  parallel_for(runs.size(), [&](std::size_t i) {
    auto g = substream(opt.seed, "anls:" + std::to_string(r) + ":" + std::to_string(i));
    runs[i] = detail::anls_once(K, r, g, opt);
  });
  AnlsResult best;
  for (auto& x : runs)
    if (x.rel_err < best.rel_err) best = std::move(x);
  return best;
}

// ---- restricted search for inner dimension-3 inputs K = G L^T ----

struct NestedPolygonResult {
  NonnegFactorization F;
  int r = 0;
  double rel_err = std::numeric_limits<double>::infinity();
  bool ok = false;
};

namespace detail {

using V2 = Eigen::Vector2d;

inline double cross2(const V2& a, const V2& b) { return a(0) * b(1) - a(1) * b(0); }

// ccw hull (Andrew), collinear points dropped
inline std::vector<V2> hull2(std::vector<V2> p) {
  std::sort(p.begin(), p.end(), [](const V2& a, const V2& b) { return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1)); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<V2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// {y : A y <= b} clipped from a box of half-width W; empty result if the box edge survives
inline std::vector<V2> halfplane_polygon(const std::vector<V2>& A, const std::vector<double>& b, double W) {
  std::vector<V2> poly = {V2(-W, -W), V2(W, -W), V2(W, W), V2(-W, W)};
  for (std::size_t c = 0; c < A.size() && !poly.empty(); ++c) {
    std::vector<V2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const V2& p = poly[i];
      const V2& q = poly[(i + 1) % poly.size()];
      const double fp = A[c].dot(p) - b[c], fq = A[c].dot(q) - b[c];
      if (fp <= 0.0) out.push_back(p);
      if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + fp / (fp - fq) * (q - p));
    }
    poly = std::move(out);
  }
  for (const auto& p : poly)
    if (std::max(std::abs(p(0)), std::abs(p(1))) >= 0.5 * W) return {};
  return poly;
}

}  // namespace detail

// Restricted nonnegative factorization of K = G L^T (inner dimension 3): the generators are
// the vertices of a polygon nested between the row hull and the column cone, found by a greedy
// tangent walk from many starting points. max_r bounds the polygon size.
inline NestedPolygonResult nested_polygon_factorize(const Matrix& G, const Matrix& L, int max_r = 8, int starts = 64) {
  using detail::V2;
  using detail::cross2;
  NestedPolygonResult res;
  const Eigen::Index m = G.rows(), k = L.rows();
  if (G.cols() != 3 || L.cols() != 3) throw Error(ErrorCode::ShapeMismatch, "nested polygon search needs 3 columns");
  const Matrix K = G * L.transpose();
  const double kmax = K.size() ? K.cwiseAbs().maxCoeff() : 0.0;

  Matrix Ln = L;
  for (Eigen::Index f = 0; f < k; ++f) {
    const double s = L.row(f).norm();
    if (s > 0.0) Ln.row(f) /= s;
  }
  Eigen::Vector3d c = Ln.colwise().sum().transpose();
  if (c.norm() <= 1e-12) return res;
  c.normalize();
  // orthonormal complement of c
  Eigen::Vector3d e = std::abs(c(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d b1 = (e - e.dot(c) * c).normalized();
  Eigen::Vector3d b2 = c.cross(b1);

  std::vector<V2> inner;
  const double gscale = G.size() ? G.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector3d gi = G.row(i).transpose();
    const double h = gi.dot(c);
    if (h <= 1e-14 * std::max(gscale, 1e-300) || K.row(i).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + kmax)) continue;
    const Eigen::Vector3d x = gi / h;
    inner.emplace_back(x.dot(b1), x.dot(b2));
  }
  res.F.T = Matrix::Zero(m, 0);
  res.F.U = Matrix::Zero(0, k);
  if (inner.empty()) {
    res.ok = true;
    res.rel_err = kmax / (1.0 + kmax);
    return res;
  }
  double ext = 0.0;
  for (const auto& y : inner) ext = std::max(ext, y.norm());
  std::vector<V2> A(static_cast<std::size_t>(k));
  std::vector<double> bb(static_cast<std::size_t>(k));
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Vector3d l = Ln.row(f).transpose();
    A[f] = V2(-l.dot(b1), -l.dot(b2));
    bb[f] = l.dot(c);
  }
  const auto H = detail::hull2(inner);
  std::vector<V2> poly;
  if (H.size() <= 2) {
    poly = H;
  } else {
    const auto outer = detail::halfplane_polygon(A, bb, 1e6 * (1.0 + ext));
    if (outer.size() < 3) return res;
    const double span = [&] {
      double s = 0.0;
      for (const auto& p : outer) s = std::max(s, p.norm());
      return s;
    }();
    const double tol = 1e-12 * (1.0 + span);
    auto exit_point = [&](const V2& p, const V2& d) {
      double lam = std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < A.size(); ++f) {
        const double ad = A[f].dot(d);
        if (ad > 1e-300) lam = std::min(lam, std::max(bb[f] - A[f].dot(p), 0.0) / ad);
      }
      // the target hull vertex is inside the outer polygon, so the segment reaches it at least
      return p + std::max(lam, 1.0) * d;
    };
    // hull vertex t with the whole hull left of p -> t
    auto tangent = [&](const V2& p) {
      int t = -1;
      for (int q = 0; q < static_cast<int>(H.size()); ++q) {
        if ((H[q] - p).norm() <= tol) continue;
        if (t < 0) {
          t = q;
          continue;
        }
        const double cr = cross2(H[t] - p, H[q] - p);
        if (cr < 0.0 || (cr == 0.0 && (H[q] - p).norm() > (H[t] - p).norm())) t = q;
      }
      return t;
    };
    auto closes = [&](const V2& from, const V2& to) {
      const V2 d = to - from;
      const double dn = d.norm();
      if (dn <= tol) return false;
      for (const auto& q : H)
        if (cross2(d, q - from) < -tol * dn) return false;
      return true;
    };
    // starting points spread along the outer boundary
    double per = 0.0;
    for (std::size_t i = 0; i < outer.size(); ++i) per += (outer[(i + 1) % outer.size()] - outer[i]).norm();
    std::vector<V2> seeds(outer.begin(), outer.end());
    for (int s = 0; s < starts; ++s) {
      double target = per * (s + 0.5) / starts, acc = 0.0;
      for (std::size_t i = 0; i < outer.size(); ++i) {
        const V2 a = outer[i], d = outer[(i + 1) % outer.size()] - a;
        if (acc + d.norm() >= target) {
          seeds.push_back(a + (target - acc) / d.norm() * d);
          break;
        }
        acc += d.norm();
      }
    }
    for (const auto& p0 : seeds) {
      std::vector<V2> pts = {p0};
      V2 p = p0;
      bool done = false;
      for (int step = 0; step < max_r + 2 && !done; ++step) {
        if (pts.size() >= 3 && closes(p, p0)) {
          done = true;
          break;
        }
        const int t = tangent(p);
        if (t < 0) break;
        const V2 q = exit_point(p, H[t] - p);
        if (!std::isfinite(q(0)) || (q - p).norm() <= tol) break;
        pts.push_back(q);
        p = q;
      }
      if (!done || (!poly.empty() && pts.size() >= poly.size())) continue;
      bool contains = true;
      for (std::size_t e = 0; e < pts.size() && contains; ++e) {
        const V2 d = pts[(e + 1) % pts.size()] - pts[e];
        for (const auto& q : H)
          if (cross2(d, q - pts[e]) < -tol * d.norm()) {
            contains = false;
            break;
          }
      }
      if (contains) poly = pts;
    }
    if (poly.empty() || static_cast<int>(poly.size()) > max_r) return res;
  }

  // generators in R^3 and their column slacks
  const auto r = static_cast<Eigen::Index>(poly.size());
  Matrix X(r, 3);
  for (Eigen::Index j = 0; j < r; ++j) X.row(j) = (c + poly[j](0) * b1 + poly[j](1) * b2).transpose();
  Matrix U = X * L.transpose();
  U = U.cwiseMax(0.0);
  // each row of K as a nonnegative combination of the generator rows
  Matrix T = Matrix::Zero(m, r);
  const Matrix Gu = U * U.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (K.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
    const Eigen::VectorXd h = U * K.row(i).transpose();
    T.row(i) = nnls_gram(Gu, h).transpose();
  }
  // balance
  for (Eigen::Index j = 0; j < r; ++j) {
    const double a = T.col(j).cwiseAbs().maxCoeff(), b = U.row(j).cwiseAbs().maxCoeff();
    if (a > 0.0 && b > 0.0) {
      const double f = std::sqrt(b / a);
      T.col(j) *= f;
      U.row(j) /= f;
    }
  }
  prune_and_clamp(T, U);
  res.r = static_cast<int>(T.cols());
  res.rel_err = detail::rel_error(K, T, U);
  res.F.T = std::move(T);
  res.F.U = std::move(U);
  res.ok = true;
  return res;
}

}  // namespace xcforge
