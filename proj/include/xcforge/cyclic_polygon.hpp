#pragma once

#include "xcforge/core/factorization.hpp"
#include "xcforge/core/io.hpp"
#include "xcforge/core/nmf.hpp"
#include "xcforge/core/parallel.hpp"
#include "xcforge/core/rng.hpp"
#include "xcforge/core/slack.hpp"
#include "xcforge/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace xcforge {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_2pi(double a) {
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

// ccw angle from a to b in [0, 2pi)
inline double ccw_gap(double a, double b) { return wrap_2pi(b - a); }

// shorter-arc distance between two angles
inline double arc_distance(double a, double b) {
  const double g = ccw_gap(a, b);
  return std::min(g, two_pi - g);
}

// Vertex i at angle[i]; facet i is the chord from vertex i to vertex i+1 (mod n).
inline Polytope make_cyclic_polygon(const std::vector<double>& angles) {
  const std::size_t n = angles.size();
  if (n < 3) throw Error(ErrorCode::TooFew, "a polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < two_pi)) throw Error(ErrorCode::NotSorted, "angles must lie in [0, 2pi)");
    if (i > 0 && !(angles[i] > angles[i - 1]))
      throw Error(ErrorCode::NotSorted, "angles must be strictly increasing (index " + std::to_string(i) + ")");
  }
  Polytope P;
  P.dim = 2;
  for (double t : angles) {
    Point p(2);
    p << std::cos(t), std::sin(t);
    P.vertices.push_back(p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double gap = ccw_gap(angles[i], angles[j]) + (n == 1 ? two_pi : 0.0);
    const double mid = angles[i] + gap / 2.0;
    Point nrm(2);
    nrm << std::cos(mid), std::sin(mid);
    P.facets.push_back(Facet{Hyperplane{nrm, std::cos(gap / 2.0)}, {static_cast<int>(i), static_cast<int>(j)}});
  }
  return P;
}

// angles back from the vertices of a polygon built by make_cyclic_polygon
inline std::vector<double> cyclic_angles(const Polytope& P) {
  std::vector<double> a;
  for (const auto& v : P.vertices) a.push_back(wrap_2pi(std::atan2(v(1), v(0))));
  return a;
}

// slack of vertex v against facet f, from angles: cos(gap/2) - cos(phi) in product form
inline double cyclic_slack(const std::vector<double>& angles, int v, int f) {
  const std::size_t n = angles.size();
  if (v == f || static_cast<std::size_t>(v) == (static_cast<std::size_t>(f) + 1) % n) return 0.0;
  const double a = angles[f], gap = ccw_gap(a, angles[(f + 1) % n]);
  double phi = wrap_2pi(angles[v] - a - gap / 2.0);
  if (phi > std::numbers::pi) phi -= two_pi;
  return std::max(0.0, 2.0 * std::sin((phi + gap / 2.0) / 2.0) * std::sin((phi - gap / 2.0) / 2.0));
}

inline Matrix cyclic_slack_block(const std::vector<double>& angles, const std::vector<int>& rows,
                                 const std::vector<int>& cols) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cyclic_slack(angles, rows[i], cols[j]);
  return M;
}

struct Arc {
  int id = 0;
  double start = 0.0;  // ccw from start to end
  double end = 0.0;
  double length = 0.0;
  std::vector<int> vertices;  // V^X in ccw order
  std::vector<int> facets;    // F^X
};

// ceil(sqrt n) blocks of consecutive facets, sizes differing by at most one
inline std::vector<Arc> arc_blocks(const Polytope& P) {
  const auto angles = cyclic_angles(P);
  const int n = static_cast<int>(P.num_facets());
  int B = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (static_cast<long long>(B - 1) * (B - 1) >= n) --B;
  while (static_cast<long long>(B) * B < n) ++B;
  std::vector<Arc> arcs;
  int f = 0;
  for (int b = 0; b < B; ++b) {
    const int size = n / B + (b < n % B ? 1 : 0);
    Arc X;
    X.id = b;
    for (int i = 0; i < size; ++i) X.facets.push_back(f + i);
    for (int i = 0; i <= size; ++i) X.vertices.push_back((f + i) % n);
    X.start = angles[f];
    X.end = angles[(f + size) % n];
    X.length = size == n ? two_pi : ccw_gap(X.start, X.end);
    arcs.push_back(std::move(X));
    f += size;
  }
  return arcs;
}

// minimum arc-distance between points of two arcs (0 if they meet)
inline double arc_set_distance(const Arc& X, const Arc& Y) {
  const double a = X.length, b = Y.length;
  const double g1 = ccw_gap(X.start, Y.start), g2 = ccw_gap(Y.start, X.start);
  // overlap if either start lies inside the other arc
  if (g1 <= a || g2 <= b) return 0.0;
  return std::min(ccw_gap(X.end, Y.start), ccw_gap(Y.end, X.start));
}

inline bool well_separated(const Arc& X, const Arc& Y) {
  // relative slack so that exact ties on regular polygons count as separated
  return arc_set_distance(X, Y) >= 5.0 * std::min(X.length, Y.length) * (1.0 - 1e-12);
}

struct ArcColoring {
  std::vector<int> color;  // 0-based; reported 1-based
  int chi = 0;
};

inline ArcColoring color_arcs(const std::vector<Arc>& arcs) {
  std::vector<int> order(arcs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return arcs[a].length > arcs[b].length; });
  ArcColoring C;
  C.color.assign(arcs.size(), -1);
  std::vector<int> done;
  for (int x : order) {
    std::vector<char> used(15, 0);
    for (int y : done)
      if (!well_separated(arcs[x], arcs[y]) && C.color[y] < 15) used[C.color[y]] = 1;
    int c = 0;
    while (c < 15 && used[c]) ++c;
    if (c >= 14) throw Error(ErrorCode::ColorOverflow, "arc " + std::to_string(x) + " needs a 15th colour");
    C.color[x] = c;
    C.chi = std::max(C.chi, c + 1);
    done.push_back(x);
  }
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j)
      if (C.color[i] == C.color[j] && !well_separated(arcs[i], arcs[j]))
        throw Error(ErrorCode::ColorOverflow, "same-colour arcs are not well separated");
  return C;
}

// ---- row rescaling ----

struct RescaleFactors {
  std::vector<double> alpha;
};

struct RescaleWitness {
  int j = -1, k = -1, s = -1, t = -1;
  double excess = 0.0;
};

namespace detail {

inline double rel_tol_cmp(double a, double b) { return 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-300; }

}  // namespace detail

// First (j, k, s, t) breaking M_js M_kt <= M_jt M_ks (k < j, s in S_j, t in S_1..S_{j-1}),
// or a zero off-partition entry (reported with k = t = -1). Per pair (j, k) only the extreme
// ratios are compared.
inline std::optional<RescaleWitness> rescale_precondition_witness(const Matrix& M, const std::vector<std::vector<int>>& S) {
  const auto m = static_cast<int>(S.size());
  std::vector<int> part(static_cast<std::size_t>(M.cols()), -1);
  for (int j = 0; j < m; ++j)
    for (int s : S[j]) part[s] = j;
  for (int j = 0; j < m; ++j)
    for (Eigen::Index s = 0; s < M.cols(); ++s)
      if (part[s] != j && !(M(j, s) > 0.0)) return RescaleWitness{j, -1, static_cast<int>(s), -1, 0.0};
  for (int j = 1; j < m; ++j) {
    for (int k = 0; k < j; ++k) {
      // max over s in S_j of M_js / M_ks against min over t in S_<j with M_kt > 0 of M_jt / M_kt
      int sb = -1, tb = -1;
      double smax = -1.0, tmin = std::numeric_limits<double>::infinity();
      for (int s : S[j]) {
        const double r = M(j, s) / M(k, s);
        if (r > smax) {
          smax = r;
          sb = s;
        }
      }
      for (int i = 0; i < j; ++i)
        for (int t : S[i]) {
          if (!(M(k, t) > 0.0)) continue;
          const double r = M(j, t) / M(k, t);
          if (r < tmin) {
            tmin = r;
            tb = t;
          }
        }
      if (sb < 0 || tb < 0) continue;
      const double lhs = M(j, sb) * M(k, tb), rhs = M(j, tb) * M(k, sb);
      if (lhs > rhs + detail::rel_tol_cmp(lhs, rhs)) return RescaleWitness{j, k, sb, tb, lhs - rhs};
    }
  }
  return std::nullopt;
}

// Exhaustive: worst relative excess of alpha_j M_js over alpha_k M_ks, s in S_j. <= 0 means valid.
inline double rescale_postcondition_excess(const Matrix& M, const std::vector<std::vector<int>>& S,
                                           const RescaleFactors& a, RescaleWitness* where = nullptr) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto m = static_cast<int>(S.size());
  for (int j = 0; j < m; ++j)
    for (int s : S[j])
      for (int k = 0; k < m; ++k) {
        const double l = a.alpha[j] * M(j, s), r = a.alpha[k] * M(k, s);
        const double e = (l - r) / (std::max(std::abs(l), std::abs(r)) + 1e-300);
        if (e > worst) {
          worst = e;
          if (where) *where = RescaleWitness{j, k, s, -1, l - r};
        }
      }
  return worst;
}

// Rows 0..m-1 in the given order, columns partitioned by S. The induction runs row by row.
inline RescaleFactors rescale_rows(const Matrix& M, const std::vector<std::vector<int>>& S) {
  const auto m = static_cast<int>(S.size());
  if (M.rows() != m) throw Error(ErrorCode::ShapeMismatch, "one partition class per row");
  if (M.size() && M.minCoeff() < 0.0) throw Error(ErrorCode::PreconditionViolated, "matrix has negative entries");
  if (auto w = rescale_precondition_witness(M, S))
    throw Error(ErrorCode::PreconditionViolated,
                "witness (j,k,s,t) = (" + std::to_string(w->j) + "," + std::to_string(w->k) + "," +
                    std::to_string(w->s) + "," + std::to_string(w->t) + ")");
  RescaleFactors a;
  a.alpha.assign(static_cast<std::size_t>(m), 1.0);
  for (int j = 1; j < m; ++j) {
    bool zero_row = true;
    for (int s : S[j])
      if (M(j, s) != 0.0) zero_row = false;
    if (zero_row) {
      double big = 0.0;
      for (int i = 0; i < j; ++i)
        for (int s : S[i]) big = std::max(big, a.alpha[i] * M(i, s) / M(j, s));
      a.alpha[j] = big > 0.0 ? big : 1.0;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int s : S[j]) {
      if (M(j, s) == 0.0) continue;
      for (int k = 0; k < j; ++k) best = std::min(best, a.alpha[k] * M(k, s) / M(j, s));
    }
    a.alpha[j] = best;
  }
  return a;
}

// ---- circle geometry ----

struct CircleCheck {
  bool holds = false;
  double lhs = 0.0;  // M_vf M_wg
  double rhs = 0.0;  // M_vg M_wf
  Point z_f, z_g;
  double identity_err_f = 0.0;  // relative error of the distance-ratio identity for f
  double identity_err_g = 0.0;
};

namespace detail {

inline bool on_arc(double theta, const Arc& X, double tol = 1e-12) {
  return ccw_gap(X.start, theta) <= X.length + tol || ccw_gap(theta, X.start) <= tol;
}

inline double chord(double a, double b) { return 2.0 * std::abs(std::sin((a - b) / 2.0)); }

// angle of the tangent point on the sub-arc of facet f, as seen from p = (line vw) cap l_f.
// sv, sw are the distances of v, w to l_f (unit normals), so p = v + t (w - v) with t = sv / (sv - sw).
inline double tangent_angle(const std::vector<double>& ang, int v, int w, int f, double sv, double sw) {
  const std::size_t n = ang.size();
  const double a0 = ang[f], gap = ccw_gap(a0, ang[(f + 1) % n]);
  if (sv == sw) return a0 + gap / 2;
  auto pt = [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)); };
  const Eigen::Vector2d pv = pt(ang[v]), pw = pt(ang[w]), d1 = pw - pv;
  const double t = sv / (sv - sw), t1 = sw / (sv - sw);  // t1 = t - 1
  const Eigen::Vector2d p = std::abs(t) <= std::abs(t1) ? Eigen::Vector2d(pv + t * d1) : Eigen::Vector2d(pw + t1 * d1);
  // tangent length squared is the power of p: |pv| |pw|
  const double vw = chord(ang[v], ang[w]);
  const double power = t * t1 * vw * vw;
  const double base = std::atan2(p(1), p(0));
  if (power <= 0.0) return base;
  const double off = std::atan(std::sqrt(power));
  auto dist = [&](double th) {
    if (ccw_gap(a0, th) <= gap) return 0.0;
    return std::min(arc_distance(th, a0), arc_distance(th, a0 + gap));
  };
  return dist(base + off) <= dist(base - off) ? base + off : base - off;
}

inline double identity_error(double sv, double sw, double tv, double tw, double tz) {
  const double lhs = sv / sw;
  const double q = chord(tv, tz) / chord(tw, tz);
  return std::abs(lhs - q * q) / std::max({std::abs(lhs), q * q, 1e-300});
}

}  // namespace detail

inline CircleCheck circle_slack_inequality(const Polytope& P, int v, int w, int f, int g, const Arc& X) {
  const auto ang = cyclic_angles(P);
  const std::size_t n = ang.size();
  const double five = 5.0 * X.length;
  auto far = [&](double th) {
    return arc_distance(th, X.start) >= five - 1e-12 && arc_distance(th, X.end) >= five - 1e-12 && !detail::on_arc(th, X);
  };
  if (!detail::on_arc(ang[v], X) || !detail::on_arc(ang[f], X) || !detail::on_arc(ang[(f + 1) % n], X))
    throw Error(ErrorCode::PreconditionViolated, "v and facet f must lie on the arc");
  if (!far(ang[w]) || !far(ang[g]) || !far(ang[(g + 1) % n]))
    throw Error(ErrorCode::PreconditionViolated, "w and facet g must be 5 arc lengths away");
  CircleCheck c;
  const double mvf = cyclic_slack(ang, v, f), mwg = cyclic_slack(ang, w, g);
  const double mvg = cyclic_slack(ang, v, g), mwf = cyclic_slack(ang, w, f);
  c.lhs = mvf * mwg;
  c.rhs = mvg * mwf;
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12);
  // an endpoint of the facet is its own tangent point
  auto endpoint = [&](int x, int h) { return x == h || static_cast<std::size_t>(x) == (static_cast<std::size_t>(h) + 1) % n; };
  const double zf = endpoint(v, f) ? ang[v] : detail::tangent_angle(ang, v, w, f, mvf, mwf);
  const double zg = endpoint(w, g) ? ang[w] : detail::tangent_angle(ang, v, w, g, mvg, mwg);
  c.z_f = (Point(2) << std::cos(zf), std::sin(zf)).finished();
  c.z_g = (Point(2) << std::cos(zg), std::sin(zg)).finished();
  c.identity_err_f = mwf > 0.0 ? detail::identity_error(mvf, mwf, ang[v], ang[w], zf) : 0.0;
  c.identity_err_g = mwg > 0.0 ? detail::identity_error(mvg, mwg, ang[v], ang[w], zg) : 0.0;
  return c;
}

// ---- per-block factorization ----

struct BlockOptions {
  int max_rank = 8;
  int geometric_starts = 64;
  AnlsOptions anls;
  std::size_t anls_entry_budget = 4000;  // ANLS only on blocks up to this many entries
};

struct BlockResult {
  NonnegFactorization F;
  double rel_err = 0.0;
  std::string backend;
};

// Nonnegative factorization of rank <= max_rank. Small blocks: ANLS over ranks 1..max_rank,
// smallest passing rank wins. Larger ones: nested polygon search on a rank-3 certificate
// K = G L^T (given, or from the SVD when rank(K) <= 3). An identity factor closes the gap
// when a side has at most max_rank entries.
inline BlockResult block_factorize_rank8(const Matrix& K, const BlockOptions& opt = {}, const Matrix* G = nullptr,
                                         const Matrix* L = nullptr) {
  if (K.size() && K.minCoeff() < -tol_geom) throw Error(ErrorCode::PreconditionViolated, "block has negative entries");
  BlockResult res;
  const double kmax = K.size() ? K.cwiseAbs().maxCoeff() : 0.0;
  const double target = opt.anls.target;
  if (kmax == 0.0) {
    res.F.T = Matrix::Zero(K.rows(), 0);
    res.F.U = Matrix::Zero(0, K.cols());
    res.backend = "zero";
    return res;
  }
  const Matrix Kp = K.cwiseMax(0.0);
  auto accept = [&](NonnegFactorization F, const std::string& how) {
    prune_and_clamp(F.T, F.U);
    res.rel_err = detail::rel_error(Kp, F.T, F.U);
    res.F = std::move(F);
    res.backend = how;
    return res;
  };
  double best_err = std::numeric_limits<double>::infinity();
  const int rk = numerical_rank(Kp, 1e-12);
  if (rk == 1) {
    Eigen::JacobiSVD<Matrix> svd(Kp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s = std::sqrt(svd.singularValues()(0));
    Matrix T = (svd.matrixU().col(0) * s).cwiseAbs();
    Matrix U = (svd.matrixV().col(0).transpose() * s).cwiseAbs();
    const double e = detail::rel_error(Kp, T, U);
    if (e <= target) return accept(NonnegFactorization{T, U, {}}, "rank1");
    best_err = e;
  }
  if (static_cast<std::size_t>(K.size()) <= opt.anls_entry_budget) {
    for (int r = 1; r <= opt.max_rank; ++r) {
      auto a = anls(Kp, r, opt.anls);
      best_err = std::min(best_err, a.rel_err);
      if (a.rel_err <= target) return accept(std::move(a.F), "anls");
    }
  } else {
    std::optional<NestedPolygonResult> g;
    if (G && L) {
      g = nested_polygon_factorize(*G, *L, opt.max_rank, opt.geometric_starts);
    } else if (rk <= 3) {
      Eigen::JacobiSVD<Matrix> svd(Kp, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::Index q = std::min<Eigen::Index>(3, svd.singularValues().size());
      Matrix Gs = Matrix::Zero(K.rows(), 3), Ls = Matrix::Zero(K.cols(), 3);
      Gs.leftCols(q) = svd.matrixU().leftCols(q) * svd.singularValues().head(q).asDiagonal();
      Ls.leftCols(q) = svd.matrixV().leftCols(q);
      g = nested_polygon_factorize(Gs, Ls, opt.max_rank, opt.geometric_starts);
    }
    if (g && g->ok) {
      const double e = detail::rel_error(Kp, g->F.T, g->F.U);
      if (e <= target) return accept(std::move(g->F), "nested-polygon");
      best_err = std::min(best_err, e);
    }
  }
  if (K.cols() <= opt.max_rank)
    return accept(NonnegFactorization{Kp, Matrix::Identity(K.cols(), K.cols()), {}}, "identity");
  if (K.rows() <= opt.max_rank)
    return accept(NonnegFactorization{Matrix::Identity(K.rows(), K.rows()), Kp, {}}, "identity");
  throw Error(ErrorCode::RankTargetMissed, "best relative error " + std::to_string(best_err));
}

// ---- pipeline ----

enum class AngleModel { Uniform, Clustered };

// uniform: iid on [0, 2pi); clustered: 90% in [0, pi/2), the rest on [pi/2, 2pi)
inline std::vector<double> random_angles(std::size_t n, AngleModel model, std::uint64_t seed) {
  auto g = substream(seed, model == AngleModel::Uniform ? "angles:uniform" : "angles:clustered");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a;
  while (a.size() < n) {
    while (a.size() < n) {
      double t;
      if (model == AngleModel::Uniform) t = two_pi * u(g);
      else t = u(g) < 0.9 ? (std::numbers::pi / 2) * u(g) : std::numbers::pi / 2 + 1.5 * std::numbers::pi * u(g);
      if (t < two_pi) a.push_back(t);
    }
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return a;
}

struct CyclicOptions {
  BlockOptions block;
  BlockOptions retry;  // second attempt for blocks that missed
  double tol = 1e-6;
  bool keep_factors = false;
  CyclicOptions() {
    retry.geometric_starts = 1024;
    retry.anls.restarts = 128;
    retry.anls_entry_budget = 15000;
  }
};

struct CyclicColorReport {
  int color = 0;  // 1-based
  std::size_t arcs = 0;
  long long k_factors = 0;
  long long t_factors = 0;
  int N = 0;
};

struct CyclicReport {
  std::size_t n = 0;
  bool trivial = false;
  std::size_t arcs = 0;
  int chi = 0;
  std::vector<CyclicColorReport> colors;
  long long r_total = 0;
  double bound_22 = 0.0;  // 22 sqrt(n) + 36
  double bound_24 = 0.0;  // 24 sqrt(n)
  double max_abs_err = 0.0;
  double rel_err = 0.0;
  double rescale_excess = 0.0;  // worst postcondition excess over all label classes
  double min_K = 0.0;
  std::size_t blocks = 0;
  std::size_t missed_first = 0;  // blocks whose first attempt missed rank 8
  std::size_t retried_ok = 0;
  std::size_t missed = 0;
  std::size_t max_block_rank = 0;
  std::vector<std::string> backends;
  bool verified = false;
  bool ok = false;
  std::string failure_code;
  std::string failure_stage;  // coloring, rescale, K-nonnegativity, block-rank, verification
  std::string failure;
};

struct CyclicRun {
  Polytope polytope;
  std::vector<Arc> arcs;
  ArcColoring coloring;
  std::optional<BlockFactorization> factors;
  CyclicReport report;
};

class CyclicFailure : public Error {
 public:
  CyclicFailure(ErrorCode c, const std::string& msg, CyclicReport rep) : Error(c, msg), report_(std::move(rep)) {}
  const CyclicReport& report() const { return report_; }

 private:
  CyclicReport report_;
};

inline json cyclic_report_to_json(const CyclicReport& r) {
  json j;
  j["n"] = r.n;
  j["trivial"] = r.trivial;
  j["arcs"] = r.arcs;
  j["chi"] = r.chi;
  j["colors"] = json::array();
  for (const auto& c : r.colors)
    j["colors"].push_back({{"color", c.color}, {"arcs", c.arcs}, {"k_factors", c.k_factors}, {"t_factors", c.t_factors}, {"N", c.N}});
  j["r_total"] = r.r_total;
  j["bound_22sqrt_n_plus_36"] = r.bound_22;
  j["bound_24sqrt_n"] = r.bound_24;
  j["r_over_sqrt_n"] = r.n ? static_cast<double>(r.r_total) / std::sqrt(static_cast<double>(r.n)) : 0.0;
  j["max_abs_err"] = r.max_abs_err;
  j["rel_err"] = r.rel_err;
  j["rescale_excess"] = r.rescale_excess;
  j["min_K"] = r.min_K;
  j["blocks"] = r.blocks;
  j["missed_first"] = r.missed_first;
  j["retried_ok"] = r.retried_ok;
  j["missed"] = r.missed;
  j["max_block_rank"] = r.max_block_rank;
  j["verified"] = r.verified;
  j["ok"] = r.ok;
  if (!r.ok) j["failure"] = {{"code", r.failure_code}, {"stage", r.failure_stage}, {"message", r.failure}};
  return j;
}

// Per-colour data: arcs by decreasing length, labels phi (1-based position on the arc) and the
// row scaling alpha, label class by label class.
struct CyclicColor {
  std::vector<int> arcs;
  std::vector<double> alpha;  // per vertex, 1 outside V_c
  std::vector<int> phi;       // per vertex, 0 outside V_c
  std::vector<int> vc;
  int N = 0;
  double rescale_excess = -std::numeric_limits<double>::infinity();
};

inline std::vector<CyclicColor> cyclic_colors(const Polytope& P, const std::vector<Arc>& arcs, const ArcColoring& C) {
  const auto ang = cyclic_angles(P);
  const std::size_t n = P.num_vertices();
  std::vector<CyclicColor> cols(static_cast<std::size_t>(C.chi));
  for (std::size_t x = 0; x < arcs.size(); ++x) cols[C.color[x]].arcs.push_back(static_cast<int>(x));
  for (auto& cc : cols) {
    std::stable_sort(cc.arcs.begin(), cc.arcs.end(), [&](int a, int b) { return arcs[a].length > arcs[b].length; });
    cc.alpha.assign(n, 1.0);
    cc.phi.assign(n, 0);
    for (int x : cc.arcs) {
      cc.N = std::max(cc.N, static_cast<int>(arcs[x].vertices.size()));
      for (std::size_t i = 0; i < arcs[x].vertices.size(); ++i) {
        cc.phi[arcs[x].vertices[i]] = static_cast<int>(i) + 1;
        cc.vc.push_back(arcs[x].vertices[i]);
      }
    }
    for (int i = 1; i <= cc.N; ++i) {
      std::vector<int> rows, colset;
      std::vector<std::vector<int>> S;
      for (int x : cc.arcs) {
        if (static_cast<int>(arcs[x].vertices.size()) < i) continue;
        rows.push_back(arcs[x].vertices[i - 1]);
        std::vector<int> part;
        for (int f : arcs[x].facets) {
          part.push_back(static_cast<int>(colset.size()));
          colset.push_back(f);
        }
        S.push_back(std::move(part));
      }
      const Matrix Mi = cyclic_slack_block(ang, rows, colset);
      RescaleFactors a;
      try {
        a = rescale_rows(Mi, S);
      } catch (const Error& e) {
        throw Error(e.code(), "label " + std::to_string(i) + ": " + e.what());
      }
      cc.rescale_excess = std::max(cc.rescale_excess, rescale_postcondition_excess(Mi, S, a));
      for (std::size_t j = 0; j < rows.size(); ++j) cc.alpha[rows[j]] = a.alpha[j];
    }
  }
  return cols;
}

// t-vectors of a colour: row i-1 holds alpha_x M_x,f for the i-th vertex x of each arc, on that arc's facets
inline Matrix cyclic_tvectors(const std::vector<double>& ang, const std::vector<Arc>& arcs, const CyclicColor& cc,
                              const std::vector<int>& pos, Eigen::Index ncols) {
  Matrix t = Matrix::Zero(cc.N, ncols);
  for (int x : cc.arcs)
    for (std::size_t i = 0; i < arcs[x].vertices.size(); ++i) {
      const int v = arcs[x].vertices[i];
      for (int f : arcs[x].facets) t(static_cast<Eigen::Index>(i), pos[f]) = cc.alpha[v] * cyclic_slack(ang, v, f);
    }
  return t;
}

struct CyclicKBlock {
  std::vector<int> rows;
  Matrix K;
  Matrix G;  // K = G L^T
  Matrix L;
};

// K[rows, F^X] with K_v,f = alpha_v M_v,f - t^(phi(v))_f; rows default to V minus V^X
inline CyclicKBlock cyclic_k_block(const Polytope& P, const std::vector<double>& ang, const CyclicColor& cc, const Arc& X,
                                   bool include_arc_rows = false) {
  const std::size_t n = P.num_vertices();
  CyclicKBlock b;
  std::vector<char> inX(n, 0);
  for (int v : X.vertices) inX[v] = 1;
  for (std::size_t v = 0; v < n; ++v)
    if (include_arc_rows || !inX[v]) b.rows.push_back(static_cast<int>(v));
  const auto nr = static_cast<Eigen::Index>(b.rows.size()), nc = static_cast<Eigen::Index>(X.facets.size());
  b.K.resize(nr, nc);
  b.G.resize(nr, 3);
  b.L.resize(nc, 3);
  auto lift = [](const Point& v, double a) { return Eigen::RowVector3d(a, -a * v(0), -a * v(1)); };
  for (Eigen::Index j = 0; j < nc; ++j) {
    const auto& h = P.facets[X.facets[j]].plane;
    b.L.row(j) << h.offset, h.normal(0), h.normal(1);
  }
  for (Eigen::Index i = 0; i < nr; ++i) {
    const int v = b.rows[i];
    const int lab = cc.phi[v];
    const int x = lab > 0 && lab <= static_cast<int>(X.vertices.size()) ? X.vertices[lab - 1] : -1;
    b.G.row(i) = lift(P.vertices[v], cc.alpha[v]);
    if (x >= 0) b.G.row(i) -= lift(P.vertices[x], cc.alpha[x]);
    for (Eigen::Index j = 0; j < nc; ++j) {
      const int f = X.facets[j];
      double k = cc.alpha[v] * cyclic_slack(ang, v, f);
      if (x == v) k = 0.0;
      else if (x >= 0) k -= cc.alpha[x] * cyclic_slack(ang, x, f);
      b.K(i, j) = k;
    }
  }
  return b;
}

inline CyclicRun xc_factorize_cyclic(const Polytope& P, const CyclicOptions& opt = {}) {
  CyclicRun run;
  run.polytope = P;
  auto& rep = run.report;
  const std::size_t n = P.num_vertices();
  rep.n = n;
  rep.bound_22 = 22.0 * std::sqrt(static_cast<double>(n)) + 36.0;
  rep.bound_24 = 24.0 * std::sqrt(static_cast<double>(n));
  if (n < 3) throw Error(ErrorCode::TooFew, "a polygon needs at least 3 vertices");
  const auto ang = cyclic_angles(P);
  auto fail = [&](ErrorCode c, const std::string& stage, const std::string& msg) {
    rep.ok = false;
    rep.failure_code = to_string(c);
    rep.failure_stage = stage;
    rep.failure = msg;
    throw CyclicFailure(c, stage + ": " + msg, rep);
  };
  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);

  if (n < 576) {
    rep.trivial = true;
    const Matrix M = cyclic_slack_block(ang, all, all);
    NonnegFactorization F{Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), M, {}};
    const auto fr = verify_factorization(M, F, opt.tol);
    rep.r_total = static_cast<long long>(n);
    rep.max_abs_err = fr.max_abs_err;
    rep.rel_err = fr.rel_err;
    rep.verified = fr.pass;
    rep.ok = fr.pass;
    if (!rep.ok) fail(ErrorCode::PreconditionViolated, "verification", "trivial factorization does not reconstruct");
    if (opt.keep_factors) {
      run.factors.emplace();
      run.factors->num_rows = run.factors->num_cols = static_cast<Eigen::Index>(n);
      run.factors->groups.push_back(FactorGroup{all, all, F.T, F.U, "trivial"});
    }
    return run;
  }

  run.arcs = arc_blocks(P);
  rep.arcs = run.arcs.size();
  try {
    run.coloring = color_arcs(run.arcs);
  } catch (const Error& e) {
    fail(e.code(), "coloring", e.what());
  }
  rep.chi = run.coloring.chi;
  const auto& arcs = run.arcs;

  std::vector<CyclicColor> cols;
  try {
    cols = cyclic_colors(P, arcs, run.coloring);
  } catch (const Error& e) {
    fail(e.code(), "rescale", e.what());
  }
  rep.rescale_excess = -std::numeric_limits<double>::infinity();
  for (const auto& cc : cols) rep.rescale_excess = std::max(rep.rescale_excess, cc.rescale_excess);
  if (rep.rescale_excess > 1e-9) fail(ErrorCode::PreconditionViolated, "rescale", "rescaled rows break the ordering");

  std::vector<Matrix> tvec(cols.size());
  std::vector<std::vector<int>> tcols(cols.size());
  std::vector<int> tpos(P.num_facets(), -1);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (int x : cols[c].arcs)
      for (int f : arcs[x].facets) {
        tpos[f] = static_cast<int>(tcols[c].size());
        tcols[c].push_back(f);
      }
    tvec[c] = cyclic_tvectors(ang, arcs, cols[c], tpos, static_cast<Eigen::Index>(tcols[c].size()));
  }

  struct Job {
    int color, arc;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int x : cols[c].arcs) jobs.push_back({static_cast<int>(c), x});
  rep.blocks = jobs.size();

  struct Outcome {
    FactorGroup group;
    double err = 0.0, mmax = 0.0, min_k = 0.0;
    bool missed_first = false;
    std::string backend;
  };
  std::vector<Outcome> out(jobs.size());
  try {
    parallel_for(jobs.size(), [&](std::size_t q) {
      const auto& cc = cols[jobs[q].color];
      const Arc& X = arcs[jobs[q].arc];
      auto& o = out[q];
      auto b = cyclic_k_block(P, ang, cc, X);
      const auto nr = static_cast<Eigen::Index>(b.rows.size()), nc = static_cast<Eigen::Index>(X.facets.size());
      o.min_k = b.K.size() ? b.K.minCoeff() : 0.0;
      const double kscale = b.K.size() ? b.K.cwiseAbs().maxCoeff() : 0.0;
      if (o.min_k < -tol_geom * (1.0 + kscale))
        throw Error(ErrorCode::NegativeK, "K block of arc " + std::to_string(X.id) + " has entry " + std::to_string(o.min_k));
      const Matrix Kp = b.K.cwiseMax(0.0);
      BlockResult br;
      try {
        br = block_factorize_rank8(Kp, opt.block, &b.G, &b.L);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankTargetMissed) throw;
        o.missed_first = true;
        br = block_factorize_rank8(Kp, opt.retry, &b.G, &b.L);
      }
      o.backend = br.backend;
      Matrix T = br.F.T;
      for (Eigen::Index i = 0; i < nr; ++i) T.row(i) /= cc.alpha[b.rows[i]];
      o.group = FactorGroup{b.rows, X.facets, std::move(T), std::move(br.F.U), "K:arc" + std::to_string(X.id)};
      // residual of M[:, F^X] against the K group and the colour's t group
      Matrix M = cyclic_slack_block(ang, all, X.facets);
      o.mmax = M.maxCoeff();
      if (o.group.T.cols() > 0) {
        const Matrix TU = o.group.T * o.group.U;
        for (Eigen::Index i = 0; i < nr; ++i) M.row(b.rows[i]) -= TU.row(i);
      }
      for (int v : cc.vc)
        for (Eigen::Index j = 0; j < nc; ++j)
          M(v, j) -= tvec[jobs[q].color](cc.phi[v] - 1, tpos[X.facets[j]]) / cc.alpha[v];
      o.err = M.cwiseAbs().maxCoeff();
    });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankTargetMissed) rep.missed = 1;
    fail(e.code(), e.code() == ErrorCode::NegativeK ? "K-nonnegativity" : "block-rank", e.what());
  }

  if (opt.keep_factors) {
    run.factors.emplace();
    run.factors->num_rows = run.factors->num_cols = static_cast<Eigen::Index>(n);
  }
  double mmax = 0.0;
  rep.colors.resize(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    auto& cr = rep.colors[c];
    const auto& cc = cols[c];
    cr.color = static_cast<int>(c) + 1;
    cr.arcs = cc.arcs.size();
    cr.N = cc.N;
    // t group: rows V_c, T(v, phi(v)) = 1 / alpha_v
    Matrix T = Matrix::Zero(static_cast<Eigen::Index>(cc.vc.size()), cc.N);
    for (std::size_t i = 0; i < cc.vc.size(); ++i) {
      const int v = cc.vc[i];
      T(static_cast<Eigen::Index>(i), cc.phi[v] - 1) = 1.0 / cc.alpha[v];
    }
    Matrix U = tvec[c];
    prune_and_clamp(T, U);
    cr.t_factors = T.cols();
    if (opt.keep_factors) run.factors->groups.push_back(FactorGroup{cc.vc, tcols[c], T, U, "t:color" + std::to_string(c + 1)});
  }
  for (std::size_t q = 0; q < jobs.size(); ++q) {
    auto& o = out[q];
    rep.colors[jobs[q].color].k_factors += o.group.T.cols();
    rep.max_block_rank = std::max<std::size_t>(rep.max_block_rank, static_cast<std::size_t>(o.group.T.cols()));
    rep.max_abs_err = std::max(rep.max_abs_err, o.err);
    rep.min_K = std::min(rep.min_K, o.min_k);
    mmax = std::max(mmax, o.mmax);
    if (o.missed_first) {
      ++rep.missed_first;
      ++rep.retried_ok;
    }
    rep.backends.push_back(o.backend);
    if (opt.keep_factors && o.group.T.cols() > 0) run.factors->groups.push_back(std::move(o.group));
  }
  for (const auto& cr : rep.colors) rep.r_total += cr.k_factors + cr.t_factors;
  rep.rel_err = rep.max_abs_err / (1.0 + mmax);
  rep.verified = rep.max_abs_err <= opt.tol * (1.0 + mmax);
  rep.ok = rep.verified;
  if (!rep.verified) {
    rep.failure_code = "VerificationFailed";
    rep.failure_stage = "verification";
    rep.failure = "reconstruction error " + std::to_string(rep.max_abs_err);
  }
  return run;
}

// Regular hexagon: 6x6 slack matrix of rank 3, factored at the smallest inner dimension whose
// best ANLS run reconstructs it within tol (absolute).
struct HexagonDemo {
  Matrix M;
  int rank_M = 0;
  NonnegFactorization F;
  int r = 0;
  double max_abs_err = 0.0;
  std::vector<double> best_err_by_rank;  // index r-1
  bool pass = false;
};

inline HexagonDemo hexagon_demo(double tol = 1e-8, AnlsOptions opt = {}) {
  HexagonDemo out;
  std::vector<double> a;
  std::vector<int> all;
  for (int i = 0; i < 6; ++i) {
    a.push_back(i * two_pi / 6);
    all.push_back(i);
  }
  out.M = cyclic_slack_block(a, all, all);
  out.rank_M = numerical_rank(out.M);
  const double mmax = out.M.maxCoeff();
  opt.target = 0.01 * tol / (1.0 + mmax);
  for (int r = 1; r <= 6; ++r) {
    double e = 0.0;
    NonnegFactorization F;
    if (r < out.rank_M) {
      e = std::numeric_limits<double>::infinity();
    } else if (r == 6) {
      F = NonnegFactorization{out.M, Matrix::Identity(6, 6), {}};
    } else {
      auto res = anls(out.M, r, opt);
      F = std::move(res.F);
      e = (out.M - F.T * F.U).cwiseAbs().maxCoeff();
    }
    out.best_err_by_rank.push_back(e);
    if (e <= tol) {
      out.F = std::move(F);
      out.r = r;
      out.max_abs_err = e;
      out.pass = out.F.T.minCoeff() >= 0.0 && out.F.U.minCoeff() >= 0.0;
      break;
    }
  }
  return out;
}

}  // namespace xcforge
