#pragma once

#include "xcforge/caps_cover.hpp"
#include "xcforge/core/factorization.hpp"
#include "xcforge/core/hull.hpp"
#include "xcforge/core/io.hpp"
#include "xcforge/core/parallel.hpp"
#include "xcforge/core/rng.hpp"
#include "xcforge/core/slack.hpp"
#include "xcforge/core/sphere.hpp"
#include "xcforge/core/types.hpp"
#include "xcforge/lampshade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace xcforge {

enum class SampleMode { Sphere, Ball };

struct PipelineConfig {
  int d = 2;
  long long n = 1000;  // points sampled; m in ball mode
  SampleMode mode = SampleMode::Sphere;
  std::uint64_t seed = 1;
  std::optional<double> epsilon;
  double near_factor = 5.0;
  double tol = 1e-8;
  std::size_t cap_limit = 0;  // max |V^a| before CapOverflow, 0 = unlimited
  bool keep_factors = false;

  // n in sphere mode, m^((d-1)/(d+1)) in ball mode
  double nominal_n() const {
    if (mode == SampleMode::Sphere) return static_cast<double>(n);
    return std::pow(static_cast<double>(n), static_cast<double>(d - 1) / (d + 1));
  }
  double eps() const {
    return epsilon ? *epsilon : std::pow(nominal_n(), -1.0 / (2.0 * (d - 1)));
  }
  // same-colour caps must stay this many eps apart
  double separation_factor() const { return 6.0 * near_factor; }

  void validate() const {
    if (d != 2 && d != 3) throw Error(ErrorCode::ConfigInvalid, "d must be 2 or 3");
    if (n < d + 1) throw Error(ErrorCode::ConfigInvalid, "need at least d+1 points");
    const double e = eps();
    if (!(e > 0.0 && e < std::numbers::pi / 50.0))
      throw Error(ErrorCode::ConfigInvalid, "epsilon " + std::to_string(e) + " is not in (0, pi/50)");
    if (!(near_factor >= 5.0 && near_factor < 10.0))
      throw Error(ErrorCode::ConfigInvalid, "near_factor must lie in [5, 10)");
    if (!(tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tol must be positive");
  }
};

inline std::string to_string(SampleMode m) { return m == SampleMode::Sphere ? "sphere" : "ball"; }

inline Polytope sample_polytope(const PipelineConfig& cfg) {
  cfg.validate();
  auto g = substream(cfg.seed, "sample");
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(cfg.n));
  for (long long i = 0; i < cfg.n; ++i) {
    Point p(cfg.d);
    double s;
    do {
      for (int k = 0; k < cfg.d; ++k) p(k) = gauss(g);
      s = p.norm();
    } while (s < 1e-300);
    p /= s;
    if (cfg.mode == SampleMode::Ball) p *= std::pow(unif(g), 1.0 / cfg.d);
    pts.push_back(std::move(p));
  }
  return convex_hull(pts, cfg.d);
}

struct EmpiricalStats {
  double max_facet_cap_radius = 0.0;
  std::size_t max_cap_vertices = 0;
  double cap_vertices_ratio = 0.0;  // max |V^a| / sqrt(#vertices)
  bool facet_hypothesis = true;     // every facet cap radius <= eps/2
  bool cap_hypothesis = true;       // max |V^a| within cap_limit
};

inline EmpiricalStats empirical_checks(const Polytope& P, const CapSet& A, double near_factor = 5.0,
                                       std::size_t cap_limit = 0) {
  EmpiricalStats s;
  for (const auto& f : P.facets) {
    double r = std::numbers::pi;
    try {
      r = smaller_cap_of_hyperplane(f.plane).radius;
    } catch (const Error&) {
    }
    s.max_facet_cap_radius = std::max(s.max_facet_cap_radius, r);
  }
  s.facet_hypothesis = s.max_facet_cap_radius <= A.epsilon / 2.0;
  for (const auto& V : cap_vertex_sets(P, A, near_factor)) s.max_cap_vertices = std::max(s.max_cap_vertices, V.size());
  s.cap_vertices_ratio = static_cast<double>(s.max_cap_vertices) / std::sqrt(static_cast<double>(P.num_vertices()));
  s.cap_hypothesis = cap_limit == 0 || s.max_cap_vertices <= cap_limit;
  return s;
}

// Everything one colour class needs; facets with owner -1 are left out. Vertex and facet ids refer to P.
struct ColorData {
  int color = 0;
  std::vector<int> caps;                   // ids into A
  std::vector<std::vector<int>> facets;    // F^a per cap
  std::vector<std::vector<int>> near;      // V^a per cap, in phi order
  std::vector<int> vc;                     // V_c sorted
  std::vector<int> wc;                     // V \ V_c sorted
};

struct TVectors {
  std::vector<int> cols;   // F_c
  Matrix t;                // N x |F_c|, row i-1 is t^(i)
  std::vector<int> rows;   // V_c
  std::vector<int> label;  // phi(v), 1-based, parallel to rows
  int N() const { return static_cast<int>(t.rows()); }
};

namespace detail {

inline double direction_angle(const Point& v, const Point& a) {
  const double s = v.norm();
  return s > 0.0 ? spherical_distance(v / s, a) : std::numbers::pi / 2.0;
}

}  // namespace detail

// V^a sorted by spherical distance to a, ties by index
inline std::vector<int> phi_order(const Polytope& P, const Point& a, std::vector<int> V) {
  std::vector<std::pair<double, int>> key;
  key.reserve(V.size());
  for (int v : V) key.emplace_back(detail::direction_angle(P.vertices[v], a), v);
  std::sort(key.begin(), key.end());
  for (std::size_t i = 0; i < V.size(); ++i) V[i] = key[i].second;
  return V;
}

inline std::vector<ColorData> color_classes(const Polytope& P, const CapSet& A, const Coloring& C,
                                            const std::vector<int>& owner, double near_factor) {
  std::vector<ColorData> out(static_cast<std::size_t>(C.chi));
  std::vector<int> slot(A.centers.size(), -1);
  for (int c = 0; c < C.chi; ++c) out[c].color = c;
  for (std::size_t a = 0; a < A.centers.size(); ++a) {
    auto& cd = out[C.color[a]];
    slot[a] = static_cast<int>(cd.caps.size());
    cd.caps.push_back(static_cast<int>(a));
    cd.facets.emplace_back();
    cd.near.emplace_back();
  }
  for (std::size_t f = 0; f < owner.size(); ++f)
    if (owner[f] >= 0) out[C.color[owner[f]]].facets[slot[owner[f]]].push_back(static_cast<int>(f));
  const auto near = cap_vertex_sets(P, A, near_factor);
  for (std::size_t a = 0; a < A.centers.size(); ++a)
    out[C.color[a]].near[slot[a]] = phi_order(P, A.centers[a], near[a]);
  for (auto& cd : out) {
    std::vector<char> in(P.num_vertices(), 0);
    for (const auto& V : cd.near)
      for (int v : V) {
        if (in[v]) throw Error(ErrorCode::CapOverflow, "vertex " + std::to_string(v) + " lies in two same-colour caps");
        in[v] = 1;
      }
    for (std::size_t v = 0; v < in.size(); ++v) (in[v] ? cd.vc : cd.wc).push_back(static_cast<int>(v));
  }
  return out;
}

inline TVectors make_tvectors(const Polytope& P, const ColorData& cd) {
  TVectors T;
  std::size_t N = 0;
  for (std::size_t s = 0; s < cd.caps.size(); ++s) {
    N = std::max(N, cd.near[s].size());
    T.cols.insert(T.cols.end(), cd.facets[s].begin(), cd.facets[s].end());
  }
  T.t = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(T.cols.size()));
  Eigen::Index off = 0;
  for (std::size_t s = 0; s < cd.caps.size(); ++s) {
    const auto& F = cd.facets[s];
    const auto& V = cd.near[s];
    for (std::size_t i = 0; i < V.size(); ++i) {
      T.rows.push_back(V[i]);
      T.label.push_back(static_cast<int>(i) + 1);
      for (std::size_t j = 0; j < F.size(); ++j)
        T.t(static_cast<Eigen::Index>(i), off + static_cast<Eigen::Index>(j)) =
            clamped_slack(P.facets[F[j]].plane, P.vertices[V[i]]);
    }
    off += static_cast<Eigen::Index>(F.size());
  }
  return T;
}

// Rows V_c \ V^a for cap slot s, with Subtract(x_v) where phi(v) <= |V^a|.
inline void k_rows(const ColorData& cd, std::size_t s, const std::vector<int>& phi_of,
                   std::vector<int>& rows, std::vector<RowSpec>& spec) {
  const auto& Va = cd.near[s];
  std::vector<char> own(phi_of.size(), 0);
  for (int v : Va) own[v] = 1;
  rows.clear();
  spec.clear();
  for (int v : cd.vc) {
    if (own[v]) continue;
    rows.push_back(v);
    RowSpec r;
    const int i = phi_of[v];
    if (i <= static_cast<int>(Va.size())) r.subtract_from = Va[i - 1];
    spec.push_back(r);
  }
}

inline std::vector<int> phi_labels(const Polytope& P, const ColorData& cd) {
  std::vector<int> phi(P.num_vertices(), 0);
  for (const auto& V : cd.near)
    for (std::size_t i = 0; i < V.size(); ++i) phi[V[i]] = static_cast<int>(i) + 1;
  return phi;
}

inline FactorGroup factor_k_cap(const Polytope& P, const CapSet& A, const ColorData& cd, std::size_t s,
                                const std::vector<int>& phi, double near_factor) {
  FactorGroup g;
  g.tag = "K:cap" + std::to_string(cd.caps[s]);
  g.cols = cd.facets[s];
  std::vector<RowSpec> spec;
  k_rows(cd, s, phi, g.rows, spec);
  if (g.cols.empty() || g.rows.empty()) {
    g.T.resize(static_cast<Eigen::Index>(g.rows.size()), 0);
    g.U.resize(0, static_cast<Eigen::Index>(g.cols.size()));
    return g;
  }
  const Matrix K = shitov_target_block(P, g.rows, g.cols, spec);
  if (K.minCoeff() < -tol_geom)
    throw Error(ErrorCode::NegativeK, "K entry " + std::to_string(K.minCoeff()) + " at cap " + std::to_string(cd.caps[s]));
  const auto Q = build_lampshade(A.centers[cd.caps[s]], near_factor * A.epsilon, A.dim);
  auto F = shitov_factorize(P, g.rows, g.cols, spec, Q);
  g.T = std::move(F.T);
  g.U = std::move(F.U);
  return g;
}

inline FactorGroup factor_w_cap(const Polytope& P, const CapSet& A, const ColorData& cd, std::size_t s) {
  FactorGroup g;
  g.tag = "W:cap" + std::to_string(cd.caps[s]);
  g.rows = cd.wc;
  g.cols = cd.facets[s];
  if (g.cols.empty() || g.rows.empty()) {
    g.T.resize(static_cast<Eigen::Index>(g.rows.size()), 0);
    g.U.resize(0, static_cast<Eigen::Index>(g.cols.size()));
    return g;
  }
  const auto Q = build_lampshade(A.centers[cd.caps[s]], A.epsilon, A.dim);
  auto F = shitov_factorize(P, g.rows, g.cols, std::vector<RowSpec>(g.rows.size()), Q);
  g.T = std::move(F.T);
  g.U = std::move(F.U);
  return g;
}

// t-vector group over rows V_c and columns F_c; zero t-vectors are dropped
inline FactorGroup t_group(const TVectors& tv, int color) {
  FactorGroup g;
  g.tag = "t:color" + std::to_string(color + 1);
  g.rows = tv.rows;
  g.cols = tv.cols;
  Matrix T = Matrix::Zero(static_cast<Eigen::Index>(tv.rows.size()), tv.t.rows());
  for (std::size_t i = 0; i < tv.rows.size(); ++i) T(static_cast<Eigen::Index>(i), tv.label[i] - 1) = 1.0;
  Matrix U = tv.t;
  prune_and_clamp(T, U);
  g.T = std::move(T);
  g.U = std::move(U);
  return g;
}

// K over V_c x F_c, factored cap by cap through the near_factor*eps lampshades
inline std::pair<TVectors, BlockFactorization> build_K_and_factor(const Polytope& P, const CapSet& A,
                                                                  const ColorData& cd, double near_factor = 5.0) {
  auto tv = make_tvectors(P, cd);
  const auto phi = phi_labels(P, cd);
  BlockFactorization K;
  K.num_rows = static_cast<Eigen::Index>(P.num_vertices());
  K.num_cols = static_cast<Eigen::Index>(P.num_facets());
  for (std::size_t s = 0; s < cd.caps.size(); ++s) K.groups.push_back(factor_k_cap(P, A, cd, s, phi, near_factor));
  return {std::move(tv), std::move(K)};
}

// the K matrix itself, for checks; rows V_c, columns F_c
inline Matrix k_matrix(const Polytope& P, const ColorData& cd, const TVectors& tv) {
  std::vector<int> pos(P.num_vertices(), -1);
  for (std::size_t i = 0; i < tv.rows.size(); ++i) pos[tv.rows[i]] = tv.label[i];
  Matrix K(static_cast<Eigen::Index>(cd.vc.size()), static_cast<Eigen::Index>(tv.cols.size()));
  for (std::size_t i = 0; i < cd.vc.size(); ++i)
    for (std::size_t j = 0; j < tv.cols.size(); ++j) {
      const int v = cd.vc[i];
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          clamped_slack(P.facets[tv.cols[j]].plane, P.vertices[v]) -
          (pos[v] <= tv.N() ? tv.t(pos[v] - 1, static_cast<Eigen::Index>(j)) : 0.0);
    }
  return K;
}

struct ColorReport {
  int color = 0;  // 1-based
  std::size_t caps = 0;
  std::size_t facets = 0;
  long long w_factors = 0;
  long long k_factors = 0;
  long long t_factors = 0;
  int N = 0;
};

struct PipelineReport {
  int d = 0;
  std::string mode;
  long long samples = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double nominal_n = 0.0;
  std::size_t vertices = 0;
  std::size_t facets = 0;
  std::size_t caps = 0;
  int chi = 0;
  int R = 0;
  EmpiricalStats stats;
  std::vector<ColorReport> colors;
  long long r_total = 0;
  long long r_bound = 0;  // chi * (2 |A| R + N_max)
  double r_over_sqrt_n = 0.0;
  double max_abs_err = 0.0;
  double rel_err = 0.0;
  bool verified = false;
  bool ok = false;
  std::string failure_code;
  std::string failure;
};

class PipelineFailure : public Error {
 public:
  PipelineFailure(ErrorCode c, const std::string& msg, PipelineReport rep)
      : Error(c, msg), report_(std::move(rep)) {}
  const PipelineReport& report() const { return report_; }

 private:
  PipelineReport report_;
};

struct RandomRun {
  Polytope polytope;
  CapSet caps;
  Coloring coloring;
  std::optional<BlockFactorization> factors;  // only with keep_factors
  PipelineReport report;
};

namespace detail {

struct CapOutcome {
  long long rw = 0, rk = 0;
  double err = 0.0, mmax = 0.0;
  std::optional<FactorGroup> w, k;
};

// builds both groups of one cap and checks M[:, F^a] against W + K + t rows
inline CapOutcome run_cap(const Polytope& P, const CapSet& A, const ColorData& cd, std::size_t s,
                          const std::vector<int>& phi, const TVectors& tv, const std::vector<int>& tcol,
                          double near_factor, bool keep) {
  CapOutcome out;
  if (cd.facets[s].empty()) return out;
  auto w = factor_w_cap(P, A, cd, s);
  auto k = factor_k_cap(P, A, cd, s, phi, near_factor);
  out.rw = w.T.cols();
  out.rk = k.T.cols();
  std::vector<int> all(P.num_vertices());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  Matrix M = slack_block(P, all, cd.facets[s]).entries;
  out.mmax = M.size() ? M.maxCoeff() : 0.0;
  auto subtract = [&](const FactorGroup& g) {
    if (g.T.cols() == 0) return;
    const Matrix TU = g.T * g.U;
    for (std::size_t i = 0; i < g.rows.size(); ++i) M.row(g.rows[i]) -= TU.row(static_cast<Eigen::Index>(i));
  };
  subtract(w);
  subtract(k);
  for (std::size_t i = 0; i < tv.rows.size(); ++i)
    for (std::size_t j = 0; j < cd.facets[s].size(); ++j)
      M(tv.rows[i], static_cast<Eigen::Index>(j)) -= tv.t(tv.label[i] - 1, tcol[cd.facets[s][j]]);
  out.err = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
  if (keep) {
    out.w = std::move(w);
    out.k = std::move(k);
  }
  return out;
}

}  // namespace detail

inline json report_to_json(const PipelineReport& r) {
  json j;
  j["d"] = r.d;
  j["mode"] = r.mode;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["epsilon"] = r.epsilon;
  j["nominal_n"] = r.nominal_n;
  j["vertices"] = r.vertices;
  j["facets"] = r.facets;
  j["caps"] = r.caps;
  j["chi"] = r.chi;
  j["R"] = r.R;
  j["stats"] = {{"max_facet_cap_radius", r.stats.max_facet_cap_radius},
                {"max_cap_vertices", r.stats.max_cap_vertices},
                {"cap_vertices_ratio", r.stats.cap_vertices_ratio},
                {"facet_hypothesis", r.stats.facet_hypothesis},
                {"cap_hypothesis", r.stats.cap_hypothesis}};
  j["colors"] = json::array();
  for (const auto& c : r.colors)
    j["colors"].push_back({{"color", c.color},
                           {"caps", c.caps},
                           {"facets", c.facets},
                           {"w_factors", c.w_factors},
                           {"k_factors", c.k_factors},
                           {"t_factors", c.t_factors},
                           {"N", c.N}});
  j["r_total"] = r.r_total;
  j["r_bound"] = r.r_bound;
  j["r_over_sqrt_n"] = r.r_over_sqrt_n;
  j["max_abs_err"] = r.max_abs_err;
  j["rel_err"] = r.rel_err;
  j["verified"] = r.verified;
  j["ok"] = r.ok;
  if (!r.ok) j["failure"] = {{"code", r.failure_code}, {"message", r.failure}};
  return j;
}

// Full pipeline. Verification runs cap by cap over M[:, F^a], so the dense factors are only
// materialised with keep_factors.
inline RandomRun xc_factorize_random(const PipelineConfig& cfg) {
  cfg.validate();
  RandomRun run;
  auto& rep = run.report;
  rep.d = cfg.d;
  rep.mode = to_string(cfg.mode);
  rep.samples = cfg.n;
  rep.seed = cfg.seed;
  rep.epsilon = cfg.eps();
  rep.nominal_n = cfg.nominal_n();
  rep.R = cfg.d == 2 ? 4 : 16;
  auto fail = [&](ErrorCode c, const std::string& msg) {
    rep.ok = false;
    rep.failure_code = to_string(c);
    rep.failure = msg;
    throw PipelineFailure(c, msg, rep);
  };

  run.polytope = sample_polytope(cfg);
  const Polytope& P = run.polytope;
  rep.vertices = P.num_vertices();
  rep.facets = P.num_facets();

  // facet caps, largest first, seed the centre set
  std::vector<std::pair<double, int>> by_radius;
  std::vector<Point> centers(P.num_facets());
  for (std::size_t f = 0; f < P.num_facets(); ++f) {
    try {
      const Cap c = smaller_cap_of_hyperplane(P.facets[f].plane);
      centers[f] = c.center;
      by_radius.emplace_back(-c.radius, static_cast<int>(f));
    } catch (const Error&) {
    }
  }
  std::sort(by_radius.begin(), by_radius.end());
  std::vector<Point> priority;
  for (const auto& [r, f] : by_radius) priority.push_back(centers[f]);
  auto g = substream(cfg.seed, "caps");
  run.caps = maximal_separated_set(rep.epsilon, cfg.d, g, priority);
  const CapSet& A = run.caps;
  rep.caps = A.centers.size();
  run.coloring = color_caps(A, cfg.separation_factor());
  rep.chi = run.coloring.chi;
  rep.stats = empirical_checks(P, A, cfg.near_factor, cfg.cap_limit);

  const auto assignment = try_assign_facets(P, A);
  if (!assignment.failed.empty())
    fail(ErrorCode::NoCapFits, std::to_string(assignment.failed.size()) + " facets fit no cap of radius eps");
  if (!rep.stats.cap_hypothesis)
    fail(ErrorCode::CapOverflow, "a near cap holds " + std::to_string(rep.stats.max_cap_vertices) + " vertices");

  std::vector<ColorData> classes;
  try {
    classes = color_classes(P, A, run.coloring, assignment.owner, cfg.near_factor);
  } catch (const Error& e) {
    fail(e.code(), e.what());
  }

  struct Job {
    std::size_t c, s;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t s = 0; s < classes[c].caps.size(); ++s)
      if (!classes[c].facets[s].empty()) jobs.push_back({c, s});

  std::vector<TVectors> tvs(classes.size());
  std::vector<std::vector<int>> phis(classes.size());
  std::vector<int> tcol(P.num_facets(), -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    tvs[c] = make_tvectors(P, classes[c]);
    phis[c] = phi_labels(P, classes[c]);
    for (std::size_t j = 0; j < tvs[c].cols.size(); ++j) tcol[tvs[c].cols[j]] = static_cast<int>(j);
  }

  std::vector<detail::CapOutcome> outcomes(jobs.size());
  try {
    parallel_for(jobs.size(), [&](std::size_t i) {
      outcomes[i] = detail::run_cap(P, A, classes[jobs[i].c], jobs[i].s, phis[jobs[i].c], tvs[jobs[i].c], tcol,
                                    cfg.near_factor, cfg.keep_factors);
    });
  } catch (const Error& e) {
    fail(e.code(), e.what());
  }

  if (cfg.keep_factors) {
    run.factors.emplace();
    run.factors->num_rows = static_cast<Eigen::Index>(P.num_vertices());
    run.factors->num_cols = static_cast<Eigen::Index>(P.num_facets());
  }
  double mmax = 0.0;
  std::size_t N_max = 0;
  rep.colors.resize(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& cr = rep.colors[c];
    cr.color = static_cast<int>(c) + 1;
    cr.caps = classes[c].caps.size();
    cr.facets = tvs[c].cols.size();
    cr.N = tvs[c].N();
    N_max = std::max<std::size_t>(N_max, static_cast<std::size_t>(cr.N));
    auto tg = t_group(tvs[c], static_cast<int>(c));
    cr.t_factors = tg.T.cols();
    if (cfg.keep_factors && tg.T.cols() > 0) run.factors->groups.push_back(std::move(tg));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& o = outcomes[i];
    auto& cr = rep.colors[jobs[i].c];
    cr.w_factors += o.rw;
    cr.k_factors += o.rk;
    rep.max_abs_err = std::max(rep.max_abs_err, o.err);
    mmax = std::max(mmax, o.mmax);
    if (cfg.keep_factors) {
      if (o.w && o.w->T.cols() > 0) run.factors->groups.push_back(std::move(*o.w));
      if (o.k && o.k->T.cols() > 0) run.factors->groups.push_back(std::move(*o.k));
    }
  }
  for (const auto& cr : rep.colors) rep.r_total += cr.w_factors + cr.k_factors + cr.t_factors;
  rep.r_bound = static_cast<long long>(rep.chi) *
                (2LL * static_cast<long long>(A.centers.size()) * rep.R + static_cast<long long>(N_max));
  rep.r_over_sqrt_n = static_cast<double>(rep.r_total) / std::sqrt(rep.nominal_n);
  rep.rel_err = rep.max_abs_err / (1.0 + mmax);
  rep.verified = rep.max_abs_err <= cfg.tol * (1.0 + mmax);
  rep.ok = rep.verified;
  if (!rep.verified) {
    rep.failure_code = "VerificationFailed";
    rep.failure = "reconstruction error " + std::to_string(rep.max_abs_err);
  }
  return run;
}

}  // namespace xcforge
