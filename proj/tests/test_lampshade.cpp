#include "xcforge/caps_cover.hpp"
#include "xcforge/core/hull.hpp"
#include "xcforge/lampshade.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace xcforge;

namespace {

Point unit(int d, std::mt19937_64& g) { return detail::random_on_sphere(d, g); }

// point at spherical distance t from a in a random direction
Point at_distance(const Point& a, double t, std::mt19937_64& g) {
  Point u = unit(static_cast<int>(a.size()), g);
  u -= u.dot(a) * a;
  u.normalize();
  return std::cos(t) * a + std::sin(t) * u;
}

// Independent membership oracle from the parametric form Q = {z + t(z - a) : z in P_Z, t >= 0}.
// Returns -1 outside, +1 inside, 0 too close to call.
int parametric_membership(const Lampshade& Q, const Point& p) {
  const double h = std::cos(2 * Q.eps);
  const double denom = h - Q.apex.dot(Q.apex);  // h - 1 < 0
  const double s = Q.apex.dot(p - Q.apex) / denom;
  if (s < 1 - 1e-7) return s < 1 - 1e-6 ? -1 : 0;
  const Point z = Q.apex + (p - Q.apex) / s;
  const Point b = Q.centre_z();
  const Point w = z - b;
  double margin;
  if (Q.dim == 2) {
    margin = Q.radius_z() - w.norm();
  } else {
    // octagon: inside iff the projection on every edge normal is below the apothem
    auto [u, v] = detail::complement_basis(Q.apex.head<3>());
    // recover the octagon frame from the first vertex
    const Point e0 = (Q.pz[0] - b) / Q.radius_z();
    const Point e1 = Point(Eigen::Vector3d(Q.apex.head<3>().cross(e0.head<3>())));
    margin = 1e300;
    for (int i = 0; i < 8; ++i) {
      const double t = 2 * std::numbers::pi * (i + 0.5) / 8;
      const Point nrm = std::cos(t) * e0 + std::sin(t) * e1;
      margin = std::min(margin, Q.radius_z() * std::cos(std::numbers::pi / 8) - w.dot(nrm));
    }
    (void)u;
    (void)v;
  }
  if (std::abs(margin) < 1e-7) return 0;
  return margin > 0 ? 1 : -1;
}

Polytope random_polytope(int d, int n, bool ball, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<Point> pts;
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < n; ++i) {
    Point p = unit(d, g);
    if (ball) p *= std::pow(U(g), 1.0 / d);
    pts.push_back(p);
  }
  return convex_hull(pts, d);
}

}  // namespace

TEST(BuildLampshade, ShapesAndInvariants) {
  std::mt19937_64 g(1);
  for (int d : {2, 3}) {
    for (double eps : {0.01, 0.1, 0.5}) {
      const Point a = unit(d, g);
      auto Q = build_lampshade(a, eps, d);
      EXPECT_EQ(Q.R(), d == 2 ? 4 : 16);
      EXPECT_EQ(Q.halfspaces.size(), d == 2 ? 3u : 9u);
      for (const auto& z : Q.pz) EXPECT_NEAR(spherical_distance(Q.apex, z), 2 * eps, tol_geom);
      for (const auto& h : Q.halfspaces) EXPECT_GT(h.slack(Point::Zero(d)), 0.0);
      EXPECT_GE(pz_inradius(Q), Q.radius_z() / 2);
      EXPECT_LE(cone_geometry_max_distance(Q), 2 * eps + tol_geom);
    }
  }
}

TEST(BuildLampshade, Errors) {
  Point a = Point::Unit(3, 0);
  EXPECT_THROW(build_lampshade(a, std::numbers::pi / 5, 3), Error);
  EXPECT_THROW(build_lampshade(a, 0.0, 3), Error);
  EXPECT_THROW(build_lampshade(Point::Unit(4, 0), 0.1, 4), Error);
  EXPECT_THROW(build_lampshade(2 * a, 0.1, 3), Error);
}

TEST(BuildLampshade, HalfspacesMatchParametricForm) {
  std::mt19937_64 g(2);
  for (int d : {2, 3}) {
    auto Q = build_lampshade(unit(d, g), 0.1, d);
    int agree = 0;
    for (int k = 0; k < 20000; ++k) {
      const Point p = unit(d, g) * 3.0 * std::uniform_real_distribution<double>(0, 1)(g) + 0.5 * Q.apex;
      const int o = parametric_membership(Q, p);
      if (o == 0) continue;
      EXPECT_EQ(inside_lampshade(Q, p, 0.0), o > 0);
      ++agree;
    }
    EXPECT_GT(agree, 19000);
  }
}

TEST(ConditionOne, RandomEncapsulatedHyperplanes) {
  for (int d : {2, 3}) {
    std::mt19937_64 g(10 + d);
    const double eps = 0.1;
    const Point a = unit(d, g);
    auto Q = build_lampshade(a, eps, d);
    std::uniform_real_distribution<double> U(0, 1);
    int ok = 0;
    for (int k = 0; k < 10000; ++k) {
      const double delta = eps * U(g);
      const double rho = (eps - delta) * std::max(U(g), 1e-6);
      const Point q = at_distance(a, delta, g);
      Hyperplane h{q, std::cos(rho)};
      if (k % 2) h = Hyperplane{-2.0 * q, -2.0 * std::cos(rho)};  // same plane, other orientation
      ok += check_condition_i(Q, h);
    }
    EXPECT_EQ(ok, 10000);
  }
}

TEST(ConditionOne, NotEncapsulatedIsRejected) {
  auto Q = build_lampshade(Point::Unit(3, 0), 0.1, 3);
  EXPECT_THROW(check_condition_i(Q, Hyperplane{Point::Unit(3, 0), 0.5}), Error);
  EXPECT_THROW(check_condition_i(Q, Hyperplane{Point::Unit(3, 1), 0.999}), Error);
}

TEST(ConditionTwo, RaysFromXThroughYStayInQ) {
  for (int d : {2, 3}) {
    std::mt19937_64 g(20 + d);
    const double eps = 0.1;
    const Point a = unit(d, g);
    auto Q = build_lampshade(a, eps, d);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 2000; ++k) {
      // x: convex combination of cap points (rim included), y: sphere or ball point outside 5 eps
      Point x = Point::Zero(d);
      double wsum = 0;
      for (int j = 0; j < 3; ++j) {
        const double w = U(g);
        x += w * at_distance(a, eps * (k % 3 == 0 ? 1.0 : U(g)), g);
        wsum += w;
      }
      x /= wsum;
      if (k % 5 == 0) x = at_distance(a, eps, g);
      Point y;
      do {
        y = unit(d, g) * (k % 2 ? std::pow(U(g), 1.0 / d) : 1.0);
      } while (y.dot(a) > std::cos(5 * eps));
      if (k % 7 == 0) y = at_distance(a, 5 * eps, g);
      EXPECT_TRUE(check_condition_ii(Q, x, y, {0.0, 1.0, 10.0, 1000.0}));
    }
  }
}

TEST(ConditionTwo, Preconditions) {
  const Point a = Point::Unit(2, 0);
  auto Q = build_lampshade(a, 0.1, 2);
  EXPECT_THROW(check_condition_ii(Q, a, a, {0.0}), Error);
  EXPECT_THROW(check_condition_ii(Q, -a, -a, {0.0}), Error);
}

TEST(ConicDecompose, Examples) {
  std::mt19937_64 g(3);
  for (int d : {2, 3}) {
    auto Q = build_lampshade(unit(d, g), 0.1, d);
    auto c = conic_decompose(Q.pz[1], Q, ConicMode::Point);
    for (int i = 0; i < Q.k(); ++i) EXPECT_NEAR(c.vertex_weights[i], i == 1 ? 1.0 : 0.0, 1e-12);
    for (double w : c.ray_weights) EXPECT_NEAR(w, 0.0, 1e-12);
    auto m = conic_decompose(0.5 * (Q.pz[0] + Q.pz[1]), Q, ConicMode::Point);
    EXPECT_NEAR(m.vertex_weights[0], 0.5, 1e-12);
    EXPECT_NEAR(m.vertex_weights[1], 0.5, 1e-12);
  }
}

// in d = 2 the sums lambda_i + mu_i and mu_0 + mu_1 are determined by the target; compare them with
// the closed form y = s z + (1 - s) a from the parametric oracle
TEST(ConicDecompose, MatchesClosedFormInTheLine) {
  std::mt19937_64 g(4);
  const double eps = 0.05;
  const Point a = unit(2, g);
  auto Q = build_lampshade(a, eps, 2);
  for (int k = 0; k < 2000; ++k) {
    Point y;
    do {
      y = unit(2, g) * std::sqrt(std::uniform_real_distribution<double>(0, 1)(g));
    } while (y.dot(a) > std::cos(5 * eps));
    auto c = conic_decompose(y, Q, ConicMode::Point);
    EXPECT_LE(c.residual, 1e-9);
    const double s = a.dot(y - a) / (std::cos(2 * eps) - 1.0);
    const Point z = a + (y - a) / s;
    const double lam0 = (z - Q.pz[1]).dot(Q.pz[0] - Q.pz[1]) / (Q.pz[0] - Q.pz[1]).squaredNorm();
    const double scale = 1e-9 * s;
    EXPECT_NEAR(c.vertex_weights[0] + c.ray_weights[0], s * lam0, scale);
    EXPECT_NEAR(c.vertex_weights[1] + c.ray_weights[1], s * (1 - lam0), scale);
    EXPECT_NEAR(c.ray_weights[0] + c.ray_weights[1], s - 1, scale);
  }
}

TEST(ConicDecompose, RecombinesInThreeDimensions) {
  std::mt19937_64 g(5);
  const double eps = 0.05;
  const Point a = unit(3, g);
  auto Q = build_lampshade(a, eps, 3);
  for (int k = 0; k < 2000; ++k) {
    Point y;
    do {
      y = unit(3, g) * std::cbrt(std::uniform_real_distribution<double>(0, 1)(g));
    } while (y.dot(a) > std::cos(5 * eps));
    for (auto mode : {ConicMode::Point, ConicMode::Direction}) {
      const Point target = mode == ConicMode::Point ? y : Point(y - at_distance(a, eps * 0.7, g));
      auto c = conic_decompose(target, Q, mode);
      Point r = Point::Zero(3);
      double sum = 0;
      for (int i = 0; i < Q.k(); ++i) {
        EXPECT_GE(c.vertex_weights[i], 0.0);
        EXPECT_GE(c.ray_weights[i], 0.0);
        r += c.vertex_weights[i] * Q.pz[i] + c.ray_weights[i] * Q.rays[i];
        sum += c.vertex_weights[i];
      }
      EXPECT_LE((r - target).norm(), 1e-9);
      EXPECT_NEAR(sum, mode == ConicMode::Point ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(ConicDecompose, OutsideThrows) {
  auto Q = build_lampshade(Point::Unit(3, 2), 0.1, 3);
  EXPECT_THROW(conic_decompose(Point::Unit(3, 2), Q, ConicMode::Point), Error);
  EXPECT_THROW(conic_decompose(Point::Unit(3, 2), Q, ConicMode::Direction), Error);
}

TEST(ShitovFactorize, EmptyFacetSet) {
  auto P = random_polytope(2, 100, false, 1);
  auto Q = build_lampshade(P.vertices[0], 0.05, 2);
  auto F = shitov_factorize(P, {1, 2}, {}, {RowSpec{}, RowSpec{}}, Q);
  EXPECT_EQ(F.r(), 0);
}

namespace {

// apex and eps chosen around a random facet so the block is never empty
std::pair<Point, double> cap_around_facet(const Polytope& P, std::mt19937_64& g, double min_eps) {
  const auto& h = P.facets[std::uniform_int_distribution<std::size_t>(0, P.num_facets() - 1)(g)].plane;
  const Cap s = smaller_cap_of_hyperplane(h);
  return {s.center, std::max(min_eps, 1.2 * s.radius)};
}

struct Block {
  std::vector<int> rows, cols, xs;
};

Block block_for(const Polytope& P, const Point& a, double eps) {
  Block B;
  for (std::size_t f = 0; f < P.num_facets(); ++f)
    if (encapsulated(P.facets[f].plane, Cap{a, eps})) B.cols.push_back(static_cast<int>(f));
  for (std::size_t v = 0; v < P.num_vertices(); ++v) {
    if (P.vertices[v].dot(a) <= std::cos(5 * eps)) B.rows.push_back(static_cast<int>(v));
    if (in_solid_cap(P.vertices[v], Cap{a, eps})) B.xs.push_back(static_cast<int>(v));
  }
  return B;
}

}  // namespace

TEST(ShitovFactorize, PlainRowsReconstruct) {
  for (int d : {2, 3}) {
    for (bool ball : {false, true}) {
      auto P = random_polytope(d, d == 2 ? 3000 : 20000, ball, 7 + d);
      std::mt19937_64 g(d);
      for (int trial = 0; trial < 5; ++trial) {
        auto [a, eps] = cap_around_facet(P, g, d == 2 ? 0.02 : 0.1);
        ASSERT_LT(eps, std::numbers::pi / 5);
        auto B = block_for(P, a, eps);
        ASSERT_FALSE(B.cols.empty());
        auto Q = build_lampshade(a, eps, d);
        std::vector<RowSpec> spec(B.rows.size());
        auto F = shitov_factorize(P, B.rows, B.cols, spec, Q);
        EXPECT_LE(F.r(), Q.R());
        auto rep = verify_factorization(shitov_target_block(P, B.rows, B.cols, spec), F, 1e-9);
        EXPECT_TRUE(rep.pass) << rep.max_abs_err;
        EXPECT_LE(rep.max_abs_err, 1e-9);
      }
    }
  }
}

TEST(ShitovFactorize, SubtractRowsReconstruct) {
  for (int d : {2, 3}) {
    auto P = random_polytope(d, d == 2 ? 5000 : 20000, false, 3);
    std::mt19937_64 g(9);
    for (int trial = 0; trial < 5; ++trial) {
      auto [a, eps] = cap_around_facet(P, g, d == 2 ? 0.02 : 0.1);
      auto B = block_for(P, a, eps);
      ASSERT_FALSE(B.xs.empty());
      std::vector<RowSpec> spec(B.rows.size());
      for (std::size_t i = 0; i < B.rows.size(); ++i)
        if (i % 2) spec[i].subtract_from = B.xs[i % B.xs.size()];
      auto Q = build_lampshade(a, eps, d);
      auto F = shitov_factorize(P, B.rows, B.cols, spec, Q);
      auto rep = verify_factorization(shitov_target_block(P, B.rows, B.cols, spec), F, 1e-9);
      EXPECT_TRUE(rep.pass) << rep.max_abs_err;
    }
  }
}

// equal slack rows only arise for a zero direction v - x_v; it decomposes with zero weights
TEST(ShitovFactorize, ZeroDirectionGivesZeroCoefficients) {
  auto Q = build_lampshade(Point::Unit(3, 1), 0.1, 3);
  auto c = conic_decompose(Point::Zero(3), Q, ConicMode::Direction);
  for (double w : c.vertex_weights) EXPECT_EQ(w, 0.0);
  for (double w : c.ray_weights) EXPECT_EQ(w, 0.0);
}

TEST(ShitovFactorize, GeneratorSlacksNonnegativeAndErrors) {
  auto P = random_polytope(3, 20000, false, 4);
  std::mt19937_64 g(6);
  const Point a = unit(3, g);
  const double eps = 0.25;
  auto Q = build_lampshade(a, eps, 3);
  std::vector<int> cols, bad;
  for (std::size_t f = 0; f < P.num_facets(); ++f) {
    if (encapsulated(P.facets[f].plane, Cap{a, eps})) cols.push_back(static_cast<int>(f));
    else if (bad.empty()) bad.push_back(static_cast<int>(f));
  }
  for (int f : cols) {
    const auto& h = P.facets[f].plane;
    for (int i = 0; i < Q.k(); ++i) {
      EXPECT_GE(h.slack(Q.pz[i]), 0.0);
      EXPECT_GE(-h.normal.dot(Q.rays[i]), 0.0);
    }
  }
  int row = -1;
  for (std::size_t v = 0; v < P.num_vertices() && row < 0; ++v)
    if (P.vertices[v].dot(a) <= std::cos(5 * eps)) row = static_cast<int>(v);
  try {
    shitov_factorize(P, {row}, bad, {RowSpec{}}, Q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EncapsulationViolated);
  }
  int near = -1;
  for (std::size_t v = 0; v < P.num_vertices() && near < 0; ++v)
    if (P.vertices[v].dot(a) > std::cos(eps)) near = static_cast<int>(v);
  ASSERT_GE(near, 0);
  EXPECT_THROW(shitov_factorize(P, {near}, cols, {RowSpec{}}, Q), Error);
}
