#include "xcforge/caps_cover.hpp"
#include "xcforge/core/hull.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace xcforge;

namespace {

// plain greedy separated set, used where eps is above the cover's admissible range
CapSet greedy_set(int d, double eps, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  CapSet A{d, eps, {}};
  for (int k = 0; k < 20000; ++k) {
    Point p = detail::random_on_sphere(d, g);
    bool ok = true;
    for (const auto& a : A.centers) ok = ok && spherical_distance(p, a) >= eps / 2;
    if (ok) A.centers.push_back(p);
  }
  return A;
}

Point on_circle(double t) {
  Point p(2);
  p << std::cos(t), std::sin(t);
  return p;
}

Polytope regular_polygon(int n, double phase = 0.0) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(on_circle(phase + 2 * std::numbers::pi * i / n));
  return convex_hull(pts, 2);
}

}  // namespace

TEST(MaximalSet, CircleCountWithinGapBounds) {
  const double eps = 0.06;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 g(seed);
    auto A = maximal_separated_set(eps, 2, g);
    // consecutive gaps of a maximal eps/2-separated set on the circle lie in [eps/2, eps)
    EXPECT_GE(A.centers.size(), static_cast<std::size_t>(std::ceil(2 * std::numbers::pi / eps)));
    EXPECT_LE(A.centers.size(), static_cast<std::size_t>(std::floor(4 * std::numbers::pi / eps)));
    EXPECT_GE(min_pairwise_distance(A), eps / 2);
  }
}

TEST(MaximalSet, SeparatedAndCoveringOnSphere) {
  std::mt19937_64 g(7);
  auto A = maximal_separated_set(0.06, 3, g);
  EXPECT_GE(min_pairwise_distance(A), 0.03);
  std::mt19937_64 probe(8);
  EXPECT_EQ(maximality_defect(A, probe, 100000), 0u);
}

TEST(MaximalSet, CircleSetHasNoUncoveredGap) {
  std::mt19937_64 g(12);
  auto A = maximal_separated_set(0.01, 2, g);
  std::vector<double> t;
  for (const auto& c : A.centers) t.push_back(std::atan2(c(1), c(0)));
  std::sort(t.begin(), t.end());
  t.push_back(t.front() + 2 * std::numbers::pi);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    EXPECT_GE(t[i + 1] - t[i], 0.005 - 1e-15);
    EXPECT_LT(t[i + 1] - t[i], 0.01 + 1e-9);
  }
}

TEST(MaximalSet, PriorityCandidatesComeFirst) {
  std::mt19937_64 g(1);
  std::vector<Point> pri{on_circle(0.3), on_circle(0.31), on_circle(2.0)};
  auto A = maximal_separated_set(0.05, 2, g, pri);
  EXPECT_NEAR((A.centers[0] - pri[0]).norm(), 0.0, 1e-15);
  EXPECT_NEAR((A.centers[1] - pri[2]).norm(), 0.0, 1e-15);  // 0.31 is too close to 0.3
  EXPECT_GE(min_pairwise_distance(A), 0.025);
}

TEST(MaximalSet, AntipodalPairIsNotMaximal) {
  CapSet A{2, 0.05, {on_circle(0), on_circle(std::numbers::pi)}};
  std::mt19937_64 g(2);
  EXPECT_GT(maximality_defect(A, g, 1000), 900u);
}

TEST(MaximalSet, BadRadius) {
  std::mt19937_64 g(1);
  EXPECT_THROW(maximal_separated_set(0.0, 2, g), Error);
  EXPECT_THROW(maximal_separated_set(std::numbers::pi / 50, 2, g), Error);
}

TEST(Coloring, Examples) {
  const double eps = 0.01;
  CapSet one{2, eps, {on_circle(0)}};
  EXPECT_EQ(color_caps(one).chi, 1);
  CapSet path{2, eps, {on_circle(0), on_circle(10 * eps), on_circle(40 * eps)}};
  auto C = color_caps(path);
  EXPECT_EQ(C.chi, 2);
  EXPECT_EQ(C.color, (std::vector<int>{0, 1, 0}));
  CapSet far{2, eps, {on_circle(0), on_circle(1), on_circle(2), on_circle(3)}};
  EXPECT_EQ(color_caps(far).chi, 1);
}

TEST(Coloring, ValidAndBoundedByDegree) {
  for (int d : {2, 3}) {
    std::mt19937_64 g(10 + d);
    auto A = d == 2 ? maximal_separated_set(0.01, 2, g) : greedy_set(3, 0.2, 4);
    auto C = color_caps(A);
    EXPECT_TRUE(coloring_valid(A, C));
    std::size_t maxdeg = 0;
    for (std::size_t i = 0; i < A.centers.size(); ++i) {
      std::size_t deg = 0;
      for (std::size_t j = 0; j < A.centers.size(); ++j)
        if (i != j && spherical_distance(A.centers[i], A.centers[j]) < 30 * A.epsilon) ++deg;
      maxdeg = std::max(maxdeg, deg);
    }
    EXPECT_LE(static_cast<std::size_t>(C.chi), 1 + maxdeg);
  }
}

// centres within 30 eps of any probe stay below the packing bound of eps/4 caps
TEST(Coloring, PropertyTwoBoundedAcrossEpsilon) {
  for (int d : {2, 3}) {
    for (double eps : {0.05, 0.02}) {
      if (d == 3 && eps < 0.05) continue;
      std::mt19937_64 g(3);
      auto A = maximal_separated_set(eps, d, g);
      std::size_t worst = 0;
      for (int k = 0; k < 1000; ++k) {
        const Point p = detail::random_on_sphere(d, g);
        std::size_t c = 0;
        for (const auto& a : A.centers)
          if (spherical_distance(p, a) <= 30 * eps) ++c;
        worst = std::max(worst, c);
      }
      const double bound = d == 2 ? 2 * 30.0 / 0.5 + 1
                                  : (1 - std::cos(30.25 * eps)) / (1 - std::cos(eps / 4));
      EXPECT_LE(static_cast<double>(worst), bound) << "d=" << d << " eps=" << eps;
      EXPECT_GT(worst, 0u);
    }
  }
}

TEST(AssignFacets, TriangleHasNoFittingCap) {
  auto P = regular_polygon(3);
  std::mt19937_64 g(1);
  auto A = maximal_separated_set(0.1 * 0.6, 2, g);
  try {
    assign_facets(P, A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCapFits);
  }
  auto R = try_assign_facets(P, A);
  EXPECT_EQ(R.failed.size(), 3u);
  for (double r : R.facet_cap_radius) EXPECT_NEAR(r, std::numbers::pi / 3, 1e-12);
}

TEST(AssignFacets, FineRegularPolygonFullyAssigned) {
  auto P = regular_polygon(10000, 0.1234);
  std::mt19937_64 g(2);
  auto A = maximal_separated_set(0.05, 2, g);
  auto owner = assign_facets(P, A);
  for (std::size_t f = 0; f < owner.size(); ++f) {
    ASSERT_GE(owner[f], 0);
    EXPECT_TRUE(encapsulated(P.facets[f].plane, Cap{A.centers[owner[f]], A.epsilon}));
  }
}

TEST(AssignFacets, LowestIndexWins) {
  auto P = regular_polygon(2000);
  const auto& h = P.facets[0].plane;
  const Cap s = smaller_cap_of_hyperplane(h);
  const double t = std::atan2(s.center(1), s.center(0));
  CapSet A{2, 0.05, {on_circle(t + 3.0), on_circle(t + 0.01), on_circle(t - 0.01), on_circle(t)}};
  auto R = try_assign_facets(P, A);
  EXPECT_EQ(R.owner[0], 1);
}

TEST(CapVertexSets, RadiusBoundary) {
  const double eps = 0.02;
  std::vector<Point> pts{on_circle(4.9 * eps), on_circle(5.1 * eps), on_circle(2.0), on_circle(4.0)};
  auto P = convex_hull(pts, 2);
  CapSet A{2, eps, {on_circle(0)}};
  auto V = cap_vertex_sets(P, A, 5.0);
  ASSERT_EQ(V[0].size(), 1u);
  EXPECT_NEAR((P.vertices[V[0][0]] - pts[0]).norm(), 0.0, 1e-15);
}

TEST(CapVertexSets, SameColourSetsAreDisjoint) {
  for (int d : {2, 3}) {
    std::mt19937_64 g(30 + d);
    std::vector<Point> pts;
    std::normal_distribution<double> N;
    for (int i = 0; i < 3000; ++i) {
      Point p(d);
      for (int k = 0; k < d; ++k) p(k) = N(g);
      pts.push_back(p.normalized() * (d == 3 ? std::cbrt(std::uniform_real_distribution<double>(0, 1)(g)) : 1.0));
    }
    auto P = convex_hull(pts, d);
    auto A = d == 2 ? maximal_separated_set(0.01, 2, g) : greedy_set(3, 0.15, 9);
    auto C = color_caps(A);
    auto V = cap_vertex_sets(P, A, 5.0);
    std::vector<int> seen(P.num_vertices() * static_cast<std::size_t>(C.chi), -1);
    for (std::size_t a = 0; a < A.centers.size(); ++a)
      for (int v : V[a]) {
        auto& s = seen[static_cast<std::size_t>(v) * C.chi + C.color[a]];
        EXPECT_EQ(s, -1);
        s = static_cast<int>(a);
      }
  }
}
