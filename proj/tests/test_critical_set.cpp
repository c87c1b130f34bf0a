#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critinv/critical_set.hpp"
#include "critinv/critical_system.hpp"
#include "support.hpp"

using namespace critinv;
using namespace critinv::testing;

namespace {

Grid linear_grid(const PlaneMap& map, int n) { return Grid::over(map.box(), n, n, false); }

double distance_to_set(const PlaneMap& map, const DomainPoint& p, const std::vector<DomainPoint>& set) {
  double best = INFINITY;
  for (const auto& q : set) best = std::min(best, map.domain_distance(p, q));
  return best;
}

std::vector<DomainPoint> all_points(const CriticalSet& cs) {
  std::vector<DomainPoint> out;
  for (const auto& c : cs.curves) out.insert(out.end(), c.points.begin(), c.points.end());
  return out;
}

}  // namespace

TEST(Grid, NodesSpanTheBox) {
  const Grid g = Grid::over({1e-5, 1e-3, 100, 300}, 5, 3, true);
  EXPECT_DOUBLE_EQ(g.V_at(0), 1e-5);
  EXPECT_NEAR(g.V_at(4), 1e-3, 1e-18);
  EXPECT_NEAR(g.V_at(2), 1e-4, 1e-18);
  EXPECT_DOUBLE_EQ(g.T_at(1), 200.0);
  Grid bad = g;
  bad.nV = 1;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(SignGrid, LineMapEdgesCountMatchesGrid) {
  const LineMap m(2.0 + 1e-3);
  const auto sg = sign_grid(m, linear_grid(m, 21), 1);
  // One column of sign changes: every T row crosses once.
  EXPECT_EQ(sg.sign_change_edges(), 21);
}

TEST(SignGrid, SingleSignRegionHasNoEdges) {
  const LineMap shifted(0.5);  // det J = V - 0.5 > 0 on [1, 3]
  const auto sg = sign_grid(shifted, linear_grid(shifted, 31), 1);
  EXPECT_EQ(sg.sign_change_edges(), 0);
  const auto br = bracket_roots(shifted, sg);
  EXPECT_TRUE(br.roots.empty());
  const auto cs = trace_critical_set(shifted, linear_grid(shifted, 31));
  EXPECT_TRUE(cs.curves.empty());
}

TEST(BracketRoots, LineRootsToMachineAccuracy) {
  for (double c : {1.37, 2.0 + 1e-3, 2.718281828}) {
    const LineMap m(c);
    const auto sg = sign_grid(m, linear_grid(m, 41), 1);
    const auto br = bracket_roots(m, sg);
    ASSERT_FALSE(br.roots.empty());
    EXPECT_EQ(br.stalls, 0);
    for (const auto& r : br.roots) EXPECT_NEAR(r.V, c, 1e-10 * c);
  }
}

TEST(BracketRoots, NestedGridFindsCoarseRoots) {
  const CircleMap m(0.7);
  const int n = 21;
  const auto coarse = bracket_roots(m, sign_grid(m, linear_grid(m, n), 1));
  const auto fine = bracket_roots(m, sign_grid(m, linear_grid(m, 2 * n - 1), 1));
  EXPECT_GE(fine.roots.size(), coarse.roots.size());
  const double cell = 2.0 / (2 * n - 2);
  for (const auto& r : coarse.roots) EXPECT_LE(distance_to_set(m, r, fine.roots), 2.0 * cell);
}

TEST(TraceCriticalCurve, LineWithinTwoSteps) {
  const LineMap m(1.9);
  const auto cs = trace_critical_set(m, linear_grid(m, 41));
  ASSERT_EQ(cs.curves.size(), 1u);
  EXPECT_FALSE(cs.curves[0].closed);
  const double step = default_step(m);
  const auto pts = all_points(cs);
  for (const auto& p : pts) EXPECT_NEAR(p.V, 1.9, 1e-8);
  // Hausdorff distance to the exact segment.
  for (int k = 0; k <= 400; ++k) {
    const DomainPoint e{1.9, 1.0 + 2.0 * k / 400.0};
    EXPECT_LE(distance_to_set(m, e, pts), 2.0 * step) << "T=" << e.T;
  }
}

TEST(TraceCriticalCurve, CircleClosesWithinTwoSteps) {
  const double R = 0.7;
  const CircleMap m(R);
  const auto cs = trace_critical_set(m, linear_grid(m, 41));
  ASSERT_EQ(cs.curves.size(), 1u);
  EXPECT_TRUE(cs.curves[0].closed);
  EXPECT_EQ(cs.lost_traces, 0);
  const double step = default_step(m);
  const auto pts = all_points(cs);
  for (const auto& p : pts) EXPECT_LE(std::abs(std::hypot(p.V - 2.0, p.T - 2.0) - R), 1e-8);
  for (int k = 0; k < 720; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 720.0;
    const DomainPoint e{2.0 + R * std::cos(a), 2.0 + R * std::sin(a)};
    EXPECT_LE(distance_to_set(m, e, pts), 2.0 * step) << "angle " << a;
  }
}

TEST(TraceCriticalCurve, SingleSeedTrace) {
  const CircleMap m(0.5);
  const auto c = trace_critical_curve(m, {2.5, 2.0});
  EXPECT_TRUE(c.closed);
  EXPECT_GT(c.points.size(), 8u);
}

TEST(TraceCriticalCurve, FoldHasTwoLines) {
  const FoldMap m;
  const auto cs = trace_critical_set(m, linear_grid(m, 31));
  ASSERT_EQ(cs.curves.size(), 2u);
  for (const auto& c : cs.curves) {
    const double x = c.points.front().V - 4.0;
    for (const auto& p : c.points) EXPECT_NEAR(p.V - 4.0, x, 1e-8);
    EXPECT_NEAR(std::abs(x), 1.0, 1e-8);
  }
}

TEST(CriticalImage, EmptyCurveHasEmptyImage) {
  const LineMap m(2.0);
  EXPECT_TRUE(critical_image(m, CriticalCurve{}).empty());
}

TEST(CriticalImage, ImageIsContinuousAlongTheCurve) {
  const CircleMap m(0.6);
  const auto cs = trace_critical_set(m, linear_grid(m, 41));
  ASSERT_EQ(cs.curves.size(), 1u);
  const auto img = critical_image(m, cs.curves[0]);
  ASSERT_EQ(img.size(), cs.curves[0].points.size());
  // |dF| <= ||J|| |du| with ||J|| bounded on the box by 4.
  const double step = default_step(m);
  for (std::size_t k = 1; k < img.size(); ++k)
    EXPECT_LE(image_distance(img[k - 1], img[k]), 4.0 * TraceParams{}.max_step_factor * step);
}

TEST(CriticalSet, RealMixtureCurvesAreCertified) {
  const CriticalContext ctx(ethane_methane(), ethane_methane_box());
  TraceParams tp;
  const auto cs = trace_critical_set(ctx, Grid::over(ctx.box(), 61, 61), tp);
  ASSERT_FALSE(cs.curves.empty());
  for (const auto& c : cs.curves) {
    for (const auto& p : c.points) {
      const double d = det_j(ctx, p);
      ASSERT_TRUE(std::isfinite(d));
      EXPECT_LE(std::abs(d), tp.curve_tol);
    }
  }
}
