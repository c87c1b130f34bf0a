#include "critinv/critical_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "critinv/detail/parallel.hpp"
#include "critinv/errors.hpp"

namespace critinv {

namespace {

using U = std::array<double, 2>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

U lerp(const U& a, const U& b, double s) { return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])}; }
double dist(const U& a, const U& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double det_scaled(const PlaneMap& map, const U& u) { return det_j(map, map.from_scaled(u)); }

// Illinois false position on the segment [a, b] with fa * fb < 0. Returns the
// first point where |det J| <= tol, or nullopt when the bracket collapses
// without a certificate (pole, discontinuity) or hits an undefined point.
std::optional<U> refine_on_segment(const PlaneMap& map, U a, double fa, U b, double fb, double tol) {
  if (std::abs(fa) <= tol) return a;
  if (std::abs(fb) <= tol) return b;
  double sa = 0.0, sb = 1.0;
  const U a0 = a, b0 = b;
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    double s = sb - fb * (sb - sa) / (fb - fa);
    const double width = sb - sa;
    // Fall back to bisection when false position leaves the inner part.
    if (!(s > sa + 0.01 * width && s < sb - 0.01 * width) || it % 8 == 7) s = 0.5 * (sa + sb);
    const U m = lerp(a0, b0, s);
    const double fm = det_scaled(map, m);
    if (!std::isfinite(fm)) return std::nullopt;
    if (std::abs(fm) <= tol) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      sa = s;
      fa = fm;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      sb = s;
      fb = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (dist(lerp(a0, b0, sa), lerp(a0, b0, sb)) < 1e-15 * (1.0 + std::hypot(a0[0], a0[1]))) break;
  }
  return std::nullopt;
}

std::optional<U> gradient_direction(const PlaneMap& map, const U& u) {
  constexpr double h = 1e-5;
  const double fxp = det_scaled(map, {u[0] + h, u[1]});
  const double fxm = det_scaled(map, {u[0] - h, u[1]});
  const double fyp = det_scaled(map, {u[0], u[1] + h});
  const double fym = det_scaled(map, {u[0], u[1] - h});
  const U g{(fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)};
  const double n = std::hypot(g[0], g[1]);
  if (!std::isfinite(n) || n == 0.0) return std::nullopt;
  return U{g[0] / n, g[1] / n};
}

bool in_box(const PlaneMap& map, const U& u) { return map.box().contains(map.from_scaled(u)); }

// Searches the transversal line through `pred` along `normal` for a certified
// root, widening the search window when no sign change is found.
std::optional<U> correct(const PlaneMap& map, const U& pred, const U& normal, double half_width,
                         const TraceParams& params) {
  const double f0 = det_scaled(map, pred);
  if (!std::isfinite(f0)) return std::nullopt;
  if (std::abs(f0) <= params.curve_tol) return pred;
  double L = half_width;
  for (int k = 0; k < params.max_adaptations; ++k, L *= 2.0) {
    const U lo{pred[0] - L * normal[0], pred[1] - L * normal[1]};
    const U hi{pred[0] + L * normal[0], pred[1] + L * normal[1]};
    const double flo = det_scaled(map, lo);
    const double fhi = det_scaled(map, hi);
    // Prefer the half nearer the prediction when both halves change sign.
    std::optional<U> r;
    if (std::isfinite(fhi) && (fhi < 0.0) != (f0 < 0.0)) r = refine_on_segment(map, pred, f0, hi, fhi, params.curve_tol);
    if (!r && std::isfinite(flo) && (flo < 0.0) != (f0 < 0.0))
      r = refine_on_segment(map, pred, f0, lo, flo, params.curve_tol);
    if (r) return r;
    if (!std::isfinite(flo) && !std::isfinite(fhi)) return std::nullopt;
  }
  return std::nullopt;
}

enum class Stop { BoxExit, Closed, MaxPoints, Lost };

struct HalfTrace {
  std::vector<U> points;  // excludes the seed
  Stop stop = Stop::Lost;
};

HalfTrace walk(const PlaneMap& map, const U& seed, double direction, double step0, const TraceParams& params) {
  HalfTrace h;
  U cur = seed;
  std::optional<U> prev_tangent;
  double step = step0;
  const double max_jump = params.max_step_factor * step0;
  for (;;) {
    if (static_cast<int>(h.points.size()) >= params.max_points) {
      h.stop = Stop::MaxPoints;
      return h;
    }
    const auto g = gradient_direction(map, cur);
    if (!g) {
      h.stop = Stop::Lost;
      return h;
    }
    U t{-(*g)[1], (*g)[0]};
    if (prev_tangent) {
      if (t[0] * (*prev_tangent)[0] + t[1] * (*prev_tangent)[1] < 0.0) t = {-t[0], -t[1]};
    } else {
      t = {direction * t[0], direction * t[1]};
    }
    std::optional<U> next;
    double used = step;
    for (int k = 0; k < params.max_adaptations; ++k, used *= 0.5) {
      const U pred{cur[0] + used * t[0], cur[1] + used * t[1]};
      auto c = correct(map, pred, *g, 0.5 * used, params);
      if (c && dist(*c, cur) <= max_jump && dist(*c, cur) > 0.05 * used) {
        next = c;
        break;
      }
    }
    if (!next) {
      h.stop = Stop::Lost;
      return h;
    }
    if (!in_box(map, *next)) {
      h.stop = Stop::BoxExit;
      return h;
    }
    const U moved{(*next)[0] - cur[0], (*next)[1] - cur[1]};
    const double ml = std::hypot(moved[0], moved[1]);
    prev_tangent = U{moved[0] / ml, moved[1] / ml};
    h.points.push_back(*next);
    cur = *next;
    step = std::min(step0, 1.5 * used);
    if (h.points.size() > 8 && dist(cur, seed) < 1.5 * step0) {
      h.stop = Stop::Closed;
      return h;
    }
  }
}

}  // namespace

void Grid::validate() const {
  if (nV < 2 || nT < 2) throw Error(ErrorCode::ConfigInvalid, "grid needs at least 2 nodes per axis");
  DomainBox{V_min, V_max, T_min, T_max}.validate();
}

Grid Grid::over(const DomainBox& box, int nV, int nT, bool log_V) {
  Grid g{box.V_min, box.V_max, box.T_min, box.T_max, nV, nT, log_V};
  g.validate();
  return g;
}

double Grid::V_at(int i) const {
  const double s = static_cast<double>(i) / (nV - 1);
  if (i == nV - 1) return V_max;
  if (log_V) return V_min * std::pow(V_max / V_min, s);
  return V_min + s * (V_max - V_min);
}

double Grid::T_at(int j) const {
  if (j == nT - 1) return T_max;
  return T_min + static_cast<double>(j) / (nT - 1) * (T_max - T_min);
}

int SignGrid::sign_change_edges() const {
  int count = 0;
  for (int i = 0; i < grid.nV; ++i)
    for (int j = 0; j < grid.nT; ++j) {
      const int s = static_cast<int>(at(i, j));
      if (s == 0) continue;
      if (i + 1 < grid.nV && static_cast<int>(at(i + 1, j)) == -s) ++count;
      if (j + 1 < grid.nT && static_cast<int>(at(i, j + 1)) == -s) ++count;
    }
  return count;
}

double det_j(const PlaneMap& map, const DomainPoint& p) {
  const auto e = map.try_evaluate(p);
  return e ? e->det() : kNaN;
}

double default_step(const PlaneMap& map) {
  const auto& b = map.box();
  return std::hypot((b.V_max - b.V_min) / map.V_ref(), (b.T_max - b.T_min) / map.T_ref()) / 400.0;
}

double default_merge_radius(const PlaneMap& map, const Grid& grid) {
  const double cell_V = (grid.V_max - grid.V_min) / map.V_ref() / (grid.nV - 1);
  const double cell_T = (grid.T_max - grid.T_min) / map.T_ref() / (grid.nT - 1);
  return 2.0 * std::max(cell_V, cell_T);
}

SignGrid sign_grid(const PlaneMap& map, const Grid& grid, int threads) {
  grid.validate();
  SignGrid sg;
  sg.grid = grid;
  const std::size_t n = static_cast<std::size_t>(grid.nV) * grid.nT;
  sg.signs.assign(n, Sign::Invalid);
  sg.det_j.assign(n, kNaN);
  detail::parallel_for(static_cast<std::size_t>(grid.nV), threads, [&](std::size_t i) {
    for (int j = 0; j < grid.nT; ++j) {
      const double d = det_j(map, grid.node(static_cast<int>(i), j));
      const std::size_t k = i * grid.nT + j;
      sg.det_j[k] = d;
      // Exact zeros join the non-negative side so a curve through a node still
      // produces a sign-change edge.
      if (std::isfinite(d)) sg.signs[k] = d >= 0.0 ? Sign::Positive : Sign::Negative;
    }
  });
  return sg;
}

BracketReport bracket_roots(const PlaneMap& map, const SignGrid& sg, const TraceParams& params) {
  struct Edge {
    int i0, j0, i1, j1;
  };
  std::vector<Edge> edges;
  const Grid& g = sg.grid;
  for (int i = 0; i < g.nV; ++i)
    for (int j = 0; j < g.nT; ++j) {
      const int s = static_cast<int>(sg.at(i, j));
      if (s == 0) continue;
      if (i + 1 < g.nV && static_cast<int>(sg.at(i + 1, j)) == -s) edges.push_back({i, j, i + 1, j});
      if (j + 1 < g.nT && static_cast<int>(sg.at(i, j + 1)) == -s) edges.push_back({i, j, i, j + 1});
    }
  std::vector<std::optional<U>> found(edges.size());
  detail::parallel_for(edges.size(), params.threads, [&](std::size_t k) {
    const Edge& e = edges[k];
    const U a = map.to_scaled(g.node(e.i0, e.j0));
    const U b = map.to_scaled(g.node(e.i1, e.j1));
    found[k] = refine_on_segment(map, a, sg.det_at(e.i0, e.j0), b, sg.det_at(e.i1, e.j1), params.curve_tol);
  });
  const double merge = params.merge_radius > 0.0 ? params.merge_radius : default_merge_radius(map, g);
  BracketReport report;
  std::vector<U> kept;
  for (const auto& f : found) {
    if (!f) {
      ++report.stalls;
      continue;
    }
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const U& k) { return dist(k, *f) < merge; });
    if (dup) continue;
    kept.push_back(*f);
    report.roots.push_back(map.from_scaled(*f));
  }
  return report;
}

CriticalCurve trace_critical_curve(const PlaneMap& map, const DomainPoint& seed, const TraceParams& params) {
  const double step = params.step > 0.0 ? params.step : default_step(map);
  const U s = map.to_scaled(seed);
  const double d0 = det_scaled(map, s);
  if (!std::isfinite(d0) || std::abs(d0) > params.curve_tol) {
    std::ostringstream os;
    os << "seed (V, T) = (" << seed.V << ", " << seed.T << ") is not a certified critical point (det J = " << d0
       << ")";
    throw Error(ErrorCode::TraceLost, os.str());
  }
  const HalfTrace fwd = walk(map, s, 1.0, step, params);
  CriticalCurve curve;
  if (fwd.stop == Stop::Closed) {
    curve.closed = true;
    curve.points.push_back(seed);
    for (const auto& u : fwd.points) curve.points.push_back(map.from_scaled(u));
    return curve;
  }
  const HalfTrace bwd = walk(map, s, -1.0, step, params);
  if (fwd.points.empty() && bwd.points.empty()) {
    std::ostringstream os;
    os << "trace from (V, T) = (" << seed.V << ", " << seed.T << ") could not be continued";
    throw Error(ErrorCode::TraceLost, os.str());
  }
  for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it) curve.points.push_back(map.from_scaled(*it));
  curve.points.push_back(seed);
  for (const auto& u : fwd.points) curve.points.push_back(map.from_scaled(u));
  return curve;
}

std::vector<ImagePoint> critical_image(const PlaneMap& map, const CriticalCurve& curve) {
  std::vector<ImagePoint> out;
  out.reserve(curve.points.size());
  for (const auto& p : curve.points) out.push_back(map.value(p));
  return out;
}

CriticalSet trace_critical_set(const PlaneMap& map, const Grid& grid, const TraceParams& params) {
  CriticalSet cs;
  cs.signs = sign_grid(map, grid, params.threads);
  cs.seeds = bracket_roots(map, cs.signs, params);
  const double merge = params.merge_radius > 0.0 ? params.merge_radius : default_merge_radius(map, grid);
  for (const auto& seed : cs.seeds.roots) {
    bool covered = false;
    for (const auto& c : cs.curves) {
      for (const auto& p : c.points)
        if (map.domain_distance(p, seed) < merge) {
          covered = true;
          break;
        }
      if (covered) break;
    }
    if (covered) continue;
    try {
      cs.curves.push_back(trace_critical_curve(map, seed, params));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TraceLost) throw;
      ++cs.lost_traces;
    }
  }
  return cs;
}

}  // namespace critinv
