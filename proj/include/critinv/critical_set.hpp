#pragma once

// Mathematical critical set of a plane map: the curves where det J = 0.
//
// A rectangular grid is scanned for sign changes of det J, each sign-change
// edge is refined to a certified root, and the roots seed a continuation that
// walks along the zero level set (tangent predictor, transversal corrector).

#include <cstdint>
#include <string_view>
#include <vector>

#include "critinv/plane_map.hpp"

namespace critinv {

struct Grid {
  double V_min = 0.0, V_max = 0.0;
  double T_min = 0.0, T_max = 0.0;
  int nV = 201, nT = 201;
  bool log_V = true;

  static Grid over(const DomainBox& box, int nV = 201, int nT = 201, bool log_V = true);
  void validate() const;
  double V_at(int i) const;
  double T_at(int j) const;
  DomainPoint node(int i, int j) const { return {V_at(i), T_at(j)}; }
};

enum class Sign : std::int8_t { Negative = -1, Invalid = 0, Positive = 1 };

struct SignGrid {
  Grid grid;
  std::vector<Sign> signs;    // nV x nT, index i * nT + j
  std::vector<double> det_j;  // NaN where invalid

  Sign at(int i, int j) const { return signs[static_cast<std::size_t>(i) * grid.nT + j]; }
  double det_at(int i, int j) const { return det_j[static_cast<std::size_t>(i) * grid.nT + j]; }
  // Number of grid edges joining a positive and a negative node.
  int sign_change_edges() const;
};

struct CriticalCurve {
  std::vector<DomainPoint> points;
  bool closed = false;
};

struct TraceParams {
  double curve_tol = 1e-8;     // |det J| certificate, scaled units
  double step = 0.0;           // scaled; 0 = 1/400 of the box diagonal
  double max_step_factor = 2.0;
  int max_points = 4000;
  int max_adaptations = 8;
  double merge_radius = 0.0;   // scaled; 0 = two grid cells
  int threads = 0;             // 0 = hardware concurrency
};

struct BracketReport {
  std::vector<DomainPoint> roots;
  int stalls = 0;  // sign changes that did not refine to a certified root
};

struct CriticalSet {
  SignGrid signs;
  BracketReport seeds;
  std::vector<CriticalCurve> curves;
  int lost_traces = 0;
};

// det J in scaled units; NaN where the map is undefined.
double det_j(const PlaneMap& map, const DomainPoint& p);

SignGrid sign_grid(const PlaneMap& map, const Grid& grid, int threads = 0);

BracketReport bracket_roots(const PlaneMap& map, const SignGrid& sg, const TraceParams& params = {});

// Throws TraceLost when the seed cannot be continued in either direction.
CriticalCurve trace_critical_curve(const PlaneMap& map, const DomainPoint& seed, const TraceParams& params = {});

std::vector<ImagePoint> critical_image(const PlaneMap& map, const CriticalCurve& curve);

// Full pipeline: scan, bracket, and trace every seed not already covered by a
// traced curve.
CriticalSet trace_critical_set(const PlaneMap& map, const Grid& grid, const TraceParams& params = {});

// Resolved defaults for a given box/grid.
double default_step(const PlaneMap& map);
double default_merge_radius(const PlaneMap& map, const Grid& grid);

}  // namespace critinv
