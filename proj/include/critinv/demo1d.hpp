#pragma once

// The cubic map F(p) = p^3 - 3p on the line: real pre-images of q, critical
// points and critical images.

#include <vector>

namespace critinv {

struct Demo1DResult {
  double q = 0.0;
  std::vector<double> roots;  // ascending
};

double demo_map(double p);

// Real roots of F(p) = q on [lo, hi]: sign changes on `cells` uniform cells
// refined by bisection, plus tangential roots at the critical points of F.
Demo1DResult demo1d_solve(double q, double lo = -5.0, double hi = 5.0, int cells = 2000);

// Critical points p = -1, 1 (roots of F'), and their images 2, -2.
std::vector<double> demo1d_critical_points();
std::vector<double> demo1d_critical_images();

}  // namespace critinv
