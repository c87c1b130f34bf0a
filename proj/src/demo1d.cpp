#include "critinv/demo1d.hpp"

#include <algorithm>
#include <cmath>

#include "critinv/errors.hpp"

namespace critinv {

namespace {

template <typename Fn>
double bisect(Fn&& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

template <typename Fn>
std::vector<double> bracketed_roots(Fn&& f, double lo, double hi, int cells) {
  std::vector<double> roots;
  const double h = (hi - lo) / cells;
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) roots.push_back(a);
  for (int k = 1; k <= cells; ++k) {
    const double b = k == cells ? hi : lo + k * h;
    const double fb = f(b);
    if (fb == 0.0) {
      roots.push_back(b);
    } else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
      roots.push_back(bisect(f, a, b));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

double demo_derivative(double p) { return 3.0 * p * p - 3.0; }

}  // namespace

double demo_map(double p) { return p * p * p - 3.0 * p; }

std::vector<double> demo1d_critical_points() { return bracketed_roots(demo_derivative, -5.0, 5.0, 2001); }

std::vector<double> demo1d_critical_images() {
  std::vector<double> out;
  for (double p : demo1d_critical_points()) out.push_back(demo_map(p));
  return out;
}

Demo1DResult demo1d_solve(double q, double lo, double hi, int cells) {
  if (!(hi > lo) || cells < 1) throw Error(ErrorCode::ConfigInvalid, "demo1d needs lo < hi and cells >= 1");
  auto g = [q](double p) { return demo_map(p) - q; };
  Demo1DResult r{q, bracketed_roots(g, lo, hi, cells)};
  // Tangential roots do not change sign; test the critical points directly.
  for (double c : bracketed_roots(demo_derivative, lo, hi, cells + 1)) {
    if (std::abs(g(c)) <= 1e-12 * (1.0 + std::abs(q))) r.roots.push_back(c);
  }
  std::sort(r.roots.begin(), r.roots.end());
  std::vector<double> unique;
  for (double x : r.roots)
    if (unique.empty() || std::abs(x - unique.back()) > 1e-6) unique.push_back(x);
  r.roots = unique;
  return r;
}

}  // namespace critinv
