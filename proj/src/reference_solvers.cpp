#include "critinv/reference_solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "critinv/errors.hpp"

namespace critinv {

namespace {

constexpr double kFdStep = 1e-6;  // scaled, as in the default Jacobian
constexpr double kCombinedTol = 1e-12;

// Coordinates of the double loop: x is solved in the inner loop, y in the
// outer one.
struct Axes {
  bool swap;
  double x_ref, y_ref;
  DomainPoint point(double x, double y) const { return swap ? DomainPoint{x, y} : DomainPoint{y, x}; }
};

[[noreturn]] void fail(ErrorCode code, const std::string& what, int inner, int outer) {
  std::ostringstream os;
  os << what << " (inner iterations " << inner << ", outer iterations " << outer << ")";
  throw Error(code, os.str());
}

double f_at(const CriticalContext& ctx, const DomainPoint& p, int which, bool& ok) {
  const auto e = ctx.defined_at(p) ? std::optional<ImagePoint>(ctx.value(p)) : std::nullopt;
  ok = e && std::isfinite(e->F1) && std::isfinite(e->F2);
  if (!ok) return 0.0;
  return which == 0 ? e->F1 : e->F2;
}

// Inner loop: F1(x; y) = 0 for x by scalar Newton with central differences.
double inner_solve(const CriticalContext& ctx, const Axes& ax, double x, double y, const DoubleLoopParams& params,
                   int& inner_total, int outer) {
  const double h = kFdStep * ax.x_ref;
  for (int it = 0; it < params.max_inner; ++it) {
    ++inner_total;
    bool ok = false, okp = false, okm = false;
    const double f = f_at(ctx, ax.point(x, y), 0, ok);
    if (!ok) fail(ErrorCode::InnerDivergence, "inner iterate left the domain of definition", inner_total, outer);
    if (std::abs(f) <= params.inner_tol) return x;
    const double fp = f_at(ctx, ax.point(x + h, y), 0, okp);
    const double fm = f_at(ctx, ax.point(x - h, y), 0, okm);
    if (!okp || !okm) fail(ErrorCode::InnerDivergence, "inner derivative stencil left the domain", inner_total, outer);
    const double d = (fp - fm) / (2.0 * h);
    if (!std::isfinite(d) || d == 0.0)
      fail(ErrorCode::SingularDerivative, "inner derivative d det Q vanished", inner_total, outer);
    double dx = -f / d;
    // Halve the update while it leaves the domain.
    int guard = 0;
    while (!ctx.defined_at(ax.point(x + dx, y)) && guard++ < 60) dx *= 0.5;
    x += dx;
  }
  fail(ErrorCode::InnerDivergence, "inner loop did not converge", inner_total, outer);
}

}  // namespace

void DoubleLoopParams::validate() const {
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0) || max_inner < 1 || max_outer < 1)
    throw Error(ErrorCode::ConfigInvalid, "double-loop tolerances and iteration limits must be positive");
}

CriticalPointResult hk_double_loop(const CriticalContext& ctx, const DoubleLoopParams& params) {
  params.validate();
  if (!ctx.defined_at(params.initial))
    throw Error(ErrorCode::InvalidState, "double-loop initial point is outside the domain of definition");
  const Axes ax = params.swap_loops ? Axes{true, ctx.V_ref(), ctx.T_ref()} : Axes{false, ctx.T_ref(), ctx.V_ref()};
  double x = params.swap_loops ? params.initial.V : params.initial.T;
  double y = params.swap_loops ? params.initial.T : params.initial.V;
  const double h = kFdStep * ax.y_ref;
  int inner_total = 0;

  // Outer function g(y) = F2(x*(y), y) with x*(y) from the inner loop.
  auto g = [&](double yy, double& x_guess, int outer) {
    x_guess = inner_solve(ctx, ax, x_guess, yy, params, inner_total, outer);
    bool ok = false;
    const double v = f_at(ctx, ax.point(x_guess, yy), 1, ok);
    if (!ok) fail(ErrorCode::OuterDivergence, "outer iterate left the domain of definition", inner_total, outer);
    return v;
  };

  for (int outer = 0; outer < params.max_outer; ++outer) {
    const double gy = g(y, x, outer);
    const ImagePoint F = ctx.value(ax.point(x, y));
    if (std::abs(gy) <= params.outer_tol && squared_norm(F) < kCombinedTol)
      return make_result(ctx, ax.point(x, y), "hk_double_loop");
    double xp = x, xm = x;
    const double gp = g(y + h, xp, outer);
    const double gm = g(y - h, xm, outer);
    const double d = (gp - gm) / (2.0 * h);
    if (!std::isfinite(d) || d == 0.0)
      fail(ErrorCode::SingularDerivative, "outer derivative of the cubic form vanished", inner_total, outer);
    double dy = -gy / d;
    // Near a pole of F2 one ulp in y moves F2 by more than outer_tol; stop
    // once the combined rule holds and the update is below resolution.
    if (squared_norm(F) < kCombinedTol && std::abs(dy) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(y))
      return make_result(ctx, ax.point(x, y), "hk_double_loop");
    int guard = 0;
    while (!ctx.defined_at(ax.point(x, y + dy)) && guard++ < 60) dy *= 0.5;
    y += dy;
  }
  fail(ErrorCode::OuterDivergence, "outer loop did not converge", inner_total, params.max_outer);
}

NewtonParams newton_2x2_defaults() {
  NewtonParams p;
  p.tol = 0.5e-6;
  p.max_iterations = 200;
  p.max_step = 0.02;
  p.monotone = false;
  return p;
}

Newton2x2Result newton_2x2(const CriticalContext& ctx, const DomainPoint& initial, const NewtonParams& params) {
  Newton2x2Result out;
  NewtonParams p = params;
  p.tol = std::min(p.tol, 0.5 * std::sqrt(kCombinedTol));
  out.newton = damped_newton(ctx, initial, {0.0, 0.0}, p);
  out.converged = ctx.defined_at(out.newton.p) && squared_norm(out.newton.F) < kCombinedTol &&
                  out.newton.status != NewtonStatus::Undefined;
  if (out.converged) out.result = make_result(ctx, out.newton.p, "newton_2x2");
  return out;
}

}  // namespace critinv
