#include "critinv/newton.hpp"

#include <cmath>

namespace critinv {

std::string_view to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "Converged";
    case NewtonStatus::MaxIterations: return "MaxIterations";
    case NewtonStatus::SingularJacobian: return "SingularJacobian";
    case NewtonStatus::LineSearchFailed: return "LineSearchFailed";
    case NewtonStatus::Undefined: return "Undefined";
  }
  return "Unknown";
}

NewtonResult damped_newton(const PlaneMap& map, const DomainPoint& start, const ImagePoint& target,
                           const NewtonParams& params) {
  NewtonResult r;
  r.p = start;
  auto eval = map.try_evaluate(start);
  if (!eval) {
    r.status = NewtonStatus::Undefined;
    return r;
  }
  auto residual = [&](const ImagePoint& f) { return ImagePoint{f.F1 - target.F1, f.F2 - target.F2}; };
  double norm = std::sqrt(squared_norm(residual(eval->F)));
  r.F = eval->F;

  for (;;) {
    if (norm <= params.tol) {
      r.status = NewtonStatus::Converged;
      return r;
    }
    if (r.iterations >= params.max_iterations) {
      r.status = NewtonStatus::MaxIterations;
      return r;
    }
    ++r.iterations;
    const ImagePoint res = residual(eval->F);
    const auto step = solve2(eval->J, {-res.F1, -res.F2}, params.singular_det);
    if (!step) {
      r.status = NewtonStatus::SingularJacobian;
      return r;
    }
    const auto u = map.to_scaled(r.p);
    double lambda = 1.0;
    const double len = std::hypot((*step)[0], (*step)[1]);
    if (params.max_step > 0.0 && len > params.max_step) lambda = params.max_step / len;
    bool accepted = false;
    for (int h = 0; h <= params.max_halvings; ++h, lambda *= 0.5) {
      const DomainPoint trial = map.from_scaled({u[0] + lambda * (*step)[0], u[1] + lambda * (*step)[1]});
      auto te = map.try_evaluate(trial);
      if (!te) continue;
      const double tn = std::sqrt(squared_norm(residual(te->F)));
      if (!params.monotone || tn < norm || tn <= params.tol) {
        r.p = trial;
        eval = te;
        norm = tn;
        r.F = te->F;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      r.status = NewtonStatus::LineSearchFailed;
      return r;
    }
  }
}

}  // namespace critinv
