#pragma once

#include <string_view>

#include "critinv/plane_map.hpp"

namespace critinv {

struct NewtonParams {
  double tol = 1e-10;          // on ||F(p) - target||, scaled units
  int max_iterations = 50;
  int max_halvings = 30;       // backtracking on residual-norm increase
  double singular_det = 1e-14; // |det J| floor, scaled units
  double max_step = 0.0;       // cap on the scaled step length; 0 = none
  bool monotone = true;        // false: accept any defined trial point
};

enum class NewtonStatus { Converged, MaxIterations, SingularJacobian, LineSearchFailed, Undefined };

std::string_view to_string(NewtonStatus s);

struct NewtonResult {
  DomainPoint p;
  ImagePoint F;
  int iterations = 0;
  NewtonStatus status = NewtonStatus::MaxIterations;

  bool converged() const { return status == NewtonStatus::Converged; }
};

// Damped Newton on F(p) = target in scaled coordinates. Steps are capped at
// max_step and halved while the trial point leaves the map's domain of
// definition or, when monotone, while the residual norm does not decrease.
NewtonResult damped_newton(const PlaneMap& map, const DomainPoint& start, const ImagePoint& target,
                           const NewtonParams& params);

}  // namespace critinv
