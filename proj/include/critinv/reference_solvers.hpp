#pragma once

// Independent oracles for the inversion: the classical nested double loop
// and a simultaneous damped Newton on F.

#include <string>

#include "critinv/inversion.hpp"
#include "critinv/newton.hpp"

namespace critinv {

struct DoubleLoopParams {
  double inner_tol = 1e-12;  // |F1| (scaled) in the inner loop
  double outer_tol = 1e-9;   // |F2| (scaled) in the outer loop
  int max_inner = 50;
  int max_outer = 50;
  DomainPoint initial;
  // false: T inner (det Q = 0), V outer (cubic form = 0); true: the reverse.
  bool swap_loops = false;

  void validate() const;
};

// Converged result satisfies F1^2 + F2^2 < 1e-12 (scaled). Throws
// InnerDivergence, OuterDivergence or SingularDerivative with iteration counts.
CriticalPointResult hk_double_loop(const CriticalContext& ctx, const DoubleLoopParams& params);

struct Newton2x2Result {
  NewtonResult newton;
  bool converged = false;  // F1^2 + F2^2 < 1e-12 (scaled)
  std::optional<CriticalPointResult> result;
};

// Step-capped Newton on F(p) = 0 (non-monotone: near the poles of F2 a
// residual-decrease rule stalls); divergence is reported, not thrown.
NewtonParams newton_2x2_defaults();
Newton2x2Result newton_2x2(const CriticalContext& ctx, const DomainPoint& initial,
                           const NewtonParams& params = newton_2x2_defaults());

}  // namespace critinv
