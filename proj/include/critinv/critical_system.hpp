#pragma once

// The binary criticality map F(V, T) = (det Q, cubic form): Q collects
// d ln f_i / d n_j at fixed (T, V) and the cubic form contracts the second
// n-derivatives of ln f with the null direction dn of Q. Critical points of
// the mixture are the pre-images of (0, 0).

#include <array>

#include "critinv/mixture_model.hpp"
#include "critinv/plane_map.hpp"

namespace critinv {

struct DeltaN {
  double dn1 = 0.0;
  double dn2 = 0.0;
};

struct ResidualScaling {
  double V_ref = 0.0;   // m^3/mol
  double T_ref = 0.0;   // K
  double F1_ref = 0.0;  // det Q units
  double F2_ref = 0.0;  // cubic-form units
};

enum class Stability { PositiveSemidefinite, Indefinite };

std::string_view to_string(Stability s);

class CriticalContext final : public PlaneMap {
 public:
  // Scaling references are computed at the box midpoint: F1_ref = max|q_ij|^2,
  // F2_ref = max|t_ijk|, V_ref and T_ref the box widths.
  CriticalContext(MixtureSpec spec, DomainBox box);
  CriticalContext(MixtureSpec spec, DomainBox box, ResidualScaling scaling);

  const MixtureSpec& spec() const { return spec_; }
  const std::array<double, 2>& n0() const { return n0_; }
  const ResidualScaling& scaling() const { return scaling_; }

  const DomainBox& box() const override { return box_; }
  double V_ref() const override { return scaling_.V_ref; }
  double T_ref() const override { return scaling_.T_ref; }
  bool defined_at(const DomainPoint& p) const override;
  ImagePoint value(const DomainPoint& p) const override;
  // Exact Jacobian through forward-mode differentiation in (V, T).
  MapEval evaluate(const DomainPoint& p) const override;

  // Unscaled (det Q, cubic form).
  ImagePoint raw_residuals(const DomainPoint& p) const;
  ImagePoint unscale(const ImagePoint& q) const { return {q.F1 * scaling_.F1_ref, q.F2 * scaling_.F2_ref}; }

  EosState state(const DomainPoint& p) const { return {p.T, p.V, n0_}; }
  double covolume() const;

 private:
  MixtureSpec spec_;
  std::array<double, 2> n0_;
  DomainBox box_;
  ResidualScaling scaling_;
};

Matrix2 q_matrix(const CriticalContext& ctx, const DomainPoint& p);

// Null direction of Q normalized with dn1 = 1; falls back to the second row
// (dn2 = 1) when |q12| is below 1e-12 max|q_ij|. Throws DegenerateQ when both
// off-diagonal pivots vanish.
DeltaN delta_n(const Matrix2& Q);

double cubic_form(const CriticalContext& ctx, const DomainPoint& p, const DeltaN& d);

// Scaled image point.
inline ImagePoint F(const CriticalContext& ctx, const DomainPoint& p) { return ctx.value(p); }

// d F / d u in scaled units.
Matrix2 jacobian_F(const CriticalContext& ctx, const DomainPoint& p);

Stability stability_flag(const Matrix2& Q);

// Unit eigenvector of the symmetrized Q for its eigenvalue of least magnitude.
DeltaN unit_null_direction(const Matrix2& Q);

// Cubic form along unit_null_direction(Q), divided by F2_ref. At a genuine
// critical point it vanishes together with F2; near the pole of the pivot
// normalization (q12 -> 0 on det Q = 0) it does not.
double unit_cubic_form(const CriticalContext& ctx, const DomainPoint& p);

}  // namespace critinv
