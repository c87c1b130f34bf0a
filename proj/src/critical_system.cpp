#include "critinv/critical_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "critinv/detail/helmholtz.hpp"
#include "critinv/errors.hpp"

namespace critinv {

std::string_view to_string(Stability s) {
  return s == Stability::PositiveSemidefinite ? "PositiveSemidefinite" : "Indefinite";
}

namespace {

constexpr double kPivotTol = 1e-12;

double max_abs(const Matrix2& Q) {
  return std::max({std::abs(Q[0][0]), std::abs(Q[0][1]), std::abs(Q[1][0]), std::abs(Q[1][1])});
}

// Null direction in any scalar type; the pivot choice is made on values.
template <typename S>
std::array<S, 2> null_direction(const std::array<std::array<S, 2>, 2>& Q) {
  const double scale = std::max({std::abs(value_of(Q[0][0])), std::abs(value_of(Q[0][1])),
                                 std::abs(value_of(Q[1][0])), std::abs(value_of(Q[1][1]))});
  const double eps = kPivotTol * scale;
  if (std::abs(value_of(Q[0][1])) > eps) return {S(1.0), -Q[0][0] / Q[0][1]};
  if (std::abs(value_of(Q[1][0])) > eps) return {-Q[1][1] / Q[1][0], S(1.0)};
  throw Error(ErrorCode::DegenerateQ, "both off-diagonal pivots of Q vanish");
}

// Raw (det Q, cubic form) at (T, V, n0) in scalar type Base.
template <typename Base>
std::array<Base, 2> raw_map(const MixtureSpec& spec, const Base& T, const Base& V,
                            const std::array<double, 2>& n0) {
  const std::array<Base, 2> n{Base(n0[0]), Base(n0[1])};
  const auto d = detail::n_derivatives(spec, T, V, n);
  const Base det = d.q[0][0] * d.q[1][1] - d.q[0][1] * d.q[1][0];
  const auto dn = null_direction(d.q);
  Base cubic(0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) cubic = cubic + d.t[i][j][k] * dn[i] * dn[j] * dn[k];
  return {det, cubic};
}

void check_point(const CriticalContext& ctx, const DomainPoint& p) {
  if (!ctx.defined_at(p)) {
    std::ostringstream os;
    os << "(V, T) = (" << p.V << ", " << p.T << ") is outside the physical domain (covolume "
       << ctx.covolume() << ")";
    throw Error(ErrorCode::VolumeBelowCovolume, os.str());
  }
}

ResidualScaling midpoint_scaling(const MixtureSpec& spec, const DomainBox& box) {
  box.validate();
  const DomainPoint mid = box.midpoint();
  const EosState s{mid.T, mid.V, spec.z()};
  const auto d = detail::n_derivatives(spec, s.T, s.V, s.n);
  const double qmax = max_abs(d.q);
  double tmax = 0.0;
  for (const auto& m : d.t)
    for (const auto& r : m)
      for (double v : r) tmax = std::max(tmax, std::abs(v));
  return {box.V_max - box.V_min, box.T_max - box.T_min, qmax * qmax, tmax};
}

}  // namespace

CriticalContext::CriticalContext(MixtureSpec spec, DomainBox box)
    : spec_(std::move(spec)), n0_(spec_.z()), box_(box) {
  box_.validate();
  if (!defined_at(box_.midpoint())) {
    throw Error(ErrorCode::ConfigInvalid, "domain box midpoint lies below the mixture covolume");
  }
  scaling_ = midpoint_scaling(spec_, box_);
  if (!(scaling_.F1_ref > 0.0) || !(scaling_.F2_ref > 0.0) || !std::isfinite(scaling_.F1_ref) ||
      !std::isfinite(scaling_.F2_ref)) {
    throw Error(ErrorCode::ConfigInvalid, "degenerate residual scaling at the box midpoint");
  }
}

CriticalContext::CriticalContext(MixtureSpec spec, DomainBox box, ResidualScaling scaling)
    : spec_(std::move(spec)), n0_(spec_.z()), box_(box), scaling_(scaling) {
  box_.validate();
  if (!(scaling_.V_ref > 0.0) || !(scaling_.T_ref > 0.0) || !(scaling_.F1_ref > 0.0) ||
      !(scaling_.F2_ref > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "scaling references must be strictly positive");
  }
}

double CriticalContext::covolume() const {
  // b_m does not depend on T for vdW-I; for Wong-Sandler it does, so callers
  // needing a T-specific bound go through defined_at().
  return mixture_params(spec_, box_.midpoint().T, n0_).b_m;
}

bool CriticalContext::defined_at(const DomainPoint& p) const {
  if (!(p.T > 0.0) || !(p.V > 0.0) || !std::isfinite(p.T) || !std::isfinite(p.V)) return false;
  const auto m = detail::mixture_ab(spec_, p.T, n0_);
  return m.b_m > 0.0 && p.V > (n0_[0] + n0_[1]) * m.b_m;
}

ImagePoint CriticalContext::raw_residuals(const DomainPoint& p) const {
  check_point(*this, p);
  const auto r = raw_map(spec_, p.T, p.V, n0_);
  return {r[0], r[1]};
}

ImagePoint CriticalContext::value(const DomainPoint& p) const {
  const auto r = raw_residuals(p);
  return {r.F1 / scaling_.F1_ref, r.F2 / scaling_.F2_ref};
}

MapEval CriticalContext::evaluate(const DomainPoint& p) const {
  check_point(*this, p);
  using D1 = Dual<double>;
  const auto by_V = raw_map(spec_, D1(p.T, 0.0), D1(p.V, 1.0), n0_);
  const auto by_T = raw_map(spec_, D1(p.T, 1.0), D1(p.V, 0.0), n0_);
  const double s1 = 1.0 / scaling_.F1_ref;
  const double s2 = 1.0 / scaling_.F2_ref;
  MapEval e;
  e.F = {by_V[0].v * s1, by_V[1].v * s2};
  e.J = {{{by_V[0].d * s1 * scaling_.V_ref, by_T[0].d * s1 * scaling_.T_ref},
          {by_V[1].d * s2 * scaling_.V_ref, by_T[1].d * s2 * scaling_.T_ref}}};
  return e;
}

Matrix2 q_matrix(const CriticalContext& ctx, const DomainPoint& p) {
  check_point(ctx, p);
  return fugacity_n_derivatives(ctx.spec(), ctx.state(p));
}

DeltaN delta_n(const Matrix2& Q) {
  for (const auto& r : Q)
    for (double v : r)
      if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateQ, "Q has non-finite entries");
  const auto d = null_direction(Q);
  return {d[0], d[1]};
}

double cubic_form(const CriticalContext& ctx, const DomainPoint& p, const DeltaN& d) {
  check_point(ctx, p);
  const auto t = fugacity_n2_derivatives(ctx.spec(), ctx.state(p));
  const std::array<double, 2> dn{d.dn1, d.dn2};
  double sum = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) sum += t[i][j][k] * dn[i] * dn[j] * dn[k];
  return sum;
}

Matrix2 jacobian_F(const CriticalContext& ctx, const DomainPoint& p) { return ctx.evaluate(p).J; }

Stability stability_flag(const Matrix2& Q) {
  const double a = Q[0][0];
  const double c = Q[1][1];
  const double b = 0.5 * (Q[0][1] + Q[1][0]);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double lo = mean - radius;
  const double tol = 1e-8 * max_abs(Q);
  return lo >= -tol ? Stability::PositiveSemidefinite : Stability::Indefinite;
}

DeltaN unit_null_direction(const Matrix2& Q) {
  const double a = Q[0][0];
  const double c = Q[1][1];
  const double b = 0.5 * (Q[0][1] + Q[1][0]);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double lam = std::abs(mean - radius) <= std::abs(mean + radius) ? mean - radius : mean + radius;
  // Two candidate eigenvectors; keep the better conditioned one.
  std::array<double, 2> v1{b, lam - a};
  std::array<double, 2> v2{lam - c, b};
  auto& v = std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1]) ? v1 : v2;
  double n = std::hypot(v[0], v[1]);
  if (n == 0.0) return std::abs(a) <= std::abs(c) ? DeltaN{1.0, 0.0} : DeltaN{0.0, 1.0};
  return {v[0] / n, v[1] / n};
}

double unit_cubic_form(const CriticalContext& ctx, const DomainPoint& p) {
  return cubic_form(ctx, p, unit_null_direction(q_matrix(ctx, p))) / ctx.scaling().F2_ref;
}

}  // namespace critinv
