#pragma once

// Maps from the (V, T) plane to the plane, as consumed by the critical-set
// tracer, the bank builder and the homotopy inverter.
//
// All algorithms work in scaled coordinates: the domain point (V, T) maps to
// u = (V / V_ref, T / T_ref) and the image is already dimensionless. The
// Jacobian returned by evaluate() is d F / d u.

#include <array>
#include <cmath>
#include <optional>

namespace critinv {

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct DomainPoint {
  double V = 0.0;  // m^3/mol
  double T = 0.0;  // K
};

struct ImagePoint {
  double F1 = 0.0;
  double F2 = 0.0;
};

struct DomainBox {
  double V_min = 0.0;
  double V_max = 0.0;
  double T_min = 0.0;
  double T_max = 0.0;

  bool contains(const DomainPoint& p) const {
    return p.V >= V_min && p.V <= V_max && p.T >= T_min && p.T <= T_max;
  }
  DomainPoint midpoint() const { return {0.5 * (V_min + V_max), 0.5 * (T_min + T_max)}; }
  void validate() const;
};

struct MapEval {
  ImagePoint F;
  Matrix2 J;  // rows: F1, F2; columns: d/du_V, d/du_T
  double det() const { return J[0][0] * J[1][1] - J[0][1] * J[1][0]; }
};

class PlaneMap {
 public:
  virtual ~PlaneMap() = default;

  virtual const DomainBox& box() const = 0;
  virtual double V_ref() const = 0;
  virtual double T_ref() const = 0;

  // Whether the map is defined at p (independent of the box).
  virtual bool defined_at(const DomainPoint& p) const = 0;

  // Throws critinv::Error when p is outside the map's domain of definition.
  virtual ImagePoint value(const DomainPoint& p) const = 0;

  // Value and Jacobian. The default differentiates value() by central
  // differences with steps 1e-6 in scaled units.
  virtual MapEval evaluate(const DomainPoint& p) const;

  // Non-throwing variant of evaluate().
  std::optional<MapEval> try_evaluate(const DomainPoint& p) const;

  std::array<double, 2> to_scaled(const DomainPoint& p) const { return {p.V / V_ref(), p.T / T_ref()}; }
  DomainPoint from_scaled(const std::array<double, 2>& u) const { return {u[0] * V_ref(), u[1] * T_ref()}; }

  // Euclidean distance in scaled domain coordinates.
  double domain_distance(const DomainPoint& a, const DomainPoint& b) const {
    return std::hypot((a.V - b.V) / V_ref(), (a.T - b.T) / T_ref());
  }
};

inline double image_distance(const ImagePoint& a, const ImagePoint& b) {
  return std::hypot(a.F1 - b.F1, a.F2 - b.F2);
}

inline double squared_norm(const ImagePoint& q) { return q.F1 * q.F1 + q.F2 * q.F2; }

// Central-difference Jacobian of value() in scaled coordinates with step h.
Matrix2 finite_difference_jacobian(const PlaneMap& map, const DomainPoint& p, double h);

// Solves J x = b for a 2x2 system; nullopt when |det J| <= det_floor.
std::optional<std::array<double, 2>> solve2(const Matrix2& J, const std::array<double, 2>& b,
                                            double det_floor = 0.0);

}  // namespace critinv
