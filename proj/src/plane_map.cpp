#include "critinv/plane_map.hpp"

#include <sstream>

#include "critinv/errors.hpp"

namespace critinv {

void DomainBox::validate() const {
  if (!(V_min > 0.0) || !(V_max > V_min) || !(T_min > 0.0) || !(T_max > T_min)) {
    std::ostringstream os;
    os << "domain box needs 0 < V_min < V_max and 0 < T_min < T_max (got V in [" << V_min << ", "
       << V_max << "], T in [" << T_min << ", " << T_max << "])";
    throw Error(ErrorCode::ConfigInvalid, os.str());
  }
}

Matrix2 finite_difference_jacobian(const PlaneMap& map, const DomainPoint& p, double h) {
  Matrix2 J{};
  const auto u = map.to_scaled(p);
  for (int c = 0; c < 2; ++c) {
    auto up = u;
    auto um = u;
    up[c] += h;
    um[c] -= h;
    const ImagePoint fp = map.value(map.from_scaled(up));
    const ImagePoint fm = map.value(map.from_scaled(um));
    J[0][c] = (fp.F1 - fm.F1) / (2.0 * h);
    J[1][c] = (fp.F2 - fm.F2) / (2.0 * h);
  }
  return J;
}

MapEval PlaneMap::evaluate(const DomainPoint& p) const {
  return {value(p), finite_difference_jacobian(*this, p, 1e-6)};
}

std::optional<MapEval> PlaneMap::try_evaluate(const DomainPoint& p) const {
  if (!defined_at(p)) return std::nullopt;
  try {
    MapEval e = evaluate(p);
    if (!std::isfinite(e.F.F1) || !std::isfinite(e.F.F2) || !std::isfinite(e.det())) return std::nullopt;
    return e;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<std::array<double, 2>> solve2(const Matrix2& J, const std::array<double, 2>& b,
                                            double det_floor) {
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  if (!std::isfinite(det) || std::abs(det) <= det_floor || det == 0.0) return std::nullopt;
  return std::array<double, 2>{(J[1][1] * b[0] - J[0][1] * b[1]) / det,
                               (J[0][0] * b[1] - J[1][0] * b[0]) / det};
}

}  // namespace critinv
