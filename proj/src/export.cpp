#include "critinv/export.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace critinv {

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string sign_grid_csv(const SignGrid& sg) {
  std::ostringstream os;
  os << "V[m3/mol],T[K],detJ,sign\n";
  for (int i = 0; i < sg.grid.nV; ++i)
    for (int j = 0; j < sg.grid.nT; ++j) {
      const double d = sg.det_at(i, j);
      os << format_number(sg.grid.V_at(i)) << ',' << format_number(sg.grid.T_at(j)) << ','
         << (std::isfinite(d) ? format_number(d) : "nan") << ',' << static_cast<int>(sg.at(i, j)) << '\n';
    }
  return os.str();
}

std::string curves_csv(const PlaneMap& map, const std::vector<CriticalCurve>& curves) {
  std::ostringstream os;
  os << "curve,V[m3/mol],T[K],detJ\n";
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (const auto& p : curves[c].points)
      os << c << ',' << format_number(p.V) << ',' << format_number(p.T) << ',' << format_number(det_j(map, p)) << '\n';
  return os.str();
}

Json curves_json(const PlaneMap& map, const std::vector<CriticalCurve>& curves) {
  Json out = Json::array();
  for (const auto& c : curves) {
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back({{"V", p.V}, {"T", p.T}, {"detJ", det_j(map, p)}});
    out.push_back({{"closed", c.closed}, {"points", pts}});
  }
  return out;
}

std::string images_csv(const PlaneMap& map, const std::vector<CriticalCurve>& curves) {
  std::ostringstream os;
  os << "curve,F1,F2\n";
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (const auto& q : critical_image(map, curves[c]))
      os << c << ',' << format_number(q.F1) << ',' << format_number(q.F2) << '\n';
  return os.str();
}

std::string digest_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace critinv
