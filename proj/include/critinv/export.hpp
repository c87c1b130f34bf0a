#pragma once

// Figure-ready data emission. Column headers carry units.

#include <string>
#include <vector>

#include "critinv/critical_set.hpp"
#include "critinv/io.hpp"

namespace critinv {

// V[m3/mol],T[K],detJ,sign
std::string sign_grid_csv(const SignGrid& sg);

// curve,V[m3/mol],T[K],detJ
std::string curves_csv(const PlaneMap& map, const std::vector<CriticalCurve>& curves);

// [{closed, points:[{V, T, detJ}]}]
Json curves_json(const PlaneMap& map, const std::vector<CriticalCurve>& curves);

// curve,F1,F2
std::string images_csv(const PlaneMap& map, const std::vector<CriticalCurve>& curves);

// Shortest round-trip decimal form.
std::string format_number(double x);

// FNV-1a 64-bit digest as 16 hex digits.
std::string digest_hex(const std::string& data);

}  // namespace critinv
