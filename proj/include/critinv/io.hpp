#pragma once

// JSON mapping of model records and atomic file output.

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "critinv/critical_system.hpp"
#include "critinv/mixture_model.hpp"
#include "critinv/plane_map.hpp"

namespace critinv {

using Json = nlohmann::ordered_json;

// Throws ConfigInvalid when `obj` is not an object or holds a key outside
// `allowed`.
void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

// Typed field access with ConfigInvalid on missing or mistyped values.
double require_number(const Json& obj, std::string_view key, std::string_view where);

Json to_json(const Component& c);
Component component_from_json(const Json& j);

// {components, composition, k12, mixing_rule, nrtl?}
Json to_json(const MixtureSpec& spec);
MixtureSpec mixture_from_json(const Json& j);

Json to_json(const DomainBox& box);
DomainBox box_from_json(const Json& j);

Json to_json(const ResidualScaling& s);

std::string_view to_string(MixingRule rule);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace critinv
