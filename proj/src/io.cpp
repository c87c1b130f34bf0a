#include "critinv/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "critinv/errors.hpp"

namespace critinv {

namespace {

[[noreturn]] void config_error(std::string_view where, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, std::string(where) + ": " + what);
}

const Json& require(const Json& obj, std::string_view key, std::string_view where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) config_error(where, "missing key '" + std::string(key) + "'");
  return *it;
}

std::array<double, 2> pair_of_numbers(const Json& j, std::string_view key, std::string_view where) {
  const Json& v = require(j, key, where);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_error(where, "'" + std::string(key) + "' must be an array of two numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) config_error(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      config_error(where, "unknown key '" + item.key() + "'");
  }
}

double require_number(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number()) config_error(where, "'" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::string_view to_string(MixingRule rule) { return rule == MixingRule::VdW1 ? "vdW1" : "WongSandler"; }

Json to_json(const Component& c) {
  Json j;
  j["name"] = c.name;
  j["Tc_K"] = c.Tc;
  j["Pc_kPa"] = c.Pc_kPa;
  j["omega"] = c.omega;
  if (c.kappa1) j["kappa1"] = *c.kappa1;
  return j;
}

Component component_from_json(const Json& j) {
  constexpr std::string_view where = "component";
  require_known_keys(j, {"name", "Tc_K", "Pc_kPa", "omega", "kappa1"}, where);
  Component c;
  const Json& name = require(j, "name", where);
  if (!name.is_string()) config_error(where, "'name' must be a string");
  c.name = name.get<std::string>();
  c.Tc = require_number(j, "Tc_K", where);
  c.Pc_kPa = require_number(j, "Pc_kPa", where);
  c.omega = require_number(j, "omega", where);
  if (j.contains("kappa1")) c.kappa1 = require_number(j, "kappa1", where);
  c.validate();
  return c;
}

Json to_json(const MixtureSpec& spec) {
  Json j;
  j["components"] = Json::array({to_json(spec.components()[0]), to_json(spec.components()[1])});
  j["composition"] = Json::array({spec.z()[0], spec.z()[1]});
  j["k12"] = spec.k12();
  j["mixing_rule"] = std::string(to_string(spec.mixing_rule()));
  if (spec.nrtl()) {
    j["nrtl"] = {{"alpha", spec.nrtl()->alpha},
                 {"g12_over_R_K", spec.nrtl()->g12_over_R},
                 {"g21_over_R_K", spec.nrtl()->g21_over_R}};
  }
  return j;
}

MixtureSpec mixture_from_json(const Json& j) {
  constexpr std::string_view where = "mixture";
  require_known_keys(j, {"components", "composition", "k12", "mixing_rule", "nrtl"}, where);
  const Json& comps = require(j, "components", where);
  if (!comps.is_array() || comps.size() != 2) config_error(where, "'components' must list exactly two components");
  const auto z = pair_of_numbers(j, "composition", where);
  const double k12 = require_number(j, "k12", where);
  const Json& rule_j = require(j, "mixing_rule", where);
  if (!rule_j.is_string()) config_error(where, "'mixing_rule' must be a string");
  const auto rule_s = rule_j.get<std::string>();
  MixingRule rule;
  if (rule_s == "vdW1") {
    rule = MixingRule::VdW1;
  } else if (rule_s == "WongSandler") {
    rule = MixingRule::WongSandler;
  } else {
    config_error(where, "unknown mixing_rule '" + rule_s + "' (expected vdW1 or WongSandler)");
  }
  std::optional<NrtlParams> nrtl;
  if (j.contains("nrtl")) {
    const Json& n = j["nrtl"];
    require_known_keys(n, {"alpha", "g12_over_R_K", "g21_over_R_K"}, "nrtl");
    nrtl = NrtlParams{require_number(n, "alpha", "nrtl"), require_number(n, "g12_over_R_K", "nrtl"),
                      require_number(n, "g21_over_R_K", "nrtl")};
  }
  return MixtureSpec({component_from_json(comps[0]), component_from_json(comps[1])}, z, k12, rule, nrtl);
}

Json to_json(const DomainBox& box) {
  return {{"V_min", box.V_min}, {"V_max", box.V_max}, {"T_min", box.T_min}, {"T_max", box.T_max}};
}

DomainBox box_from_json(const Json& j) {
  constexpr std::string_view where = "domain_box";
  require_known_keys(j, {"V_min", "V_max", "T_min", "T_max"}, where);
  DomainBox b{require_number(j, "V_min", where), require_number(j, "V_max", where), require_number(j, "T_min", where),
              require_number(j, "T_max", where)};
  b.validate();
  return b;
}

Json to_json(const ResidualScaling& s) {
  return {{"V_ref", s.V_ref}, {"T_ref", s.T_ref}, {"F1_ref", s.F1_ref}, {"F2_ref", s.F2_ref}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace critinv
