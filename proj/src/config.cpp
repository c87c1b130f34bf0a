#include "critinv/config.hpp"

#include "critinv/errors.hpp"

namespace critinv {

namespace {

int require_int(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = obj.at(std::string(key));
  if (!v.is_number_integer()) throw Error(ErrorCode::ConfigInvalid, std::string(where) + ": '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

bool require_bool(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = obj.at(std::string(key));
  if (!v.is_boolean()) throw Error(ErrorCode::ConfigInvalid, std::string(where) + ": '" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

template <typename T, typename Fn>
void optional_field(const Json& obj, std::string_view key, T& target, Fn&& read) {
  if (obj.contains(std::string(key))) target = read(obj, key);
}

void read_grid(const Json& j, Grid& g) {
  constexpr std::string_view w = "grid";
  require_known_keys(j, {"nV", "nT", "log_V"}, w);
  optional_field(j, "nV", g.nV, [&](const Json& o, std::string_view k) { return require_int(o, k, w); });
  optional_field(j, "nT", g.nT, [&](const Json& o, std::string_view k) { return require_int(o, k, w); });
  optional_field(j, "log_V", g.log_V, [&](const Json& o, std::string_view k) { return require_bool(o, k, w); });
}

void read_trace(const Json& j, TraceParams& t) {
  constexpr std::string_view w = "trace";
  require_known_keys(j, {"curve_tol", "step", "max_points", "max_adaptations", "merge_radius"}, w);
  auto num = [&](const Json& o, std::string_view k) { return require_number(o, k, w); };
  auto integer = [&](const Json& o, std::string_view k) { return require_int(o, k, w); };
  optional_field(j, "curve_tol", t.curve_tol, num);
  optional_field(j, "step", t.step, num);
  optional_field(j, "max_points", t.max_points, integer);
  optional_field(j, "max_adaptations", t.max_adaptations, integer);
  optional_field(j, "merge_radius", t.merge_radius, num);
}

void read_bank(const Json& j, BankConfig& b) {
  constexpr std::string_view w = "bank";
  require_known_keys(j, {"seed_nV", "seed_nT", "seed_box", "ring_radius", "ring_count", "newton_tol",
                         "max_iterations", "max_halvings", "dedupe_radius"},
                     w);
  auto num = [&](const Json& o, std::string_view k) { return require_number(o, k, w); };
  auto integer = [&](const Json& o, std::string_view k) { return require_int(o, k, w); };
  optional_field(j, "seed_nV", b.seed_nV, integer);
  optional_field(j, "seed_nT", b.seed_nT, integer);
  if (j.contains("seed_box")) b.seed_box = box_from_json(j["seed_box"]);
  optional_field(j, "ring_radius", b.ring_radius, num);
  optional_field(j, "ring_count", b.ring_count, integer);
  optional_field(j, "newton_tol", b.params.newton.tol, num);
  optional_field(j, "max_iterations", b.params.newton.max_iterations, integer);
  optional_field(j, "max_halvings", b.params.newton.max_halvings, integer);
  optional_field(j, "dedupe_radius", b.params.dedupe_radius, num);
  if (b.seed_nV < 2 || b.seed_nT < 2 || !(b.ring_radius > 0.0) || b.ring_count < 1 || !(b.params.newton.tol > 0.0) ||
      b.params.newton.max_iterations < 1 || b.params.newton.max_halvings < 0 || !(b.params.dedupe_radius > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "bank: parameters out of range");
  }
}

void read_inversion(const Json& j, InversionParams& p) {
  constexpr std::string_view w = "inversion";
  require_known_keys(j, {"steps_per_leg", "corrector_tol", "intermediate_tol", "max_corrector_iterations",
                         "max_total_iterations", "min_step_fraction", "detj_guard", "leg_order", "singular_det",
                         "cluster_radius", "merge_radius", "attempts_per_cluster", "null_certificate_tol"},
                     w);
  auto num = [&](const Json& o, std::string_view k) { return require_number(o, k, w); };
  auto integer = [&](const Json& o, std::string_view k) { return require_int(o, k, w); };
  optional_field(j, "steps_per_leg", p.steps_per_leg, integer);
  optional_field(j, "corrector_tol", p.corrector_tol, num);
  optional_field(j, "intermediate_tol", p.intermediate_tol, num);
  optional_field(j, "max_corrector_iterations", p.max_corrector_iterations, integer);
  optional_field(j, "max_total_iterations", p.max_total_iterations, integer);
  optional_field(j, "min_step_fraction", p.min_step_fraction, num);
  optional_field(j, "detj_guard", p.detj_guard, [&](const Json& o, std::string_view k) { return require_bool(o, k, w); });
  if (j.contains("leg_order")) {
    const Json& v = j["leg_order"];
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "F1First") {
      p.leg_order = LegOrder::F1First;
    } else if (s == "F2First") {
      p.leg_order = LegOrder::F2First;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "inversion: leg_order must be \"F1First\" or \"F2First\"");
    }
  }
  optional_field(j, "singular_det", p.singular_det, num);
  optional_field(j, "cluster_radius", p.cluster_radius, num);
  optional_field(j, "merge_radius", p.merge_radius, num);
  optional_field(j, "attempts_per_cluster", p.attempts_per_cluster, integer);
  optional_field(j, "null_certificate_tol", p.null_certificate_tol, num);
  p.validate();
}

void read_solve(const Json& j, SolveConfig& s) {
  constexpr std::string_view w = "solve";
  require_known_keys(j, {"seeds", "method", "swap_loops", "inner_tol", "outer_tol", "max_inner", "max_outer"}, w);
  if (j.contains("seeds")) {
    const Json& seeds = j["seeds"];
    if (!seeds.is_array()) throw Error(ErrorCode::ConfigInvalid, "solve: 'seeds' must be an array");
    for (const auto& p : seeds) {
      require_known_keys(p, {"V", "T"}, "solve seed");
      s.seeds.push_back({require_number(p, "V", "solve seed"), require_number(p, "T", "solve seed")});
    }
  }
  if (j.contains("method")) {
    const std::string m = j["method"].is_string() ? j["method"].get<std::string>() : "";
    if (m == "double_loop") {
      s.method = SolveMethod::DoubleLoop;
    } else if (m == "newton") {
      s.method = SolveMethod::Newton;
    } else if (m == "both") {
      s.method = SolveMethod::Both;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "solve: method must be \"double_loop\", \"newton\" or \"both\"");
    }
  }
  auto num = [&](const Json& o, std::string_view k) { return require_number(o, k, w); };
  auto integer = [&](const Json& o, std::string_view k) { return require_int(o, k, w); };
  optional_field(j, "swap_loops", s.double_loop.swap_loops,
                 [&](const Json& o, std::string_view k) { return require_bool(o, k, w); });
  optional_field(j, "inner_tol", s.double_loop.inner_tol, num);
  optional_field(j, "outer_tol", s.double_loop.outer_tol, num);
  optional_field(j, "max_inner", s.double_loop.max_inner, integer);
  optional_field(j, "max_outer", s.double_loop.max_outer, integer);
  s.double_loop.validate();
}

}  // namespace

RunConfig config_from_json(const Json& j) {
  require_known_keys(j, {"name", "mixture", "domain_box", "grid", "trace", "bank", "inversion", "solve", "sweep"},
                     "config");
  if (!j.contains("mixture") || !j.contains("domain_box"))
    throw Error(ErrorCode::ConfigInvalid, "config: 'mixture' and 'domain_box' are required");
  try {
    RunConfig cfg{j.contains("name") ? j["name"].get<std::string>() : std::string("unnamed"),
                  mixture_from_json(j["mixture"]),
                  box_from_json(j["domain_box"]),
                  {},
                  {},
                  {},
                  {},
                  {},
                  {}};
    cfg.grid = Grid::over(cfg.box);
    if (j.contains("grid")) read_grid(j["grid"], cfg.grid);
    cfg.grid.validate();
    if (j.contains("trace")) read_trace(j["trace"], cfg.trace);
    if (j.contains("bank")) read_bank(j["bank"], cfg.bank);
    if (j.contains("inversion")) read_inversion(j["inversion"], cfg.inversion);
    if (j.contains("solve")) read_solve(j["solve"], cfg.solve);
    if (j.contains("sweep")) {
      const Json& s = j["sweep"];
      require_known_keys(s, {"compositions"}, "sweep");
      if (!s.contains("compositions") || !s["compositions"].is_array())
        throw Error(ErrorCode::ConfigInvalid, "sweep: 'compositions' must be an array of mole fractions");
      for (const auto& x : s["compositions"]) {
        if (!x.is_number() || !(x.get<double>() > 0.0) || !(x.get<double>() < 1.0))
          throw Error(ErrorCode::ConfigInvalid, "sweep: compositions must lie strictly between 0 and 1");
        cfg.sweep.push_back(x.get<double>());
      }
    }
    return cfg;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::ConfigInvalid, "config file not found: " + path.string());
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, "config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<DomainPoint> bank_seeds(const RunConfig& cfg) {
  return seed_grid(cfg.bank.seed_box.value_or(cfg.box), cfg.bank.seed_nV, cfg.bank.seed_nT, cfg.grid.log_V);
}

}  // namespace critinv
