// critinv: critical points of binary mixtures by inversion of plane maps.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critinv/config.hpp"
#include "critinv/demo1d.hpp"
#include "critinv/errors.hpp"
#include "critinv/export.hpp"

namespace fs = std::filesystem;
using namespace critinv;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kBankError = 3, kNumericError = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return kConfigError;
    case ErrorCode::EmptyBank:
    case ErrorCode::ModelMismatch: return kBankError;
    default: return kNumericError;
  }
}

struct Options {
  std::string config;
  std::string bank;
  std::string out = ".";
  std::string grid;
  std::string seed_box;
  int steps = 0;
  bool no_guard = false;
  std::string format = "csv";
  std::vector<double> compositions;
  std::vector<double> q_values{1.0, -2.0, 3.0};
  std::vector<double> interval{-5.0, 5.0};
  std::vector<std::string> seeds;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> split_numbers(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigInvalid, "cannot parse " + what + " '" + s + "'");
    }
  }
  return out;
}

RunConfig load_with_overrides(const Options& o) {
  if (o.config.empty()) throw Error(ErrorCode::ConfigInvalid, "--config is required");
  RunConfig cfg = load_config(o.config);
  if (!o.grid.empty()) {
    const auto n = split_numbers(o.grid, 'x', "--grid (expected NVxNT)");
    if (n.size() != 2 || n[0] < 2 || n[1] < 2) throw Error(ErrorCode::ConfigInvalid, "--grid expects NVxNT with both >= 2");
    cfg.grid.nV = static_cast<int>(n[0]);
    cfg.grid.nT = static_cast<int>(n[1]);
  }
  if (!o.seed_box.empty()) {
    const auto b = split_numbers(o.seed_box, ',', "--seed-box (expected Vmin,Vmax,Tmin,Tmax)");
    if (b.size() != 4) throw Error(ErrorCode::ConfigInvalid, "--seed-box expects Vmin,Vmax,Tmin,Tmax");
    DomainBox box{b[0], b[1], b[2], b[3]};
    box.validate();
    cfg.bank.seed_box = box;
  }
  if (o.steps > 0) cfg.inversion.steps_per_leg = o.steps;
  if (o.no_guard) cfg.inversion.detj_guard = false;
  if (!o.compositions.empty()) cfg.sweep = o.compositions;
  for (const auto& s : o.seeds) {
    const auto p = split_numbers(s, ',', "--seed (expected V,T)");
    if (p.size() != 2) throw Error(ErrorCode::ConfigInvalid, "--seed expects V,T");
    cfg.solve.seeds.push_back({p[0], p[1]});
  }
  return cfg;
}

std::string inputs_digest(const Options& o) {
  std::string data = read_file(o.config);
  if (!o.bank.empty()) data += read_file(o.bank);
  return digest_hex(data);
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Bank make_bank(const RunConfig& cfg, const CriticalContext& ctx, BankStats* stats) {
  return build_bank(ctx, bank_seeds(cfg), ring_targets(cfg.bank.ring_radius, cfg.bank.ring_count), cfg.bank.params,
                    stats);
}

// Bank from --bank (re-tagged for ctx), or built in-process.
Bank obtain_bank(const Options& o, const RunConfig& cfg, const CriticalContext& ctx) {
  if (o.bank.empty()) return make_bank(cfg, ctx, nullptr);
  return reuse_bank(load_bank(o.bank), ctx);
}

Json paths_json(const InversionReport& rep, const Bank& bank) {
  Json out = Json::array();
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const auto& r = rep.runs[i];
    out.push_back({{"path", i},
                   {"cluster", r.cluster},
                   {"start_entry", r.entry},
                   {"start_label", bank.entries[r.entry].source_label},
                   {"outcome", std::string(to_string(r.trace.outcome))},
                   {"message", r.trace.message},
                   {"points", r.trace.domain_points.size()}});
  }
  return out;
}

Json rejected_json(const InversionReport& rep) {
  Json out = Json::array();
  for (const auto& r : rep.rejected) out.push_back({{"path", r.run}, {"V", r.p.V}, {"T", r.p.T}, {"reason", r.reason}});
  return out;
}

std::string results_csv(const std::vector<CriticalPointResult>& results, std::optional<double> x1 = std::nullopt) {
  std::ostringstream os;
  if (x1) os << "x1,";
  os << "Pc[kPa],Tc[K],Vc[m3/mol],F1_raw,F2_raw,stability\n";
  for (const auto& r : results) {
    if (x1) os << format_number(*x1) << ',';
    os << format_number(r.P) << ',' << format_number(r.T) << ',' << format_number(r.V) << ','
       << format_number(r.residuals.F1) << ',' << format_number(r.residuals.F2) << ',' << to_string(r.stability)
       << '\n';
  }
  return os.str();
}

void print_results(const std::vector<CriticalPointResult>& results) {
  for (const auto& r : results) {
    std::printf("  Tc = %.4f K  Vc = %.6e m3/mol  Pc = %.3f kPa  F = (%.3e, %.3e)  %s\n", r.T, r.V, r.P,
                r.residuals.F1, r.residuals.F2, std::string(to_string(r.stability)).c_str());
  }
}

int cmd_critset(const Options& o) {
  Timer timer;
  const RunConfig cfg = load_with_overrides(o);
  const CriticalContext ctx = cfg.context();
  const CriticalSet cs = trace_critical_set(ctx, cfg.grid, cfg.trace);
  const fs::path out(o.out);
  write_file_atomic(out / "sign_grid.csv", sign_grid_csv(cs.signs));
  if (o.format == "json") {
    write_json(out / "curves.json", {{"config", cfg.name}, {"curves", curves_json(ctx, cs.curves)}});
  } else {
    write_file_atomic(out / "curves.csv", curves_csv(ctx, cs.curves));
  }
  write_file_atomic(out / "images.csv", images_csv(ctx, cs.curves));
  std::printf("%s: %d sign-change edges, %zu seeds (%d stalled), %zu curves (%d lost), %.2f s\n", cfg.name.c_str(),
              cs.signs.sign_change_edges(), cs.seeds.roots.size(), cs.seeds.stalls, cs.curves.size(), cs.lost_traces,
              timer.seconds());
  return kOk;
}

int cmd_bank(const Options& o) {
  Timer timer;
  RunConfig cfg = load_with_overrides(o);
  // --grid sets the seed grid for this command.
  if (!o.grid.empty()) {
    cfg.bank.seed_nV = cfg.grid.nV;
    cfg.bank.seed_nT = cfg.grid.nT;
  }
  const CriticalContext ctx = cfg.context();
  BankStats st;
  const Bank bank = make_bank(cfg, ctx, &st);
  const fs::path path = fs::path(o.out) / "bank.json";
  save_bank(bank, path);
  std::printf("%s: %zu entries (%zu of %zu pairs converged, %zu duplicates) -> %s, %.2f s\n", cfg.name.c_str(),
              bank.size(), st.converged, st.attempted, st.duplicates, path.string().c_str(), timer.seconds());
  return kOk;
}

int cmd_invert(const Options& o) {
  Timer timer;
  const RunConfig cfg = load_with_overrides(o);
  const CriticalContext ctx = cfg.context();
  const Bank bank = obtain_bank(o, cfg, ctx);
  const double t_bank = timer.seconds();
  const InversionReport rep = run_inversion(ctx, bank, cfg.inversion);
  const fs::path out(o.out);
  Json res = Json::array();
  for (const auto& r : rep.results) res.push_back(to_json(r));
  Json report;
  report["command"] = "invert";
  report["config"] = cfg.name;
  report["inputs_digest"] = inputs_digest(o);
  report["composition"] = Json::array({ctx.spec().z()[0], ctx.spec().z()[1]});
  report["results"] = res;
  report["paths"] = paths_json(rep, bank);
  report["rejected"] = rejected_json(rep);
  write_json(out / "results.json", report);
  if (o.format == "csv") write_file_atomic(out / "results.csv", results_csv(rep.results));
  for (const auto& old : fs::exists(out / "paths") ? fs::directory_iterator(out / "paths") : fs::directory_iterator())
    if (old.path().filename().string().rfind("path_", 0) == 0) fs::remove(old.path());
  for (std::size_t i = 0; i < rep.runs.size(); ++i)
    write_file_atomic(out / "paths" / ("path_" + std::to_string(i) + ".csv"), path_csv(rep.runs[i].trace));
  write_json(out / "timings.json", {{"bank_s", t_bank}, {"total_s", timer.seconds()}});
  std::printf("%s: %zu critical point(s) from %zu path(s), %.2f s\n", cfg.name.c_str(), rep.results.size(),
              rep.runs.size(), timer.seconds());
  print_results(rep.results);
  if (rep.results.empty()) {
    for (const auto& r : rep.runs)
      std::fprintf(stderr, "  path from entry %zu: %s %s\n", r.entry, std::string(to_string(r.trace.outcome)).c_str(),
                   r.trace.message.c_str());
    std::fprintf(stderr, "error: NoConvergence: no inversion path converged\n");
    return kNumericError;
  }
  return kOk;
}

int cmd_solve(const Options& o) {
  const RunConfig cfg = load_with_overrides(o);
  if (cfg.solve.seeds.empty()) throw Error(ErrorCode::ConfigInvalid, "solve needs seeds (config 'solve.seeds' or --seed V,T)");
  const CriticalContext ctx = cfg.context();
  Json runs = Json::array();
  std::vector<CriticalPointResult> found;
  for (const auto& seed : cfg.solve.seeds) {
    if (cfg.solve.method != SolveMethod::Newton) {
      DoubleLoopParams dp = cfg.solve.double_loop;
      dp.initial = seed;
      Json run{{"method", "hk_double_loop"}, {"seed", {{"V", seed.V}, {"T", seed.T}}}};
      try {
        const auto r = hk_double_loop(ctx, dp);
        run["converged"] = true;
        run["result"] = to_json(r);
        found.push_back(r);
      } catch (const Error& e) {
        run["converged"] = false;
        run["error"] = e.what();
      }
      runs.push_back(run);
    }
    if (cfg.solve.method != SolveMethod::DoubleLoop) {
      const auto n = newton_2x2(ctx, seed, cfg.solve.newton);
      Json run{{"method", "newton_2x2"},
               {"seed", {{"V", seed.V}, {"T", seed.T}}},
               {"converged", n.converged},
               {"status", std::string(to_string(n.newton.status))},
               {"iterations", n.newton.iterations}};
      if (n.result) {
        run["result"] = to_json(*n.result);
        found.push_back(*n.result);
      }
      runs.push_back(run);
    }
  }
  write_json(fs::path(o.out) / "solve.json",
             {{"command", "solve"}, {"config", cfg.name}, {"inputs_digest", inputs_digest(o)}, {"runs", runs}});
  std::printf("%s: %zu converged solver run(s)\n", cfg.name.c_str(), found.size());
  print_results(found);
  return found.empty() ? kNumericError : kOk;
}

int cmd_sweep(const Options& o) {
  Timer timer;
  const RunConfig cfg = load_with_overrides(o);
  std::vector<double> xs = cfg.sweep;
  if (xs.empty()) xs.push_back(cfg.mixture.z()[0]);
  const Bank base = o.bank.empty() ? make_bank(cfg, cfg.context(), nullptr) : load_bank(o.bank);
  std::vector<double> order = xs;
  std::sort(order.begin(), order.end());
  const fs::path out(o.out);
  Json rows = Json::array();
  std::ostringstream locus;
  locus << "x1,Pc[kPa],Tc[K],Vc[m3/mol],F1_raw,F2_raw,stability\n";
  int failures = 0;
  std::size_t points = 0;
  for (double x : order) {
    Json row{{"x1", x}};
    try {
      const CriticalContext ctx = cfg.context(x);
      const Bank bank = reuse_bank(base, ctx);
      const InversionReport rep = run_inversion(ctx, bank, cfg.inversion);
      Json res = Json::array();
      for (const auto& r : rep.results) res.push_back(to_json(r));
      row["results"] = res;
      row["paths"] = paths_json(rep, bank);
      row["rejected"] = rejected_json(rep);
      const std::string csv = results_csv(rep.results, x);
      locus << csv.substr(csv.find('\n') + 1);
      points += rep.results.size();
      const CriticalSet cs = trace_critical_set(ctx, cfg.grid, cfg.trace);
      write_file_atomic(out / ("curves_x" + format_number(x) + ".csv"), curves_csv(ctx, cs.curves));
      if (rep.results.empty()) {
        ++failures;
        row["error"] = "NoConvergence: no inversion path converged";
      }
      std::printf("x1 = %s: %zu critical point(s)\n", format_number(x).c_str(), rep.results.size());
      print_results(rep.results);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ModelMismatch || e.code() == ErrorCode::ConfigInvalid) throw;
      ++failures;
      row["error"] = e.what();
      std::printf("x1 = %s: failed: %s\n", format_number(x).c_str(), e.what());
    }
    rows.push_back(row);
  }
  write_json(out / "sweep.json",
             {{"command", "sweep"}, {"config", cfg.name}, {"inputs_digest", inputs_digest(o)}, {"rows", rows}});
  write_file_atomic(out / "locus.csv", locus.str());
  write_json(out / "timings.json", {{"total_s", timer.seconds()}});
  std::printf("%s: %zu composition(s), %zu locus point(s), %d failure(s), %.2f s\n", cfg.name.c_str(), order.size(),
              points, failures, timer.seconds());
  return failures == static_cast<int>(order.size()) ? kNumericError : kOk;
}

int cmd_demo1d(const Options& o) {
  if (o.interval.size() != 2 || !(o.interval[1] > o.interval[0]))
    throw Error(ErrorCode::ConfigInvalid, "--interval expects two increasing numbers");
  std::ostringstream os;
  const auto cps = demo1d_critical_points();
  const auto cis = demo1d_critical_images();
  if (o.format == "json") {
    Json rows = Json::array();
    for (double q : o.q_values) {
      const auto r = demo1d_solve(q, o.interval[0], o.interval[1]);
      rows.push_back({{"q", q}, {"root_count", r.roots.size()}, {"roots", r.roots}});
    }
    os << Json{{"map", "p^3 - 3p"}, {"critical_points", cps}, {"critical_images", cis}, {"solutions", rows}}.dump(2)
       << '\n';
  } else {
    os << "# F(p) = p^3 - 3p\n# critical points:";
    for (double p : cps) os << ' ' << format_number(p);
    os << "\n# critical images:";
    for (double q : cis) os << ' ' << format_number(q);
    os << "\nq,root_count,roots\n";
    for (double q : o.q_values) {
      const auto r = demo1d_solve(q, o.interval[0], o.interval[1]);
      os << format_number(q) << ',' << r.roots.size() << ',';
      for (std::size_t i = 0; i < r.roots.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.roots[i]);
        os << (i ? " " : "") << buf;
      }
      os << '\n';
    }
  }
  if (o.out == ".") {
    std::cout << os.str();
  } else {
    write_file_atomic(o.out, os.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of binary mixtures by inversion of functions from the plane to the plane"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Mixture/run configuration (JSON)");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  };

  auto* critset = app.add_subcommand("critset", "Sign grid, critical curves and critical images");
  add_common(critset);
  critset->add_option("--grid", o.grid, "Grid size NVxNT (default from config, 201x201)");

  auto* bank = app.add_subcommand("bank", "Build a bank of solved points");
  add_common(bank);
  bank->add_option("--grid", o.grid, "Seed grid size NVxNT");
  bank->add_option("--seed-box", o.seed_box, "Seed box Vmin,Vmax,Tmin,Tmax");

  auto* invert = app.add_subcommand("invert", "Invert q = (0, 0): thermodynamic critical points");
  add_common(invert);
  invert->add_option("--bank", o.bank, "Bank file (built in-process when omitted)");
  invert->add_option("--seed-box", o.seed_box, "Seed box for an in-process bank");
  invert->add_option("--steps", o.steps, "Homotopy steps per leg");
  invert->add_flag("--no-guard", o.no_guard, "Disable the det J sign guard");

  auto* solve = app.add_subcommand("solve", "Reference solvers (double loop, 2x2 Newton) from seeds");
  add_common(solve);
  solve->add_option("--seed", o.seeds, "Initial point V,T (repeatable)");

  auto* sweep = app.add_subcommand("sweep", "Composition sweep reusing one bank");
  add_common(sweep);
  sweep->add_option("--bank", o.bank, "Bank file (built at the config composition when omitted)");
  sweep->add_option("--compositions", o.compositions, "Mole fractions of component 1")->delimiter(',');
  sweep->add_option("--steps", o.steps, "Homotopy steps per leg");
  sweep->add_flag("--no-guard", o.no_guard, "Disable the det J sign guard");
  sweep->add_option("--grid", o.grid, "Grid size NVxNT for the per-composition critical curves");

  auto* demo = app.add_subcommand("demo1d", "Pre-images under F(p) = p^3 - 3p");
  demo->add_option("--q", o.q_values, "Values of q")->delimiter(',')->allow_extra_args(false);
  demo->add_option("--interval", o.interval, "Search interval lo,hi")->delimiter(',')->expected(2);
  demo->add_option("--out", o.out, "Output file (stdout when omitted)");
  demo->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*critset) return cmd_critset(o);
    if (*bank) return cmd_bank(o);
    if (*invert) return cmd_invert(o);
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*demo) return cmd_demo1d(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "error: ConfigInvalid: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericError;
  }
  return kOk;
}
