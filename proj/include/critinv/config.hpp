#pragma once

// File-backed run configuration: mixture, domain box, and per-stage
// parameter overrides. Unknown keys are rejected at every level.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "critinv/critical_set.hpp"
#include "critinv/inversion.hpp"
#include "critinv/io.hpp"
#include "critinv/reference_solvers.hpp"
#include "critinv/solved_bank.hpp"

namespace critinv {

struct BankConfig {
  int seed_nV = 12;
  int seed_nT = 12;
  std::optional<DomainBox> seed_box;  // defaults to the domain box
  double ring_radius = 0.05;
  int ring_count = 8;
  BankParams params;
};

enum class SolveMethod { DoubleLoop, Newton, Both };

struct SolveConfig {
  std::vector<DomainPoint> seeds;
  SolveMethod method = SolveMethod::Both;
  DoubleLoopParams double_loop;
  NewtonParams newton = newton_2x2_defaults();
};

struct RunConfig {
  std::string name;
  MixtureSpec mixture;
  DomainBox box;
  Grid grid;
  TraceParams trace;
  BankConfig bank;
  InversionParams inversion;
  SolveConfig solve;
  std::vector<double> sweep;  // mole fractions of component 1

  CriticalContext context() const { return CriticalContext(mixture, box); }
  CriticalContext context(double x1) const { return CriticalContext(mixture.with_composition({x1, 1.0 - x1}), box); }
};

RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

std::vector<DomainPoint> bank_seeds(const RunConfig& cfg);

}  // namespace critinv
