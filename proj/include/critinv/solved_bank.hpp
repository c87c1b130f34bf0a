#pragma once

// Bank of solved points: converged solutions of F(p) = q for nonzero targets
// q near the origin. Bank entries seed the inversion homotopy.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "critinv/critical_system.hpp"
#include "critinv/io.hpp"
#include "critinv/newton.hpp"

namespace critinv {

struct SolvedPoint {
  DomainPoint p;
  ImagePoint q;  // F(p) at convergence (scaled)
  std::string source_label;
};

struct BankProvenance {
  std::string mixture_id;
  std::array<double, 2> composition{};
  std::string model_stack;
  std::optional<MixtureSpec> mixture;
  std::optional<DomainBox> box;
  Json creation = Json::object();
};

struct Bank {
  std::vector<SolvedPoint> entries;
  BankProvenance provenance;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

struct BankParams {
  NewtonParams newton;          // tol 1e-10 on ||F(p) - q||
  double dedupe_radius = 1e-6;  // scaled domain units
  int threads = 0;
};

struct BankStats {
  std::size_t attempted = 0;
  std::size_t converged = 0;
  std::size_t duplicates = 0;
};

// Ring layout: `count` equally spaced angles at radii r and 4r.
std::vector<ImagePoint> ring_targets(double r = 0.05, int count = 8);

// Regular nV x nT grid of domain seeds inside `box` (V geometric when log_V).
std::vector<DomainPoint> seed_grid(const DomainBox& box, int nV, int nT, bool log_V = true);

// Damped Newton for every (seed, target) pair; converged results are
// deduplicated and stored with the achieved q. Throws EmptyBank when nothing
// converges.
Bank build_bank(const PlaneMap& map, const std::vector<DomainPoint>& seeds, const std::vector<ImagePoint>& targets,
                const BankParams& params = {}, BankStats* stats = nullptr);

// Same, with provenance filled from the context.
Bank build_bank(const CriticalContext& ctx, const std::vector<DomainPoint>& seeds,
                const std::vector<ImagePoint>& targets, const BankParams& params = {}, BankStats* stats = nullptr);

// k entries by ascending scaled image distance; ties keep insertion order.
std::vector<SolvedPoint> nearest(const Bank& bank, const ImagePoint& q_target, std::size_t k);

// Connected components of entries under `radius` (scaled domain distance),
// split by the sign of det J so that no cluster straddles a critical curve.
// Clusters are listed by their lowest entry index; members ascending.
std::vector<std::vector<std::size_t>> cluster_entries(const PlaneMap& map, const Bank& bank, double radius);

// Re-tags entries with q = F_new(p). Throws ModelMismatch when the component
// pair or model stack differ, EmptyBank when the bank is empty.
Bank reuse_bank(const Bank& bank, const CriticalContext& new_ctx);

std::string mixture_id(const MixtureSpec& spec);

Json to_json(const Bank& bank);
Bank bank_from_json(const Json& j);
void save_bank(const Bank& bank, const std::filesystem::path& path);
Bank load_bank(const std::filesystem::path& path);

}  // namespace critinv
