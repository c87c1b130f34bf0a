#pragma once

// Inversion of q_target = (0, 0): L-shaped homotopy paths in the image from
// bank entries, followed by an Euler predictor and Newton corrector that
// refuses to cross det J = 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critinv/critical_system.hpp"
#include "critinv/io.hpp"
#include "critinv/solved_bank.hpp"

namespace critinv {

enum class LegOrder { F1First, F2First };

struct InversionParams {
  int steps_per_leg = 50;
  double corrector_tol = 1e-12;     // on F1^2 + F2^2 at the final target
  double intermediate_tol = 1e-10;  // on the squared residual at intermediate waypoints
  int max_corrector_iterations = 20;
  int max_total_iterations = 20000;
  double min_step_fraction = 1.0 / 1024.0;
  bool detj_guard = true;
  LegOrder leg_order = LegOrder::F1First;
  double singular_det = 1e-14;      // |det J| floor, scaled units
  double cluster_radius = 0.05;     // scaled domain units
  double merge_radius = 1e-4;       // scaled domain units, endpoint dedupe
  int attempts_per_cluster = 3;
  double null_certificate_tol = 1e-6;  // |unit_cubic_form| at accepted roots
  int threads = 0;

  void validate() const;
};

enum class PathOutcome { Converged, MaxIterations, CrossingDetected, CorrectorFailed, SingularJacobian };

std::string_view to_string(PathOutcome o);

struct PathTrace {
  std::vector<ImagePoint> image_waypoints;  // accepted targets, aligned with domain_points
  std::vector<DomainPoint> domain_points;
  std::vector<int> det_j_signs;
  std::vector<int> legs;   // 0 for the start point, then 1, 2 per leg
  PathOutcome outcome = PathOutcome::CorrectorFailed;
  std::string message;
  int iterations = 0;      // corrector iterations in total
};

struct CriticalPointResult {
  double T = 0.0;       // K
  double V = 0.0;       // m^3/mol
  double P = 0.0;       // kPa
  ImagePoint residuals; // raw (det Q, cubic form)
  ImagePoint scaled;    // scaled residuals
  Stability stability = Stability::Indefinite;
  PathTrace trace;
  std::string source;
};

// Waypoints from q_start to the corner and on to q_target, uniformly spaced per
// leg. Zero-length legs collapse.
std::vector<ImagePoint> l_path(const ImagePoint& q_start, const ImagePoint& q_target, int steps_per_leg,
                               LegOrder order = LegOrder::F1First);

PathTrace follow_path(const PlaneMap& map, const SolvedPoint& start, const std::vector<ImagePoint>& waypoints,
                      const InversionParams& params = {});

struct PathRun {
  std::size_t cluster = 0;
  std::size_t entry = 0;  // bank index of the start point
  PathTrace trace;
};

struct RejectedRoot {
  std::size_t run = 0;
  DomainPoint p;
  std::string reason;
};

struct InversionRuns {
  std::vector<PathRun> runs;
  std::vector<std::size_t> roots;  // indices into runs: distinct converged endpoints, sorted by (T, V)
  std::vector<RejectedRoot> rejected;
};

// Returns a reason when a converged endpoint is not an acceptable root.
using RootFilter = std::function<std::optional<std::string>(const DomainPoint&)>;

// Multi-start inversion over bank clusters; never throws on path failure.
// Converged endpoints outside the map's domain box are rejected, as are those
// refused by `filter`.
InversionRuns invert(const PlaneMap& map, const Bank& bank, const ImagePoint& q_target,
                     const InversionParams& params = {}, const RootFilter& filter = {});

struct InversionReport {
  std::vector<CriticalPointResult> results;
  std::vector<PathRun> runs;
  std::vector<RejectedRoot> rejected;
};

// Builds a critical-point record at p (pressure, raw residuals, stability).
CriticalPointResult make_result(const CriticalContext& ctx, const DomainPoint& p, std::string source);

InversionReport run_inversion(const CriticalContext& ctx, const Bank& bank, const InversionParams& params = {});

// As run_inversion, but throws NoConvergence (with per-path outcomes) when no
// path converges and EmptyBank for an empty bank.
InversionReport invert_origin(const CriticalContext& ctx, const Bank& bank, const InversionParams& params = {});

// CSV with columns leg, step, F1, F2, V, T, detJ_sign.
std::string path_csv(const PathTrace& trace);

Json to_json(const CriticalPointResult& r);

}  // namespace critinv
