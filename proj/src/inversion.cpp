#include "critinv/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "critinv/critical_set.hpp"
#include "critinv/detail/parallel.hpp"
#include "critinv/errors.hpp"
#include "critinv/export.hpp"

namespace critinv {

namespace {

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

bool same_point(const ImagePoint& a, const ImagePoint& b) { return a.F1 == b.F1 && a.F2 == b.F2; }

ImagePoint residual(const ImagePoint& f, const ImagePoint& q) { return {f.F1 - q.F1, f.F2 - q.F2}; }

struct Step {
  bool ok = false;
  bool singular = false;
  bool crossed = false;
  DomainPoint p;
  MapEval eval;
  int iterations = 0;
};

// Euler predictor from (p, J) toward q_new, then Newton on F = q_new.
Step predict_correct(const PlaneMap& map, const DomainPoint& p, const MapEval& at_p, const ImagePoint& q_cur,
                     const ImagePoint& q_new, double tol_sq, const InversionParams& params) {
  Step s;
  const auto du = solve2(at_p.J, {q_new.F1 - q_cur.F1, q_new.F2 - q_cur.F2}, params.singular_det);
  if (!du) {
    s.singular = true;
    return s;
  }
  const auto u = map.to_scaled(p);
  DomainPoint x = map.from_scaled({u[0] + (*du)[0], u[1] + (*du)[1]});
  auto e = map.try_evaluate(x);
  if (!e) return s;
  for (;;) {
    const ImagePoint r = residual(e->F, q_new);
    const double r2 = squared_norm(r);
    if (r2 < tol_sq) {
      s.ok = true;
      s.p = x;
      s.eval = *e;
      return s;
    }
    if (s.iterations >= params.max_corrector_iterations) return s;
    ++s.iterations;
    const auto dx = solve2(e->J, {-r.F1, -r.F2}, params.singular_det);
    if (!dx) {
      s.singular = true;
      return s;
    }
    // Backtrack on residual increase or on leaving the domain of definition.
    const auto ux = map.to_scaled(x);
    double lambda = 1.0;
    bool moved = false;
    for (int h = 0; h < 30 && !moved; ++h, lambda *= 0.5) {
      const DomainPoint trial = map.from_scaled({ux[0] + lambda * (*dx)[0], ux[1] + lambda * (*dx)[1]});
      auto te = map.try_evaluate(trial);
      if (!te) continue;
      if (squared_norm(residual(te->F, q_new)) < r2) {
        x = trial;
        e = te;
        moved = true;
      }
    }
    if (!moved) return s;
  }
}

}  // namespace

void InversionParams::validate() const {
  if (steps_per_leg < 1 || !(corrector_tol > 0.0) || !(intermediate_tol > 0.0) || max_corrector_iterations < 1 ||
      max_total_iterations < 1 || !(min_step_fraction > 0.0) || !(min_step_fraction < 1.0) ||
      !(singular_det >= 0.0) || !(cluster_radius > 0.0) || !(merge_radius > 0.0) || attempts_per_cluster < 1 ||
      !(null_certificate_tol > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "inversion parameters must be positive");
  }
  if (corrector_tol > intermediate_tol)
    throw Error(ErrorCode::ConfigInvalid, "corrector_tol must not exceed intermediate_tol");
}

std::string_view to_string(PathOutcome o) {
  switch (o) {
    case PathOutcome::Converged: return "Converged";
    case PathOutcome::MaxIterations: return "MaxIterations";
    case PathOutcome::CrossingDetected: return "CrossingDetected";
    case PathOutcome::CorrectorFailed: return "CorrectorFailed";
    case PathOutcome::SingularJacobian: return "SingularJacobian";
  }
  return "Unknown";
}

std::vector<ImagePoint> l_path(const ImagePoint& q_start, const ImagePoint& q_target, int steps_per_leg,
                               LegOrder order) {
  if (steps_per_leg < 1) throw Error(ErrorCode::ConfigInvalid, "steps_per_leg must be >= 1");
  const ImagePoint corner = order == LegOrder::F1First ? ImagePoint{q_target.F1, q_start.F2}
                                                       : ImagePoint{q_start.F1, q_target.F2};
  std::vector<ImagePoint> out{q_start};
  auto leg = [&](const ImagePoint& a, const ImagePoint& b) {
    if (same_point(a, b)) return;
    for (int k = 1; k <= steps_per_leg; ++k) {
      const double s = static_cast<double>(k) / steps_per_leg;
      out.push_back(k == steps_per_leg ? b : ImagePoint{a.F1 + s * (b.F1 - a.F1), a.F2 + s * (b.F2 - a.F2)});
    }
  };
  leg(q_start, corner);
  leg(corner, q_target);
  return out;
}

PathTrace follow_path(const PlaneMap& map, const SolvedPoint& start, const std::vector<ImagePoint>& waypoints,
                      const InversionParams& params) {
  PathTrace tr;
  if (waypoints.empty()) {
    tr.message = "no waypoints";
    return tr;
  }
  const bool single = waypoints.size() == 1;
  DomainPoint p = start.p;
  auto e = map.try_evaluate(p);
  if (!e) {
    tr.message = "start point is outside the domain of definition";
    return tr;
  }
  // Re-converge a start point that is not certified against the first waypoint.
  const double start_tol = single ? params.corrector_tol : params.intermediate_tol;
  if (squared_norm(residual(e->F, waypoints.front())) >= start_tol) {
    const Step s = predict_correct(map, p, *e, e->F, waypoints.front(), start_tol, params);
    tr.iterations += s.iterations;
    if (!s.ok) {
      tr.outcome = s.singular ? PathOutcome::SingularJacobian : PathOutcome::CorrectorFailed;
      tr.message = "start point could not be re-converged onto the first waypoint";
      return tr;
    }
    p = s.p;
    e = s.eval;
  }
  const int sign0 = sign_of(e->det());
  tr.image_waypoints.push_back(waypoints.front());
  tr.domain_points.push_back(p);
  tr.det_j_signs.push_back(sign0);
  tr.legs.push_back(0);

  ImagePoint q = waypoints.front();
  MapEval at_p = *e;
  int leg = 0;
  int prev_axis = -1;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const ImagePoint w = waypoints[k];
    const int axis = (w.F1 != waypoints[k - 1].F1) ? 0 : 1;
    if (axis != prev_axis) {
      ++leg;
      prev_axis = axis;
    }
    const bool last = k + 1 == waypoints.size();
    double frac = 1.0;
    while (!same_point(q, w)) {
      if (tr.iterations > params.max_total_iterations) {
        tr.outcome = PathOutcome::MaxIterations;
        tr.message = "iteration budget exhausted";
        return tr;
      }
      const ImagePoint q_try =
          frac >= 1.0 ? w : ImagePoint{q.F1 + frac * (w.F1 - q.F1), q.F2 + frac * (w.F2 - q.F2)};
      const bool final_target = last && frac >= 1.0;
      const double tol = final_target ? params.corrector_tol : params.intermediate_tol;
      Step s = predict_correct(map, p, at_p, q, q_try, tol, params);
      tr.iterations += s.iterations + 1;
      if (s.ok && params.detj_guard && sign_of(s.eval.det()) != sign0) {
        s.ok = false;
        s.crossed = true;
      }
      if (!s.ok) {
        frac *= 0.5;
        if (frac < params.min_step_fraction) {
          std::ostringstream os;
          os << "step at waypoint " << k << " failed below the minimum step fraction";
          if (s.crossed) {
            tr.outcome = PathOutcome::CrossingDetected;
            os << " (det J changes sign ahead; try a start point from another bank cluster)";
          } else if (s.singular) {
            tr.outcome = PathOutcome::SingularJacobian;
          } else {
            tr.outcome = PathOutcome::CorrectorFailed;
          }
          tr.message = os.str();
          return tr;
        }
        continue;
      }
      p = s.p;
      at_p = s.eval;
      q = q_try;
      tr.image_waypoints.push_back(q);
      tr.domain_points.push_back(p);
      tr.det_j_signs.push_back(sign_of(at_p.det()));
      tr.legs.push_back(leg);
      frac = std::min(1.0, 2.0 * frac);
    }
  }
  const double final_sq = squared_norm(residual(at_p.F, waypoints.back()));
  if (final_sq < params.corrector_tol) {
    tr.outcome = PathOutcome::Converged;
  } else {
    tr.outcome = PathOutcome::CorrectorFailed;
    tr.message = "final residual above tolerance";
  }
  return tr;
}

InversionRuns invert(const PlaneMap& map, const Bank& bank, const ImagePoint& q_target,
                     const InversionParams& params, const RootFilter& filter) {
  params.validate();
  if (bank.empty()) throw Error(ErrorCode::EmptyBank, "bank has no entries");
  const auto clusters = cluster_entries(map, bank, params.cluster_radius);
  std::vector<std::vector<PathRun>> per_cluster(clusters.size());
  detail::parallel_for(clusters.size(), params.threads, [&](std::size_t c) {
    std::vector<std::size_t> idx = clusters[c];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return image_distance(bank.entries[a].q, q_target) < image_distance(bank.entries[b].q, q_target);
    });
    const std::size_t tries = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(params.attempts_per_cluster));
    for (std::size_t t = 0; t < tries; ++t) {
      const SolvedPoint& s = bank.entries[idx[t]];
      PathRun run{c, idx[t], follow_path(map, s, l_path(s.q, q_target, params.steps_per_leg, params.leg_order), params)};
      const bool done = run.trace.outcome == PathOutcome::Converged;
      per_cluster[c].push_back(std::move(run));
      if (done) break;
    }
  });
  InversionRuns out;
  for (auto& v : per_cluster)
    for (auto& r : v) out.runs.push_back(std::move(r));
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    if (out.runs[i].trace.outcome != PathOutcome::Converged) continue;
    const DomainPoint& p = out.runs[i].trace.domain_points.back();
    std::optional<std::string> reason;
    if (!map.box().contains(p)) {
      reason = "endpoint outside the domain box";
    } else if (filter) {
      reason = filter(p);
    }
    if (reason) {
      out.rejected.push_back({i, p, *reason});
      continue;
    }
    const bool dup = std::any_of(out.roots.begin(), out.roots.end(), [&](std::size_t j) {
      return map.domain_distance(out.runs[j].trace.domain_points.back(), p) < params.merge_radius;
    });
    if (!dup) out.roots.push_back(i);
  }
  std::sort(out.roots.begin(), out.roots.end(), [&](std::size_t a, std::size_t b) {
    const DomainPoint& pa = out.runs[a].trace.domain_points.back();
    const DomainPoint& pb = out.runs[b].trace.domain_points.back();
    return pa.T != pb.T ? pa.T < pb.T : pa.V < pb.V;
  });
  return out;
}

CriticalPointResult make_result(const CriticalContext& ctx, const DomainPoint& p, std::string source) {
  CriticalPointResult r;
  r.T = p.T;
  r.V = p.V;
  r.P = pressure(ctx.spec(), ctx.state(p));
  r.residuals = ctx.raw_residuals(p);
  r.scaled = ctx.value(p);
  r.stability = stability_flag(q_matrix(ctx, p));
  r.source = std::move(source);
  return r;
}

InversionReport run_inversion(const CriticalContext& ctx, const Bank& bank, const InversionParams& params) {
  auto certificate = [&](const DomainPoint& p) -> std::optional<std::string> {
    const double c = unit_cubic_form(ctx, p);
    if (std::abs(c) <= params.null_certificate_tol) return std::nullopt;
    std::ostringstream os;
    os << "cubic form along the unit null direction of Q is " << c
       << " (scaled); endpoint sits at the pole of the pivot normalization";
    return os.str();
  };
  InversionRuns runs = invert(ctx, bank, {0.0, 0.0}, params, certificate);
  InversionReport rep;
  rep.rejected = runs.rejected;
  for (std::size_t i : runs.roots) {
    const PathRun& run = runs.runs[i];
    CriticalPointResult r = make_result(ctx, run.trace.domain_points.back(), bank.entries[run.entry].source_label);
    r.trace = run.trace;
    rep.results.push_back(std::move(r));
  }
  rep.runs = std::move(runs.runs);
  return rep;
}

InversionReport invert_origin(const CriticalContext& ctx, const Bank& bank, const InversionParams& params) {
  InversionReport rep = run_inversion(ctx, bank, params);
  if (rep.results.empty()) {
    std::ostringstream os;
    os << "no inversion path converged (" << rep.runs.size() << " paths):";
    for (const auto& r : rep.runs)
      os << " [cluster " << r.cluster << ", entry " << r.entry << ": " << to_string(r.trace.outcome)
         << (r.trace.message.empty() ? "" : " - " + r.trace.message) << "]";
    for (const auto& r : rep.rejected) os << " [rejected endpoint T=" << r.p.T << " K: " << r.reason << "]";
    throw Error(ErrorCode::NoConvergence, os.str());
  }
  return rep;
}

std::string path_csv(const PathTrace& trace) {
  std::ostringstream os;
  os << "leg,step,F1,F2,V[m3/mol],T[K],detJ_sign\n";
  int step = 0;
  int leg = -1;
  for (std::size_t i = 0; i < trace.domain_points.size(); ++i) {
    if (trace.legs[i] != leg) {
      leg = trace.legs[i];
      step = 0;
    }
    os << trace.legs[i] << ',' << step++ << ',' << format_number(trace.image_waypoints[i].F1) << ','
       << format_number(trace.image_waypoints[i].F2) << ',' << format_number(trace.domain_points[i].V) << ','
       << format_number(trace.domain_points[i].T) << ',' << trace.det_j_signs[i] << '\n';
  }
  return os.str();
}

Json to_json(const CriticalPointResult& r) {
  Json j;
  j["Tc_K"] = r.T;
  j["Vc_m3_per_mol"] = r.V;
  j["Pc_kPa"] = r.P;
  j["F1_raw"] = r.residuals.F1;
  j["F2_raw"] = r.residuals.F2;
  j["F1_scaled"] = r.scaled.F1;
  j["F2_scaled"] = r.scaled.F2;
  j["stability"] = std::string(to_string(r.stability));
  j["source"] = r.source;
  if (!r.trace.domain_points.empty()) {
    j["path_outcome"] = std::string(to_string(r.trace.outcome));
    j["path_points"] = r.trace.domain_points.size();
  }
  return j;
}

}  // namespace critinv
