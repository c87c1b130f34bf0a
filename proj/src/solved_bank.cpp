#include "critinv/solved_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "critinv/critical_set.hpp"
#include "critinv/detail/parallel.hpp"
#include "critinv/errors.hpp"

namespace critinv {

std::vector<ImagePoint> ring_targets(double r, int count) {
  if (!(r > 0.0) || count < 1) throw Error(ErrorCode::ConfigInvalid, "ring targets need r > 0 and count >= 1");
  std::vector<ImagePoint> out;
  for (double radius : {r, 4.0 * r}) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      out.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
  }
  return out;
}

std::vector<DomainPoint> seed_grid(const DomainBox& box, int nV, int nT, bool log_V) {
  const Grid g = Grid::over(box, nV, nT, log_V);
  std::vector<DomainPoint> out;
  out.reserve(static_cast<std::size_t>(nV) * nT);
  for (int i = 0; i < nV; ++i)
    for (int j = 0; j < nT; ++j) out.push_back(g.node(i, j));
  return out;
}

Bank build_bank(const PlaneMap& map, const std::vector<DomainPoint>& seeds, const std::vector<ImagePoint>& targets,
                const BankParams& params, BankStats* stats) {
  for (const auto& q : targets)
    if (q.F1 == 0.0 && q.F2 == 0.0) throw Error(ErrorCode::ConfigInvalid, "bank targets must be nonzero");
  const std::size_t n = seeds.size() * targets.size();
  std::vector<std::optional<SolvedPoint>> solved(n);
  detail::parallel_for(n, params.threads, [&](std::size_t k) {
    const std::size_t s = k / targets.size();
    const std::size_t t = k % targets.size();
    const NewtonResult r = damped_newton(map, seeds[s], targets[t], params.newton);
    if (!r.converged()) return;
    std::ostringstream label;
    label << "seed" << s << "/target" << t;
    solved[k] = SolvedPoint{r.p, r.F, label.str()};
  });

  Bank bank;
  BankStats st;
  st.attempted = n;
  for (auto& s : solved) {
    if (!s) continue;
    ++st.converged;
    const bool dup = std::any_of(bank.entries.begin(), bank.entries.end(), [&](const SolvedPoint& e) {
      return map.domain_distance(e.p, s->p) < params.dedupe_radius;
    });
    if (dup) {
      ++st.duplicates;
      continue;
    }
    bank.entries.push_back(std::move(*s));
  }
  if (stats) *stats = st;
  bank.provenance.creation = {{"seeds", seeds.size()},
                              {"targets", targets.size()},
                              {"attempted", st.attempted},
                              {"converged", st.converged},
                              {"duplicates", st.duplicates},
                              {"newton_tol", params.newton.tol},
                              {"max_halvings", params.newton.max_halvings},
                              {"dedupe_radius", params.dedupe_radius}};
  if (bank.empty()) {
    std::ostringstream os;
    os << "no (seed, target) pair converged out of " << n;
    throw Error(ErrorCode::EmptyBank, os.str());
  }
  return bank;
}

std::string mixture_id(const MixtureSpec& spec) {
  return spec.components()[0].name + "+" + spec.components()[1].name;
}

namespace {

void tag_provenance(Bank& bank, const CriticalContext& ctx) {
  bank.provenance.mixture_id = mixture_id(ctx.spec());
  bank.provenance.composition = ctx.spec().z();
  bank.provenance.model_stack = ctx.spec().model_stack();
  bank.provenance.mixture = ctx.spec();
  bank.provenance.box = ctx.box();
}

}  // namespace

Bank build_bank(const CriticalContext& ctx, const std::vector<DomainPoint>& seeds,
                const std::vector<ImagePoint>& targets, const BankParams& params, BankStats* stats) {
  Bank bank = build_bank(static_cast<const PlaneMap&>(ctx), seeds, targets, params, stats);
  tag_provenance(bank, ctx);
  return bank;
}

std::vector<SolvedPoint> nearest(const Bank& bank, const ImagePoint& q_target, std::size_t k) {
  if (bank.empty()) throw Error(ErrorCode::EmptyBank, "bank has no entries");
  std::vector<std::size_t> idx(bank.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> d(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) d[i] = image_distance(bank.entries[i].q, q_target);
  k = std::min(k, idx.size());
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<SolvedPoint> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(bank.entries[idx[i]]);
  return out;
}

std::vector<std::vector<std::size_t>> cluster_entries(const PlaneMap& map, const Bank& bank, double radius) {
  const std::size_t n = bank.size();
  std::vector<int> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = det_j(map, bank.entries[i].p);
    sign[i] = std::isfinite(d) ? (d > 0.0) - (d < 0.0) : 0;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sign[i] != sign[j]) continue;
      if (map.domain_distance(bank.entries[i].p, bank.entries[j].p) > radius) continue;
      const std::size_t a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return clusters;
}

Bank reuse_bank(const Bank& bank, const CriticalContext& new_ctx) {
  if (bank.empty()) throw Error(ErrorCode::EmptyBank, "bank has no entries");
  if (bank.provenance.mixture && !bank.provenance.mixture->same_model(new_ctx.spec())) {
    throw Error(ErrorCode::ModelMismatch, "bank was built for " + bank.provenance.mixture_id + " (" +
                                              bank.provenance.model_stack + "), context is " +
                                              mixture_id(new_ctx.spec()) + " (" + new_ctx.spec().model_stack() + ")");
  }
  if (!bank.provenance.mixture && (bank.provenance.mixture_id != mixture_id(new_ctx.spec()) ||
                                   bank.provenance.model_stack != new_ctx.spec().model_stack())) {
    throw Error(ErrorCode::ModelMismatch, "bank provenance does not match the context's component pair");
  }
  Bank out;
  out.provenance = bank.provenance;
  out.provenance.creation["reused_from_composition"] = Json::array({bank.provenance.composition[0],
                                                                     bank.provenance.composition[1]});
  tag_provenance(out, new_ctx);
  out.entries.reserve(bank.size());
  for (const auto& e : bank.entries) {
    const auto f = new_ctx.try_evaluate(e.p);
    if (!f) continue;
    out.entries.push_back({e.p, f->F, e.source_label});
  }
  if (out.empty()) throw Error(ErrorCode::EmptyBank, "no bank entry is valid under the new context");
  return out;
}

Json to_json(const Bank& bank) {
  Json prov;
  prov["mixture_id"] = bank.provenance.mixture_id;
  prov["composition"] = Json::array({bank.provenance.composition[0], bank.provenance.composition[1]});
  prov["model_stack"] = bank.provenance.model_stack;
  if (bank.provenance.mixture) prov["mixture"] = to_json(*bank.provenance.mixture);
  if (bank.provenance.box) prov["domain_box"] = to_json(*bank.provenance.box);
  prov["creation"] = bank.provenance.creation;
  Json entries = Json::array();
  for (const auto& e : bank.entries)
    entries.push_back({{"V", e.p.V}, {"T", e.p.T}, {"F1", e.q.F1}, {"F2", e.q.F2}, {"source_label", e.source_label}});
  Json j;
  j["provenance"] = prov;
  j["entries"] = entries;
  return j;
}

Bank bank_from_json(const Json& j) {
  require_known_keys(j, {"provenance", "entries"}, "bank");
  if (!j.contains("provenance") || !j.contains("entries"))
    throw Error(ErrorCode::ConfigInvalid, "bank: needs 'provenance' and 'entries'");
  const Json& prov = j["provenance"];
  require_known_keys(prov, {"mixture_id", "composition", "model_stack", "mixture", "domain_box", "creation"},
                     "bank provenance");
  Bank bank;
  if (prov.contains("mixture_id")) bank.provenance.mixture_id = prov["mixture_id"].get<std::string>();
  if (prov.contains("model_stack")) bank.provenance.model_stack = prov["model_stack"].get<std::string>();
  if (prov.contains("composition")) {
    const Json& c = prov["composition"];
    if (!c.is_array() || c.size() != 2) throw Error(ErrorCode::ConfigInvalid, "bank: bad composition");
    bank.provenance.composition = {c[0].get<double>(), c[1].get<double>()};
  }
  if (prov.contains("mixture")) bank.provenance.mixture = mixture_from_json(prov["mixture"]);
  if (prov.contains("domain_box")) bank.provenance.box = box_from_json(prov["domain_box"]);
  if (prov.contains("creation")) bank.provenance.creation = prov["creation"];
  const Json& entries = j["entries"];
  if (!entries.is_array()) throw Error(ErrorCode::ConfigInvalid, "bank: 'entries' must be an array");
  for (const auto& e : entries) {
    require_known_keys(e, {"V", "T", "F1", "F2", "source_label"}, "bank entry");
    SolvedPoint s;
    s.p = {require_number(e, "V", "bank entry"), require_number(e, "T", "bank entry")};
    s.q = {require_number(e, "F1", "bank entry"), require_number(e, "F2", "bank entry")};
    if (e.contains("source_label")) s.source_label = e["source_label"].get<std::string>();
    bank.entries.push_back(std::move(s));
  }
  return bank;
}

void save_bank(const Bank& bank, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(bank).dump(2) + "\n");
}

Bank load_bank(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, "bank " + path.string() + ": " + e.what());
  }
  return bank_from_json(j);
}

}  // namespace critinv
