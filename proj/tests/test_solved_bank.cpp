#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <optional>
#include <set>

#include "critinv/critical_set.hpp"
#include "critinv/solved_bank.hpp"
#include "support.hpp"

using namespace critinv;
using namespace critinv::testing;

namespace {

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class MethaneH2sBank : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ctx_ = new CriticalContext(methane_h2s(), methane_h2s_box());
    bank_ = new Bank(build_bank(*ctx_, seed_grid(ctx_->box(), 12, 12), ring_targets()));
  }
  static void TearDownTestSuite() {
    delete bank_;
    delete ctx_;
  }
  static CriticalContext* ctx_;
  static Bank* bank_;
};
CriticalContext* MethaneH2sBank::ctx_ = nullptr;
Bank* MethaneH2sBank::bank_ = nullptr;

}  // namespace

TEST(RingTargets, Layout) {
  const auto t = ring_targets(0.05, 8);
  ASSERT_EQ(t.size(), 16u);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(std::hypot(t[k].F1, t[k].F2), 0.05, 1e-15);
    EXPECT_NEAR(std::hypot(t[8 + k].F1, t[8 + k].F2), 0.2, 1e-15);
  }
}

TEST(SeedGrid, CoversBoxCorners) {
  const auto s = seed_grid({1e-5, 1e-3, 100, 300}, 3, 2, true);
  ASSERT_EQ(s.size(), 6u);
  std::set<std::pair<double, double>> pts;
  for (const auto& p : s) pts.insert({p.V, p.T});
  EXPECT_TRUE(pts.count({1e-5, 100.0}));
  EXPECT_TRUE(pts.count({1e-5, 300.0}));
}

TEST(BuildBank, SeedThatAlreadySolvesIsStoredUnchanged) {
  const LineMap m(2.0);
  const DomainPoint seed{2.5, 1.5};
  const ImagePoint q = m.value(seed);
  BankStats stats;
  const Bank b = build_bank(m, {seed}, {q}, {}, &stats);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.entries[0].p.V, seed.V);
  EXPECT_EQ(b.entries[0].p.T, seed.T);
  EXPECT_EQ(stats.attempted, 1u);
  EXPECT_EQ(stats.converged, 1u);
}

TEST(BuildBank, UnreachableTargetsThrowEmptyBank) {
  const LineMap m(2.0);  // F1 >= 0 everywhere
  EXPECT_EQ(code_of([&] { build_bank(m, seed_grid(m.box(), 4, 4, false), {{-1.0, 2.0}}); }), ErrorCode::EmptyBank);
}

TEST(BuildBank, DuplicatesAreMerged) {
  const LineMap m(2.0);
  BankStats stats;
  // Every seed right of the line reaches the same pre-image.
  const Bank b = build_bank(m, {{2.4, 1.5}, {2.6, 2.5}, {2.9, 1.1}}, {{0.125, 2.0}}, {}, &stats);
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(stats.duplicates, 2u);
  EXPECT_NEAR(b.entries[0].p.V, 2.5, 1e-9);
}

TEST(Nearest, OrderAndTies) {
  Bank b;
  b.entries = {{{1, 1}, {0.3, 0.0}, "a"}, {{1, 2}, {0.1, 0.0}, "b"}, {{1, 3}, {0.0, 0.1}, "c"}, {{1, 4}, {0.2, 0.0}, "d"}};
  const auto n = nearest(b, {0.0, 0.0}, 3);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].source_label, "b");  // tie with c keeps insertion order
  EXPECT_EQ(n[1].source_label, "c");
  EXPECT_EQ(n[2].source_label, "d");
  EXPECT_EQ(nearest(b, {0.0, 0.0}, 10).size(), 4u);
}

TEST_F(MethaneH2sBank, EntriesReverify) {
  ASSERT_FALSE(bank_->empty());
  const auto targets = ring_targets();
  for (const auto& e : bank_->entries) {
    const ImagePoint f = ctx_->value(e.p);
    // value() and the differentiated evaluation round differently near the
    // pole of the pivot normalization.
    EXPECT_NEAR(f.F1, e.q.F1, 1e-9 * (1.0 + std::abs(f.F1)));
    EXPECT_NEAR(f.F2, e.q.F2, 1e-9 * (1.0 + std::abs(f.F2)));
    double best = INFINITY;
    for (const auto& t : targets) best = std::min(best, image_distance(t, e.q));
    EXPECT_LE(best, 1e-10);
  }
}

TEST_F(MethaneH2sBank, EntriesAreDistinct) {
  for (std::size_t a = 0; a < bank_->size(); ++a)
    for (std::size_t b = a + 1; b < bank_->size(); ++b) {
      const bool same_target = image_distance(bank_->entries[a].q, bank_->entries[b].q) < 1e-8;
      if (same_target) {
        EXPECT_GE(ctx_->domain_distance(bank_->entries[a].p, bank_->entries[b].p), 1e-6);
      }
    }
}

TEST_F(MethaneH2sBank, ClustersCoverBothSidesOfTheCriticalCurve) {
  const auto clusters = cluster_entries(*ctx_, *bank_, 0.05);
  std::set<int> signs;
  std::size_t members = 0;
  for (const auto& c : clusters) {
    ASSERT_FALSE(c.empty());
    members += c.size();
    const int s = det_j(*ctx_, bank_->entries[c.front()].p) > 0 ? 1 : -1;
    for (std::size_t k : c) EXPECT_EQ(det_j(*ctx_, bank_->entries[k].p) > 0 ? 1 : -1, s);
    signs.insert(s);
  }
  EXPECT_EQ(members, bank_->size());
  EXPECT_EQ(signs.size(), 2u);
}

TEST_F(MethaneH2sBank, IdenticalReuseKeepsImages) {
  const Bank r = reuse_bank(*bank_, *ctx_);
  ASSERT_EQ(r.size(), bank_->size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    EXPECT_NEAR(r.entries[k].q.F1, bank_->entries[k].q.F1, 1e-12);
    EXPECT_NEAR(r.entries[k].q.F2, bank_->entries[k].q.F2, 1e-12);
  }
}

TEST_F(MethaneH2sBank, ReuseAcrossCompositionRetagsImages) {
  const CriticalContext other(methane_h2s().with_composition({0.52, 0.48}), methane_h2s_box(), ctx_->scaling());
  const Bank r = reuse_bank(*bank_, other);
  EXPECT_EQ(r.provenance.composition[0], 0.52);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const ImagePoint f = other.value(r.entries[k].p);
    EXPECT_NEAR(f.F1, r.entries[k].q.F1, 1e-9 * (1.0 + std::abs(f.F1)));
    EXPECT_NEAR(f.F2, r.entries[k].q.F2, 1e-9 * (1.0 + std::abs(f.F2)));
  }
}

TEST_F(MethaneH2sBank, ReuseRejectsDifferentModel) {
  const CriticalContext other(ethane_methane(), methane_h2s_box());
  EXPECT_EQ(code_of([&] { reuse_bank(*bank_, other); }), ErrorCode::ModelMismatch);
  EXPECT_EQ(code_of([&] { reuse_bank(Bank{}, *ctx_); }), ErrorCode::EmptyBank);
}

TEST_F(MethaneH2sBank, JsonRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "critinv_bank_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bank.json";
  save_bank(*bank_, path);
  const Bank b = load_bank(path);
  ASSERT_EQ(b.size(), bank_->size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    EXPECT_EQ(b.entries[k].p.V, bank_->entries[k].p.V);
    EXPECT_EQ(b.entries[k].p.T, bank_->entries[k].p.T);
    EXPECT_EQ(b.entries[k].q.F1, bank_->entries[k].q.F1);
    EXPECT_EQ(b.entries[k].q.F2, bank_->entries[k].q.F2);
    EXPECT_EQ(b.entries[k].source_label, bank_->entries[k].source_label);
  }
  EXPECT_EQ(b.provenance.mixture_id, "methane+hydrogen sulfide");
  EXPECT_EQ(b.provenance.model_stack, bank_->provenance.model_stack);
  ASSERT_TRUE(b.provenance.mixture.has_value());
  EXPECT_TRUE(b.provenance.mixture->same_model(methane_h2s()));
  EXPECT_EQ(to_json(b).dump(), to_json(*bank_).dump());
  std::filesystem::remove_all(dir);
}

TEST(LoadBank, MissingFileIsConfigInvalid) {
  EXPECT_EQ(code_of([] { load_bank("/nonexistent/bank.json"); }), ErrorCode::ConfigInvalid);
}
