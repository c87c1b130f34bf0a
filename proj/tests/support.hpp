#pragma once

#include <cmath>

#include "critinv/errors.hpp"
#include "critinv/mixture_model.hpp"
#include "critinv/plane_map.hpp"

namespace critinv::testing {

inline Component ethane() { return {"ethane", 305.32, 4872, 0.099, {}}; }
inline Component methane() { return {"methane", 190.56, 4599, 0.011, {}}; }
inline Component h2s() { return {"hydrogen sulfide", 373.10, 9000, 0.081, {}}; }
inline Component cyclohexane() { return {"cyclohexane", 553.64, 4075, 0.208, {}}; }
inline Component co2() { return {"carbon dioxide", 304.21, 7382, 0.225, {}}; }
inline Component methane_prsv() { return {"methane", 190.56, 4599, 0.011, -0.00159}; }
inline Component ethanol_prsv() { return {"ethanol", 513.92, 6148, 0.644, -0.03374}; }

inline MixtureSpec ethane_methane() { return MixtureSpec({ethane(), methane()}, {0.9, 0.1}, 0.0026, MixingRule::VdW1); }
inline MixtureSpec methane_h2s() { return MixtureSpec({methane(), h2s()}, {0.51, 0.49}, 0.08, MixingRule::VdW1); }
inline MixtureSpec methane_ethanol() {
  return MixtureSpec({methane_prsv(), ethanol_prsv()}, {0.2, 0.8}, 0.0, MixingRule::WongSandler,
                     NrtlParams{0.9, 165.8, 238.4});
}
inline MixtureSpec cyclohexane_co2() {
  return MixtureSpec({cyclohexane(), co2()}, {0.6, 0.4}, 0.0627, MixingRule::VdW1);
}

inline DomainBox ethane_methane_box() { return {5e-5, 5e-4, 150, 350}; }
inline DomainBox methane_h2s_box() { return {3e-5, 3e-4, 150, 350}; }
inline DomainBox methane_ethanol_box() { return {5e-5, 5e-4, 350, 600}; }
inline DomainBox cyclohexane_co2_box() { return {1e-4, 6e-4, 350, 600}; }

// Plane maps with closed-form critical sets; scaled and raw coordinates
// coincide (V_ref = T_ref = 1).
class AnalyticMap : public PlaneMap {
 public:
  explicit AnalyticMap(DomainBox box) : box_(box) {}
  const DomainBox& box() const override { return box_; }
  double V_ref() const override { return 1.0; }
  double T_ref() const override { return 1.0; }
  bool defined_at(const DomainPoint& p) const override { return std::isfinite(p.V) && std::isfinite(p.T); }
  ImagePoint value(const DomainPoint& p) const override { return evaluate(p).F; }

 private:
  DomainBox box_;
};

// F = ((V - c)^2 / 2, T): det J = V - c.
class LineMap final : public AnalyticMap {
 public:
  explicit LineMap(double c) : AnalyticMap({1.0, 3.0, 1.0, 3.0}), c_(c) {}
  MapEval evaluate(const DomainPoint& p) const override {
    const double x = p.V - c_;
    return {{0.5 * x * x, p.T}, {{{x, 0.0}, {0.0, 1.0}}}};
  }
  double c() const { return c_; }

 private:
  double c_;
};

// x = V - 2, y = T - 2; F = (x^3/3 - R^2 x + x y^2, y): det J = x^2 + y^2 - R^2.
class CircleMap final : public AnalyticMap {
 public:
  explicit CircleMap(double R) : AnalyticMap({1.0, 3.0, 1.0, 3.0}), R_(R) {}
  MapEval evaluate(const DomainPoint& p) const override {
    const double x = p.V - 2.0, y = p.T - 2.0;
    return {{x * x * x / 3.0 - R_ * R_ * x + x * y * y, y}, {{{x * x - R_ * R_ + y * y, 2.0 * x * y}, {0.0, 1.0}}}};
  }
  double R() const { return R_; }

 private:
  double R_;
};

// x = V - 4, y = T - 4; F = (x^3 - 3x, y): folds along x = -1 and x = 1.
class FoldMap final : public AnalyticMap {
 public:
  FoldMap() : AnalyticMap({1.0, 7.0, 1.0, 7.0}) {}
  MapEval evaluate(const DomainPoint& p) const override {
    const double x = p.V - 4.0, y = p.T - 4.0;
    return {{x * x * x - 3.0 * x, y}, {{{3.0 * x * x - 3.0, 0.0}, {0.0, 1.0}}}};
  }
};

}  // namespace critinv::testing
