#include "critinv/mixture_model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "critinv/detail/helmholtz.hpp"
#include "critinv/errors.hpp"

namespace critinv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::VolumeBelowCovolume: return "VolumeBelowCovolume";
    case ErrorCode::DegenerateQ: return "DegenerateQ";
    case ErrorCode::BisectionStall: return "BisectionStall";
    case ErrorCode::TraceLost: return "TraceLost";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InnerDivergence: return "InnerDivergence";
    case ErrorCode::OuterDivergence: return "OuterDivergence";
    case ErrorCode::SingularDerivative: return "SingularDerivative";
  }
  return "Unknown";
}

void Component::validate() const {
  if (!(Tc > 0.0) || !(Pc_kPa > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::ConfigInvalid, "component '" + name + "' needs Tc > 0, Pc > 0 and finite omega");
  }
  if (kappa1 && !std::isfinite(*kappa1)) {
    throw Error(ErrorCode::ConfigInvalid, "component '" + name + "' has non-finite kappa1");
  }
}

MixtureSpec::MixtureSpec(std::array<Component, 2> components, std::array<double, 2> z, double k12,
                         MixingRule rule, std::optional<NrtlParams> nrtl)
    : components_(std::move(components)), z_(z), k12_(k12), rule_(rule), nrtl_(nrtl) {
  for (const auto& c : components_) c.validate();
  if (!(z_[0] > 0.0) || !(z_[1] > 0.0) || std::abs(z_[0] + z_[1] - 1.0) > 1e-12) {
    throw Error(ErrorCode::ConfigInvalid, "mole fractions must be positive and sum to 1");
  }
  if (!std::isfinite(k12_)) throw Error(ErrorCode::ConfigInvalid, "k12 must be finite");
  if ((rule_ == MixingRule::WongSandler) != nrtl_.has_value()) {
    throw Error(ErrorCode::ConfigInvalid, "NRTL parameters are required by, and only by, Wong-Sandler mixing");
  }
}

MixtureSpec MixtureSpec::with_composition(std::array<double, 2> z) const {
  return MixtureSpec(components_, z, k12_, rule_, nrtl_);
}

MixtureSpec MixtureSpec::swapped() const {
  std::optional<NrtlParams> nrtl = nrtl_;
  if (nrtl) std::swap(nrtl->g12_over_R, nrtl->g21_over_R);
  return MixtureSpec({components_[1], components_[0]}, {z_[1], z_[0]}, k12_, rule_, nrtl);
}

namespace {

bool same_component(const Component& a, const Component& b) {
  return a.name == b.name && a.Tc == b.Tc && a.Pc_kPa == b.Pc_kPa && a.omega == b.omega &&
         a.kappa1 == b.kappa1;
}

}  // namespace

bool MixtureSpec::same_model(const MixtureSpec& other) const {
  if (!same_component(components_[0], other.components_[0]) ||
      !same_component(components_[1], other.components_[1])) {
    return false;
  }
  if (k12_ != other.k12_ || rule_ != other.rule_ || nrtl_.has_value() != other.nrtl_.has_value()) {
    return false;
  }
  if (nrtl_) {
    return nrtl_->alpha == other.nrtl_->alpha && nrtl_->g12_over_R == other.nrtl_->g12_over_R &&
           nrtl_->g21_over_R == other.nrtl_->g21_over_R;
  }
  return true;
}

std::string MixtureSpec::model_stack() const {
  std::ostringstream os;
  auto alpha_name = [](const Component& c) { return c.kappa1 ? "PRSV" : "PR"; };
  os << alpha_name(components_[0]) << "/" << alpha_name(components_[1]) << "+"
     << (rule_ == MixingRule::VdW1 ? "vdW1" : "WongSandler+NRTL");
  return os.str();
}

AlphaVariant alpha_variant(const Component& comp) {
  return comp.kappa1 ? AlphaVariant::PRSV : AlphaVariant::PR;
}

double alpha_function(const Component& comp, double T, AlphaVariant variant) {
  return detail::alpha(comp, T, variant);
}

MixtureParams pure_params(const Component& comp, double T) {
  const auto p = detail::pure_ab(comp, T);
  return {p.a, p.b};
}

MixtureParams mixture_params(const MixtureSpec& spec, double T, std::array<double, 2> n) {
  if (!(n[0] > 0.0) || !(n[1] > 0.0)) {
    throw Error(ErrorCode::InvalidState, "mole numbers must be positive");
  }
  const auto m = detail::mixture_ab(spec, T, n);
  return {m.a_m, m.b_m};
}

namespace {

MixtureParams checked_params(const MixtureSpec& spec, const EosState& s) {
  if (!(s.T > 0.0) || !std::isfinite(s.T) || !(s.n[0] > 0.0) || !(s.n[1] > 0.0)) {
    throw Error(ErrorCode::InvalidState, "state needs T > 0 and n_i > 0");
  }
  const auto m = mixture_params(spec, s.T, s.n);
  const double B = (s.n[0] + s.n[1]) * m.b_m;
  if (!(m.b_m > 0.0) || !(s.V > B)) {
    std::ostringstream os;
    os << "V = " << s.V << " m^3 is not above the mixture covolume " << B;
    throw Error(ErrorCode::VolumeBelowCovolume, os.str());
  }
  return m;
}

}  // namespace

double pressure(const MixtureSpec& spec, const EosState& state) {
  const auto m = checked_params(spec, state);
  const double ntot = state.n[0] + state.n[1];
  const double B = ntot * m.b_m;
  const double D = ntot * ntot * m.a_m;
  const double V = state.V;
  const double p = ntot * kGasConstant * state.T / (V - B) - D / (V * V + 2.0 * B * V - B * B);
  return p * 1e-3;
}

std::array<double, 2> ln_fugacity(const MixtureSpec& spec, const EosState& state) {
  checked_params(spec, state);
  using D1 = Dual<double>;
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const std::array<D1, 2> n{D1(state.n[0], i == 0 ? 1.0 : 0.0), D1(state.n[1], i == 1 ? 1.0 : 0.0)};
    const D1 ar = detail::residual_helmholtz_rt(spec, D1(state.T), D1(state.V), n);
    out[i] = ar.d + std::log(state.n[i] * kGasConstant * state.T / state.V);
  }
  return out;
}

Matrix2 fugacity_n_derivatives(const MixtureSpec& spec, const EosState& state) {
  checked_params(spec, state);
  return detail::n_derivatives(spec, state.T, state.V, state.n).q;
}

Tensor2 fugacity_n2_derivatives(const MixtureSpec& spec, const EosState& state) {
  checked_params(spec, state);
  return detail::n_derivatives(spec, state.T, state.V, state.n).t;
}

}  // namespace critinv
