#pragma once

// Cubic equation of state (Peng-Robinson family) for binary mixtures.
//
// Two model stacks are supported:
//   * Peng-Robinson alpha + van der Waals one-fluid (quadratic a, linear b)
//   * PRSV alpha + Wong-Sandler mixing with an NRTL excess Gibbs energy
//
// The alpha variant is chosen per component: a component carrying kappa1 uses
// the Stryjek-Vera alpha, otherwise the original Peng-Robinson one.
//
// Units are SI internally (K, Pa, m^3). Component critical pressures are kept
// in kPa because that is how they are tabulated; pressure() reports kPa.

#include <array>
#include <optional>
#include <string>

namespace critinv {

inline constexpr double kGasConstant = 8.314462618;  // J/(mol K)

struct Component {
  std::string name;
  double Tc = 0.0;     // K
  double Pc_kPa = 0.0; // kPa
  double omega = 0.0;
  std::optional<double> kappa1;  // present => PRSV alpha

  void validate() const;
};

enum class AlphaVariant { PR, PRSV };
enum class MixingRule { VdW1, WongSandler };

struct NrtlParams {
  double alpha = 0.0;
  double g12_over_R = 0.0;  // K
  double g21_over_R = 0.0;  // K
};

class MixtureSpec {
 public:
  MixtureSpec(std::array<Component, 2> components, std::array<double, 2> z, double k12,
              MixingRule rule, std::optional<NrtlParams> nrtl = std::nullopt);

  const std::array<Component, 2>& components() const { return components_; }
  const std::array<double, 2>& z() const { return z_; }
  double k12() const { return k12_; }
  MixingRule mixing_rule() const { return rule_; }
  const std::optional<NrtlParams>& nrtl() const { return nrtl_; }

  // Same pair and model stack, different feed composition.
  MixtureSpec with_composition(std::array<double, 2> z) const;
  // Components swapped (kij and NRTL energies transposed accordingly).
  MixtureSpec swapped() const;

  // True when both specs describe the same components and model stack
  // (composition is allowed to differ).
  bool same_model(const MixtureSpec& other) const;

  std::string model_stack() const;

 private:
  std::array<Component, 2> components_;
  std::array<double, 2> z_;
  double k12_;
  MixingRule rule_;
  std::optional<NrtlParams> nrtl_;
};

struct EosState {
  double T = 0.0;                 // K
  double V = 0.0;                 // m^3, total volume
  std::array<double, 2> n{};      // mol
};

struct MixtureParams {
  double a_m = 0.0;  // Pa m^6/mol^2
  double b_m = 0.0;  // m^3/mol
};

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Tensor2 = std::array<Matrix2, 2>;

AlphaVariant alpha_variant(const Component& comp);

double alpha_function(const Component& comp, double T, AlphaVariant variant);
inline double alpha_function(const Component& comp, double T) {
  return alpha_function(comp, T, alpha_variant(comp));
}

// Pure-component attraction a_i(T) and covolume b_i.
MixtureParams pure_params(const Component& comp, double T);

MixtureParams mixture_params(const MixtureSpec& spec, double T, std::array<double, 2> n);

// kPa. Throws VolumeBelowCovolume when V <= n b_m.
double pressure(const MixtureSpec& spec, const EosState& state);

std::array<double, 2> ln_fugacity(const MixtureSpec& spec, const EosState& state);

// q_ij = d ln f_i / d n_j at fixed T, V.
Matrix2 fugacity_n_derivatives(const MixtureSpec& spec, const EosState& state);

// t_ijk = d^2 ln f_i / d n_j d n_k at fixed T, V.
Tensor2 fugacity_n2_derivatives(const MixtureSpec& spec, const EosState& state);

}  // namespace critinv
