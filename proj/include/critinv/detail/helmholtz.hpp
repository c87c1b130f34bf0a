#pragma once

// Scalar-generic residual Helmholtz energy of the binary cubic mixture. Every
// function here is templated on the scalar type so the same expressions can
// be evaluated with doubles or nested dual numbers.

#include <array>
#include <cmath>

#include "critinv/dual.hpp"
#include "critinv/mixture_model.hpp"

namespace critinv::detail {

inline constexpr double kOmegaA = 0.45723553;
inline constexpr double kOmegaB = 0.07779607;
inline constexpr double kSqrt2 = 1.41421356237309504880;

template <typename S>
S alpha(const Component& c, const S& T, AlphaVariant variant) {
  using std::sqrt;
  const S sqrt_tr = sqrt(T / c.Tc);
  const double w = c.omega;
  S kappa;
  if (variant == AlphaVariant::PR) {
    kappa = S(0.37464 + 1.54226 * w - 0.26992 * w * w);
  } else {
    const double kappa0 = 0.378893 + 1.4897153 * w - 0.17131848 * w * w + 0.0196554 * w * w * w;
    const double kappa1 = c.kappa1.value_or(0.0);
    kappa = kappa0 + kappa1 * (1.0 + sqrt_tr) * (0.7 - T / c.Tc);
  }
  const S base = 1.0 + kappa * (1.0 - sqrt_tr);
  return base * base;
}

template <typename S>
struct PureAB {
  S a;
  double b;
};

template <typename S>
PureAB<S> pure_ab(const Component& c, const S& T) {
  const double pc = c.Pc_kPa * 1e3;
  const double a_c = kOmegaA * kGasConstant * kGasConstant * c.Tc * c.Tc / pc;
  const double b = kOmegaB * kGasConstant * c.Tc / pc;
  return {a_c * alpha(c, T, alpha_variant(c)), b};
}

// NRTL excess Gibbs energy over RT for mole fractions x.
template <typename S>
S nrtl_ge_over_rt(const NrtlParams& p, const S& T, const S& x1, const S& x2) {
  using std::exp;
  const S tau12 = p.g12_over_R / T;
  const S tau21 = p.g21_over_R / T;
  const S G12 = exp(-p.alpha * tau12);
  const S G21 = exp(-p.alpha * tau21);
  return x1 * x2 * (tau21 * G21 / (x1 + x2 * G21) + tau12 * G12 / (x2 + x1 * G12));
}

template <typename S>
struct MixAB {
  S a_m;
  S b_m;
};

template <typename S>
MixAB<S> mixture_ab(const MixtureSpec& spec, const S& T, const std::array<S, 2>& n) {
  using std::sqrt;
  const auto& c = spec.components();
  const auto p1 = pure_ab(c[0], T);
  const auto p2 = pure_ab(c[1], T);
  const S ntot = n[0] + n[1];
  const S x1 = n[0] / ntot;
  const S x2 = n[1] / ntot;
  const double k = spec.k12();

  if (spec.mixing_rule() == MixingRule::VdW1) {
    const S a12 = sqrt(p1.a * p2.a) * (1.0 - k);
    return {x1 * x1 * p1.a + 2.0 * x1 * x2 * a12 + x2 * x2 * p2.a, x1 * p1.b + x2 * p2.b};
  }

  // Wong-Sandler: quadratic second-virial constraint plus matching of the
  // excess Helmholtz energy at infinite pressure (approximated by NRTL G^E).
  const S RT = kGasConstant * T;
  const S d1 = p1.b - p1.a / RT;
  const S d2 = p2.b - p2.a / RT;
  const S d12 = 0.5 * (d1 + d2) * (1.0 - k);
  const S qm = x1 * x1 * d1 + 2.0 * x1 * x2 * d12 + x2 * x2 * d2;
  const double c_pr = std::log(kSqrt2 - 1.0) / kSqrt2;
  const S dm = x1 * p1.a / (p1.b * RT) + x2 * p2.a / (p2.b * RT) +
               nrtl_ge_over_rt(*spec.nrtl(), T, x1, x2) / c_pr;
  const S b_m = qm / (1.0 - dm);
  return {RT * b_m * dm, b_m};
}

// A^r(T, V, n) / RT for the Peng-Robinson family, V the total volume.
template <typename S>
S residual_helmholtz_rt(const MixtureSpec& spec, const S& T, const S& V, const std::array<S, 2>& n) {
  using std::log;
  const auto mix = mixture_ab(spec, T, n);
  const S ntot = n[0] + n[1];
  const S B = ntot * mix.b_m;
  const S D = ntot * ntot * mix.a_m;
  return -ntot * log(1.0 - B / V) -
         D / (2.0 * kSqrt2 * B * kGasConstant * T) *
             log((V + (1.0 + kSqrt2) * B) / (V + (1.0 - kSqrt2) * B));
}

// Derivatives of ln f_i in mole numbers up to second order, evaluated in the
// scalar type Base (double, or a dual carrying a derivative in T or V).
template <typename Base>
struct NDerivs {
  std::array<Base, 2> lnf;
  std::array<std::array<Base, 2>, 2> q;
  std::array<std::array<std::array<Base, 2>, 2>, 2> t;
};

template <typename Base>
NDerivs<Base> n_derivatives(const MixtureSpec& spec, const Base& T, const Base& V,
                            const std::array<Base, 2>& n) {
  using L1 = Dual<Base>;
  using L2 = Dual<L1>;
  using L3 = Dual<L2>;
  using std::log;

  const Base zero(0.0), one(1.0);
  auto lift = [&](const Base& x) { return L3(L2(L1(x, zero), L1(zero, zero)), L2(L1(zero, zero), L1(zero, zero))); };
  auto seeded = [&](int m, int i, int j, int k) {
    // Outer level carries direction e_i, middle e_j, inner e_k.
    const L1 inner(n[m], k == m ? one : zero);
    const L1 d_mid(j == m ? one : zero, zero);
    const L1 d_out(i == m ? one : zero, zero);
    return L3(L2(inner, d_mid), L2(d_out, L1(zero, zero)));
  };

  NDerivs<Base> out{};
  const std::array<std::array<int, 3>, 4> triples{{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};
  for (const auto& [i, j, k] : triples) {
    const std::array<L3, 2> nd{seeded(0, i, j, k), seeded(1, i, j, k)};
    const L3 r = residual_helmholtz_rt(spec, lift(T), lift(V), nd);
    if (i == j && j == k) {
      out.lnf[i] = r.d.v.v;
      out.q[i][i] = r.d.d.v;
    }
    if (i != k) out.q[i][k] = out.q[k][i] = r.d.v.d;
    const Base t = r.d.d.d;
    out.t[i][j][k] = out.t[i][k][j] = out.t[j][i][k] = t;
    out.t[j][k][i] = out.t[k][i][j] = out.t[k][j][i] = t;
  }

  for (int i = 0; i < 2; ++i) {
    out.lnf[i] = out.lnf[i] + log(n[i] * kGasConstant * T / V);
    out.q[i][i] = out.q[i][i] + 1.0 / n[i];
    out.t[i][i][i] = out.t[i][i][i] - 1.0 / (n[i] * n[i]);
  }
  return out;
}

}  // namespace critinv::detail
