#pragma once
#include <string>

#include "iwt/class_algebra.hpp"

namespace iwt {

// log on 1 + J_{U,V}; x over the abelian Λ(U/V), result integral
GR log_one_plus_J(const GR& x);
// log: 1 + I_U → I_U and exp: I_U → 1 + I_U for the idx-th entry of F_A^c
GR log_on_I(const GR& x, const ArtinFamilyC& F, int idx);
GR exp_on_I(const GR& y, const ArtinFamilyC& F, int idx);

// x^{|Δ|} = aug(x)^{|Δ|} in F_p[[T]]/T^n[Δ]
bool char_p_power_identity(const GR& x);

// Teichmüller lift of a mod p, as an integer mod p^M
i64 teichmuller(int p, int M, i64 a);

// φ on classes: a(γ)[g] ↦ φ_Γ(a)[g^p]
ConjVec frobenius_classes(const ConjVec& y);

struct IntegralLogResult {
  ConjVec value;
  int precision = 0;
  std::string certificate;
};
// Γ_G(x) = log u − p^{-1}φ(log u) with x = ζ·u, ζ the Teichmüller constant
IntegralLogResult integral_log(const GR& x);

// (ω-image in G^ab, exponent of γ mod p^j)
struct OmegaValue {
  int gab = 0;
  i64 gamma_exp = 0;
  int level = 0;
  bool operator==(const OmegaValue&) const = default;
};
OmegaValue omega_at_level(const ConjVec& y, int j, const Quotient& ab);

// Γ_Γ on Λ(Γ)^×
Series integral_log_gamma(const Series& x);
// a unit u with Γ_Γ(u) = y; the γ-direction parameter is fixed to 0
Series intlog_invert_abelian(const Series& y);

// Tr(log x) against log Nr(x) for x over U (as a group) and a subgroup U' with abelian U'/[U',U']
bool compat_log_norm(const GR& x, const Subgroup& Uprime);

}  // namespace iwt
