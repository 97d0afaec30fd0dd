#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "iwt/k1_norms.hpp"
#include "iwt/logarithm_lab.hpp"

namespace iwt {

// ---------------------------------------------------------------- Burns patching

struct PatchCertificate {
  ThetaTuple f, xi;
  ThetaTuple w;  // integral, one unit per pair
  std::vector<std::string> integrality;
  PsiReport psi;
  ConjVec y;        // Γ_G(w), rebuilt from the logarithms of the w-tuple
  int y_precision = 0;
  Series ab_unit;   // unit of Λ(Γ) with Γ_Γ(ab_unit) = Γ_Γ(aug w_ab)
  ThetaTuple xi_out;  // f·w
};

// w_{U,V} = ξ_{U,V}·f_{U,V}^{-1}; NOT_INTEGRAL / NOT_IN_PSI on failure
PatchCertificate burns_patch(const ThetaTuple& f, const ThetaTuple& xi, const BrauerFamily& BF,
                             const ArtinFamilyC& F);

// the additive tuple (Γ_ab(w_ab), log(w_{U,V}/φ(w_ab)^{(G:U)/p})) of an integral tuple
AdditiveTuple log_tuple(const ThetaTuple& w, const BrauerFamily& BF);

// J- and I-congruences for an integral tuple, with the reduction modulo ⟨c⟩,
// the eliminate-d step and the coefficient bootstrap for U_{h,c}
CondReport strong_congruence_check(const ThetaTuple& w, const BrauerFamily& BF, const ArtinFamilyC& F);

// ---------------------------------------------------------------- torsion refinement

// a localized value over make_brauer_pair(G, U, V).Q
struct PairValue {
  GR num;
  Series den;
};
// ξ_{U',V} for U ⊂ U' of index p, seen in Λ(U'/[U',U'])_S and, through the norm, in Λ(U/V)_S
struct RWValue {
  PairValue ab;
  PairValue w;
};
struct RWProvider {
  std::function<std::optional<PairValue>(const Subgroup& U, const Subgroup& V)> pair;
  std::function<std::optional<RWValue>(const Subgroup& Up, const Subgroup& U, const Subgroup& V)> rw;
};
// all values read off a known element x of Λ(G)_S
RWProvider synthetic_provider(const LocalizedGR& x);

struct RefinementResult {
  ThetaTuple xi;   // θ_S(τ_ab·ξ̃)
  int tau_ab = 0;  // element of G^ab
  std::vector<std::string> log;
  CondReport rep;
};
// PROVIDER_GAP, CASE2_CHAIN_FAILURE, INCONSISTENT (no torsion element fits the abelian part)
RefinementResult torsion_refinement(const ThetaTuple& xi_tilde, const BrauerFamily& BF, const RWProvider& prov);

// ---------------------------------------------------------------- approximation and orbital sums

// Element of Z/p^m[Q × Γ/Γ^{p^j}], slot q·p^j + t
struct LevelElement {
  int p = 3, m = 1, j = 0, qorder = 1;
  std::vector<i64> c;
  i64 pj() const { return ipow(p, j); }
  i64 at(int q, i64 t) const { return c[static_cast<size_t>(q * pj() + t)]; }
  i64& at(int q, i64 t) { return c[static_cast<size_t>(q * pj() + t)]; }
  bool is_zero() const;
  bool operator==(const LevelElement&) const = default;
};

struct ZetaOracle {
  int p = 3, M = 6, j = 1;
  int pair = 0;  // index in the Brauer family
  int qorder = 1;  // |U/V|
  i64 kappa_gamma = 4;
  std::map<std::pair<int, i64>, i64> kappa;  // κ(q, γ^t); absent entries use κγ^t
  std::map<std::tuple<i64, int, int, i64>, i64> delta;  // (w, k, q, t) -> Δ^w(1-k, δ^{(x)}) mod p^m
  // κ^{p-1}(Γ^{p^j}) = 1 + p^m Z_p, capped at M
  int m() const;
  i64 kappa_at(int q, i64 t) const;
  std::vector<std::pair<i64, int>> weights() const;  // distinct (w, k)
};

// Σ_x Δ^w(1-k, δ^{(x)}) κ(x)^{-k} x mod p^m; ORACLE_GAP if a coset is missing
LevelElement approximate_pseudomeasure(const ZetaOracle& O, i64 w, int k);
// image of an integral element over Q in Z/p^m[Q × Γ/Γ^{p^j}] (T ↦ γ - 1)
LevelElement level_image(const GR& z, int j, int m);
// drop to level j' ≤ j and precision m' ≤ m
LevelElement project_level(const LevelElement& e, int j, int m);
// oracle generated from ξ = num/den, or num/(T·den) when pole is set; den a unit of Λ(Γ)
ZetaOracle synthetic_oracle(const GR& num, const Series& den, bool pole, int pair, int j, i64 kappa_gamma,
                            const std::vector<i64>& ws, const std::vector<int>& ks);

// zeta-free half: isotropy groups, P_y, p | aug(P_y), P_y = Tr(y) ∈ I'_U for U in F_A^c
CondReport orbital_p_check(const BrauerFamily& BF, const ArtinFamilyC& F, int pair, int j);
// the full sufficient condition against an oracle; HYPOTHESIS_FAILS names (w, k, y)
CondReport orbital_sum_check(const ZetaOracle& O, const BrauerFamily& BF, const ArtinFamilyC& F);

// ---------------------------------------------------------------- Ritter–Weiss variant

struct RWOptions {
  Budget budget;
  int trials = 10;
  std::uint64_t seed = 1;
};
// Steps 1–5 for the family {(G,[G,G]), (W,{e})}
CondReport rw_verify(const GroupPtr& G, const Subgroup& W, const RWOptions& opt);
// Step 6: ξ_W ≡ φ(ξ_ab) mod I_{S,W} together with the norm relation; ξ_ab over G^ab, ξ_W over W
CondReport rw_step6(const RWContext& C, const PairValue& xi_ab, const PairValue& xi_W);

// ---------------------------------------------------------------- files

std::string write_tuple(const ThetaTuple& t, const BrauerFamily& BF);
// budget comes from the file; pairs must match BF
ThetaTuple read_tuple(const std::string& text, const BrauerFamily& BF);
std::string write_oracle(const ZetaOracle& O);
ZetaOracle read_oracle(const std::string& text);

}  // namespace iwt
