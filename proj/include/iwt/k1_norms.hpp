#pragma once
#include <optional>
#include <string>
#include <vector>

#include "iwt/theta_additive.hpp"

namespace iwt {

using GRMatrix = std::vector<std::vector<GR>>;

// Matrix of right multiplication by x on ⊕ Λ(U)·a_i (a_i right coset representatives).
// Entries live over U.as_group().
GRMatrix norm_matrix(const GR& x, const Subgroup& U, const std::vector<int>& reps);
// entrywise image in Λ(U/V)
GRMatrix to_pair(const GRMatrix& A, const BrauerPair& bp);
// determinant over a commutative group ring; pivots must be units (SINGULAR_MATRIX otherwise)
GR det_unit_pivot(GRMatrix A);
// division-free determinant (Berkowitz), for matrices that are only invertible after localizing
GR det_berkowitz(const GRMatrix& A);

// θ_{U,V}(x) = det of A_x over Λ(U/V); reps default to right_transversal(U)
GR norm_theta(const GR& x, const BrauerPair& bp);
GR norm_theta(const GR& x, const BrauerPair& bp, const std::vector<int>& reps);
// image of x in Λ(G^ab)
GR abelianize(const GR& x, const Quotient& ab);
// φ_Γ(aug(x))
Series frobenius_phi(const GR& x);
// φ(x)^{(G:U)/p}, the comparison scalar for a proper U
Series congruence_target(const Series& phi_ab, int index, int p);

// θ_{U,V}(x) ≡ φ(x)^{(G:U)/p} mod J_{U,V}, U ≠ G
CondReport congruence_check_J(const GR& x, const BrauerPair& bp);
// θ_U(x) ≡ φ(θ_ab(x))^{(G:U)/p} mod I_U: direct membership and the log route must agree
CondReport congruence_check_I(const GR& x, const ArtinFamilyC& F, int idx);

// Theta tuple over F_B; a localized tuple carries one Λ(Γ) denominator per component.
struct ThetaTuple {
  std::vector<GR> comps;
  std::vector<Series> dens;  // empty for integral tuples
  bool localized() const { return !dens.empty(); }
  Series den(size_t i) const;
};

ThetaTuple theta_tuple(const GR& x, const BrauerFamily& BF);

enum class PsiVerdict { Out, InPsiPrime, InPsi };
struct PsiReport {
  PsiVerdict verdict = PsiVerdict::Out;
  bool passes_c = false;  // additional congruences on F_A^c too
  CondReport rep;
};
const char* psi_name(PsiVerdict v);

// NCC on covers, CCC on links, J-congruences, then I-congruences over F_A and F_A^c.
// Localized tuples use the S-versions through numerators and denominators.
PsiReport psi_membership(const ThetaTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F);

// Localized element of Λ(G)_S with a scalar denominator.
struct LocalizedGR {
  GR num;
  Series den;
};
LocalizedGR make_localized(const GR& num, const Series& den);  // NOT_S_INVERTIBLE if den ∈ pΛ
bool localized_is_unit(const LocalizedGR& x);
// θ_S(n/d) = θ(n)/d^{(G:U)}
ThetaTuple theta_tuple_S(const LocalizedGR& x, const BrauerFamily& BF);
// is n/d integral (in Λ(U/V)), and if so the quotient; PRECISION_EXHAUSTED if d vanishes mod (p, T^n)
bool localized_integral(const GR& num, const Series& den, GR* out);

// q with d·q = a over a commutative group ring; nullopt if there is none.
// q is known to p^{k - v}, v the largest invariant-factor valuation of multiplication by d.
std::optional<GR> gr_divide(const GR& a, const GR& d);

// value of x (over an abelian U/V) at u ↦ ζ^{chi[u]}, γ ↦ ζ^{chi_gamma}·kappa^r
struct EvalResult {
  bool infinite = false;
  Cyclo value;
};
Cyclo evaluate_series(const Series& a, const Cyclo& t);
EvalResult evaluate_at_character(const GR& num, const Series& den, const std::vector<int>& chi, int chi_gamma, int r,
                                 i64 kappa);

// SK_1(Z_p[G]) = 1 is known for unitriangular B^N(F_p) and for groups with an abelian normal
// subgroup of cyclic quotient (abelian groups included); nothing else is claimed
bool sk1_known_trivial(const GroupPtr& G);
// UNSUPPORTED unless sk1_known_trivial(G)
void require_sk1_trivial(const GroupPtr& G);

}  // namespace iwt
