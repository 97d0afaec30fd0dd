#pragma once
#include <string>
#include <vector>

#include "iwt/class_algebra.hpp"

namespace iwt {

// Pass/fail with the names of the failing conditions.
struct CondReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> certificates;
  void fail(const std::string& what) {
    ok = false;
    failures.push_back(what);
  }
};

// One abelian group-ring value per family entry, in family order.
// F_A entries live over U.as_group(); F_B entries over pair.Q.group.
struct AdditiveTuple {
  std::vector<GR> comps;
};

AdditiveTuple operator+(const AdditiveTuple& a, const AdditiveTuple& b);
bool operator==(const AdditiveTuple& a, const AdditiveTuple& b);

// Tr_{G→U}(y) for U in F_A, or in F_A^c when with_c is set
AdditiveTuple theta_A_plus(const ConjVec& y, const ArtinFamilyC& F, bool with_c = false);
// trace relation against the Γ-component and y_U ∈ I_U (first |F_A| components)
CondReport phi_membership(const AdditiveTuple& t, const ArtinFamilyC& F);
ConjVec theta_A_inverse(const AdditiveTuple& t, const ArtinFamilyC& F);

AdditiveTuple theta_B_plus(const ConjVec& y, const BrauerFamily& F);
// TCC on covering pairs, CCC+ on conjugation links
CondReport phi_B_membership(const AdditiveTuple& t, const BrauerFamily& F);
// F_A-projection of a Brauer tuple (pairs (U_h, {e}))
AdditiveTuple project_to_artin(const AdditiveTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F);
ConjVec reconstruct_from_brauer(const AdditiveTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F);
// |V| ≤ p^{k-2} whenever |U| = p^k ≥ p^2, checked on every pair
CondReport commutator_bound(const BrauerFamily& F);

// Ritter–Weiss family {(G,[G,G]), (W,{e})}
struct RWTuple {
  GR ab;  // over G/[G,G]
  GR w;   // over W.as_group()
};
struct RWContext {
  RWFamily F;
  Quotient ab;
  Descriptor IW;
  std::vector<char> in_Wbar;  // coset of [G,G] meets W
};
RWContext make_rw_context(const RWFamily& F);
RWTuple rw_theta_plus(const ConjVec& y, const RWContext& C);
CondReport rw_phi_membership(const RWTuple& t, const RWContext& C);
ConjVec rw_inverse(const RWTuple& t, const RWContext& C);

}  // namespace iwt
