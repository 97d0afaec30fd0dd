#pragma once
#include <vector>

#include "iwt/pgroup.hpp"

namespace iwt {

struct ArtinEntry {
  int h = 0;       // fixed generator
  Subgroup U;      // U_h = <h>
  int n = 0;       // |N(U_h)| = p^n
};

// One entry per conjugation orbit of cyclic subgroups, identity first.
struct ArtinFamily {
  GroupPtr G;
  std::vector<ArtinEntry> entries;
};

ArtinFamily build_artin_family(const GroupPtr& G);

// least element of Z(G) ∩ [G,G] other than e; ABELIAN_INPUT for abelian G
int choose_central_c(const GroupPtr& G);

enum class CaseTag { A, B };

struct CaseInfo {
  CaseTag tag = CaseTag::A;
  Subgroup U;      // U_{h,c} = <h, c>
  int n_norm = 0;  // |N(U_{h,c})| = p^{n_norm}
};

CaseInfo classify_case(const GroupPtr& G, int h, int c);

enum class AKind { Gamma, Cyclic, WithC };

struct ACEntry {
  AKind kind = AKind::Gamma;
  int h = 0;
  Subgroup U;
  int n_h = 0;     // from the Artin entry of h
  CaseTag tag = CaseTag::A;  // meaningful for WithC
  int n_norm = 0;  // log_p |N(U)|
};

// F_A^c: the Artin entries followed by U_{h,c} for h not in {e, c}.
// For abelian G there is no c and the family equals F_A.
struct ArtinFamilyC {
  ArtinFamily base;
  int c = -1;
  std::vector<ACEntry> entries;
};

ArtinFamilyC build_artin_family_c(const GroupPtr& G);

struct BrauerPair {
  Subgroup U, V;     // V = [U,U]
  GroupPtr UG;       // U.as_group()
  Quotient Q;        // U/V, built over local indices of UG
  int index = 1;     // (G:U)
  // element of U (parent index) -> element of U/V
  int to_q(int u) const { return Q.proj(U.local[u]); }
  // least preimage in the parent
  int from_q(int q) const { return U.elems[Q.rep[q]]; }
  int qorder() const { return Q.group->order; }
};

// (U, V) with V normal in U and U/V abelian; V defaults to [U,U]
BrauerPair make_brauer_pair(const GroupPtr& G, const Subgroup& U);
BrauerPair make_brauer_pair(const GroupPtr& G, const Subgroup& U, const Subgroup& V);

struct Cover {
  int big = 0, small = 0;  // small is maximal in big
};

struct ConjLink {
  int from = 0, to = 0, a = 0;  // U_to = a^{-1} U_from a
};

struct BrauerFamily {
  GroupPtr G;
  std::vector<BrauerPair> pairs;
  std::vector<Cover> covers;
  std::vector<ConjLink> links;
  int top = 0;  // index of (G, [G,G])
  int find(const Subgroup& U) const;  // -1 if absent
};

BrauerFamily build_brauer_family(const GroupPtr& G);

struct JordanBlock {
  int m = 1;
  std::vector<int> basis;  // basis[j-1] = e_{i,j}; (lambda-1) e_{i,j} = e_{i,j-1}
};

struct RWFamily {
  GroupPtr G;
  Subgroup W;
  int lambda = 0;
  std::vector<JordanBlock> blocks;
  Subgroup Wprime;  // spanned by the chain tops e_{i,m_i}
  Subgroup Wc;      // W ∩ [G,G], the image of (lambda-1)
};

// lambda acts by w -> lambda w lambda^{-1}
RWFamily build_rw_family(const GroupPtr& G, const Subgroup& W);

}  // namespace iwt
