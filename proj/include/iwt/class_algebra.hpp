#pragma once
#include <string>
#include <vector>

#include "iwt/families.hpp"
#include "iwt/precision.hpp"

namespace iwt {

// Element of Λ(Γ)[G^f]; slot g holds the Λ(Γ)-coefficient of g.
struct GR {
  GroupPtr G;
  Block x;

  static GR zero(const GroupPtr& G, const Budget& b);
  static GR one(const GroupPtr& G, const Budget& b);
  static GR elem(const GroupPtr& G, const Budget& b, int g);
  static GR scalar(const GroupPtr& G, const Series& s);  // s·e
  Series coeff(int g) const;
  void set(int g, const Series& s);
  void add(int g, const Series& s);
  const Budget& budget() const { return x.b; }
};

GR operator+(const GR& a, const GR& b);
GR operator-(const GR& a, const GR& b);
GR operator*(const GR& a, const GR& b);
bool operator==(const GR& a, const GR& b);
GR gr_scale(const GR& a, const Series& s);
Series augmentation(const GR& a);
GR gr_inverse(const GR& a);
GR gr_pow(const GR& a, i64 e);
GR gr_log(const GR& a);
GR gr_exp(const GR& a);
// a unit of the local ring: augmentation constant is prime to p
bool gr_is_unit(const GR& a);
// pushforward along a map of underlying sets G -> H (a homomorphism in practice)
GR gr_push(const GR& a, const GroupPtr& H, const std::vector<int>& image);
// restrict a table group element supported on U to U.as_group() (local indices)
GR gr_restrict(const GR& a, const Subgroup& U);
// same element read in U.parent (inverse of gr_restrict)
GR gr_lift(const GR& a, const Subgroup& U);

// Element of Z_p[[Conj(G^f × Γ)]]: slot i holds the Λ(Γ)-coefficient of class i.
struct ConjVec {
  GroupPtr G;
  Block y;
  static ConjVec zero(const GroupPtr& G, const Budget& b);
  static ConjVec cls(const GroupPtr& G, const Budget& b, int g);  // [g]
  Series coeff(int cls) const;
};

ConjVec operator+(const ConjVec& a, const ConjVec& b);
ConjVec operator-(const ConjVec& a, const ConjVec& b);
bool operator==(const ConjVec& a, const ConjVec& b);
ConjVec cv_scale(const ConjVec& a, const Series& s);

ConjVec class_projection(const GR& a);
// classes of an abelian group are its elements
GR cv_as_gr(const ConjVec& a);
ConjVec gr_as_cv(const GR& a);
// Tr: Z_p[[Conj(G)]] -> Z_p[[Conj(U)]], result over U.as_group()
ConjVec trace_hom(const ConjVec& y, const Subgroup& U);
// the same trace summed over all of G and divided by |U|; an independent route
ConjVec trace_hom_full(const ConjVec& y, const Subgroup& U);
// integer class counts of Tr([g]) over the classes of U.as_group()
std::vector<i64> trace_int(const GroupPtr& P, int g, const Subgroup& U);
// V-coinvariants: ConjVec over U (as group) -> Λ(U/V)
GR push_to_pair(const ConjVec& yU, const BrauerPair& bp);

// Λ(Γ)-submodule given as a direct sum of cyclic pieces p^e·(Σ_{s∈support} s)·Λ(Γ).
// Supports are disjoint; any slot outside every support must vanish.
struct DescGen {
  std::vector<int> support;
  int pexp = 0;
  std::string label;
};

enum class DescKind { Monomial, AugModP };

struct Descriptor {
  GroupPtr amb;
  DescKind kind = DescKind::Monomial;
  std::vector<DescGen> gens;
  std::string name;
};

struct Membership {
  bool member = false;
  std::vector<Series> coords;  // one Λ(Γ)-coordinate per generator
  std::string reason;
};

Membership membership(const GR& x, const Descriptor& D);
// the element of D with the given coordinates
GR descriptor_element(const Descriptor& D, const std::vector<Series>& coords);

// I_U for the idx-th entry of F_A^c, over entry.U.as_group()
Descriptor image_I(const ArtinFamilyC& F, int idx);
// I'_U, image of the trace from Z_p[[Conj(NU)]]
Descriptor image_I_prime(const ArtinFamilyC& F, int idx);
// J: augmentation lands in pΛ(Γ)
Descriptor J_ideal(const GroupPtr& UV);
// I_W of the Ritter–Weiss family: span of the λ-orbit sums, over W.as_group()
Descriptor I_W_descriptor(const RWFamily& F);

// Compare the Z_p-span of integer vectors with D (Λ(Γ)-scalars ride along).
struct SpanCheck {
  bool span_in_D = false;
  bool D_in_span = false;
  std::string detail;
};
SpanCheck compare_span(const Descriptor& D, const std::vector<std::vector<i64>>& vecs, int p);

std::string describe(const Descriptor& D);

}  // namespace iwt
