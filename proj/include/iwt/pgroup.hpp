#pragma once
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "iwt/common.hpp"

namespace iwt {

struct Group;
using GroupPtr = std::shared_ptr<const Group>;

// Finite p-group. Elements are 0..order-1; products come from a full table, or
// from matrix labels when the order is too large for a table.
struct Group {
  int p = 3;
  int order = 1;
  int N = 0;  // order = p^N
  int id = 0;
  bool exponent_p = true;
  std::vector<int> table;  // order*order, empty for label-only groups
  std::vector<int> inv;
  std::vector<int> gens;
  // unitriangular labels: above-diagonal entries, row-major
  int mat_dim = 0;
  std::vector<std::vector<int>> labels;
  std::string name;

  int mul(int a, int b) const;
  int inverse(int a) const { return inv[a]; }
  // a^{-1} g a
  int conj(int g, int a) const { return mul(mul(inverse(a), g), a); }
  int power(int a, i64 e) const;
  int commutator(int a, int b) const { return mul(mul(inverse(a), inverse(b)), mul(a, b)); }
  bool has_table() const { return !table.empty(); }
  const int* table_ptr() const { return table.empty() ? nullptr : table.data(); }
  bool is_abelian() const;

  // conjugacy classes ordered by least element
  const std::vector<std::vector<int>>& classes() const;
  const std::vector<int>& class_of() const;
  int num_classes() const { return static_cast<int>(classes().size()); }

 private:
  mutable std::once_flag cls_once_;
  mutable std::vector<std::vector<int>> classes_;
  mutable std::vector<int> class_of_;
};

GroupPtr build_unitriangular(int N, int p);
// mult[a][b] = a*b; checks axioms (Light's test over generators) and exponent p
GroupPtr group_from_table(int p, const std::vector<std::vector<int>>& mult, bool require_exponent_p = true,
                          const std::string& name = "table");
GroupPtr cyclic_group(int p, int order, bool require_exponent_p = true);
GroupPtr direct_product(const GroupPtr& a, const GroupPtr& b, bool require_exponent_p = true);
GroupPtr elementary_abelian(int p, int rank);

struct Subgroup {
  GroupPtr parent;
  std::vector<int> elems;  // sorted parent indices
  std::vector<int> gens;   // closure witness
  std::vector<int> local;  // parent index -> position in elems, or -1

  int order() const { return static_cast<int>(elems.size()); }
  bool contains(int g) const { return local[g] >= 0; }
  bool operator==(const Subgroup& o) const { return elems == o.elems; }
  // the subgroup as a group with local indices 0..order-1 (elems[i] <-> i)
  GroupPtr as_group() const;

 private:
  mutable std::shared_ptr<std::once_flag> once_ = std::make_shared<std::once_flag>();
  mutable std::shared_ptr<GroupPtr> grp_ = std::make_shared<GroupPtr>();
};

Subgroup generate(const GroupPtr& G, const std::vector<int>& gens);
Subgroup from_elements(const GroupPtr& G, std::vector<int> elems);  // NOT_A_SUBGROUP if not closed
Subgroup whole(const GroupPtr& G);
Subgroup trivial_subgroup(const GroupPtr& G);
Subgroup centre(const GroupPtr& G);
Subgroup commutator_subgroup(const GroupPtr& G, const Subgroup& H);
Subgroup commutator_subgroup(const GroupPtr& G);
Subgroup normalizer(const GroupPtr& G, const Subgroup& U);
Subgroup centralizer(const GroupPtr& G, const std::vector<int>& S);
Subgroup intersect(const Subgroup& a, const Subgroup& b);
Subgroup conjugate(const Subgroup& U, int a);  // a^{-1} U a
bool is_normal(const Subgroup& N, const Subgroup& in);
bool subset_of(const Subgroup& a, const Subgroup& b);
int log_p(int p, i64 order);
// all subgroups ordered by (order, element list)
std::vector<Subgroup> enumerate_subgroups(const GroupPtr& G);
// left coset representatives of U in G (least element of each coset aU), ascending
std::vector<int> left_transversal(const Subgroup& U);
// right coset representatives (least element of each Ua), ascending
std::vector<int> right_transversal(const Subgroup& U);
// restate a subgroup of G contained in U as a subgroup of U.as_group()
Subgroup restrict_to(const Subgroup& V, const Subgroup& U);
// image of a subgroup of U.as_group() back in U.parent
Subgroup lift_from(const Subgroup& V, const Subgroup& U);

struct GroupMap {
  GroupPtr domain, codomain;
  std::vector<int> image;
  int operator()(int g) const { return image[g]; }
  bool is_hom() const;
};

struct Quotient {
  GroupPtr group;
  GroupMap proj;
  std::vector<int> rep;  // least preimage of each coset
};
Quotient quotient(const GroupPtr& G, const Subgroup& N, bool require_exponent_p = true);

// transfer G -> U^{ab}; returns the element of U/[U,U] as an index of `uab`
int verlagerung(const Subgroup& U, int g, const Quotient& uab);

}  // namespace iwt
