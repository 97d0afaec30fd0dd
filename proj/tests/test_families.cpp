#include <set>

#include "doctest.h"
#include "iwt/families.hpp"

using namespace iwt;

namespace {

// orbits of cyclic subgroups under conjugation, by brute force
int brute_cyclic_orbits(const Group& G) {
  std::set<std::set<std::set<int>>> orbits;
  for (int g = 0; g < G.order; ++g) {
    std::set<std::set<int>> orb;
    for (int a = 0; a < G.order; ++a) {
      std::set<int> c;
      int x = G.id;
      do {
        c.insert(G.mul(G.mul(G.inverse(a), x), a));
        x = G.mul(x, g);
      } while (x != G.id);
      orb.insert(c);
    }
    orbits.insert(orb);
  }
  return static_cast<int>(orbits.size());
}

int brute_normalizer_order(const Group& G, const std::vector<int>& U) {
  std::set<int> s(U.begin(), U.end());
  int n = 0;
  for (int a = 0; a < G.order; ++a) {
    bool ok = true;
    for (int u : U) ok = ok && s.count(G.mul(G.mul(G.inverse(a), u), a));
    n += ok;
  }
  return n;
}

}  // namespace

TEST_CASE("artin family") {
  auto C3 = cyclic_group(3, 3);
  auto F = build_artin_family(C3);
  REQUIRE(F.entries.size() == 2);
  CHECK(F.entries[0].h == C3->id);
  CHECK(F.entries[0].U.order() == 1);

  auto G = build_unitriangular(2, 3);
  auto H = build_artin_family(G);
  CHECK(static_cast<int>(H.entries.size()) == brute_cyclic_orbits(*G));
  CHECK(H.entries.size() == 6);
  Subgroup Z = centre(G);
  int central = 0, noncentral = 0;
  for (const auto& e : H.entries) {
    CHECK(ipow(3, e.n) == brute_normalizer_order(*G, e.U.elems));
    if (e.h == G->id) continue;
    if (Z.contains(e.h)) {
      ++central;
      CHECK(e.n == 3);
    } else {
      ++noncentral;
      CHECK(e.n == 2);
    }
  }
  CHECK(central == 1);
  CHECK(noncentral == 4);
  // every cyclic subgroup is conjugate to exactly one representative
  for (int g = 0; g < G->order; ++g) {
    Subgroup C = generate(G, {g});
    int hits = 0;
    for (const auto& e : H.entries) {
      bool conj = false;
      for (int a = 0; a < G->order && !conj; ++a) conj = conjugate(e.U, a) == C;
      hits += conj;
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("central element c") {
  auto G = build_unitriangular(2, 3);
  int c = choose_central_c(G);
  CHECK(c != G->id);
  CHECK(centre(G).contains(c));
  CHECK(commutator_subgroup(G).contains(c));
  try {
    choose_central_c(elementary_abelian(3, 2));
    FAIL("expected ABELIAN_INPUT");
  } catch (const Error& e) {
    CHECK(e.code() == Err::AbelianInput);
  }
  auto G5 = build_unitriangular(3, 5);
  int c5 = choose_central_c(G5);
  CHECK(c5 != G5->id);
  for (int s : G5->gens) CHECK(G5->mul(s, c5) == G5->mul(c5, s));
  CHECK(commutator_subgroup(G5).contains(c5));
}

TEST_CASE("case classification") {
  std::vector<GroupPtr> gs{build_unitriangular(2, 3), build_unitriangular(2, 5),
                           direct_product(build_unitriangular(2, 3), cyclic_group(3, 3))};
  int seen_a = 0, seen_b = 0;
  for (const auto& G : gs) {
    auto F = build_artin_family_c(G);
    for (const auto& e : F.entries) {
      if (e.kind != AKind::WithC) continue;
      // brute force: inn is trivial iff every normalizing element centralizes U
      bool trivial = true;
      for (int a = 0; a < G->order; ++a) {
        if (!(conjugate(e.U, a) == e.U)) continue;
        for (int u : e.U.elems) trivial = trivial && G->conj(u, a) == u;
      }
      CHECK((e.tag == CaseTag::A) == trivial);
      CHECK(e.n_norm == e.n_h + (e.tag == CaseTag::B ? 1 : 0));
      (e.tag == CaseTag::A ? seen_a : seen_b)++;
    }
  }
  CHECK(seen_a > 0);
  CHECK(seen_b > 0);
  auto A = build_artin_family_c(elementary_abelian(3, 3));
  CHECK(A.c == -1);
  CHECK(A.entries.size() == A.base.entries.size());
}

TEST_CASE("brauer family") {
  auto C3 = cyclic_group(3, 3);
  CHECK(build_brauer_family(C3).pairs.size() == 2);
  auto G = build_unitriangular(2, 3);
  auto F = build_brauer_family(G);
  CHECK(F.pairs.size() == 19);
  for (const auto& bp : F.pairs) {
    CHECK(bp.Q.group->is_abelian());
    CHECK(is_normal(bp.V, bp.U));
    CHECK(bp.index * bp.U.order() == G->order);
  }
  CHECK(F.pairs[F.top].U.order() == 27);
  CHECK(F.pairs[F.top].V.order() == 3);
  for (const auto& cv : F.covers) CHECK(subset_of(F.pairs[cv.big].V, F.pairs[cv.small].U));
  for (const auto& l : F.links) CHECK(conjugate(F.pairs[l.from].U, l.a) == F.pairs[l.to].U);
}

TEST_CASE("ritter-weiss jordan data") {
  auto G = build_unitriangular(2, 3);
  for (const auto& W : enumerate_subgroups(G)) {
    if (W.order() != 9) continue;
    auto F = build_rw_family(G, W);
    int total = 0;
    for (const auto& b : F.blocks) {
      CHECK(b.m < 3);
      total += b.m;
      // chain relation (lambda - 1) e_j = e_{j-1}, written multiplicatively
      for (int j = 0; j < b.m; ++j) {
        int e = b.basis[j];
        int img = G->mul(G->mul(G->mul(F.lambda, e), G->inverse(F.lambda)), G->inverse(e));
        CHECK(img == (j == 0 ? G->id : b.basis[j - 1]));
      }
    }
    CHECK(total == 2);
    REQUIRE(F.blocks.size() == 1);
    CHECK(F.blocks[0].m == 2);
    CHECK(F.Wprime.order() * F.Wc.order() == W.order());
    CHECK(intersect(F.Wprime, F.Wc).order() == 1);
  }
  auto E = elementary_abelian(3, 3);
  Subgroup W = generate(E, {1, 3});
  auto F = build_rw_family(E, W);
  CHECK(F.blocks.size() == 2);
  for (const auto& b : F.blocks) CHECK(b.m == 1);
  try {
    build_rw_family(G, centre(G));
    FAIL("expected NOT_INDEX_P");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotIndexP);
  }
  auto D = direct_product(G, cyclic_group(3, 3));
  std::vector<int> lifted;
  for (int s : G->gens) lifted.push_back(s * 3);
  Subgroup Gsub = generate(D, lifted);
  REQUIRE(Gsub.order() == 27);
  try {
    build_rw_family(D, Gsub);
    FAIL("expected NOT_ABELIAN");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotAbelian);
  }
}
