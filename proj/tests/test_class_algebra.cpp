#include "doctest.h"
#include "iwt/class_algebra.hpp"

using namespace iwt;

namespace {

Budget budget_for(int p) {
  Budget b;
  b.p = p;
  return b;
}

Series rand_series(Rng& r, const Budget& b) {
  std::vector<i64> v(b.n);
  const i64 m = ipow(b.p, b.M);
  for (auto& x : v) x = r.below(m);
  return Series::from_ints(b, v);
}

ConjVec rand_cv(Rng& r, const GroupPtr& G, const Budget& b) {
  ConjVec y = ConjVec::zero(G, b);
  for (int c = 0; c < G->num_classes(); ++c) y = y + cv_scale(ConjVec::cls(G, b, G->classes()[c][0]), rand_series(r, b));
  return y;
}

std::vector<GroupPtr> test_groups() {
  return {cyclic_group(3, 3), elementary_abelian(3, 2), build_unitriangular(2, 3), build_unitriangular(2, 5)};
}

Descriptor scaled(Descriptor D, int s) {
  for (auto& g : D.gens) g.pexp += s;
  return D;
}

// integer vectors of the generators of D, over an abelian ambient
std::vector<std::vector<i64>> gen_vectors(const Descriptor& D, int p) {
  std::vector<std::vector<i64>> out;
  for (const auto& g : D.gens) {
    std::vector<i64> v(D.amb->order, 0);
    for (int u : g.support) v[u] = ipow(p, g.pexp);
    out.push_back(v);
  }
  return out;
}

std::vector<i64> int_mul(const Group& A, const std::vector<i64>& a, const std::vector<i64>& b) {
  std::vector<i64> r(A.order, 0);
  for (int x = 0; x < A.order; ++x)
    for (int y = 0; y < A.order; ++y) r[A.mul(x, y)] += a[x] * b[y];
  return r;
}

}  // namespace

TEST_CASE("trace examples") {
  auto G = build_unitriangular(2, 3);
  const Budget b = budget_for(3);
  auto F = build_artin_family(G);
  ConjVec e = ConjVec::cls(G, b, G->id);
  ConjVec t = trace_hom(e, trivial_subgroup(G));
  CHECK(t.coeff(0) == Series::constant(b, 27));
  for (const auto& en : F.entries) {
    if (en.h == G->id) continue;
    ConjVec th = trace_hom(ConjVec::cls(G, b, en.h), en.U);
    GR g = cv_as_gr(th);
    for (int u = 0; u < en.U.order(); ++u) {
      const i64 expect = (u == en.U.local[en.h]) ? ipow(3, en.n - 1) : 0;
      CHECK(g.coeff(u) == Series::constant(b, expect));
    }
  }
}

TEST_CASE("trace transitivity and representative independence") {
  auto G = build_unitriangular(2, 3);
  const Budget b = budget_for(3);
  Rng r(21);
  auto subs = enumerate_subgroups(G);
  for (int t = 0; t < 100; ++t) {
    ConjVec y = rand_cv(r, G, b);
    const Subgroup& U = subs[1 + r.below(subs.size() - 1)];
    CHECK(trace_hom(y, U) == trace_hom_full(y, U));
    for (const auto& U2 : subs) {
      if (U2.order() * 3 != U.order() || !subset_of(U2, U)) continue;
      ConjVec two = trace_hom(trace_hom(y, U), restrict_to(U2, U));
      ConjVec one = trace_hom(y, U2);
      CHECK(equal_at(two.y, one.y));
      break;
    }
  }
}

TEST_CASE("closed-form I_U and I'_U equal the trace images") {
  for (const auto& G : test_groups()) {
    auto F = build_artin_family_c(G);
    const int p = G->p;
    for (size_t i = 0; i < F.entries.size(); ++i) {
      const auto& en = F.entries[i];
      // I_U: image of Tr_{G -> U}
      std::vector<std::vector<i64>> tr;
      for (const auto& cls : G->classes()) tr.push_back(trace_int(G, cls[0], en.U));
      Descriptor I = image_I(F, static_cast<int>(i));
      SpanCheck sc = compare_span(I, tr, p);
      CHECK_MESSAGE(sc.span_in_D, G->name, " ", describe(I), " ", sc.detail);
      CHECK_MESSAGE(sc.D_in_span, G->name, " ", describe(I), " ", sc.detail);
      // I'_U: image of Tr_{NU -> U}
      Subgroup NU = normalizer(G, en.U);
      GroupPtr NG = NU.as_group();
      Subgroup Uin = restrict_to(en.U, NU);
      std::vector<std::vector<i64>> trp;
      for (const auto& cls : NG->classes()) trp.push_back(trace_int(NG, cls[0], Uin));
      Descriptor Ip = image_I_prime(F, static_cast<int>(i));
      SpanCheck sp = compare_span(Ip, trp, p);
      CHECK_MESSAGE(sp.span_in_D, G->name, " ", describe(Ip), " ", sp.detail);
      CHECK_MESSAGE(sp.D_in_span, G->name, " ", describe(Ip), " ", sp.detail);
      // I_U ⊆ I'_U
      SpanCheck inc = compare_span(Ip, gen_vectors(I, p), p);
      CHECK(inc.span_in_D);
    }
  }
}

TEST_CASE("membership examples") {
  auto G = build_unitriangular(2, 3);
  const Budget b = budget_for(3);
  auto F = build_artin_family_c(G);
  Descriptor IG = image_I(F, 0);
  GroupPtr T = F.entries[0].U.as_group();
  Membership m = membership(GR::scalar(T, Series::constant(b, 27)), IG);
  REQUIRE(m.member);
  CHECK(m.coords[0] == Series::one(b));
  CHECK_FALSE(membership(GR::scalar(T, Series::constant(b, 9)), IG).member);
  bool saw_b = false;
  for (size_t i = 0; i < F.entries.size(); ++i) {
    const auto& en = F.entries[i];
    if (en.kind != AKind::WithC || en.tag != CaseTag::B) continue;
    saw_b = true;
    Descriptor D = image_I(F, static_cast<int>(i));
    GroupPtr UG = en.U.as_group();
    GR x = GR::zero(UG, b);
    for (int j = 0; j < 3; ++j)
      x.add(en.U.local[G->mul(en.h, G->power(F.c, j))], Series::constant(b, ipow(3, en.n_h - 2)));
    CHECK(membership(x, D).member);
    GR y = GR::elem(UG, b, en.U.local[en.h]);
    CHECK_FALSE(membership(gr_scale(y, Series::constant(b, ipow(3, en.n_h - 2))), D).member);
    // coordinates rebuild the element
    Membership mx = membership(x, D);
    CHECK(descriptor_element(D, mx.coords) == x);
  }
  CHECK(saw_b);
}

TEST_CASE("J ideal") {
  const Budget b = budget_for(3);
  auto A = elementary_abelian(3, 2);
  Descriptor J = J_ideal(A);
  CHECK(membership(GR::scalar(A, Series::constant(b, 3)), J).member);
  CHECK_FALSE(membership(GR::one(A, b), J).member);
  for (int u = 1; u < A->order; ++u) CHECK(membership(GR::elem(A, b, u) - GR::one(A, b), J).member);
  Rng r(4);
  for (int t = 0; t < 100; ++t) {
    GR x = GR::zero(A, b);
    for (int u = 0; u < A->order; ++u) x.set(u, rand_series(r, b));
    bool direct = true;
    Series a = augmentation(x);
    for (int i = 0; i < b.n; ++i) direct = direct && a.coeff_int(i) % 3 == 0;
    CHECK(membership(x, J).member == direct);
  }
}

TEST_CASE("I_U products and power chains") {
  for (const auto& G : {build_unitriangular(2, 3), elementary_abelian(3, 2)}) {
    auto F = build_artin_family_c(G);
    const int p = G->p, N = G->N;
    for (size_t i = 0; i < F.entries.size(); ++i) {
      const auto& en = F.entries[i];
      if (en.kind == AKind::Gamma) continue;
      if (en.U.order() == G->order && N <= 2) continue;
      Descriptor I = image_I(F, static_cast<int>(i));
      GroupPtr UG = en.U.as_group();
      auto gv = gen_vectors(I, p);
      std::vector<std::vector<i64>> pw = gv;
      for (int k = 1; k <= 2; ++k) {
        std::vector<std::vector<i64>> next;
        for (const auto& a : pw)
          for (const auto& c : gv) next.push_back(int_mul(*UG, a, c));
        pw = next;
        // I^{k+1} ⊆ I
        CHECK(compare_span(I, pw, p).span_in_D);
        if (en.kind != AKind::Cyclic || N <= 2) continue;
        // p^{k(N-1)} I ⊆ I^{k+1}
        CHECK(compare_span(scaled(I, k * (N - 1)), pw, p).D_in_span);
        const bool sharp = compare_span(scaled(I, k * (en.n_h - 1)), pw, p).span_in_D;
        if (en.n_h == N) {
          CHECK(sharp);
        } else {
          // the sharp upper bound fails off the centre: (p h)(p h^{-1}) = p^2 is not in p·I.
          // What the topology argument uses is I^{k+1} ⊆ p^{(k+1)(n_h-1)} Λ(U_h).
          CHECK_FALSE(sharp);
          for (const auto& v : pw)
            for (i64 t : v) CHECK(pmod(t, ipow(p, (k + 1) * (en.n_h - 1))) == 0);
        }
      }
    }
  }
}

namespace {

// every vector of `from` lies in the Z_p-span of `to` (checked modulo p^K)
bool span_contained(const std::vector<std::vector<i64>>& from, const std::vector<std::vector<i64>>& to, int p, int K) {
  const i64 mod = ipow(p, K);
  const size_t n = from.at(0).size();
  std::vector<std::vector<i64>> A(n, std::vector<i64>(to.size()));
  for (size_t j = 0; j < to.size(); ++j)
    for (size_t i = 0; i < n; ++i) A[i][j] = pmod(to[j][i], mod);
  for (const auto& v : from) {
    std::vector<i64> rhs(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = pmod(v[i], mod);
    if (!solve_mod_pk(A, rhs, p, K)) return false;
  }
  return true;
}

std::vector<std::vector<i64>> products(const Group& A, const std::vector<std::vector<i64>>& x,
                                       const std::vector<std::vector<i64>>& y, i64 scale = 1) {
  std::vector<std::vector<i64>> out;
  for (const auto& a : x)
    for (const auto& c : y) {
      auto v = int_mul(A, a, c);
      for (auto& t : v) t *= scale;
      out.push_back(v);
    }
  return out;
}

}  // namespace

TEST_CASE("power chains for U_{h,c} when N > 3") {
  auto G = direct_product(build_unitriangular(2, 3), cyclic_group(3, 3));
  auto F = build_artin_family_c(G);
  const int p = 3, N = G->N;
  int seen_a = 0, seen_b = 0;
  for (size_t i = 0; i < F.entries.size(); ++i) {
    const auto& en = F.entries[i];
    if (en.kind != AKind::WithC) continue;
    Descriptor I = image_I(F, static_cast<int>(i));
    GroupPtr UG = en.U.as_group();
    auto gv = gen_vectors(I, p);
    auto sq = products(*UG, gv, gv);
    auto cube = products(*UG, sq, gv);
    if (en.tag == CaseTag::A) {
      ++seen_a;
      CHECK(compare_span(scaled(I, en.n_h - 2), sq, p).span_in_D);
      CHECK(compare_span(scaled(I, N - 2), sq, p).D_in_span);
    } else {
      ++seen_b;
      // p^{N-2} I^2 ⊆ I^3 ⊆ p^{n_h-1} I^2
      CHECK(span_contained(products(*UG, gv, gv, ipow(p, N - 2)), cube, p, 12));
      CHECK(span_contained(cube, products(*UG, gv, gv, ipow(p, en.n_h - 1)), p, 12));
    }
  }
  CHECK(seen_a > 0);
  CHECK(seen_b > 0);
}

TEST_CASE("I_W of the Ritter-Weiss family") {
  auto G = build_unitriangular(2, 3);
  for (const auto& W : enumerate_subgroups(G)) {
    if (W.order() != 9) continue;
    auto F = build_rw_family(G, W);
    Descriptor D = I_W_descriptor(F);
    // span of the traces Tr_{G -> W}([w]) over classes inside W
    std::vector<std::vector<i64>> tr;
    for (const auto& cls : G->classes())
      if (W.contains(cls[0])) tr.push_back(trace_int(G, cls[0], W));
    SpanCheck sc = compare_span(D, tr, 3);
    CHECK(sc.span_in_D);
    CHECK(sc.D_in_span);
    CHECK(D.gens.size() == tr.size());
  }
}
