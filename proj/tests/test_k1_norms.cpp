#include <algorithm>

#include "doctest.h"
#include "iwt/k1_norms.hpp"
#include "test_util.hpp"

using namespace iwt;
using namespace iwt::testutil;

namespace {

// all homomorphisms K → Z/p for an elementary abelian K, as value tables
std::vector<std::vector<int>> characters(const GroupPtr& K) {
  std::vector<int> basis;
  Subgroup span = trivial_subgroup(K);
  for (int g = 0; g < K->order && span.order() < K->order; ++g)
    if (!span.contains(g)) {
      basis.push_back(g);
      std::vector<int> gens = basis;
      span = generate(K, gens);
    }
  const int p = K->p, r = static_cast<int>(basis.size());
  std::vector<std::vector<int>> out;
  for (int code = 0; code < ipow(p, r); ++code) {
    std::vector<int> val(r);
    for (int i = 0, c = code; i < r; ++i, c /= p) val[i] = c % p;
    std::vector<int> chi(K->order, -1);
    for (int e = 0; e < ipow(p, r); ++e) {
      int g = K->id, v = 0;
      for (int i = 0, c = e; i < r; ++i, c /= p) {
        g = K->mul(g, K->power(basis[i], c % p));
        v += val[i] * (c % p);
      }
      chi[g] = v % p;
    }
    out.push_back(chi);
  }
  return out;
}

GR norm_abelian(const GR& z, const Subgroup& S) {
  BrauerPair sp = make_brauer_pair(z.G, S, trivial_subgroup(z.G));
  return det_unit_pivot(to_pair(norm_matrix(z, S, right_transversal(S)), sp));
}

bool has_failure(const CondReport& r, const std::string& prefix) {
  return std::any_of(r.failures.begin(), r.failures.end(),
                     [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("norm on scalars and group elements") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  const Series s = Series::from_ints(b, {2, 1, 5});
  const int z = centre(G).elems[1];
  for (const auto& bp : BF.pairs) {
    CHECK(norm_theta(GR::one(G, b), bp) == GR::one(bp.Q.group, b));
    CHECK(norm_theta(GR::scalar(G, s), bp) == GR::scalar(bp.Q.group, series_pow(s, bp.index)));
    // central z: each coset contributes z
    const GR nz = norm_theta(GR::elem(G, b, z), bp);
    CHECK(nz == GR::elem(bp.Q.group, b, bp.Q.group->power(bp.to_q(z), bp.index)));
  }
}

TEST_CASE("norm is multiplicative and basis independent") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  Rng r(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& bp = BF.pairs[trial % BF.pairs.size()];
    GR x = rand_unit(r, G, b), y = rand_unit(r, G, b);
    CHECK(norm_theta(x * y, bp) == norm_theta(x, bp) * norm_theta(y, bp));
  }
  for (const auto& bp : BF.pairs) {
    GR x = rand_unit(r, G, b);
    std::vector<int> reps = right_transversal(bp.U);
    for (int& a : reps) a = G->mul(bp.U.elems[r.below(bp.U.order())], a);
    CHECK(norm_theta(x, bp, reps) == norm_theta(x, bp));
  }
}

TEST_CASE("Berkowitz agrees with unit pivoting") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  Rng r(32);
  for (const auto& bp : BF.pairs) {
    GRMatrix A = to_pair(norm_matrix(rand_unit(r, G, b), bp.U, right_transversal(bp.U)), bp);
    CHECK(det_berkowitz(A) == det_unit_pivot(A));
  }
}

TEST_CASE("norm is transitive through an abelian subgroup") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  Subgroup U;
  for (const auto& H : enumerate_subgroups(G))
    if (H.order() == 9 && H.as_group()->is_abelian()) {
      U = H;
      break;
    }
  REQUIRE(U.order() == 9);
  BrauerPair bu = make_brauer_pair(G, U, trivial_subgroup(G));
  GroupPtr UG = bu.UG;
  Rng r(33);
  for (int trial = 0; trial < 20; ++trial) {
    const GR x = rand_unit(r, G, b);
    // Nr_{G→U} as an element over U.as_group()
    std::vector<int> back(bu.qorder());
    for (int q = 0; q < bu.qorder(); ++q) back[q] = U.local[bu.from_q(q)];
    const GR nu = gr_push(norm_theta(x, bu), UG, back);
    for (const auto& S : enumerate_subgroups(G)) {
      if (S.order() != 3 || !subset_of(S, U)) continue;
      std::vector<int> sl;
      for (int s : S.elems) sl.push_back(U.local[s]);
      const Subgroup Sloc = from_elements(UG, sl);
      const GR two_step = norm_abelian(nu, Sloc);
      const GR direct = norm_theta(x, make_brauer_pair(G, S, trivial_subgroup(G)));
      // identify both over <s> by the element order
      BrauerPair ds = make_brauer_pair(G, S, trivial_subgroup(G));
      BrauerPair ls = make_brauer_pair(UG, Sloc, trivial_subgroup(UG));
      std::vector<int> img(ls.qorder());
      for (int q = 0; q < ls.qorder(); ++q) img[q] = ds.to_q(U.elems[ls.from_q(q)]);
      CHECK(gr_push(two_step, ds.Q.group, img) == direct);
    }
  }
}

TEST_CASE("Frobenius on the augmentation") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  CHECK(frobenius_phi(GR::elem(G, b, 5)) == Series::one(b));
  const Series g = Series::from_ints(b, {1, 1});
  CHECK(frobenius_phi(GR::scalar(G, g)) == series_pow(g, 3));
  CHECK(congruence_target(g, 9, 3) == series_pow(g, 3));
  CHECK_THROWS_AS(congruence_target(g, 1, 3), Error);
}

TEST_CASE("theta congruences") {
  const Budget b = budget(3);
  for (const auto& G : {build_unitriangular(2, 3), elementary_abelian(3, 2)}) {
    auto BF = build_brauer_family(G);
    auto F = build_artin_family_c(G);
    Rng r(34 + G->order);
    for (int trial = 0; trial < 10; ++trial) {
      const GR x = rand_unit(r, G, b);
      for (const auto& bp : BF.pairs) CHECK(congruence_check_J(x, bp).ok);
      for (size_t idx = 0; idx < F.entries.size(); ++idx) {
        const CondReport rep = congruence_check_I(x, F, static_cast<int>(idx));
        CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures[0]));
      }
    }
  }
}

TEST_CASE("theta tuples land in Psi") {
  const Budget b = budget(3);
  for (const auto& G : {build_unitriangular(2, 3), elementary_abelian(3, 2)}) {
    auto BF = build_brauer_family(G);
    auto F = build_artin_family_c(G);
    Rng r(35 + G->order);
    for (int trial = 0; trial < 10; ++trial) {
      const PsiReport pr = psi_membership(theta_tuple(rand_unit(r, G, b), BF), BF, F);
      CHECK(pr.verdict == PsiVerdict::InPsi);
      CHECK(pr.passes_c);
    }
    // scale one non-top component by a unit of Λ(Γ): NCC into it breaks
    ThetaTuple t = theta_tuple(rand_unit(r, G, b), BF);
    int victim = -1;
    for (const auto& cv : BF.covers)
      if (cv.small != BF.top) victim = cv.small;
    REQUIRE(victim >= 0);
    t.comps[victim] = gr_scale(t.comps[victim], Series::from_ints(b, {1, 1}));
    const PsiReport bad = psi_membership(t, BF, F);
    CHECK(bad.verdict == PsiVerdict::Out);
    CHECK(has_failure(bad.rep, "NCC"));
  }
}

TEST_CASE("localized theta") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  auto F = build_artin_family_c(G);
  Rng r(36);
  const Series d = Series::from_ints(b, {3, 1});
  try {
    make_localized(GR::one(G, b), Series::from_ints(b, {3, 3}));
    FAIL("expected NOT_S_INVERTIBLE");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotSInvertible);
  }
  int informative = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const GR n = rand_unit(r, G, b);
    const LocalizedGR x = make_localized(n, d);
    CHECK(localized_is_unit(x));
    const PsiReport pr = psi_membership(theta_tuple_S(x, BF), BF, F);
    CHECK(pr.verdict == PsiVerdict::InPsi);
    // n·d over d is integral and equals θ(n)
    const ThetaTuple ti = theta_tuple_S(make_localized(gr_scale(n, d), d), BF);
    const ThetaTuple tn = theta_tuple(n, BF);
    for (size_t i = 0; i < ti.comps.size(); ++i) {
      CHECK(gr_scale(tn.comps[i], ti.dens[i]) == ti.comps[i]);
      if (in_p_lambda(ti.dens[i]) || BF.pairs[i].index > 1) {
        // d^{(G:U)} ≡ T^{(G:U)} mod p: the truncated quotient keeps no digits
        CHECK_THROWS_AS(localized_integral(ti.comps[i], ti.dens[i], nullptr), Error);
        continue;
      }
      GR q;
      REQUIRE(localized_integral(ti.comps[i], ti.dens[i], &q));
      // the quotient keeps only the digits the truncated division can see
      CHECK(q == tn.comps[i]);
      informative += q.x.k > 0;
    }
  }
  CHECK(informative > 0);
  // T + 3g: a unit only after localizing, so pivots fall back to Berkowitz
  const GR n = gr_scale(GR::one(G, b), Series::T(b)) + gr_scale(GR::elem(G, b, 1), Series::constant(b, 3));
  const LocalizedGR x = make_localized(n, Series::one(b));
  CHECK(localized_is_unit(x));
  const ThetaTuple tt = theta_tuple_S(x, BF);
  CHECK(tt.comps.size() == BF.pairs.size());
  CHECK(psi_membership(tt, BF, F).verdict == PsiVerdict::InPsi);
}

TEST_CASE("evaluation at characters") {
  const Budget b = budget(3);
  const int p = 3;
  const Cyclo t = Cyclo::integer(p, b.M, 3);
  CHECK(evaluate_series(Series::from_ints(b, {1, 1}), t) == Cyclo::integer(p, b.M, 4));
  auto K = elementary_abelian(3, 2);
  const auto chars = characters(K);
  CHECK(chars.size() == 9);
  std::vector<int> triv(K->order, 0);
  // γ ↦ 4: (1+T) evaluates to 4
  EvalResult e = evaluate_at_character(GR::scalar(K, Series::from_ints(b, {1, 1})), Series::one(b), triv, 0, 1, 4);
  CHECK(!e.infinite);
  CHECK(e.value == Cyclo::integer(p, b.M, 4));
  // den T at κ^0 = 1 is a pole
  CHECK(evaluate_at_character(GR::one(K, b), Series::T(b), triv, 0, 0, 4).infinite);
  std::vector<int> bad(K->order, 1);
  CHECK_THROWS_AS(evaluate_at_character(GR::one(K, b), Series::one(b), bad, 0, 1, 4), Error);
  CHECK_THROWS_AS(evaluate_at_character(GR::one(K, b), Series::one(b), triv, 0, 1, 2), Error);
  // group elements go to roots of unity
  for (const auto& chi : chars)
    for (int g = 0; g < K->order; ++g) {
      EvalResult v = evaluate_at_character(GR::elem(K, b, g), Series::one(b), chi, 0, 1, 4);
      CHECK(v.value == Cyclo::zeta_pow(p, b.M, chi[g]));
    }
}

TEST_CASE("norms and induction at characters") {
  const Budget b = budget(3);
  const int p = 3;
  auto K = elementary_abelian(3, 2);
  const auto chars = characters(K);
  Rng r(37);
  for (const auto& S : enumerate_subgroups(K)) {
    if (S.order() != 3) continue;
    BrauerPair sp = make_brauer_pair(K, S, trivial_subgroup(K));
    for (int trial = 0; trial < 3; ++trial) {
      const GR f = rand_unit(r, K, b);
      const GR nf = norm_theta(f, sp);
      for (int cg : {0, 1})
        for (const auto& chi : chars) {
          std::vector<int> chiS(sp.qorder());
          for (int q = 0; q < sp.qorder(); ++q) chiS[q] = chi[sp.from_q(q)];
          const EvalResult lhs = evaluate_at_character(nf, Series::one(b), chiS, cg, 1, 4);
          // extensions of chi|S: chi + psi with psi trivial on S
          Cyclo rhs = Cyclo::one(p, b.M);
          int count = 0;
          for (const auto& psi : chars) {
            bool trivial_on_S = true;
            for (int s : S.elems) trivial_on_S = trivial_on_S && psi[s] == 0;
            if (!trivial_on_S) continue;
            std::vector<int> ext(K->order);
            for (int g = 0; g < K->order; ++g) ext[g] = (chi[g] + psi[g]) % p;
            rhs = rhs * evaluate_at_character(f, Series::one(b), ext, cg, 1, 4).value;
            ++count;
          }
          CHECK(count == 3);
          CHECK(lhs.value == rhs);
        }
    }
  }
}

TEST_CASE("SK_1 support") {
  const auto H = build_unitriangular(2, 3);
  CHECK(sk1_known_trivial(H));
  CHECK(sk1_known_trivial(elementary_abelian(3, 3)));
  CHECK(sk1_known_trivial(direct_product(H, cyclic_group(3, 3))));
  // maximal abelian subgroups of H x H have index 9
  const auto HH = direct_product(H, H);
  CHECK_FALSE(sk1_known_trivial(HH));
  CHECK_THROWS_AS(require_sk1_trivial(HH), Error);
}
