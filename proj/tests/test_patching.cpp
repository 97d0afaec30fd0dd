#include <algorithm>

#include "doctest.h"
#include "iwt/patching.hpp"
#include "test_util.hpp"

using namespace iwt;
using namespace iwt::testutil;

namespace {

template <class F>
Err code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Err::Io;
}

Series three_plus_T(const Budget& b) { return Series::from_ints(b, {3, 1}); }

// x ↦ x·(1 - g^w) at a finite level, computed coset by coset
LevelElement times_one_minus(const LevelElement& e, i64 w) {
  LevelElement r = e;
  const i64 pj = e.pj(), mod = ipow(e.p, e.m);
  for (int q = 0; q < e.qorder; ++q)
    for (i64 t = 0; t < pj; ++t) r.at(q, t) = pmod(e.at(q, t) - e.at(q, pmod(t - w, pj)), mod);
  return r;
}

// W-valued component of a unit, read over W.as_group()
GR over_W(const GR& x, const Subgroup& W) {
  const BrauerPair bw = make_brauer_pair(x.G, W, trivial_subgroup(x.G));
  const GR z = norm_theta(x, bw);
  std::vector<int> img(W.order());
  for (int u = 0; u < W.order(); ++u) img[bw.to_q(W.elems[u])] = u;
  return gr_push(z, W.as_group(), img);
}

int find_pair(const BrauerFamily& BF, const Subgroup& U) {
  const int i = BF.find(U);
  REQUIRE(i >= 0);
  return i;
}

}  // namespace

TEST_CASE("burns patch") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  auto F = build_artin_family_c(G);
  Rng r(101);
  const GR n = rand_unit(r, G, b);
  const LocalizedGR x = make_localized(n, three_plus_T(b));
  const ThetaTuple f = theta_tuple_S(x, BF);

  SUBCASE("xi = f gives w = 1") {
    const PatchCertificate c = burns_patch(f, f, BF, F);
    for (size_t i = 0; i < BF.pairs.size(); ++i) CHECK(c.w.comps[i] == GR::one(BF.pairs[i].Q.group, b));
    CHECK(c.psi.verdict == PsiVerdict::InPsi);
    CHECK(c.y.y.is_zero());
  }
  SUBCASE("known unit") {
    const GR u = rand_unit(r, G, b);
    const ThetaTuple xi = theta_tuple_S(make_localized(n * u, x.den), BF);
    const PatchCertificate c = burns_patch(f, xi, BF, F);
    const ThetaTuple tu = theta_tuple(u, BF);
    for (size_t i = 0; i < BF.pairs.size(); ++i) CHECK(c.w.comps[i] == tu.comps[i]);
    CHECK(c.y_precision >= 1);
    CHECK(equal_at(c.y.y, integral_log(u).value.y));
    CHECK(integral_log_gamma(c.ab_unit) == integral_log_gamma(augmentation(tu.comps[BF.top])));
    for (size_t i = 0; i < BF.pairs.size(); ++i)
      CHECK(gr_scale(c.xi_out.comps[i], xi.den(i)) == gr_scale(xi.comps[i], c.xi_out.den(i)));
  }
  SUBCASE("corrupted component leaves Psi") {
    const GR u = rand_unit(r, G, b);
    ThetaTuple xi = theta_tuple_S(make_localized(n * u, x.den), BF);
    int victim = -1;
    for (size_t i = 0; i < BF.pairs.size(); ++i)
      if (BF.pairs[i].index == 3 && BF.pairs[i].V.order() == 1) victim = static_cast<int>(i);
    REQUIRE(victim >= 0);
    xi.comps[victim] = gr_scale(xi.comps[victim], Series::constant(b, 4));
    try {
      burns_patch(f, xi, BF, F);
      FAIL("expected NOT_IN_PSI");
    } catch (const Error& e) {
      CHECK(e.code() == Err::NotInPsi);
      CHECK(std::string(e.what()).find("NCC") != std::string::npos);
    }
  }
  SUBCASE("non-integral quotient") {
    ThetaTuple xi = f;
    xi.comps[BF.top] = gr_scale(xi.comps[BF.top], Series::T(b));
    ThetaTuple g = f;
    g.comps[BF.top] = gr_scale(g.comps[BF.top], Series::constant(b, 3));
    CHECK(code_of([&] { burns_patch(g, f, BF, F); }) == Err::NotIntegral);
    CHECK(code_of([&] { burns_patch(f, xi, BF, F); }) == Err::NotIntegral);
  }
}

TEST_CASE("log tuple reconstructs the integral logarithm") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  auto F = build_artin_family_c(G);
  Rng r(5);
  for (int trial = 0; trial < 3; ++trial) {
    const GR u = rand_unit(r, G, b);
    const ConjVec y = reconstruct_from_brauer(log_tuple(theta_tuple(u, BF), BF), BF, F);
    CHECK(equal_at(y.y, integral_log(u).value.y));
  }
}

TEST_CASE("strong congruences") {
  const Budget b = budget(3);
  Rng r(7);
  for (const auto& G : {build_unitriangular(2, 3), elementary_abelian(3, 2)}) {
    auto BF = build_brauer_family(G);
    auto F = build_artin_family_c(G);
    for (int trial = 0; trial < 3; ++trial) {
      const CondReport rep = strong_congruence_check(theta_tuple(rand_unit(r, G, b), BF), BF, F);
      CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures.front()));
    }
  }
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  auto F = build_artin_family_c(G);
  ThetaTuple t = theta_tuple(rand_unit(r, G, b), BF);
  int victim = -1;
  for (size_t i = 0; i < BF.pairs.size(); ++i)
    if (BF.pairs[i].index > 1) victim = static_cast<int>(i);
  t.comps[victim] = gr_scale(t.comps[victim], Series::constant(b, 2));
  const CondReport bad = strong_congruence_check(t, BF, F);
  CHECK_FALSE(bad.ok);
  const std::string tag = "strong J [pair " + std::to_string(victim) + "]";
  CHECK(std::find(bad.failures.begin(), bad.failures.end(), tag) != bad.failures.end());
}

TEST_CASE("torsion refinement") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  Rng r(31);
  const LocalizedGR x = make_localized(rand_unit(r, G, b), three_plus_T(b));
  const ThetaTuple truth = theta_tuple_S(x, BF);
  const RWProvider prov = synthetic_provider(x);

  SUBCASE("torsion twist is removed") {
    for (int g : {1, 5, 13}) {
      const ThetaTuple xt = theta_tuple_S(make_localized(GR::elem(G, b, g) * x.num, x.den), BF);
      const RefinementResult res = torsion_refinement(xt, BF, prov);
      CHECK_MESSAGE(res.rep.ok, (res.rep.failures.empty() ? "" : res.rep.failures.front()));
      for (size_t i = 0; i < BF.pairs.size(); ++i) CHECK(res.xi.comps[i] == truth.comps[i]);
      const BrauerPair& top = BF.pairs[BF.top];
      CHECK(top.Q.group->mul(res.tau_ab, top.to_q(g)) == top.Q.group->id);
      bool c3 = false;
      for (const auto& s : res.log) c3 = c3 || (s.find("Case-3") != std::string::npos && s.find("Nr(c) = 1") != std::string::npos);
      CHECK(c3);
    }
  }
  SUBCASE("abelian group") {
    auto A = elementary_abelian(3, 2);
    auto BA = build_brauer_family(A);
    const LocalizedGR xa = make_localized(rand_unit(r, A, b), three_plus_T(b));
    const RefinementResult res = torsion_refinement(theta_tuple_S(xa, BA), BA, synthetic_provider(xa));
    CHECK(res.rep.ok);
    CHECK(res.tau_ab == BA.pairs[BA.top].Q.group->id);
  }
  SUBCASE("twisted Ritter-Weiss values") {
    RWProvider bad = prov;
    bad.rw = [&prov](const Subgroup& Up, const Subgroup& U, const Subgroup& V) -> std::optional<RWValue> {
      auto v = prov.rw(Up, U, V);
      const GroupPtr& Q = v->ab.num.G;
      v->ab.num = v->ab.num * GR::elem(Q, v->ab.num.budget(), Q->id == 0 ? 1 : 0);
      return v;
    };
    const RefinementResult res = torsion_refinement(truth, BF, bad);
    CHECK_FALSE(res.rep.ok);
    bool named = false;
    for (const auto& f : res.rep.failures) named = named || f.find("Case-2") != std::string::npos;
    CHECK(named);
  }
  SUBCASE("missing provider values") {
    RWProvider gap = prov;
    gap.pair = [](const Subgroup&, const Subgroup&) -> std::optional<PairValue> { return std::nullopt; };
    CHECK(code_of([&] { torsion_refinement(truth, BF, gap); }) == Err::ProviderGap);
  }
  SUBCASE("abelian part off by a non-torsion factor") {
    ThetaTuple xt = truth;
    xt.comps[BF.top] = gr_scale(xt.comps[BF.top], Series::constant(b, 4));
    CHECK(code_of([&] { torsion_refinement(xt, BF, prov); }) == Err::Inconsistent);
  }
}

TEST_CASE("zeta oracle levels") {
  const Budget b = budget(3, 8);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  const int c = choose_central_c(G);
  int h = -1;
  for (int g = 0; g < G->order && h < 0; ++g)
    if (g != G->id && !generate(G, {c}).contains(g)) h = g;
  const int pi = find_pair(BF, generate(G, {h, c}));
  const BrauerPair& bp = BF.pairs[pi];
  Rng r(55);
  const GR num = rand_gr(r, bp.Q.group, b);
  const Series den = Series::from_ints(b, {1, 3, 2});

  ZetaOracle O = synthetic_oracle(num, den, false, pi, 1, 4, {1, 2}, {2, 4});
  CHECK(O.m() == 2);
  {
    // κ(γ)^{(p-1)p^j} - 1 = 4^6 - 1 = 4095 = 3^2 · 455
    ZetaOracle O0 = O;
    O0.j = 0;
    CHECK(O0.m() == 1);
  }
  for (i64 w : {1, 2}) {
    std::vector<i64> f(b.n, 0);
    for (int i = 1; i <= w; ++i) f[i] = -binom(w, i);
    const LevelElement want = level_image(gr_scale(num, Series::from_ints(b, f) * series_invert(den)), 1, 2);
    CHECK(approximate_pseudomeasure(O, w, 2) == want);
    CHECK(approximate_pseudomeasure(O, w, 4) == want);
  }
  // (1-γ^{w2}) A_{w1} = (1-γ^{w1}) A_{w2}
  CHECK(times_one_minus(approximate_pseudomeasure(O, 1, 2), 2) == times_one_minus(approximate_pseudomeasure(O, 2, 2), 1));
  // level 1 projects to level 0
  const LevelElement L1 = approximate_pseudomeasure(O, 1, 2);
  std::vector<i64> f1(b.n, 0);
  f1[1] = -1;
  CHECK(project_level(L1, 0, 1) == level_image(gr_scale(num, Series::from_ints(b, f1) * series_invert(den)), 0, 1));
  // pole: ξ = num/(T·den), (1-(1+T)) ξ = -num/den
  const ZetaOracle Op = synthetic_oracle(num, den, true, pi, 1, 4, {1}, {2});
  CHECK(approximate_pseudomeasure(Op, 1, 2) == level_image(gr_scale(num, Series::constant(b, -1) * series_invert(den)), 1, 2));

  const ZetaOracle Z = synthetic_oracle(GR::zero(bp.Q.group, b), den, false, pi, 1, 4, {3}, {2});
  CHECK(approximate_pseudomeasure(Z, 3, 2).is_zero());

  CHECK(code_of([&] { approximate_pseudomeasure(O, 5, 2); }) == Err::OracleGap);
  CHECK(code_of([&] { approximate_pseudomeasure(O, 1, 3); }) == Err::InvalidInput);
  // (γ-1)^4 does not vanish mod 9 in Z/9[C_3]
  CHECK(code_of([&] { level_image(rand_gr(r, bp.Q.group, budget(3)), 1, 2); }) == Err::PrecisionExhausted);

  const ZetaOracle back = read_oracle(write_oracle(O));
  CHECK(back.delta == O.delta);
  CHECK(back.m() == O.m());
  CHECK(code_of([] { read_oracle("iwt-zeta-oracle 2\np 3 M 6 j 1 pair 0 qorder 1\n"); }) == Err::InvalidInput);
  CHECK(code_of([] { read_oracle("iwt-zeta-oracle 1\n# no parameters\n"); }) == Err::InvalidInput);
}

TEST_CASE("orbital sums") {
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  auto F = build_artin_family_c(G);
  for (size_t i = 0; i < BF.pairs.size(); ++i) {
    if (BF.pairs[i].index == 1) {
      CHECK(code_of([&] { orbital_p_check(BF, F, static_cast<int>(i), 2); }) == Err::ExcludedTotalGroup);
      continue;
    }
    const CondReport rep = orbital_p_check(BF, F, static_cast<int>(i), 2);
    CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures.front()));
  }

  // ξ = Σ_orbits r_O P_{y_O}: invariant and divisible by the isotropy orders
  const Budget b = budget(3, 8);
  const int c = choose_central_c(G);
  int h = -1;
  for (int g = 0; g < G->order && h < 0; ++g)
    if (g != G->id && !generate(G, {c}).contains(g)) h = g;
  const int pi = find_pair(BF, generate(G, {h, c}));
  const BrauerPair& bp = BF.pairs[pi];
  const Subgroup NU = normalizer(G, bp.U);
  Rng r(77);
  GR num = GR::scalar(bp.Q.group, rand_series(r, b));
  std::vector<char> seen(bp.qorder(), 0);
  for (int q = 0; q < bp.qorder(); ++q) {
    if (seen[q] || q == bp.Q.group->id) continue;
    std::vector<int> orbit;
    int fix = 0;
    for (int a : NU.elems) {
      const int y = bp.to_q(G->conj(bp.from_q(q), a));
      if (y == q) ++fix;
      if (!seen[y]) orbit.push_back(y);
      seen[y] = 1;
    }
    const Series s = Series(scale_int(rand_series(r, b), fix / bp.U.order()));
    for (int y : orbit) num.set(y, s);
  }
  ZetaOracle O = synthetic_oracle(num, Series::one(b), false, pi, 1, 4, {1, 2}, {2});
  const CondReport good = orbital_sum_check(O, BF, F);
  CHECK_MESSAGE(good.ok, (good.failures.empty() ? "" : good.failures.front()));

  // Δ at the central coset must be divisible by #(NU/U)_c = 3
  O.delta[{1, 2, bp.to_q(c), 0}] = 1;
  try {
    orbital_sum_check(O, BF, F);
    FAIL("expected HYPOTHESIS_FAILS");
  } catch (const Error& e) {
    CHECK(e.code() == Err::HypothesisFails);
    CHECK(std::string(e.what()).find("w=1, k=2") != std::string::npos);
  }
}

TEST_CASE("Ritter-Weiss variant") {
  const Budget b = budget(3);
  RWOptions opt;
  opt.budget = b;
  opt.trials = 3;
  auto G = build_unitriangular(2, 3);
  const int c = choose_central_c(G);
  int h = -1;
  for (int g = 0; g < G->order && h < 0; ++g)
    if (g != G->id && !generate(G, {c}).contains(g)) h = g;
  const Subgroup W = generate(G, {h, c});
  const CondReport rep = rw_verify(G, W, opt);
  CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures.front()));
  bool eight = false;
  for (const auto& s : rep.certificates) eight = eight || s.find("for all 8 nontrivial w") != std::string::npos;
  CHECK(eight);

  auto P = direct_product(G, cyclic_group(3, 3));
  const int cp = P->order / G->order;
  std::vector<int> gens;
  for (int w : W.elems) gens.push_back(w * cp);
  gens.push_back(1);
  const Subgroup WP = generate(P, gens);
  REQUIRE(WP.order() * 3 == P->order);
  opt.trials = 2;
  const CondReport rp = rw_verify(P, WP, opt);
  CHECK_MESSAGE(rp.ok, (rp.failures.empty() ? "" : rp.failures.front()));

  const RWFamily Fam = build_rw_family(G, W);
  const RWContext C = make_rw_context(Fam);
  Rng r(9);
  const GR x = rand_unit(r, G, b);
  const PairValue ab{abelianize(x, C.ab), Series::one(b)};
  const PairValue xw{over_W(x, W), Series::one(b)};
  CHECK(rw_step6(C, ab, xw).ok);
  int wc = -1;
  for (int g : Fam.Wc.elems)
    if (g != G->id) wc = g;
  REQUIRE(wc >= 0);
  const GroupPtr WG = W.as_group();
  const PairValue twisted{xw.num * GR::elem(WG, b, W.local[wc]), xw.den};
  CHECK_FALSE(rw_step6(C, ab, twisted).ok);
}

TEST_CASE("tuple files") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto BF = build_brauer_family(G);
  Rng r(3);
  const ThetaTuple t = theta_tuple(rand_unit(r, G, b), BF);
  const ThetaTuple back = read_tuple(write_tuple(t, BF), BF);
  REQUIRE(back.comps.size() == t.comps.size());
  CHECK_FALSE(back.localized());
  for (size_t i = 0; i < t.comps.size(); ++i) CHECK(back.comps[i] == t.comps[i]);
  const ThetaTuple ts = theta_tuple_S(make_localized(rand_unit(r, G, b), three_plus_T(b)), BF);
  const ThetaTuple bs = read_tuple(write_tuple(ts, BF), BF);
  for (size_t i = 0; i < ts.comps.size(); ++i) {
    CHECK(bs.comps[i] == ts.comps[i]);
    CHECK(bs.dens[i] == ts.dens[i]);
  }
  std::string text = write_tuple(t, BF);
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 7");
  CHECK(code_of([&] { read_tuple(text, BF); }) == Err::InvalidInput);
  CHECK(code_of([&] { read_tuple("{not json", BF); }) == Err::InvalidInput);
  auto A = elementary_abelian(3, 2);
  CHECK(code_of([&] { read_tuple(write_tuple(t, BF), build_brauer_family(A)); }) == Err::InvalidInput);
}
