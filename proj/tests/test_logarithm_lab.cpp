#include <algorithm>

#include "doctest.h"
#include "iwt/logarithm_lab.hpp"
#include "test_util.hpp"

using namespace iwt;
using namespace iwt::testutil;

namespace {

// random element of J over an abelian group: fix the e-coefficient so aug ≡ 0 mod p
GR rand_J(Rng& r, const GroupPtr& A, const Budget& b) {
  GR y = rand_gr(r, A, b);
  Series a = augmentation(y);
  GR fix = GR::scalar(A, a);
  return y - fix + GR::scalar(A, Series(scale_int(rand_series(r, b), b.p)));
}

}  // namespace

TEST_CASE("log on 1+J") {
  const Budget b = budget(3);
  auto C3 = cyclic_group(3, 3);
  for (int g = 1; g < 3; ++g) CHECK(log_one_plus_J(GR::elem(C3, b, g)).x.is_zero());
  GR onep = GR::scalar(C3, Series::constant(b, 4));
  GR l = log_one_plus_J(onep);
  CHECK(l.x.integral());
  CHECK(l == GR::scalar(C3, series_log(Series::constant(b, 4))));
  auto A = elementary_abelian(3, 2);
  Rng r(21);
  for (int trial = 0; trial < 30; ++trial) {
    GR x = GR::one(A, b) + rand_J(r, A, b), y = GR::one(A, b) + rand_J(r, A, b);
    CHECK(log_one_plus_J(x * y) == log_one_plus_J(x) + log_one_plus_J(y));
  }
  try {
    log_one_plus_J(GR::scalar(C3, Series::constant(b, 2)));
    FAIL("expected OUT_OF_DOMAIN");
  } catch (const Error& e) {
    CHECK(e.code() == Err::OutOfDomain);
  }
}

TEST_CASE("log on 1+J kills exactly the group elements") {
  // all x = Σ a_u u with a_u ∈ {-2..2} and aug(x) ≡ 1 mod 3, over C3
  const Budget b = budget(3, 2);
  auto C3 = cyclic_group(3, 3);
  int zeros = 0;
  for (int a0 = -2; a0 <= 2; ++a0)
    for (int a1 = -2; a1 <= 2; ++a1)
      for (int a2 = -2; a2 <= 2; ++a2) {
        if (pmod(a0 + a1 + a2, 3) != 1) continue;
        GR x = GR::zero(C3, b);
        x.set(0, Series::constant(b, a0));
        x.set(1, Series::constant(b, a1));
        x.set(2, Series::constant(b, a2));
        const bool is_elem = (std::abs(a0) + std::abs(a1) + std::abs(a2) == 1) && a0 + a1 + a2 == 1;
        const bool dead = log_one_plus_J(x).x.is_zero();
        CHECK(dead == is_elem);
        zeros += dead;
      }
  CHECK(zeros == 3);
}

TEST_CASE("log and exp on 1+I_U") {
  const Budget b = budget(3);
  for (const auto& G : {build_unitriangular(2, 3), elementary_abelian(3, 2)}) {
    auto F = build_artin_family_c(G);
    Rng r(40 + G->order);
    // exp(p^N) ∈ 1 + I_Γ
    GR pn = GR::scalar(F.entries[0].U.as_group(), Series::constant(b, ipow(3, G->N)));
    GR e = exp_on_I(pn, F, 0);
    CHECK(log_on_I(e, F, 0) == pn);
    for (size_t idx = 0; idx < F.entries.size(); ++idx) {
      const auto& E = F.entries[idx];
      const Descriptor D = image_I(F, static_cast<int>(idx));
      GroupPtr UG = E.U.as_group();
      if (E.kind == AKind::Cyclic) {
        // 1 + p^{n_h-1} h
        GR x = GR::one(UG, b) + gr_scale(GR::elem(UG, b, E.U.local[E.h]), Series::constant(b, ipow(3, E.n_h - 1)));
        GR lx = log_on_I(x, F, static_cast<int>(idx));
        CHECK(membership(lx, D).member);
        CHECK(exp_on_I(lx, F, static_cast<int>(idx)) == x);
      }
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<Series> co;
        for (size_t g = 0; g < D.gens.size(); ++g) co.push_back(rand_series(r, b));
        GR y = descriptor_element(D, co);
        GR ey = exp_on_I(y, F, static_cast<int>(idx));
        CHECK(log_on_I(ey, F, static_cast<int>(idx)) == y);
      }
    }
    CHECK(log_on_I(GR::one(F.entries[0].U.as_group(), b), F, 0).x.is_zero());
  }
  auto C3 = cyclic_group(3, 3);
  auto F = build_artin_family_c(C3);
  try {
    log_on_I(GR::one(C3, b), F, 1);
    FAIL("expected EXCLUDED_TOTAL_GROUP");
  } catch (const Error& e) {
    CHECK(e.code() == Err::ExcludedTotalGroup);
  }
}

TEST_CASE("char p power identity") {
  const Budget b = budget(3);
  auto C3 = cyclic_group(3, 3);
  GR x = GR::one(C3, b) + GR::elem(C3, b, 1);
  CHECK(char_p_power_identity(x));
  GR cube = gr_pow(x, 3);
  CHECK(Series(with_precision(cube.coeff(0), 1)) == Series(with_precision(Series::constant(b, 2), 1)));
  auto G = build_unitriangular(2, 3);
  auto ab = quotient(G, commutator_subgroup(G));
  Rng r(77);
  for (int trial = 0; trial < 200; ++trial) CHECK(char_p_power_identity(rand_gr(r, ab.group, b)));
  for (int trial = 0; trial < 10; ++trial) CHECK(char_p_power_identity(rand_gr(r, G, b)));
  // aug(x) = 0 forces x^{|Δ|} = 0 mod p
  for (int trial = 0; trial < 20; ++trial) {
    GR y = rand_gr(r, ab.group, b);
    y = y - GR::scalar(ab.group, augmentation(y));
    GR yp = gr_pow(y, ab.group->order);
    CHECK(divisible_p_pow(yp.x, b.B + 1));
  }
}

TEST_CASE("integral logarithm") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  for (int g = 0; g < G->order; ++g) CHECK(integral_log(GR::elem(G, b, g)).value.y.is_zero());
  // torsion units ±g have vanishing Γ
  for (int g = 0; g < G->order; g += 5)
    CHECK(integral_log(gr_scale(GR::elem(G, b, g), Series::constant(b, -1))).value.y.is_zero());
  GR gamma = GR::scalar(G, Series::from_ints(b, {1, 1}));
  CHECK(integral_log(gamma).value.y.is_zero());
  Rng r(8);
  for (int trial = 0; trial < 10; ++trial) {
    GR x = rand_unit(r, G, b), y = rand_unit(r, G, b);
    auto gx = integral_log(x), gy = integral_log(y), gxy = integral_log(x * y);
    CHECK(gxy.value == gx.value + gy.value);
    CHECK(gx.precision == b.M - 1);
  }
  // commuting pair: x and a power of x
  GR x = rand_unit(r, G, b);
  CHECK(integral_log(gr_pow(x, 4)).value == cv_scale(integral_log(x).value, Series::constant(b, 4)));
  try {
    integral_log(GR::elem(G, b, 1) - GR::one(G, b));
    FAIL("expected NOT_A_UNIT");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotAUnit);
  }
}

TEST_CASE("omega") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto ab = quotient(G, commutator_subgroup(G));
  std::vector<char> hit(ab.group->order, 0);
  for (int g = 0; g < G->order; ++g) {
    OmegaValue w = omega_at_level(ConjVec::cls(G, b, g), 2, ab);
    CHECK(w.gab == ab.proj(g));
    CHECK(w.gamma_exp == 0);
    hit[w.gab] = 1;
  }
  for (char h : hit) CHECK(h);
  ConjVec tE = cv_scale(ConjVec::cls(G, b, G->id), Series::T(b));
  CHECK(omega_at_level(tE, 3, ab).gamma_exp == 1);
  Rng r(9);
  const OmegaValue idv{ab.group->id, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const ConjVec y = integral_log(rand_unit(r, G, b)).value;
    for (int j = 1; j <= 3; ++j) {
      OmegaValue w = omega_at_level(y, j, ab);
      CHECK(w.gab == idv.gab);
      CHECK(w.gamma_exp == 0);
    }
  }
}

TEST_CASE("abelian integral log inverter") {
  const Budget b = budget(3, 6, 6, 4);
  CHECK(intlog_invert_abelian(Series::zero(b)) == Series::one(b));
  const Series onep = Series::constant(b, 4);
  const Series y = integral_log_gamma(onep);
  CHECK(intlog_invert_abelian(y) == onep);
  CHECK(integral_log_gamma(Series::from_ints(b, {1, 1})).is_zero());
  Rng r(10);
  for (int trial = 0; trial < 100; ++trial) {
    Series u = rand_series(r, b);
    if (pmod(u.coeff_int(0), 3) == 0) u = u + Series::one(b);
    // images of Γ_Γ have no T-coefficient
    const Series g = integral_log_gamma(u);
    CHECK(g.coeff_int(1) == 0);
  }
  for (int trial = 0; trial < 30; ++trial) {
    Series u = rand_series(r, b);
    if (pmod(u.coeff_int(0), 3) == 0) u = u + Series::one(b);
    const Series g = integral_log_gamma(u);
    const Series x = intlog_invert_abelian(g);
    CHECK(integral_log_gamma(x) == g);
    // u/x = ζ·(1+T)^s
    Series q = u * series_invert(x);
    const i64 z = teichmuller(3, b.M, q.coeff_int(0));
    q = q * Series::constant(b, invmod(z, ipow(3, b.M)));
    const i64 s = q.coeff_int(1);
    Series gs = series_exp(Series(scale_int(series_log(Series::from_ints(b, {1, 1})), s)));
    // s·log(1+T) carries T^p/p, so s mod p^k pins the kernel element only mod p^{k-1}
    const int k = std::min(q.k, gs.k) - 1;
    CHECK(equal_at(with_precision(q, k), with_precision(gs, k)));
  }
  try {
    intlog_invert_abelian(Series::T(b));
    FAIL("expected NOT_IN_IMAGE");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotInImage);
  }
}

TEST_CASE("log and norm compatibility") {
  const Budget b = budget(3);
  auto G = build_unitriangular(2, 3);
  auto F = build_artin_family(G);
  CHECK(compat_log_norm(GR::one(G, b), F.entries[1].U));
  Rng r(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& U = F.entries[1 + trial % (F.entries.size() - 1)].U;
    CHECK(compat_log_norm(rand_unit(r, G, b, true), U));
  }
  // central scalar: Nr = x^{(U:U')}
  Series s = Series::from_ints(b, {4, 3, 1});
  GR x = GR::scalar(G, s);
  const Subgroup& Uh = F.entries[1].U;
  BrauerPair bp = make_brauer_pair(G, Uh);
  CHECK(norm_theta(x, bp) == GR::scalar(bp.Q.group, series_pow(s, 9)));
  CHECK(compat_log_norm(x, Uh));
}
