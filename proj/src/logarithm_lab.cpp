#include "iwt/logarithm_lab.hpp"

#include <algorithm>

#include "iwt/k1_norms.hpp"

namespace iwt {

namespace {

void check_not_total(const ArtinFamilyC& F, int idx) {
  const GroupPtr& G = F.base.G;
  if (F.entries[idx].U.order() == G->order && G->N <= 2)
    fail(Err::ExcludedTotalGroup, "I_G is all of Lambda(G); log does not converge on 1 + I_G");
}

}  // namespace

GR log_one_plus_J(const GR& x) {
  if (!x.x.integral()) fail(Err::OutOfDomain, "x must be integral");
  const Series a = augmentation(x) - Series::one(x.budget());
  if (a.k < 1) fail(Err::PrecisionExhausted, "augmentation known below p^1");
  if (!divisible_p_pow(a, a.b.B + 1)) fail(Err::OutOfDomain, "x is not in 1 + J");
  GR L = gr_log(x);
  if (!L.x.integral()) fail(Err::IntegralityFailure, "log of 1 + J left the integral group ring");
  return L;
}

GR log_on_I(const GR& x, const ArtinFamilyC& F, int idx) {
  check_not_total(F, idx);
  const Descriptor D = image_I(F, idx);
  if (!membership(x - GR::one(x.G, x.budget()), D).member) fail(Err::OutOfDomain, "x is not in 1 + " + D.name);
  GR L = gr_log(x);
  Membership m = membership(L, D);
  if (!m.member) fail(Err::IntegralityFailure, "log left " + D.name + ": " + m.reason);
  return L;
}

GR exp_on_I(const GR& y, const ArtinFamilyC& F, int idx) {
  check_not_total(F, idx);
  const Descriptor D = image_I(F, idx);
  if (!membership(y, D).member) fail(Err::OutOfDomain, "y is not in " + D.name);
  GR E = gr_exp(y);
  Membership m = membership(E - GR::one(E.G, E.budget()), D);
  if (!m.member) fail(Err::IntegralityFailure, "exp left 1 + " + D.name + ": " + m.reason);
  return E;
}

bool char_p_power_identity(const GR& x) {
  Budget b = x.budget();
  b.M = 1;
  b.B = 0;
  GR y = GR::zero(x.G, b);
  for (int g = 0; g < x.G->order; ++g)
    for (int i = 0; i < b.n; ++i) y.x.at(g, i) = pmod(int_value(x.x, g, i), b.p);
  const int d = x.G->order;
  const GR lhs = gr_pow(y, d);
  const GR rhs = GR::scalar(x.G, series_pow(augmentation(y), d));
  return lhs == rhs;
}

i64 teichmuller(int p, int M, i64 a) {
  const i64 m = ipow(p, M);
  i64 t = pmod(a, m);
  for (int i = 0; i < M + 1; ++i) t = powmod(t, p, m);
  return t;
}

ConjVec frobenius_classes(const ConjVec& y) {
  const GroupPtr& G = y.G;
  ConjVec r = ConjVec::zero(G, y.y.b);
  r.y.k = y.y.k;
  const auto& cls = G->classes();
  const auto& co = G->class_of();
  for (size_t c = 0; c < cls.size(); ++c) {
    const Series a = y.coeff(static_cast<int>(c));
    if (a.is_zero()) continue;
    const int t = co[G->power(cls[c][0], G->p)];
    const Series f = frobenius_gamma(a);
    ConjVec add = ConjVec::zero(G, y.y.b);
    add.y.k = f.k;
    for (int i = 0; i < f.b.n; ++i) add.y.at(t, i) = f.c[i];
    r = r + add;
  }
  return r;
}

IntegralLogResult integral_log(const GR& x) {
  if (!gr_is_unit(x)) fail(Err::NotAUnit, "integral log needs a unit");
  const Budget& b = x.budget();
  const i64 a = aug_residue(x.x);
  const i64 z = teichmuller(b.p, b.M, invmod(a, b.p));
  const GR u = gr_scale(x, Series::constant(b, z));
  const ConjVec L = class_projection(gr_log(u));
  ConjVec pL{L.G, scale_int(L.y, b.p)};
  const ConjVec diff = pL - frobenius_classes(L);
  IntegralLogResult res;
  res.value = ConjVec{L.G, div_p_pow(diff.y, 1)};
  if (!res.value.y.integral())
    fail(Err::IntegralityFailure, "Gamma_G not integral at this precision; raise the p-adic precision");
  res.precision = res.value.y.k;
  res.certificate = "p*log(u) - phi(log(u)) divisible by p; integral at p^" + std::to_string(res.precision);
  return res;
}

OmegaValue omega_at_level(const ConjVec& y, int j, const Quotient& ab) {
  const GroupPtr& G = y.G;
  const Budget& b = y.y.b;
  if (j > y.y.k) fail(Err::PrecisionExhausted, "level exceeds the known precision");
  if (b.n < 2) fail(Err::PrecisionExhausted, "omega needs the T^1 coefficient");
  OmegaValue w;
  w.level = j;
  w.gab = ab.group->id;
  const i64 pj = ipow(b.p, j);
  const auto& cls = G->classes();
  for (size_t c = 0; c < cls.size(); ++c) {
    const i64 c0 = pmod(int_value(y.y, static_cast<int>(c), 0), b.p);
    const i64 c1 = int_value(y.y, static_cast<int>(c), 1);
    w.gab = ab.group->mul(w.gab, ab.group->power(ab.proj(cls[c][0]), c0));
    w.gamma_exp = pmod(w.gamma_exp + c1, pj);
  }
  return w;
}

Series integral_log_gamma(const Series& x) {
  if (!x.integral() || pmod(x.coeff_int(0), x.b.p) == 0) fail(Err::NotAUnit, "Gamma_Gamma needs a unit");
  const Budget& b = x.b;
  const i64 z = teichmuller(b.p, b.M, invmod(pmod(x.coeff_int(0), b.p), b.p));
  const Series L = series_log(x * Series::constant(b, z));
  Series pL(scale_int(L, b.p));
  return Series(div_p_pow(pL - frobenius_gamma(L), 1));
}

Series intlog_invert_abelian(const Series& y) {
  const Budget& b = y.b;
  const int p = b.p, n = b.n;
  if (!y.integral()) fail(Err::OutOfDomain, "y must be integral");
  const i64 full = b.modulus(b.M);
  if (n > 1 && pmod(y.c[1], b.modulus(y.k)) != 0)
    fail(Err::NotInImage, "T-coefficient is nonzero: the gamma-direction obstruction does not vanish");
  // A[m][k] = [T^m]((1+T)^p - 1)^k modulo a generous p-power
  const int W = std::min(max_wide_digits(p), b.M + b.B + 4);
  const i64 big = ipow(p, W);
  std::vector<i64> base(n, 0);
  for (int i = 1; i <= p && i < n; ++i) base[i] = pmod(binom(p, i), big);
  std::vector<std::vector<i64>> A(n, std::vector<i64>(n, 0));
  std::vector<i64> pw(n, 0);
  pw[0] = 1;
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) A[m][k] = pw[m];
    std::vector<i64> nx(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j) nx[i + j] = pmod(nx[i + j] + mulmod(pw[i], base[j], big), big);
    pw = nx;
  }
  // c_m as residues at scale p^B with individual precisions
  std::vector<i64> c(n, 0);
  std::vector<int> kk(n, b.M);
  const int ky = y.k;
  // c_0 = y_0·p/(p-1)
  c[0] = pmod(mulmod(mulmod(y.c[0], p, full), invmod(p - 1, full), full), full);
  kk[0] = std::min(b.M, ky + 1);
  if (n > 1) {
    c[1] = 0;
    kk[1] = b.M;
  }
  for (int m = 2; m < n; ++m) {
    int km = ky;
    i64 s = y.c[m];
    for (int k = 1; k < m; ++k) {
      const i64 a = A[m][k];
      if (a == 0 || c[k] == 0) continue;
      const int v = vp(a, p);
      if (v >= 1) {
        s = pmod(s + mulmod(c[k], pmod(a / p, full), full), full);
        km = std::min(km, std::min(b.M, kk[k] + v - 1));
      } else {
        const i64 mod_k = b.modulus(kk[k]);
        const i64 prod = mulmod(c[k], pmod(a, mod_k), mod_k);
        if (prod % p != 0) fail(Err::PrecisionExhausted, "denominator exceeds p^B in the inverter");
        s = pmod(s + prod / p, full);
        km = std::min(km, kk[k] - 1);
      }
    }
    const i64 unit = pmod(1 - ipow(p, m - 1), full);
    c[m] = mulmod(pmod(s, full), invmod(unit, full), full);
    kk[m] = km;
  }
  Series L = Series::zero(b);
  L.k = *std::min_element(kk.begin(), kk.end());
  for (int m = 0; m < n; ++m) L.c[m] = c[m];
  L.normalize();
  return series_exp(L);
}

bool compat_log_norm(const GR& x, const Subgroup& Uprime) {
  const BrauerPair bp = make_brauer_pair(x.G, Uprime);
  const GR lhs = gr_log(norm_theta(x, bp));
  const GR rhs = push_to_pair(trace_hom(class_projection(gr_log(x)), Uprime), bp);
  return lhs == rhs;
}

}  // namespace iwt
