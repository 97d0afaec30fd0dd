#include "iwt/k1_norms.hpp"

#include <algorithm>

#include "iwt/logarithm_lab.hpp"

namespace iwt {

GRMatrix norm_matrix(const GR& x, const Subgroup& U, const std::vector<int>& reps) {
  const GroupPtr& G = x.G;
  if (U.parent.get() != G.get() && U.parent->order != G->order)
    fail(Err::InvalidInput, "subgroup of a different group");
  GroupPtr UG = U.as_group();
  const int r = static_cast<int>(reps.size());
  if (r * U.order() != G->order) fail(Err::InvalidInput, "not a right transversal");
  // coset[y] = j with y ∈ U a_j
  std::vector<int> coset(G->order, -1);
  for (int j = 0; j < r; ++j)
    for (int u : U.elems) {
      const int y = G->mul(u, reps[j]);
      if (coset[y] >= 0) fail(Err::InvalidInput, "representatives share a coset");
      coset[y] = j;
    }
  GRMatrix A(r, std::vector<GR>(r, GR::zero(UG, x.budget())));
  for (auto& row : A)
    for (auto& e : row) e.x.k = x.x.k;
  std::vector<int> nz;
  for (int g = 0; g < G->order; ++g)
    if (!x.coeff(g).is_zero()) nz.push_back(g);
  for (int i = 0; i < r; ++i)
    for (int g : nz) {
      const int y = G->mul(reps[i], g);
      const int j = coset[y];
      const int u = G->mul(y, G->inverse(reps[j]));
      A[i][j].add(U.local[u], x.coeff(g));
    }
  return A;
}

GRMatrix to_pair(const GRMatrix& A, const BrauerPair& bp) {
  std::vector<int> img(bp.UG->order);
  for (int u = 0; u < bp.UG->order; ++u) img[u] = bp.Q.proj(u);
  GRMatrix B;
  for (const auto& row : A) {
    std::vector<GR> r;
    for (const auto& e : row) r.push_back(gr_push(e, bp.Q.group, img));
    B.push_back(std::move(r));
  }
  return B;
}

GR det_unit_pivot(GRMatrix A) {
  const int n = static_cast<int>(A.size());
  if (n == 0) fail(Err::InvalidInput, "empty matrix");
  GR det = GR::one(A[0][0].G, A[0][0].budget());
  bool neg = false;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (gr_is_unit(A[i][c])) {
        piv = i;
        break;
      }
    if (piv < 0) fail(Err::SingularMatrix, "no unit pivot in column " + std::to_string(c));
    if (piv != c) {
      std::swap(A[piv], A[c]);
      neg = !neg;
    }
    det = det * A[c][c];
    const GR inv = gr_inverse(A[c][c]);
    for (int i = c + 1; i < n; ++i) {
      if (A[i][c].x.is_zero()) continue;
      const GR f = A[i][c] * inv;
      for (int j = c + 1; j < n; ++j) A[i][j] = A[i][j] - f * A[c][j];
    }
  }
  if (neg) det = GR::zero(det.G, det.budget()) - det;
  return det;
}

GR det_berkowitz(const GRMatrix& A) {
  const int n = static_cast<int>(A.size());
  if (n == 0) fail(Err::InvalidInput, "empty matrix");
  const GR zero = GR::zero(A[0][0].G, A[0][0].budget());
  const GR one = GR::one(A[0][0].G, A[0][0].budget());
  // coefficients of det(λ - A_r) for the leading r×r block, highest degree first
  std::vector<GR> C{one, zero - A[0][0]};
  for (int r = 1; r < n; ++r) {
    std::vector<GR> t{one, zero - A[r][r]};
    std::vector<GR> v(r, zero);
    for (int i = 0; i < r; ++i) v[i] = A[i][r];
    for (int k = 0; k < r; ++k) {
      GR s = zero;
      for (int i = 0; i < r; ++i) s = s + A[r][i] * v[i];
      t.push_back(zero - s);
      if (k + 1 == r) break;
      std::vector<GR> w(r, zero);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) w[i] = w[i] + A[i][j] * v[j];
      v = std::move(w);
    }
    std::vector<GR> D(r + 2, zero);
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) D[i] = D[i] + t[i - j] * C[j];
    C = std::move(D);
  }
  return (n % 2 == 0) ? C[n] : zero - C[n];
}

GR norm_theta(const GR& x, const BrauerPair& bp, const std::vector<int>& reps) {
  return det_unit_pivot(to_pair(norm_matrix(x, bp.U, reps), bp));
}

GR norm_theta(const GR& x, const BrauerPair& bp) { return norm_theta(x, bp, right_transversal(bp.U)); }

GR abelianize(const GR& x, const Quotient& ab) { return gr_push(x, ab.group, ab.proj.image); }

Series frobenius_phi(const GR& x) { return frobenius_gamma(augmentation(x)); }

Series congruence_target(const Series& phi_ab, int index, int p) {
  if (index % p != 0) fail(Err::InvalidInput, "congruence target needs a proper subgroup");
  return series_pow(phi_ab, index / p);
}

namespace {

bool aug_mod_p_zero(const Series& a) {
  if (a.k < 1) fail(Err::PrecisionExhausted, "augmentation known below p^1");
  return divisible_p_pow(a, a.b.B + 1);
}

// the abelian component (U,{e}) of a pair, read over U.as_group()
GR pair_to_local(const GR& z, const BrauerPair& bp) {
  std::vector<int> img(bp.Q.group->order);
  for (int u = 0; u < bp.UG->order; ++u) img[bp.Q.proj(u)] = u;
  return gr_push(z, bp.UG, img);
}

std::string pair_label(int i) { return "[pair " + std::to_string(i) + "]"; }

}  // namespace

CondReport congruence_check_J(const GR& x, const BrauerPair& bp) {
  CondReport r;
  if (bp.index == 1) {
    r.certificates.push_back("U = G: no condition");
    return r;
  }
  const Series target = congruence_target(frobenius_phi(x), bp.index, x.G->p);
  const GR th = norm_theta(x, bp);
  if (aug_mod_p_zero(augmentation(th) - target))
    r.certificates.push_back("aug(theta) - phi^e in p*Lambda(Gamma)");
  else
    r.fail("congruence J: aug(theta_{U,V}(x)) differs from phi(x)^((G:U)/p) mod p");
  return r;
}

CondReport congruence_check_I(const GR& x, const ArtinFamilyC& F, int idx) {
  CondReport r;
  const GroupPtr& G = F.base.G;
  const Subgroup& U = F.entries[idx].U;
  if (U.order() == G->order) {
    if (G->N <= 2) {
      r.certificates.push_back("U = G with N <= 2: no condition");
      return r;
    }
  }
  BrauerPair bp = make_brauer_pair(G, U);
  const GR th = pair_to_local(norm_theta(x, bp), bp);
  const Series s = congruence_target(frobenius_phi(x), bp.index, G->p);
  const Descriptor D = image_I(F, idx);
  // direct route
  Membership direct = membership(th - GR::scalar(th.G, s), D);
  // log route: Tr(Γ_G(x)) = log(θ_U(x)/φ^e)
  const ConjVec y = integral_log(x).value;
  const GR tr = cv_as_gr(trace_hom(y, U));
  const GR lg = gr_log(gr_scale(th, series_invert(s)));
  const bool same = tr == lg;
  Membership viaLog = membership(tr, D);
  if (!same) r.fail("log route: Tr(Gamma_G(x)) != log(theta_U/phi^e)");
  if (!viaLog.member) r.fail("log route: trace of Gamma_G(x) outside I_U");
  if (!direct.member) r.fail("congruence I: " + direct.reason);
  if (direct.member != (same && viaLog.member)) r.fail("routes disagree");
  if (r.ok) r.certificates.push_back("both routes certify membership in " + D.name);
  return r;
}

Series ThetaTuple::den(size_t i) const {
  if (dens.empty()) return Series::one(comps[i].budget());
  return dens[i];
}

ThetaTuple theta_tuple(const GR& x, const BrauerFamily& BF) {
  ThetaTuple t;
  for (const auto& bp : BF.pairs) t.comps.push_back(norm_theta(x, bp));
  return t;
}

const char* psi_name(PsiVerdict v) {
  switch (v) {
    case PsiVerdict::Out:
      return "out";
    case PsiVerdict::InPsiPrime:
      return "in Psi' only";
    case PsiVerdict::InPsi:
      return "in Psi";
  }
  return "?";
}

namespace {

// Nr_{K→S} over an abelian K, S given by its elements
GR abelian_norm(const GR& z, const Subgroup& S, bool localized) {
  const GroupPtr& K = z.G;
  BrauerPair sp = make_brauer_pair(K, S, trivial_subgroup(K));
  GRMatrix A = to_pair(norm_matrix(z, S, right_transversal(S)), sp);
  return localized ? det_berkowitz(A) : det_unit_pivot(A);
}

}  // namespace

PsiReport psi_membership(const ThetaTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F) {
  PsiReport out;
  CondReport& r = out.rep;
  if (t.comps.size() != BF.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
  const bool loc = t.localized();
  const GroupPtr& G = BF.G;
  const int p = G->p;
  for (const auto& cv : BF.covers) {
    const BrauerPair &big = BF.pairs[cv.big], &small = BF.pairs[cv.small];
    const GroupPtr& K = big.Q.group;
    std::vector<int> selems;
    for (int q = 0; q < small.Q.group->order; ++q) selems.push_back(big.to_q(small.from_q(q)));
    Subgroup S = from_elements(K, selems);
    const GR nr = abelian_norm(t.comps[cv.big], S, loc);
    GroupPtr SG = S.as_group();
    std::vector<int> img(small.Q.group->order);
    for (int q = 0; q < small.Q.group->order; ++q) img[q] = S.local[big.to_q(small.from_q(q))];
    const GR can = gr_push(t.comps[cv.small], SG, img);
    // Nr(n/d) = Nr(n)/d^p against n'/d'
    const GR lhs = gr_scale(nr, t.den(cv.small));
    const GR rhs = gr_scale(can, series_pow(t.den(cv.big), K->order / S.order()));
    if (!(lhs == rhs)) r.fail("NCC " + pair_label(cv.big) + "->" + pair_label(cv.small));
  }
  for (const auto& l : BF.links) {
    const BrauerPair &from = BF.pairs[l.from], &to = BF.pairs[l.to];
    std::vector<int> img(from.Q.group->order);
    for (int q = 0; q < from.Q.group->order; ++q) img[q] = to.to_q(G->conj(from.from_q(q), l.a));
    const GR moved = gr_push(t.comps[l.from], to.Q.group, img);
    if (!(gr_scale(moved, t.den(l.to)) == gr_scale(t.comps[l.to], t.den(l.from))))
      r.fail("CCC " + pair_label(l.from) + "->" + pair_label(l.to) + " via a=" + std::to_string(l.a));
  }
  // φ(η_ab) = a/b
  const Series a = frobenius_gamma(augmentation(t.comps[BF.top]));
  const Series b = frobenius_gamma(t.den(BF.top));
  for (size_t i = 0; i < BF.pairs.size(); ++i) {
    if (static_cast<int>(i) == BF.top || BF.pairs[i].index == 1) continue;
    const int e = BF.pairs[i].index / p;
    const Series lhs = augmentation(t.comps[i]) * series_pow(b, e);
    const Series rhs = t.den(i) * series_pow(a, e);
    if (!aug_mod_p_zero(lhs - rhs)) r.fail("congruence J " + pair_label(static_cast<int>(i)));
  }
  if (!r.ok) return out;
  r.certificates.push_back("NCC, CCC and J-congruences hold");
  out.verdict = PsiVerdict::InPsiPrime;
  const int nA = static_cast<int>(F.base.entries.size());
  auto additional = [&](int idx) -> bool {
    const Subgroup& U = F.entries[idx].U;
    if (U.order() == G->order) return true;
    const int pi = BF.find(U);
    if (pi < 0) fail(Err::Inconsistent, "F_A^c entry missing from the Brauer family");
    const BrauerPair& bp = BF.pairs[pi];
    const int e = bp.index / p;
    const GR num = pair_to_local(t.comps[pi], bp);
    const GR z = gr_scale(num, series_pow(b, e)) - GR::scalar(num.G, t.den(pi) * series_pow(a, e));
    Membership m = membership(z, image_I(F, idx));
    if (!m.member) r.fail("additional congruence [U_h, h=" + std::to_string(F.entries[idx].h) + "]: " + m.reason);
    return m.member;
  };
  bool okA = true;
  for (int i = 0; i < nA; ++i) okA = additional(i) && okA;
  if (!okA) return out;
  out.verdict = PsiVerdict::InPsi;
  bool okC = true;
  for (int i = nA; i < static_cast<int>(F.entries.size()); ++i) okC = additional(i) && okC;
  out.passes_c = okC;
  if (okC) r.certificates.push_back("additional congruences hold on F_A^c");
  return out;
}

LocalizedGR make_localized(const GR& num, const Series& den) {
  if (in_p_lambda(den)) fail(Err::NotSInvertible, "denominator lies in p*Lambda(Gamma)");
  return LocalizedGR{num, den};
}

bool localized_is_unit(const LocalizedGR& x) { return !in_p_lambda(augmentation(x.num)); }

ThetaTuple theta_tuple_S(const LocalizedGR& x, const BrauerFamily& BF) {
  if (in_p_lambda(x.den)) fail(Err::NotSInvertible, "denominator lies in p*Lambda(Gamma)");
  ThetaTuple t;
  for (const auto& bp : BF.pairs) {
    GRMatrix A = to_pair(norm_matrix(x.num, bp.U, right_transversal(bp.U)), bp);
    GR d;
    try {
      d = det_unit_pivot(A);
    } catch (const Error& e) {
      if (e.code() != Err::SingularMatrix) throw;
      d = det_berkowitz(A);
    }
    t.comps.push_back(d);
    // d^{(G:U)} may vanish mod (p, T^n) although d does not; comparisons cross-multiply
    t.dens.push_back(series_pow(x.den, bp.index));
  }
  return t;
}

bool localized_integral(const GR& num, const Series& den, GR* out) {
  if (in_p_lambda(den))
    fail(Err::PrecisionExhausted, "denominator vanishes mod (p, T^n); raise the T-adic precision");
  GR q = GR::zero(num.G, num.budget());
  for (int g = 0; g < num.G->order; ++g) {
    const Series a = num.coeff(g);
    if (a.is_zero()) continue;
    auto s = series_divide(a, den);
    if (!s || !s->integral()) return false;
    q.set(g, *s);
  }
  if (!(gr_scale(q, den) == num)) return false;
  if (out) *out = q;
  return true;
}

std::optional<GR> gr_divide(const GR& a, const GR& d) {
  check_same(a.x, d.x);
  if (!d.x.integral()) fail(Err::InvalidInput, "divisor must be integral");
  const GroupPtr& G = a.G;
  const Budget& b = a.budget();
  const int n = b.n, ord = G->order, dim = ord * n;
  const int k = std::min(a.x.k, d.x.k);
  // column h·n+j is the image of h·T^j
  std::vector<std::vector<i64>> A(dim, std::vector<i64>(dim, 0));
  for (int g = 0; g < ord; ++g)
    for (int i = 0; i < n; ++i) {
      const i64 c = int_value(d.x, g, i);
      if (c == 0) continue;
      for (int h = 0; h < ord; ++h)
        for (int j = 0; i + j < n; ++j) A[G->mul(g, h) * n + i + j][h * n + j] += c;
    }
  int loss = 0;
  auto sol = solve_mod_pk(A, a.x.c, b.p, k + b.B, &loss);
  if (!sol) return std::nullopt;
  if (k - loss < 1) fail(Err::PrecisionExhausted, "quotient has no known p-adic digits; raise the precision");
  GR q = GR::zero(G, b);
  q.x.k = k - loss;
  q.x.c = *sol;
  q.x.normalize();
  return q;
}

Cyclo evaluate_series(const Series& a, const Cyclo& t) {
  const int n = a.b.n;
  Cyclo v = Cyclo::zero(t.p, t.M);
  v.k = std::min(t.k, a.k);
  for (int i = n - 1; i >= 0; --i) v = v * t + Cyclo::integer(t.p, t.M, a.coeff_int(i));
  v.k = std::min(t.k, a.k);
  return v;
}

EvalResult evaluate_at_character(const GR& num, const Series& den, const std::vector<int>& chi, int chi_gamma, int r,
                                 i64 kappa) {
  const GroupPtr& K = num.G;
  const Budget& b = num.budget();
  const int p = b.p;
  if (static_cast<int>(chi.size()) != K->order) fail(Err::BadCharacter, "character table has the wrong size");
  if (pmod(chi[K->id], p) != 0) fail(Err::BadCharacter, "character is not trivial at e");
  for (int x = 0; x < K->order; ++x)
    for (int y = 0; y < K->order; ++y)
      if (pmod(chi[K->mul(x, y)] - chi[x] - chi[y], p) != 0) fail(Err::BadCharacter, "character is not a homomorphism");
  if (pmod(kappa, p) != 1) fail(Err::BadCharacter, "kappa(gamma) must be a principal unit");
  const i64 kr = powmod(pmod(kappa, ipow(p, b.M)), r, ipow(p, b.M));
  Cyclo t = Cyclo::zeta_pow(p, b.M, chi_gamma) * Cyclo::integer(p, b.M, kr) - Cyclo::one(p, b.M);
  // a mod T^n is seen only up to t^n
  int prec = b.M;
  if (pmod(chi_gamma, p) != 0) {
    prec = std::min(prec, b.n / (p - 1));
  } else if (kr != 1) {
    prec = std::min<i64>(prec, static_cast<i64>(b.n) * vp(kr - 1, p));
  }
  t.k = prec;
  EvalResult res;
  Cyclo val = Cyclo::zero(p, b.M);
  val.k = prec;
  for (int q = 0; q < K->order; ++q) {
    const Series c = num.coeff(q);
    if (c.is_zero()) continue;
    val = val + Cyclo::zeta_pow(p, b.M, chi[q]) * evaluate_series(c, t);
  }
  const Cyclo dv = evaluate_series(den, t);
  if (!dv.is_unit()) {
    res.infinite = true;
    return res;
  }
  res.value = val * cyclo_invert(dv);
  res.value.k = std::min(res.value.k, prec);
  return res;
}

bool sk1_known_trivial(const GroupPtr& G) {
  if (G->mat_dim > 0 || G->is_abelian()) return true;
  // exponent p: a cyclic quotient has order p, so test the maximal subgroups, i.e. the
  // preimages of the index-p subgroups of G^ab
  const Quotient ab = quotient(G, commutator_subgroup(G));
  for (const auto& S : enumerate_subgroups(ab.group)) {
    if (S.order() * G->p != ab.group->order) continue;
    std::vector<int> A;
    for (int g = 0; g < G->order; ++g)
      if (S.contains(ab.proj(g))) A.push_back(g);
    const Subgroup M = from_elements(G, A);
    bool abelian = true;
    for (int a : M.gens)
      for (int b : M.gens) abelian = abelian && G->mul(a, b) == G->mul(b, a);
    if (abelian) return true;
  }
  return false;
}

void require_sk1_trivial(const GroupPtr& G) {
  if (!sk1_known_trivial(G))
    fail(Err::Unsupported, G->name + ": SK_1 not known to vanish (no abelian normal subgroup of cyclic quotient)");
}

}  // namespace iwt
