#include "iwt/patching.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace iwt {

namespace {

std::string pl(int i) { return "[pair " + std::to_string(i) + "]"; }

// n1/d1 == n2/d2
bool loc_same(const GR& n1, const Series& d1, const GR& n2, const Series& d2) {
  return gr_scale(n1, d2) == gr_scale(n2, d1);
}

// the same element over another table-identical copy of its group
GR rehome(const GR& a, const GroupPtr& H) {
  if (a.G.get() == H.get()) return a;
  if (a.G->order != H->order) fail(Err::Inconsistent, "value lives over a group of the wrong order");
  std::vector<int> id(H->order);
  for (int g = 0; g < H->order; ++g) id[g] = g;
  return gr_push(a, H, id);
}

// component of an abelian pair read over U.as_group() (V trivial)
GR pair_local(const GR& z, const BrauerPair& bp) {
  std::vector<int> img(bp.Q.group->order);
  for (int u = 0; u < bp.UG->order; ++u) img[bp.Q.proj(u)] = u;
  return gr_push(z, bp.UG, img);
}

GR det_any(const GRMatrix& A) {
  try {
    return det_unit_pivot(A);
  } catch (const Error& e) {
    if (e.code() != Err::SingularMatrix) throw;
    return det_berkowitz(A);
  }
}

// Nr_{K→S} over an abelian K, S ⊆ K; result over S.as_group()
GR norm_down(const GR& z, const Subgroup& S) {
  const GroupPtr& K = z.G;
  BrauerPair sp = make_brauer_pair(K, S, trivial_subgroup(K));
  return pair_local(det_any(to_pair(norm_matrix(z, S, right_transversal(S)), sp)), sp);
}

Subgroup join(const GroupPtr& G, const Subgroup& U, int g) {
  std::vector<int> gens = U.elems;
  gens.push_back(g);
  return generate(G, gens);
}

Subgroup preimage(const Quotient& q, const Subgroup& S) {
  std::vector<int> el;
  for (int g = 0; g < q.proj.domain->order; ++g)
    if (S.contains(q.proj(g))) el.push_back(g);
  return from_elements(q.proj.domain, el);
}

Subgroup image_of(const Quotient& q, const Subgroup& U) {
  std::vector<int> el;
  for (int u : U.elems) el.push_back(q.proj(u));
  std::sort(el.begin(), el.end());
  el.erase(std::unique(el.begin(), el.end()), el.end());
  return from_elements(q.group, el);
}

// push along U/V → U/V' for V ⊆ V', both read through their brauer pairs
GR push_pair(const GR& z, const BrauerPair& from, const BrauerPair& to, const std::function<int(int)>& f) {
  std::vector<int> img(from.qorder());
  for (int q = 0; q < from.qorder(); ++q) img[q] = to.to_q(f(from.from_q(q)));
  return gr_push(z, to.Q.group, img);
}

GR principal_series_power(const Series& phi, int index, int p, const GroupPtr& G) {
  return GR::scalar(G, congruence_target(phi, index, p));
}

// log(x/s), or nothing when x/s is not principal
std::optional<GR> log_over(const GR& x, const Series& s) {
  const GR q = gr_scale(x, series_invert(s));
  if (pmod(aug_residue(q.x) - 1, q.budget().p) != 0) return std::nullopt;
  return gr_log(q);
}

bool aug_mod_p_zero(const Series& a) {
  if (a.k < 1) fail(Err::PrecisionExhausted, "augmentation known below p^1");
  return divisible_p_pow(a, a.b.B + 1);
}

}  // namespace

// ---------------------------------------------------------------- Burns patching

AdditiveTuple log_tuple(const ThetaTuple& w, const BrauerFamily& BF) {
  if (w.localized()) fail(Err::InvalidInput, "log tuple needs an integral tuple");
  const int p = BF.G->p;
  const GR& top = w.comps[BF.top];
  const Series phi = frobenius_gamma(augmentation(top));
  AdditiveTuple t;
  for (size_t i = 0; i < BF.pairs.size(); ++i) {
    const BrauerPair& bp = BF.pairs[i];
    if (static_cast<int>(i) == BF.top) {
      t.comps.push_back(cv_as_gr(integral_log(top).value));
      continue;
    }
    const Series s = congruence_target(phi, bp.index, p);
    t.comps.push_back(gr_log(gr_scale(w.comps[i], series_invert(s))));
  }
  return t;
}

PatchCertificate burns_patch(const ThetaTuple& f, const ThetaTuple& xi, const BrauerFamily& BF,
                             const ArtinFamilyC& F) {
  const size_t P = BF.pairs.size();
  if (f.comps.size() != P || xi.comps.size() != P) fail(Err::InvalidInput, "tuples do not match the Brauer family");
  require_sk1_trivial(BF.G);
  PatchCertificate c;
  c.f = f;
  c.xi = xi;
  for (size_t i = 0; i < P; ++i) {
    GR num = xi.comps[i], div = f.comps[i];
    const Series df = f.den(i), dx = xi.den(i);
    if (!(df == dx)) {
      num = gr_scale(num, df);
      div = gr_scale(div, dx);
    }
    GR w;
    if (gr_is_unit(div)) {
      w = num * gr_inverse(div);
    } else {
      auto q = gr_divide(num, div);
      if (!q) fail(Err::NotIntegral, pl(static_cast<int>(i)) + " xi/f is not integral");
      w = *q;
    }
    if (!w.x.integral()) fail(Err::NotIntegral, pl(static_cast<int>(i)) + " xi/f is not integral");
    if (!gr_is_unit(w)) fail(Err::NotIntegral, pl(static_cast<int>(i)) + " xi/f is not a unit");
    if (!(w * div == num)) fail(Err::NotIntegral, pl(static_cast<int>(i)) + " division does not reproduce xi");
    c.w.comps.push_back(w);
    c.integrality.push_back(pl(static_cast<int>(i)) + " w is an integral unit known to p^" + std::to_string(w.x.k));
  }
  c.psi = psi_membership(c.w, BF, F);
  if (c.psi.verdict != PsiVerdict::InPsi) {
    std::string why;
    for (const auto& s : c.psi.rep.failures) why += (why.empty() ? "" : "; ") + s;
    fail(Err::NotInPsi, why);
  }
  c.y = reconstruct_from_brauer(log_tuple(c.w, BF), BF, F);
  c.y_precision = c.y.y.k;
  c.ab_unit = intlog_invert_abelian(integral_log_gamma(augmentation(c.w.comps[BF.top])));
  for (size_t i = 0; i < P; ++i) {
    c.xi_out.comps.push_back(f.comps[i] * c.w.comps[i]);
    if (f.localized()) c.xi_out.dens.push_back(f.den(i));
    if (!loc_same(c.xi_out.comps[i], c.xi_out.den(i), xi.comps[i], xi.den(i)))
      fail(Err::Inconsistent, pl(static_cast<int>(i)) + " f*w differs from xi");
  }
  return c;
}

// ---------------------------------------------------------------- strong congruences

CondReport strong_congruence_check(const ThetaTuple& w, const BrauerFamily& BF, const ArtinFamilyC& F) {
  if (w.localized()) fail(Err::InvalidInput, "strong congruences need an integral tuple");
  if (w.comps.size() != BF.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
  CondReport r;
  const GroupPtr& G = BF.G;
  const int p = G->p;
  const Series phi = frobenius_gamma(augmentation(w.comps[BF.top]));
  const Budget& b = phi.b;
  auto entry_name = [&](int idx) {
    const auto& E = F.entries[idx];
    const char* kind = E.kind == AKind::Gamma ? "Gamma" : (E.kind == AKind::Cyclic ? "U_h" : "U_hc");
    return std::string("[") + kind + " h=" + std::to_string(E.h) + "]";
  };
  auto local_comp = [&](int idx, int* pi_out) {
    const int pi = BF.find(F.entries[idx].U);
    if (pi < 0) fail(Err::Inconsistent, "F_A^c entry missing from the Brauer family");
    if (pi_out) *pi_out = pi;
    return pair_local(w.comps[pi], BF.pairs[pi]);
  };

  int nJ = 0;
  for (size_t i = 0; i < BF.pairs.size(); ++i) {
    const BrauerPair& bp = BF.pairs[i];
    if (bp.index == 1) continue;
    ++nJ;
    if (!aug_mod_p_zero(augmentation(w.comps[i]) - congruence_target(phi, bp.index, p)))
      r.fail("strong J " + pl(static_cast<int>(i)));
  }
  r.certificates.push_back("J-congruence checked on " + std::to_string(nJ) + " proper pairs");
  const int nE = static_cast<int>(F.entries.size());
  for (int idx = 0; idx < nE; ++idx) {
    const auto& E = F.entries[idx];
    if (E.U.order() == G->order) {
      r.certificates.push_back(entry_name(idx) + " U = G: no condition");
      continue;
    }
    int pi = 0;
    const GR x = local_comp(idx, &pi);
    const GR z = x - principal_series_power(phi, BF.pairs[pi].index, p, x.G);
    Membership m = membership(z, image_I(F, idx));
    if (!m.member) r.fail("strong I " + entry_name(idx) + ": " + m.reason);
  }
  if (G->is_abelian()) {
    r.certificates.push_back("abelian G: no reduction modulo a central commutator");
    return r;
  }

  // weak congruence against I'_U, then eliminate the constant
  for (int idx = 0; idx < nE; ++idx) {
    const auto& E = F.entries[idx];
    if (E.U.order() == G->order) continue;
    int pi = 0;
    const GR x = local_comp(idx, &pi);
    const Descriptor Dp = image_I_prime(F, idx);
    const Series d = x.coeff(x.G->id);
    Membership weak = membership(x - GR::scalar(x.G, d), Dp);
    if (!weak.member) {
      r.fail("weak I' " + entry_name(idx) + ": " + weak.reason);
      continue;
    }
    // I'_U ∩ Λ(Γ) = p^t Λ(Γ)
    int t = 0;
    while (t <= b.M && !membership(GR::scalar(x.G, Series::constant(b, ipow(p, t))), Dp).member) ++t;
    const Series diff = d - congruence_target(phi, BF.pairs[pi].index, p);
    const bool ok = t == 0 || (diff.k >= t ? divisible_p_pow(diff, b.B + t) : diff.is_zero());
    std::string eps;
    if (E.kind == AKind::WithC) eps = std::string(", epsilon = ") + (E.tag == CaseTag::A ? "2" : "1");
    if (!ok)
      r.fail("eliminate-d " + entry_name(idx) + ": d differs from phi^e mod p^" + std::to_string(t));
    else
      r.certificates.push_back("eliminate-d " + entry_name(idx) + ": d = phi^e mod p^" + std::to_string(t) + eps);
  }

  // reduction modulo <c>
  const int c = F.c;
  const Subgroup Cc = generate(G, {c});
  const Quotient qb = quotient(G, Cc);
  const GroupPtr& Gb = qb.group;
  const ArtinFamilyC Fb = build_artin_family_c(Gb);
  int nred = 0;
  for (size_t i = 0; i < BF.pairs.size(); ++i) {
    const BrauerPair& bp = BF.pairs[i];
    if (bp.index == 1 || !bp.U.contains(c)) continue;
    const BrauerPair bc = make_brauer_pair(G, bp.U, join(G, bp.V, c));
    const GR zb = push_pair(w.comps[i], bp, bc, [](int g) { return g; });
    ++nred;
    if (!aug_mod_p_zero(augmentation(zb) - congruence_target(phi, bp.index, p)))
      r.fail("reduction J " + pl(static_cast<int>(i)));
  }
  r.certificates.push_back("J-congruence after reduction modulo <c> on " + std::to_string(nred) + " pairs");
  for (int idx = 0; idx < nE; ++idx) {
    const auto& E = F.entries[idx];
    if (E.kind != AKind::WithC || E.U.order() == G->order) continue;
    int pi = 0;
    const GR x = local_comp(idx, &pi);
    const Subgroup Ub = image_of(qb, E.U);
    int found = -1, via = 0;
    for (size_t k = 0; k < Fb.entries.size() && found < 0; ++k)
      for (int a = 0; a < Gb->order; ++a)
        if (conjugate(Ub, a) == Fb.entries[k].U) {
          found = static_cast<int>(k);
          via = a;
          break;
        }
    if (found < 0) fail(Err::Inconsistent, "image of U_{h,c} missing from the quotient family");
    const Subgroup& Ue = Fb.entries[found].U;
    if (Ue.order() == Gb->order && Gb->N <= 2) continue;
    std::vector<int> img(E.U.order());
    for (int u = 0; u < E.U.order(); ++u) img[u] = Ue.local[Gb->conj(qb.proj(E.U.elems[u]), via)];
    const GR xb = gr_push(x, Ue.as_group(), img);
    const GR zb = xb - principal_series_power(phi, BF.pairs[pi].index, p, xb.G);
    Membership m = membership(zb, image_I(Fb, found));
    if (!m.member) r.fail("reduction I " + entry_name(idx) + ": " + m.reason);
  }

  // bootstrap on U_{h,c}: log(w/φ^e) = Σ p^{n_h-ε} a_i c^i + (h-terms), traced to U_c
  const int pc = BF.find(Cc);
  if (pc < 0) fail(Err::Inconsistent, "<c> missing from the Brauer family");
  const BrauerPair& bpc = BF.pairs[pc];
  const GR wc = pair_local(w.comps[pc], bpc);
  const auto Lco = log_over(wc, congruence_target(phi, bpc.index, p));
  if (!Lco) {
    r.fail("bootstrap: w_Uc/phi^e is not a principal unit");
    return r;
  }
  const GR& Lc = *Lco;
  const int N = G->N;
  const bool lc_ok = Lc.x.k >= N - 1 ? divisible_p_pow(Lc.x, b.B + N - 1) : Lc.x.is_zero();
  if (!lc_ok) r.fail("bootstrap: log(w_Uc/phi^e) not in p^(N-1) Lambda(U_c)");
  for (int idx = 0; idx < nE; ++idx) {
    const auto& E = F.entries[idx];
    if (E.kind != AKind::WithC || E.U.order() == G->order) continue;
    int pi = 0;
    const GR x = local_comp(idx, &pi);
    const auto Lo = log_over(x, congruence_target(phi, BF.pairs[pi].index, p));
    if (!Lo) {
      r.fail("bootstrap " + entry_name(idx) + ": w/phi^e is not a principal unit");
      continue;
    }
    const GR& L = *Lo;
    const int s = E.n_h - (E.tag == CaseTag::A ? 2 : 1);
    GR tr = GR::zero(Cc.as_group(), b);
    tr.x.k = L.x.k;
    bool coeff_ok = true;
    for (int i = 0; i < p; ++i) {
      const int ci = G->power(c, i);
      const Series a = L.coeff(E.U.local[ci]);
      if (s > 0 && !(a.k >= s ? divisible_p_pow(a, b.B + s) : a.is_zero())) coeff_ok = false;
      tr.set(Cc.local[ci], Series(scale_int(a, p)));
    }
    if (!coeff_ok) r.fail("bootstrap " + entry_name(idx) + ": c-coefficients not divisible by p^(n_h-eps)");
    if (!(tr == Lc)) r.fail("bootstrap " + entry_name(idx) + ": trace to U_c differs from log(w_Uc/phi^e)");
    Membership m = membership(L, image_I(F, idx));
    if (!m.member)
      r.fail("bootstrap " + entry_name(idx) + ": log not in I_U: " + m.reason);
    else
      r.certificates.push_back("bootstrap " + entry_name(idx) + ": p^(n_h-eps+1) a_i = p^(N-1) b_i, log in I_U");
  }
  return r;
}

// ---------------------------------------------------------------- torsion refinement

RWProvider synthetic_provider(const LocalizedGR& x) {
  RWProvider P;
  auto pair = [x](const Subgroup& U, const Subgroup& V) -> std::optional<PairValue> {
    const GroupPtr& G = x.num.G;
    BrauerPair bp = make_brauer_pair(G, U, V);
    GR n = det_any(to_pair(norm_matrix(x.num, U, right_transversal(U)), bp));
    return PairValue{n, series_pow(x.den, bp.index)};
  };
  P.pair = pair;
  P.rw = [pair, x](const Subgroup& Up, const Subgroup& U, const Subgroup& V) -> std::optional<RWValue> {
    auto ab = pair(Up, commutator_subgroup(x.num.G, Up));
    auto w = pair(U, V);
    return RWValue{*ab, *w};
  };
  return P;
}

namespace {

struct Refiner {
  std::vector<std::string>& log;
  CondReport& rep;

  PairValue target(const RWProvider& prov, const BrauerPair& bp, int i) {
    auto v = prov.pair(bp.U, bp.V);
    if (!v) fail(Err::ProviderGap, "no value for " + pl(i));
    return PairValue{rehome(v->num, bp.Q.group), v->den};
  }

  // per-pair certification of θ_S(ξ) = ξ_{U,V}; t already carries τ_ab
  std::vector<char> certify(const ThetaTuple& t, const BrauerFamily& BF, const RWProvider& prov, int depth) {
    const GroupPtr& G = BF.G;
    const int P = static_cast<int>(BF.pairs.size());
    const std::string ind(2 * depth, ' ');
    std::vector<PairValue> tg;
    std::vector<char> direct(P), ok(P, 0);
    for (int i = 0; i < P; ++i) {
      tg.push_back(target(prov, BF.pairs[i], i));
      direct[i] = loc_same(t.comps[i], t.den(i), tg[i].num, tg[i].den);
    }
    if (G->is_abelian()) {
      log.push_back(ind + "|G| = " + std::to_string(G->order) + " abelian: theta_S(xi) compared directly");
      for (int i = 0; i < P; ++i) ok[i] = direct[i];
      return ok;
    }
    const int p = G->p;
    const int c = choose_central_c(G);
    const Subgroup Cc = generate(G, {c});
    const Quotient qb = quotient(G, Cc);
    const BrauerFamily BFb = build_brauer_family(qb.group);
    log.push_back(ind + "|G| = " + std::to_string(G->order) + ": c = " + std::to_string(c) + ", reducing to |G/<c>| = " +
                  std::to_string(qb.group->order));
    auto proj = [&qb](int g) { return qb.proj(g); };
    // tuple and provider on G/<c>
    ThetaTuple tb;
    for (const auto& bb : BFb.pairs) {
      const int i = BF.find(preimage(qb, bb.U));
      const BrauerPair& bp = BF.pairs[i];
      tb.comps.push_back(push_pair(t.comps[i], bp, bb, proj));
      tb.dens.push_back(t.den(i));
    }
    RWProvider pb;
    const GroupPtr Gp = G;
    pb.pair = [&prov, qb, Gp, proj](const Subgroup& Ub, const Subgroup& Vb) -> std::optional<PairValue> {
      const Subgroup U = preimage(qb, Ub), V = preimage(qb, Vb);
      auto v = prov.pair(U, V);
      if (!v) return std::nullopt;
      const BrauerPair from = make_brauer_pair(Gp, U, V), to = make_brauer_pair(qb.group, Ub, Vb);
      return PairValue{push_pair(rehome(v->num, from.Q.group), from, to, proj), v->den};
    };
    pb.rw = [&prov, qb, Gp, proj](const Subgroup& Upb, const Subgroup& Ub,
                                  const Subgroup& Vb) -> std::optional<RWValue> {
      const Subgroup Up = preimage(qb, Upb), U = preimage(qb, Ub), V = preimage(qb, Vb);
      auto v = prov.rw(Up, U, V);
      if (!v) return std::nullopt;
      const BrauerPair fa = make_brauer_pair(Gp, Up), ta = make_brauer_pair(qb.group, Upb);
      const BrauerPair fw = make_brauer_pair(Gp, U, V), tw = make_brauer_pair(qb.group, Ub, Vb);
      RWValue r;
      r.ab = PairValue{push_pair(rehome(v->ab.num, fa.Q.group), fa, ta, proj), v->ab.den};
      r.w = PairValue{push_pair(rehome(v->w.num, fw.Q.group), fw, tw, proj), v->w.den};
      return r;
    };
    const std::vector<char> okb = certify(tb, BFb, pb, depth + 1);

    auto comp = [&](int i) { return PairValue{t.comps[i], t.den(i)}; };
    // Case-1: c ∈ V
    for (int i = 0; i < P; ++i) {
      const BrauerPair& bp = BF.pairs[i];
      if (!bp.V.contains(c)) continue;
      const int ib = BFb.find(image_of(qb, bp.U));
      ok[i] = okb[ib] && direct[i];
      log.push_back(ind + "Case-1 " + pl(i) + ": U/V = image pair " + std::to_string(ib) + " of G/<c>" +
                    (ok[i] ? "" : " (FAILED)"));
    }
    // Case-2: c ∈ U, c ∉ V, along U = U_0 ⊂ U_1 ⊂ ... until c ∈ [U_n, U_n]
    for (int i = 0; i < P; ++i) {
      const BrauerPair& bp = BF.pairs[i];
      if (!bp.U.contains(c) || bp.V.contains(c)) continue;
      std::vector<Subgroup> chain{bp.U};
      while (!commutator_subgroup(G, chain.back()).contains(c)) {
        const Subgroup& cur = chain.back();
        if (cur.order() == G->order)
          fail(Err::Case2ChainFailure, "c never enters the commutator subgroup along the chain from " + pl(i));
        const Subgroup NU = normalizer(G, cur);
        int g = -1;
        for (int x : NU.elems)
          if (!cur.contains(x)) {
            g = x;
            break;
          }
        if (g < 0) fail(Err::Case2ChainFailure, "normalizer does not grow at " + pl(i));
        chain.push_back(join(G, cur, g));
      }
      std::string orders;
      for (const auto& S : chain) orders += (orders.empty() ? "" : " < ") + std::to_string(S.order());
      const int top = BF.find(chain.back());
      bool good = ok[top];
      for (int s = static_cast<int>(chain.size()) - 2; s >= 0 && good; --s) {
        const int iu = BF.find(chain[s]), iup = BF.find(chain[s + 1]);
        const BrauerPair &bu = BF.pairs[iu], &bup = BF.pairs[iup];
        auto v = prov.rw(bup.U, bu.U, bu.V);
        if (!v) fail(Err::ProviderGap, "no value for xi_{U',V} at " + pl(iu));
        const GR ab = rehome(v->ab.num, bup.Q.group);
        const GR wv = rehome(v->w.num, bu.Q.group);
        // τ with θ_{U',V'}(ξ) = τ·can(ξ_{U',V})
        const PairValue up = comp(iup);
        int tau = -1;
        for (int q = 0; q < bup.qorder() && tau < 0; ++q)
          if (loc_same(ab * GR::elem(bup.Q.group, ab.budget(), q), v->ab.den, up.num, up.den)) tau = q;
        if (tau < 0) {
          rep.fail("Case-2 " + pl(i) + ": ab part of xi_{U',V} is not a torsion twist of theta at " + pl(iup));
          good = false;
          break;
        }
        if (tau != bup.Q.group->id) {
          rep.fail("Case-2 " + pl(i) + ": tau = " + std::to_string(tau) + " nontrivial at " + pl(iup));
          good = false;
          break;
        }
        if (!loc_same(wv, v->w.den, tg[iu].num, tg[iu].den)) {
          rep.fail("Case-2 " + pl(i) + ": Nr(xi_{U',V}) differs from xi_{U,V} at " + pl(iu));
          good = false;
          break;
        }
        const PairValue here = comp(iu);
        if (!loc_same(here.num, here.den, wv, v->w.den)) {
          rep.fail("Case-2 " + pl(i) + ": theta_{U,V}(xi) differs from Nr(xi_{U',V}) at " + pl(iu));
          good = false;
          break;
        }
        ok[iu] = ok[iu] || (good && direct[iu]);
      }
      ok[i] = good && direct[i];
      log.push_back(ind + "Case-2 " + pl(i) + ": chain " + orders + ", tau trivial at every step" +
                    (ok[i] ? "" : " (FAILED)"));
    }
    // Case-3: c ∉ U, through U×<c>
    for (int i = 0; i < P; ++i) {
      const BrauerPair& bp = BF.pairs[i];
      if (bp.U.contains(c)) continue;
      const int j = BF.find(join(G, bp.U, c));
      const BrauerPair& bj = BF.pairs[j];
      if (!(bj.V == bp.V)) fail(Err::Inconsistent, "[U x <c>, U x <c>] differs from V at " + pl(i));
      std::vector<int> sel;
      for (int u : bp.U.elems) sel.push_back(bj.to_q(u));
      std::sort(sel.begin(), sel.end());
      sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
      const Subgroup S = from_elements(bj.Q.group, sel);
      std::vector<int> to_i(S.order());
      for (int u : bp.U.elems) to_i[S.local[bj.to_q(u)]] = bp.to_q(u);
      const GR nr = gr_push(norm_down(t.comps[j], S), bp.Q.group, to_i);
      const bool ncc = loc_same(nr, series_pow(t.den(j), p), t.comps[i], t.den(i));
      const GR nc = gr_push(norm_down(GR::elem(bj.Q.group, t.comps[j].budget(), bj.to_q(c)), S), bp.Q.group, to_i);
      const bool ccol = nc == GR::one(bp.Q.group, nc.budget());
      if (!ncc) rep.fail("Case-3 " + pl(i) + ": Nr from " + pl(j) + " differs");
      if (!ccol) rep.fail("Case-3 " + pl(i) + ": Nr(c) != 1");
      ok[i] = ok[j] && ncc && ccol && direct[i];
      log.push_back(ind + "Case-3 " + pl(i) + ": norm from U x <c> " + pl(j) + ", Nr(c) = 1" + (ok[i] ? "" : " (FAILED)"));
    }
    return ok;
  }
};

}  // namespace

RefinementResult torsion_refinement(const ThetaTuple& xi_tilde, const BrauerFamily& BF, const RWProvider& prov) {
  if (xi_tilde.comps.size() != BF.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
  RefinementResult res;
  const GroupPtr& G = BF.G;
  const BrauerPair& top = BF.pairs[BF.top];
  auto ab = prov.pair(top.U, top.V);
  if (!ab) fail(Err::ProviderGap, "no value for xi_ab");
  const GR xab = rehome(ab->num, top.Q.group);
  const Budget& b = xab.budget();
  int tau = -1;
  for (int q = 0; q < top.qorder() && tau < 0; ++q)
    if (loc_same(xi_tilde.comps[BF.top] * GR::elem(top.Q.group, b, q), xi_tilde.den(BF.top), xab, ab->den)) tau = q;
  if (tau < 0) fail(Err::Inconsistent, "xi_ab / xi~_ab is not an element of G^ab");
  res.tau_ab = tau;
  res.xi = xi_tilde;
  if (tau != top.Q.group->id) {
    const GR g = GR::elem(G, b, top.from_q(tau));
    for (size_t i = 0; i < BF.pairs.size(); ++i) res.xi.comps[i] = res.xi.comps[i] * norm_theta(g, BF.pairs[i]);
  }
  res.log.push_back("tau_ab = " + std::to_string(tau) + (tau == top.Q.group->id ? " (identity)" : ""));
  Refiner R{res.log, res.rep};
  const std::vector<char> ok = R.certify(res.xi, BF, prov, 0);
  int good = 0;
  for (size_t i = 0; i < ok.size(); ++i) {
    if (ok[i])
      ++good;
    else
      res.rep.fail("theta_S(xi) != xi at " + pl(static_cast<int>(i)));
  }
  if (res.rep.ok) res.rep.certificates.push_back("theta_S(xi) = xi on all " + std::to_string(good) + " pairs");
  return res;
}

// ---------------------------------------------------------------- oracle and level elements

bool LevelElement::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](i64 v) { return v == 0; });
}

int ZetaOracle::m() const {
  if (pmod(kappa_gamma, p) != 1) fail(Err::InvalidInput, "kappa(gamma) must lie in 1 + pZ_p");
  const i64 mod = ipow(p, M + 1);
  const i64 e = (p - 1) * ipow(p, j);
  const i64 v = pmod(powmod(kappa_gamma, e, mod) - 1, mod);
  return v == 0 ? M : std::min(M, vp(v, p));
}

i64 ZetaOracle::kappa_at(int q, i64 t) const {
  auto it = kappa.find({q, t});
  if (it != kappa.end()) return it->second;
  return powmod(kappa_gamma, t, ipow(p, M));
}

std::vector<std::pair<i64, int>> ZetaOracle::weights() const {
  std::set<std::pair<i64, int>> s;
  for (const auto& [key, v] : delta) s.insert({std::get<0>(key), std::get<1>(key)});
  return {s.begin(), s.end()};
}

LevelElement approximate_pseudomeasure(const ZetaOracle& O, i64 w, int k) {
  if (k <= 0 || k % (O.p - 1) != 0) fail(Err::InvalidInput, "weight k must be a positive multiple of p-1");
  LevelElement e;
  e.p = O.p;
  e.m = O.m();
  e.j = O.j;
  e.qorder = O.qorder;
  const i64 pj = e.pj(), mod = ipow(O.p, e.m);
  e.c.assign(static_cast<size_t>(O.qorder * pj), 0);
  for (int q = 0; q < O.qorder; ++q)
    for (i64 t = 0; t < pj; ++t) {
      auto it = O.delta.find({w, k, q, t});
      if (it == O.delta.end())
        fail(Err::OracleGap, "no Delta for (w=" + std::to_string(w) + ", k=" + std::to_string(k) +
                                 ", q=" + std::to_string(q) + ", t=" + std::to_string(t) + ")");
      const i64 kap = pmod(O.kappa_at(q, t), mod);
      if (kap % O.p == 0) fail(Err::InvalidInput, "kappa value is not a unit");
      e.at(q, t) = mulmod(pmod(it->second, mod), powmod(invmod(kap, mod), k, mod), mod);
    }
  return e;
}

LevelElement level_image(const GR& z, int j, int m) {
  const Budget& b = z.budget();
  if (!z.x.integral()) fail(Err::OutOfDomain, "level image needs an integral element");
  if (z.x.k < m) fail(Err::PrecisionExhausted, "element known below p^" + std::to_string(m));
  const int p = b.p;
  LevelElement e;
  e.p = p;
  e.m = m;
  e.j = j;
  e.qorder = z.G->order;
  const i64 pj = e.pj(), mod = ipow(p, m);
  // powers of (g - 1) in Z/p^m[C_{p^j}]
  std::vector<std::vector<i64>> pw(b.n + 1, std::vector<i64>(pj, 0));
  pw[0][0] = 1;
  for (int i = 1; i <= b.n; ++i)
    for (i64 t = 0; t < pj; ++t) {
      const i64 a = pw[i - 1][t];
      if (a == 0) continue;
      pw[i][(t + 1) % pj] = pmod(pw[i][(t + 1) % pj] + a, mod);
      pw[i][t] = pmod(pw[i][t] - a, mod);
    }
  if (std::any_of(pw[b.n].begin(), pw[b.n].end(), [](i64 v) { return v != 0; }))
    fail(Err::PrecisionExhausted, "(gamma-1)^n does not vanish mod p^" + std::to_string(m) + " at level " +
                                      std::to_string(j) + "; raise the T-adic precision");
  e.c.assign(static_cast<size_t>(e.qorder * pj), 0);
  for (int q = 0; q < e.qorder; ++q)
    for (int i = 0; i < b.n; ++i) {
      const i64 a = pmod(int_value(z.x, q, i), mod);
      if (a == 0) continue;
      for (i64 t = 0; t < pj; ++t) e.at(q, t) = pmod(e.at(q, t) + mulmod(a, pw[i][t], mod), mod);
    }
  return e;
}

LevelElement project_level(const LevelElement& e, int j, int m) {
  if (j > e.j || m > e.m) fail(Err::InvalidInput, "projection goes down only");
  LevelElement r;
  r.p = e.p;
  r.m = m;
  r.j = j;
  r.qorder = e.qorder;
  const i64 pj = r.pj(), mod = ipow(e.p, m);
  r.c.assign(static_cast<size_t>(r.qorder * pj), 0);
  for (int q = 0; q < e.qorder; ++q)
    for (i64 t = 0; t < e.pj(); ++t) r.at(q, t % pj) = pmod(r.at(q, t % pj) + e.at(q, t), mod);
  return r;
}

ZetaOracle synthetic_oracle(const GR& num, const Series& den, bool pole, int pair, int j, i64 kappa_gamma,
                            const std::vector<i64>& ws, const std::vector<int>& ks) {
  const Budget& b = num.budget();
  if (!den.integral() || pmod(den.coeff_int(0), b.p) == 0) fail(Err::InvalidInput, "den must be a unit of Lambda(Gamma)");
  ZetaOracle O;
  O.p = b.p;
  O.M = b.M;
  O.j = j;
  O.pair = pair;
  O.qorder = num.G->order;
  O.kappa_gamma = kappa_gamma;
  const int m = O.m();
  const Series dinv = series_invert(den);
  for (i64 w : ws) {
    if (w < 1 || w > 60) fail(Err::InvalidInput, "gamma exponent w must lie in 1..60");
    // (1 - (1+T)^w), or that divided by T
    std::vector<i64> f(b.n, 0);
    for (int i = 0; i < b.n; ++i) {
      if (pole)
        f[i] = i + 1 <= w ? -binom(w, i + 1) : 0;
      else
        f[i] = i == 0 ? 0 : (i <= w ? -binom(w, i) : 0);
    }
    const GR z = gr_scale(num, Series::from_ints(b, f) * dinv);
    const LevelElement L = level_image(z, j, m);
    const i64 mod = ipow(b.p, m);
    for (int k : ks) {
      if (k <= 0 || k % (b.p - 1) != 0) fail(Err::InvalidInput, "weight k must be a positive multiple of p-1");
      for (int q = 0; q < O.qorder; ++q)
        for (i64 t = 0; t < L.pj(); ++t)
          O.delta[{w, k, q, t}] = mulmod(L.at(q, t), powmod(pmod(O.kappa_at(q, t), mod), k, mod), mod);
    }
  }
  return O;
}

// ---------------------------------------------------------------- orbital sums

namespace {

// integer vector (exact when m == 0, else mod p^m) against a descriptor
bool level_member(const std::vector<i64>& v, const Descriptor& D, int p, int m, std::string* why) {
  const i64 mod = m > 0 ? ipow(p, m) : 0;
  auto red = [&](i64 x) { return mod ? pmod(x, mod) : x; };
  if (D.kind == DescKind::AugModP) {
    i64 s = 0;
    for (i64 x : v) s += x;
    if (pmod(s, p) != 0) {
      if (why) *why = "augmentation not divisible by p";
      return false;
    }
    return true;
  }
  std::vector<char> cov(v.size(), 0);
  for (const auto& g : D.gens) {
    const i64 v0 = red(v[g.support[0]]);
    for (int u : g.support) {
      cov[u] = 1;
      if (red(v[u]) != v0) {
        if (why) *why = "coefficients differ across " + g.label;
        return false;
      }
    }
    const int e = m > 0 ? std::min(g.pexp, m) : g.pexp;
    if (v0 % ipow(p, e) != 0) {
      if (why) *why = "coefficient of " + g.label + " not divisible by p^" + std::to_string(e);
      return false;
    }
  }
  for (size_t u = 0; u < v.size(); ++u)
    if (!cov[u] && red(v[u]) != 0) {
      if (why) *why = "support outside the module";
      return false;
    }
  return true;
}

struct Orbits {
  std::vector<std::vector<int>> perm;  // one permutation of Q per element of NU
  std::vector<int> stab;               // #(NU/U)_q
  int nNU = 1;                         // #(NU/U)
  int entry = -1;                      // F_A^c entry for (U, {e})
};

Orbits orbit_data(const BrauerFamily& BF, const ArtinFamilyC& F, int pair) {
  const BrauerPair& bp = BF.pairs.at(pair);
  const GroupPtr& G = BF.G;
  if (bp.index == 1) fail(Err::ExcludedTotalGroup, "the pair (G,[G,G]) is excluded");
  const Subgroup NU = normalizer(G, bp.U);
  Orbits o;
  o.nNU = NU.order() / bp.U.order();
  const int nq = bp.qorder();
  o.stab.assign(nq, 0);
  for (int a : NU.elems) {
    std::vector<int> pm(nq);
    for (int q = 0; q < nq; ++q) {
      pm[q] = bp.to_q(G->conj(bp.from_q(q), a));
      if (pm[q] == q) ++o.stab[q];
    }
    o.perm.push_back(std::move(pm));
  }
  for (int& s : o.stab) s /= bp.U.order();
  if (bp.V.order() == 1)
    for (size_t i = 0; i < F.entries.size(); ++i)
      if (F.entries[i].U == bp.U) o.entry = static_cast<int>(i);
  return o;
}

// Q-vector over the ambient group of the F_A^c entry
std::vector<i64> to_entry(const std::vector<i64>& v, const BrauerPair& bp, const Subgroup& U) {
  std::vector<i64> r(U.order(), 0);
  for (int q = 0; q < bp.qorder(); ++q) r[U.local[bp.from_q(q)]] = v[q];
  return r;
}

}  // namespace

CondReport orbital_p_check(const BrauerFamily& BF, const ArtinFamilyC& F, int pair, int j) {
  CondReport r;
  const BrauerPair& bp = BF.pairs.at(pair);
  const GroupPtr& G = BF.G;
  const int p = G->p;
  const Orbits o = orbit_data(BF, F, pair);
  const Subgroup NU = normalizer(G, bp.U);
  const int nq = bp.qorder(), idq = bp.Q.group->id;
  const GroupPtr NUG = NU.as_group();
  const Subgroup Ur = restrict_to(bp.U, NU);
  int checked = 0;
  for (int q = 0; q < nq; ++q) {
    if (q == idq) continue;
    std::vector<i64> P(nq, 0);
    for (const auto& pm : o.perm) ++P[pm[q]];
    for (auto& x : P) x /= bp.U.order();
    const std::string y = "y=(q" + std::to_string(q) + ")";
    for (int x = 0; x < nq; ++x)
      if (P[x] != 0 && P[x] != o.stab[q]) r.fail(pl(pair) + " " + y + ": P_y is not #stab times the orbit sum");
    i64 aug = 0;
    for (i64 x : P) aug += x;
    if (aug != o.nNU) r.fail(pl(pair) + " " + y + ": aug(P_y) != #(NU/U)");
    if (aug % p != 0) r.fail(pl(pair) + " " + y + ": p does not divide aug(P_y)");
    if (o.entry >= 0) {
      const Subgroup& U = F.entries[o.entry].U;
      // P_y against the trace Tr_{Conj(NU)→U}(y)
      const std::vector<i64> tr = trace_int(NUG, NU.local[bp.from_q(q)], Ur);
      std::vector<i64> Pt(nq, 0);
      for (size_t cl = 0; cl < tr.size(); ++cl) Pt[bp.to_q(NU.elems[Ur.elems[cl]])] = tr[cl];
      if (Pt != P) r.fail(pl(pair) + " " + y + ": P_y differs from Tr(y)");
      std::string why;
      if (!level_member(to_entry(P, bp, U), image_I_prime(F, o.entry), p, 0, &why))
        r.fail(pl(pair) + " " + y + ": P_y not in I'_U: " + why);
    }
    ++checked;
  }
  if (r.ok) {
    const i64 pj = ipow(p, j);
    r.certificates.push_back(pl(pair) + ": " + std::to_string(checked * pj) + " cosets off Gamma at level " +
                             std::to_string(j) + ", p | aug(P_y) = " + std::to_string(o.nNU) +
                             (o.entry >= 0 ? ", P_y = Tr(y) in I'_U" : ""));
  }
  return r;
}

CondReport orbital_sum_check(const ZetaOracle& O, const BrauerFamily& BF, const ArtinFamilyC& F) {
  const BrauerPair& bp = BF.pairs.at(O.pair);
  if (O.p != BF.G->p || O.qorder != bp.qorder()) fail(Err::InvalidInput, "oracle does not match the pair");
  CondReport r = orbital_p_check(BF, F, O.pair, O.j);
  const Orbits o = orbit_data(BF, F, O.pair);
  const int p = O.p, m = O.m(), nq = bp.qorder(), idq = bp.Q.group->id;
  const i64 pj = ipow(p, O.j), mod = ipow(p, m);
  for (const auto& [w, k] : O.weights()) {
    const LevelElement L = approximate_pseudomeasure(O, w, k);
    const std::string wk = "(w=" + std::to_string(w) + ", k=" + std::to_string(k);
    for (int q = 0; q < nq; ++q) {
      if (q == idq) continue;
      for (i64 t = 0; t < pj; ++t) {
        const i64 d = pmod(O.delta.at({w, k, q, t}), mod);
        const int e = std::min(vp(o.stab[q], p), m);
        if (d % ipow(p, e) != 0)
          fail(Err::HypothesisFails, wk + ", y=(q" + std::to_string(q) + ",t" + std::to_string(t) +
                                         ")): Delta = " + std::to_string(d) + " not divisible by #(NU/U)_y = " +
                                         std::to_string(o.stab[q]));
        for (const auto& pm : o.perm)
          if (pmod(O.delta.at({w, k, pm[q], t}), mod) != d) {
            r.fail(wk + "): Delta is not invariant under NU at q" + std::to_string(q));
            break;
          }
      }
    }
    // the part off Γ lies in J (and in I'_U) at this level
    bool okJ = true, okI = true;
    std::string why;
    for (i64 t = 0; t < pj; ++t) {
      std::vector<i64> v(nq, 0);
      for (int q = 0; q < nq; ++q)
        if (q != idq) v[q] = L.at(q, t);
      i64 s = 0;
      for (i64 x : v) s += x;
      if (pmod(s, p) != 0) okJ = false;
      if (o.entry >= 0 && !level_member(to_entry(v, bp, F.entries[o.entry].U), image_I_prime(F, o.entry), p, m, &why))
        okI = false;
    }
    if (!okJ) r.fail(wk + "): (1-w)xi off Gamma not in J");
    if (!okI) r.fail(wk + "): (1-w)xi off Gamma not in I'_U: " + why);
    if (okJ && okI)
      r.certificates.push_back(wk + "): (1-w)xi in Lambda(Gamma) + " + (o.entry >= 0 ? "I'_U" : "J") + " mod p^" +
                               std::to_string(m));
  }
  return r;
}

// ---------------------------------------------------------------- Ritter–Weiss variant

namespace {

GR random_unit(Rng& r, const GroupPtr& G, const Budget& b) {
  for (;;) {
    GR x = GR::zero(G, b);
    const i64 m = ipow(b.p, b.M);
    for (int g = 0; g < G->order; ++g) {
      std::vector<i64> v(b.n);
      for (auto& c : v) c = r.below(m);
      x.set(g, Series::from_ints(b, v));
    }
    if (aug_residue(x.x) != 0) return x;
  }
}

struct RWMaps {
  BrauerPair bw;  // (W, {e})
  Subgroup S;     // image of W in G^ab
  std::vector<int> can;  // W local -> S local
};

RWMaps rw_maps(const RWContext& C) {
  const GroupPtr& G = C.F.G;
  RWMaps M;
  M.bw = make_brauer_pair(G, C.F.W, trivial_subgroup(G));
  std::vector<int> el;
  for (int w : C.F.W.elems) el.push_back(C.ab.proj(w));
  std::sort(el.begin(), el.end());
  el.erase(std::unique(el.begin(), el.end()), el.end());
  M.S = from_elements(C.ab.group, el);
  for (int w : C.F.W.elems) M.can.push_back(M.S.local[C.ab.proj(w)]);
  return M;
}

// NCC and congruence for (a/da, w/dw), a over G^ab and w over W.as_group()
void rw_psi(const RWContext& C, const RWMaps& M, const PairValue& a, const PairValue& w, const std::string& tag,
            CondReport& r) {
  const int p = C.F.G->p;
  const GR nr = norm_down(a.num, M.S);
  const GR can = gr_push(w.num, M.S.as_group(), M.can);
  if (!loc_same(nr, series_pow(a.den, p), can, w.den)) r.fail(tag + " norm relation Nr(eta_ab) = can(eta_W)");
  const Series phi_n = frobenius_gamma(augmentation(a.num)), phi_d = frobenius_gamma(a.den);
  const GR z = gr_scale(w.num, phi_d) - GR::scalar(w.num.G, w.den * phi_n);
  Membership m = membership(z, C.IW);
  if (!m.member) r.fail(tag + " congruence eta_W = phi(eta_ab) mod I_W: " + m.reason);
}

}  // namespace

CondReport rw_step6(const RWContext& C, const PairValue& xi_ab, const PairValue& xi_W) {
  CondReport r;
  const RWMaps M = rw_maps(C);
  rw_psi(C, M, xi_ab, xi_W, "Step 6:", r);
  if (r.ok) r.certificates.push_back("Step 6: xi_W = phi(xi_ab) mod I_{S,W} and the norm relation hold");
  return r;
}

CondReport rw_verify(const GroupPtr& G, const Subgroup& W, const RWOptions& opt) {
  CondReport r;
  const Budget& b = opt.budget;
  b.validate();
  if (b.p != G->p) fail(Err::BudgetMismatch, "budget prime differs from the group prime");
  Rng rng(opt.seed);
  const int p = G->p;

  // Step 1
  const RWFamily Fam = build_rw_family(G, W);
  const RWContext C = make_rw_context(Fam);
  const RWMaps M = rw_maps(C);
  {
    const int wbar = W.order() / Fam.Wc.order();
    const int types = (W.order() - wbar) / p + C.ab.group->order;
    if (types != G->num_classes())
      r.fail("Step 1: irreducible count " + std::to_string(types) + " != class number " +
             std::to_string(G->num_classes()));
    int rank = 0;
    std::string sizes;
    for (const auto& jb : Fam.blocks) {
      rank += jb.m;
      sizes += (sizes.empty() ? "" : ",") + std::to_string(jb.m);
    }
    if (ipow(p, rank) != W.order()) r.fail("Step 1: Jordan blocks do not span W");
    if (W.contains(Fam.lambda)) r.fail("Step 1: lambda lies in W");
    r.certificates.push_back("Step 1: Jordan blocks (" + sizes + "), " + std::to_string(types) +
                             " irreducibles induced from W or G^ab");
  }

  // Step 2
  int s2 = 0;
  for (int t = 0; t < opt.trials; ++t) {
    ConjVec y = ConjVec::zero(G, b);
    for (int c = 0; c < G->num_classes(); ++c) {
      std::vector<i64> v(b.n);
      for (auto& x : v) x = rng.below(ipow(p, b.M));
      y = y + cv_scale(ConjVec::cls(G, b, G->classes()[c][0]), Series::from_ints(b, v));
    }
    const RWTuple tp = rw_theta_plus(y, C);
    CondReport mr = rw_phi_membership(tp, C);
    if (!mr.ok) {
      r.fail("Step 2: theta^+(y) outside Phi: " + mr.failures.front());
      continue;
    }
    if (!(rw_inverse(tp, C) == y))
      r.fail("Step 2: round trip failed");
    else
      ++s2;
  }
  r.certificates.push_back("Step 2: " + std::to_string(s2) + " round trips through Phi");

  // Step 3
  const GroupPtr WG = W.as_group();
  int nonmem = 0;
  for (int w = 0; w < WG->order; ++w) {
    if (w == WG->id) continue;
    if (membership(GR::elem(WG, b, w) - GR::one(WG, b), C.IW).member)
      r.fail("Step 3: w - 1 in I_W for w = " + std::to_string(W.elems[w]));
    else
      ++nonmem;
  }
  for (const auto& g : C.IW.gens)
    if ((static_cast<i64>(g.support.size()) * ipow(p, g.pexp)) % p != 0) r.fail("Step 3: I_W not inside J_W");
  int s3 = 0;
  for (int t = 0; t < opt.trials; ++t) {
    std::vector<Series> co;
    for (size_t g = 0; g < C.IW.gens.size(); ++g) {
      std::vector<i64> v(b.n);
      for (auto& x : v) x = rng.below(ipow(p, b.M));
      co.push_back(Series::from_ints(b, v));
    }
    const GR z = descriptor_element(C.IW, co);
    std::vector<Series> co2 = co;
    std::rotate(co2.begin(), co2.begin() + 1, co2.end());
    const GR z2 = descriptor_element(C.IW, co2);
    const GR one = GR::one(WG, b);
    const GR l1 = gr_log(one + z), l2 = gr_log(one + z2);
    if (!(gr_log((one + z) * (one + z2)) == l1 + l2)) r.fail("Step 3: log is not additive on 1 + I_W");
    if (!z.x.is_zero() && l1.x.is_zero()) r.fail("Step 3: log kills a nontrivial element of 1 + I_W");
    if (!membership(l1, C.IW).member) r.fail("Step 3: log(1 + I_W) leaves I_W");
    ++s3;
  }
  r.certificates.push_back("Step 3: w - 1 not in I_W for all " + std::to_string(nonmem) +
                           " nontrivial w; log additive and nonvanishing on " + std::to_string(s3) + " samples");

  // Step 4
  int s4 = 0;
  for (int t = 0; t < opt.trials; ++t) {
    const GR x = random_unit(rng, G, b);
    const GR eab = abelianize(x, C.ab);
    const GR ew = pair_local(norm_theta(x, M.bw), M.bw);
    CondReport one;
    rw_psi(C, M, PairValue{eab, Series::one(b)}, PairValue{ew, Series::one(b)}, "Step 4:", one);
    // θ^+(Γ_G(x)) = (Γ(η_ab), log(η_W/φ(η_ab)))
    RWTuple lt;
    lt.ab = cv_as_gr(integral_log(eab).value);
    lt.w = gr_log(gr_scale(ew, series_invert(frobenius_gamma(augmentation(eab)))));
    CondReport mr = rw_phi_membership(lt, C);
    if (!mr.ok)
      one.fail("Step 4: logarithmic tuple outside Phi: " + mr.failures.front());
    else if (!(rw_inverse(lt, C) == integral_log(x).value))
      one.fail("Step 4: theta^+ of Gamma_G(x) differs from the logarithmic tuple");
    for (const auto& f : one.failures) r.fail(f);
    if (one.ok) ++s4;
  }
  r.certificates.push_back("Step 4: " + std::to_string(s4) + " units land in Psi with Gamma_G(x) recovered");

  // Step 5
  int s5 = 0, nonint = 0;
  for (int t = 0; t < opt.trials; ++t) {
    const GR n = random_unit(rng, G, b);
    std::vector<i64> dv(b.n, 0);
    dv[0] = p * rng.below(ipow(p, b.M - 1));
    dv[1] = 1 + p * rng.below(p);
    for (int i = 2; i < b.n; ++i) dv[i] = rng.below(ipow(p, b.M));
    const Series d = Series::from_ints(b, dv);
    const GR nab = abelianize(n, C.ab);
    const GR nw = pair_local(norm_theta(n, M.bw), M.bw);
    const Series dw = series_pow(d, p);
    CondReport loc, integ, integS;
    rw_psi(C, M, PairValue{nab, d}, PairValue{nw, dw}, "Step 5:", loc);
    // integral elements: the S-conditions and the integral ones agree
    rw_psi(C, M, PairValue{nab, Series::one(b)}, PairValue{nw, Series::one(b)}, "Step 5:", integ);
    rw_psi(C, M, PairValue{gr_scale(nab, d), d}, PairValue{gr_scale(nw, dw), dw}, "Step 5:", integS);
    if (integ.ok != integS.ok) r.fail("Step 5: integral and localized verdicts differ");
    bool is_int = false;
    try {
      is_int = localized_integral(nw, dw, nullptr);
    } catch (const Error& e) {
      if (e.code() != Err::PrecisionExhausted) throw;
    }
    if (is_int) r.fail("Step 5: localized component reported integral");
    ++nonint;
    for (const auto& f : loc.failures) r.fail(f);
    if (loc.ok && integ.ok && integS.ok) ++s5;
  }
  r.certificates.push_back("Step 5: " + std::to_string(s5) + " localized units in Psi_S, " + std::to_string(nonint) +
                           " without integrality false positives");
  return r;
}

// ---------------------------------------------------------------- files

namespace {

using nlohmann::json;

json series_json(const Series& s) {
  if (!s.integral()) fail(Err::InvalidInput, "only integral coefficients are written");
  json a = json::array();
  for (int i = 0; i < s.b.n; ++i) a.push_back(s.coeff_int(i));
  return a;
}

Series series_from_json(const json& a, const Budget& b, int k) {
  if (!a.is_array() || static_cast<int>(a.size()) != b.n) fail(Err::InvalidInput, "series needs n coefficients");
  std::vector<i64> v;
  for (const auto& x : a) v.push_back(x.get<i64>());
  Series s = Series::from_ints(b, v);
  s.k = std::min(k, b.M);
  s.normalize();
  return s;
}

}  // namespace

std::string write_tuple(const ThetaTuple& t, const BrauerFamily& BF) {
  if (t.comps.size() != BF.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
  const Budget& b = t.comps.at(0).budget();
  json j;
  j["format"] = "iwt-theta-tuple";
  j["version"] = 1;
  j["budget"] = {{"p", b.p}, {"M", b.M}, {"n", b.n}, {"B", b.B}};
  j["group_order"] = BF.G->order;
  json pairs = json::array();
  for (size_t i = 0; i < t.comps.size(); ++i) {
    json e;
    e["id"] = i;
    e["U"] = BF.pairs[i].U.elems;
    e["k"] = t.comps[i].x.k;
    json num = json::array();
    for (int q = 0; q < t.comps[i].G->order; ++q) num.push_back(series_json(t.comps[i].coeff(q)));
    e["num"] = num;
    if (t.localized()) {
      e["den"] = series_json(t.dens[i]);
      e["den_k"] = t.dens[i].k;
    }
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  return j.dump(1) + "\n";
}

ThetaTuple read_tuple(const std::string& text, const BrauerFamily& BF) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Err::InvalidInput, std::string("tuple file: ") + e.what());
  }
  try {
    if (j.value("format", "") != "iwt-theta-tuple") fail(Err::InvalidInput, "not a theta tuple file");
    if (j.value("version", 0) != 1) fail(Err::InvalidInput, "unsupported tuple file version");
    Budget b;
    b.p = j.at("budget").at("p").get<int>();
    b.M = j.at("budget").at("M").get<int>();
    b.n = j.at("budget").at("n").get<int>();
    b.B = j.at("budget").at("B").get<int>();
    b.validate();
    if (b.p != BF.G->p) fail(Err::InvalidInput, "tuple prime differs from the group prime");
    const auto& pairs = j.at("pairs");
    if (pairs.size() != BF.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
    ThetaTuple t;
    bool any_den = false, all_den = true;
    for (size_t i = 0; i < pairs.size(); ++i) {
      const json& e = pairs[i];
      if (e.at("id").get<size_t>() != i) fail(Err::InvalidInput, "pairs out of order");
      if (e.at("U").get<std::vector<int>>() != BF.pairs[i].U.elems)
        fail(Err::InvalidInput, "pair " + std::to_string(i) + " has a different subgroup");
      const BrauerPair& bp = BF.pairs[i];
      const int k = e.at("k").get<int>();
      const auto& num = e.at("num");
      if (static_cast<int>(num.size()) != bp.qorder()) fail(Err::InvalidInput, "wrong number of coefficients");
      GR x = GR::zero(bp.Q.group, b);
      for (int q = 0; q < bp.qorder(); ++q) x.set(q, series_from_json(num[q], b, k));
      x.x.k = std::min(k, b.M);
      x.x.normalize();
      t.comps.push_back(x);
      if (e.contains("den")) {
        any_den = true;
        t.dens.push_back(series_from_json(e["den"], b, e.value("den_k", b.M)));
      } else {
        all_den = false;
      }
    }
    if (any_den && !all_den) fail(Err::InvalidInput, "denominators given for some pairs only");
    return t;
  } catch (const json::exception& e) {
    fail(Err::InvalidInput, std::string("tuple file: ") + e.what());
  }
}

std::string write_oracle(const ZetaOracle& O) {
  std::ostringstream s;
  s << "iwt-zeta-oracle 1\n";
  s << "p " << O.p << " M " << O.M << " j " << O.j << " pair " << O.pair << " qorder " << O.qorder << "\n";
  s << "kappa_gamma " << O.kappa_gamma << "\n";
  for (const auto& [key, v] : O.kappa) s << "kappa " << key.first << " " << key.second << " " << v << "\n";
  for (const auto& [key, v] : O.delta)
    s << "delta " << std::get<0>(key) << " " << std::get<1>(key) << " " << std::get<2>(key) << " " << std::get<3>(key)
      << " " << v << "\n";
  return s.str();
}

ZetaOracle read_oracle(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto bad = [](const std::string& why) { fail(Err::InvalidInput, "oracle file: " + why); };
  if (!std::getline(in, line)) bad("empty");
  {
    std::istringstream h(line);
    std::string tag;
    int ver = 0;
    if (!(h >> tag >> ver) || tag != "iwt-zeta-oracle") bad("missing header");
    if (ver != 1) bad("unsupported version " + std::to_string(ver));
  }
  ZetaOracle O;
  bool have_params = false;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const std::string where = " at line " + std::to_string(lineno);
    if (key == "p") {
      std::string kM, kj, kp, kq;
      if (!(ls >> O.p >> kM >> O.M >> kj >> O.j >> kp >> O.pair >> kq >> O.qorder) || kM != "M" || kj != "j" ||
          kp != "pair" || kq != "qorder")
        bad("malformed parameter line" + where);
      have_params = true;
    } else if (key == "kappa_gamma") {
      if (!(ls >> O.kappa_gamma)) bad("malformed kappa_gamma" + where);
    } else if (key == "kappa") {
      int q = 0;
      i64 t = 0, v = 0;
      if (!(ls >> q >> t >> v)) bad("malformed kappa row" + where);
      O.kappa[{q, t}] = v;
    } else if (key == "delta") {
      i64 w = 0, t = 0, v = 0;
      int k = 0, q = 0;
      if (!(ls >> w >> k >> q >> t >> v)) bad("malformed delta row" + where);
      if (q < 0 || t < 0) bad("negative coset" + where);
      O.delta[{w, k, q, t}] = v;
    } else {
      bad("unknown key '" + key + "'" + where);
    }
  }
  if (!have_params) bad("missing parameter line");
  if (!is_prime(O.p) || O.p == 2) bad("p must be an odd prime");
  if (O.M < 1 || O.j < 0 || O.qorder < 1) bad("parameters out of range");
  return O;
}

}  // namespace iwt
