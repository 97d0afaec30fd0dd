#include "iwt/theta_additive.hpp"

#include <algorithm>

namespace iwt {

namespace {

std::string elem_name(int g) { return std::to_string(g); }

int nA_of(const ArtinFamilyC& F) { return static_cast<int>(F.base.entries.size()); }

}  // namespace

AdditiveTuple operator+(const AdditiveTuple& a, const AdditiveTuple& b) {
  if (a.comps.size() != b.comps.size()) fail(Err::BudgetMismatch, "tuples over different families");
  AdditiveTuple r;
  for (size_t i = 0; i < a.comps.size(); ++i) r.comps.push_back(a.comps[i] + b.comps[i]);
  return r;
}

bool operator==(const AdditiveTuple& a, const AdditiveTuple& b) {
  if (a.comps.size() != b.comps.size()) return false;
  for (size_t i = 0; i < a.comps.size(); ++i)
    if (!(a.comps[i] == b.comps[i])) return false;
  return true;
}

// ---------------------------------------------------------------- F_A

AdditiveTuple theta_A_plus(const ConjVec& y, const ArtinFamilyC& F, bool with_c) {
  AdditiveTuple t;
  const int n = with_c ? static_cast<int>(F.entries.size()) : nA_of(F);
  for (int i = 0; i < n; ++i) t.comps.push_back(cv_as_gr(trace_hom(y, F.entries[i].U)));
  return t;
}

CondReport phi_membership(const AdditiveTuple& t, const ArtinFamilyC& F) {
  CondReport r;
  const int nA = nA_of(F);
  if (static_cast<int>(t.comps.size()) < nA) fail(Err::InvalidInput, "tuple shorter than the family");
  const GR& ye = t.comps[0];
  const Series e_coeff = ye.coeff(ye.G->id);
  for (int i = 0; i < nA; ++i) {
    const auto& E = F.entries[i];
    const std::string who = i == 0 ? std::string("I_Gamma") : "I_U[h=" + elem_name(E.h) + "]";
    Membership m = membership(t.comps[i], image_I(F, i));
    if (m.member)
      r.certificates.push_back(who + " ok");
    else
      r.fail(who + ": " + m.reason);
    if (i == 0) continue;
    // Tr_{U_h→Γ}(y_h) = p·(coefficient of e)
    const GR& yh = t.comps[i];
    Series tr(scale_int(yh.coeff(yh.G->id), F.base.G->p));
    if (!(tr == e_coeff)) r.fail("trace relation[h=" + elem_name(E.h) + "]");
  }
  return r;
}

ConjVec theta_A_inverse(const AdditiveTuple& t, const ArtinFamilyC& F) {
  CondReport rep = phi_membership(t, F);
  if (!rep.ok) fail(Err::NotInPhi, rep.failures.front());
  const GroupPtr& G = F.base.G;
  const Budget& b = t.comps[0].budget();
  ConjVec y = ConjVec::zero(G, b);
  const auto& co = G->class_of();
  // p^{-N}[y_e] plus p^{-n_h+1}([y_h] - p^{-1}[y_e]); the e-parts cancel, leaving the h^i coordinates
  for (int i = 0; i < nA_of(F); ++i) {
    const Descriptor D = image_I(F, i);
    Membership m = membership(t.comps[i], D);
    const Subgroup& U = F.entries[i].U;
    for (size_t g = 0; g < D.gens.size(); ++g) {
      const int g0 = U.elems[D.gens[g].support[0]];
      if (i > 0 && g0 == G->id) continue;
      Block& blk = y.y;
      const int cls = co[g0];
      const Series& s = m.coords[g];
      blk.k = std::min(blk.k, s.k);
      const i64 mod = b.modulus(blk.k);
      for (int j = 0; j < b.n; ++j) blk.at(cls, j) = pmod(blk.at(cls, j) + s.c[j], mod);
      blk.normalize();
    }
  }
  return y;
}

// ---------------------------------------------------------------- F_B

AdditiveTuple theta_B_plus(const ConjVec& y, const BrauerFamily& F) {
  AdditiveTuple t;
  for (const auto& bp : F.pairs) t.comps.push_back(push_to_pair(trace_hom(y, bp.U), bp));
  return t;
}

namespace {

std::string pair_name(const BrauerPair& bp) {
  return "(|U|=" + std::to_string(bp.U.order()) + ",U=" + std::to_string(bp.U.elems.size() > 1 ? bp.U.elems[1] : 0) +
         "..,|V|=" + std::to_string(bp.V.order()) + ")";
}

}  // namespace

CondReport phi_B_membership(const AdditiveTuple& t, const BrauerFamily& F) {
  CondReport r;
  if (t.comps.size() != F.pairs.size()) fail(Err::InvalidInput, "tuple does not match the Brauer family");
  const GroupPtr& G = F.G;
  for (const auto& cv : F.covers) {
    const BrauerPair &big = F.pairs[cv.big], &small = F.pairs[cv.small];
    const GR& yb = t.comps[cv.big];
    // Tr_{U/V → U'/V}: multiplication by p on U'/V, zero elsewhere
    GR lhs = GR::zero(yb.G, yb.budget());
    lhs.x.k = yb.x.k;
    for (int q = 0; q < yb.G->order; ++q)
      if (small.U.contains(big.from_q(q))) lhs.set(q, Series(scale_int(yb.coeff(q), G->p)));
    std::vector<int> img(small.Q.group->order);
    for (int q = 0; q < small.Q.group->order; ++q) img[q] = big.to_q(small.from_q(q));
    GR rhs = gr_push(t.comps[cv.small], yb.G, img);
    if (!(lhs == rhs))
      r.fail("TCC " + pair_name(big) + "->" + pair_name(small) + " [pairs " + std::to_string(cv.big) + "->" +
             std::to_string(cv.small) + "]");
  }
  for (const auto& l : F.links) {
    const BrauerPair &from = F.pairs[l.from], &to = F.pairs[l.to];
    std::vector<int> img(from.Q.group->order);
    for (int q = 0; q < from.Q.group->order; ++q) img[q] = to.to_q(G->conj(from.from_q(q), l.a));
    GR moved = gr_push(t.comps[l.from], to.Q.group, img);
    if (!(moved == t.comps[l.to]))
      r.fail("CCC+ " + pair_name(from) + "->" + pair_name(to) + " via a=" + elem_name(l.a) + " [pairs " +
             std::to_string(l.from) + "->" + std::to_string(l.to) + "]");
  }
  if (r.ok)
    r.certificates.push_back(std::to_string(F.covers.size()) + " TCC covers and " + std::to_string(F.links.size()) +
                             " CCC+ links hold");
  return r;
}

AdditiveTuple project_to_artin(const AdditiveTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F) {
  AdditiveTuple out;
  for (int i = 0; i < nA_of(F); ++i) {
    const Subgroup& U = F.entries[i].U;
    const int pi = BF.find(U);
    if (pi < 0) fail(Err::Inconsistent, "cyclic subgroup missing from the Brauer family");
    const BrauerPair& bp = BF.pairs[pi];
    if (bp.V.order() != 1) fail(Err::Inconsistent, "abelian U with nontrivial V");
    GroupPtr UG = U.as_group();
    std::vector<int> img(bp.Q.group->order);
    for (int u = 0; u < UG->order; ++u) img[bp.Q.proj(u)] = u;
    out.comps.push_back(gr_push(t.comps[pi], UG, img));
  }
  return out;
}

ConjVec reconstruct_from_brauer(const AdditiveTuple& t, const BrauerFamily& BF, const ArtinFamilyC& F) {
  CondReport rb = phi_B_membership(t, BF);
  if (!rb.ok) fail(Err::NotInPhiB, rb.failures.front());
  AdditiveTuple proj = project_to_artin(t, BF, F);
  CondReport ra = phi_membership(proj, F);
  if (!ra.ok) fail(Err::NotInPhiB, "F_A projection: " + ra.failures.front());
  ConjVec y = theta_A_inverse(proj, F);
  AdditiveTuple back = theta_B_plus(y, BF);
  for (size_t i = 0; i < back.comps.size(); ++i)
    if (!(back.comps[i] == t.comps[i])) fail(Err::Inconsistent, "pair " + std::to_string(i) + " disagrees");
  return y;
}

CondReport commutator_bound(const BrauerFamily& F) {
  CondReport r;
  const int p = F.G->p;
  for (const auto& bp : F.pairs) {
    const int k = log_p(p, bp.U.order());
    if (k < 2) {
      if (bp.V.order() != 1) r.fail("nontrivial V below order p^2");
      continue;
    }
    if (bp.V.order() > ipow(p, k - 2)) r.fail("|V| > p^(k-2) at " + pair_name(bp));
  }
  if (r.ok) r.certificates.push_back(std::to_string(F.pairs.size()) + " pairs within the bound");
  return r;
}

// ---------------------------------------------------------------- Ritter–Weiss

RWContext make_rw_context(const RWFamily& F) {
  RWContext C;
  C.F = F;
  C.ab = quotient(F.G, commutator_subgroup(F.G));
  C.IW = I_W_descriptor(F);
  C.in_Wbar.assign(C.ab.group->order, 0);
  for (int w : F.W.elems) C.in_Wbar[C.ab.proj(w)] = 1;
  return C;
}

RWTuple rw_theta_plus(const ConjVec& y, const RWContext& C) {
  const GroupPtr& G = C.F.G;
  RWTuple t;
  t.ab = GR::zero(C.ab.group, y.y.b);
  t.ab.x.k = y.y.k;
  const auto& cls = G->classes();
  for (size_t c = 0; c < cls.size(); ++c) t.ab.add(C.ab.proj(cls[c][0]), y.coeff(static_cast<int>(c)));
  t.w = cv_as_gr(trace_hom(y, C.F.W));
  return t;
}

CondReport rw_phi_membership(const RWTuple& t, const RWContext& C) {
  CondReport r;
  const int p = C.F.G->p;
  GR lhs = GR::zero(t.ab.G, t.ab.budget());
  lhs.x.k = t.ab.x.k;
  for (int q = 0; q < t.ab.G->order; ++q)
    if (C.in_Wbar[q]) lhs.set(q, Series(scale_int(t.ab.coeff(q), p)));
  std::vector<int> img(C.F.W.order());
  for (int u = 0; u < C.F.W.order(); ++u) img[u] = C.ab.proj(C.F.W.elems[u]);
  GR rhs = gr_push(t.w, t.ab.G, img);
  if (!(lhs == rhs)) r.fail("trace relation G^ab -> W/W_c");
  Membership m = membership(t.w, C.IW);
  if (m.member)
    r.certificates.push_back("y_W in I_W");
  else
    r.fail("I_W: " + m.reason);
  return r;
}

ConjVec rw_inverse(const RWTuple& t, const RWContext& C) {
  CondReport rep = rw_phi_membership(t, C);
  if (!rep.ok) fail(Err::NotInPhiRW, rep.failures.front());
  const GroupPtr& G = C.F.G;
  const Budget& b = t.w.budget();
  Membership m = membership(t.w, C.IW);
  ConjVec y = ConjVec::zero(G, b);
  // W-classes from the I_W coordinates; each λ-orbit is one G-class
  for (size_t g = 0; g < C.IW.gens.size(); ++g) {
    const int w = C.F.W.elems[C.IW.gens[g].support[0]];
    ConjVec add = cv_scale(ConjVec::cls(G, b, w), m.coords[g]);
    y = y + add;
  }
  // what is left of y_ab must live off W̄; each such coset is one class contribution
  GR rest = t.ab - rw_theta_plus(y, C).ab;
  for (int q = 0; q < rest.G->order; ++q) {
    Series s = rest.coeff(q);
    if (C.in_Wbar[q]) {
      if (!s.is_zero()) fail(Err::NotInPhiRW, "abelian part disagrees on the image of W");
      continue;
    }
    y = y + cv_scale(ConjVec::cls(G, b, C.ab.rep[q]), s);
  }
  return y;
}

}  // namespace iwt
