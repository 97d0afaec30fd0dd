#include "iwt/class_algebra.hpp"

#include <algorithm>
#include <sstream>

namespace iwt {

namespace {

const int* need_table(const GroupPtr& G) {
  if (!G->has_table()) fail(Err::Unsupported, "group ring arithmetic needs a multiplication table");
  return G->table_ptr();
}

void same_group(const GroupPtr& a, const GroupPtr& b) {
  if (a.get() != b.get() && !(a->order == b->order && a->table == b->table))
    fail(Err::BudgetMismatch, "elements live over different groups");
}

Series slot_series(const Block& x, int slot) {
  Series s = Series::zero(x.b);
  s.k = x.k;
  for (int i = 0; i < x.b.n; ++i) s.c[i] = x.at(slot, i);
  return s;
}

void put_slot(Block& x, int slot, const Series& s, bool accumulate) {
  if (!(s.b == x.b)) fail(Err::BudgetMismatch, "coefficient budget differs");
  x.k = std::min(x.k, s.k);
  const i64 m = x.b.modulus(x.k);
  for (int i = 0; i < x.b.n; ++i)
    x.at(slot, i) = pmod((accumulate ? x.at(slot, i) : 0) + s.c[i], m);
  x.normalize();
}

}  // namespace

// ---------------------------------------------------------------- GR

GR GR::zero(const GroupPtr& G, const Budget& b) { return GR{G, zero_block(b, G->order)}; }

GR GR::one(const GroupPtr& G, const Budget& b) { return elem(G, b, G->id); }

GR GR::elem(const GroupPtr& G, const Budget& b, int g) {
  GR r = zero(G, b);
  r.set(g, Series::one(b));
  return r;
}

GR GR::scalar(const GroupPtr& G, const Series& s) {
  GR r = zero(G, s.b);
  r.set(G->id, s);
  return r;
}

Series GR::coeff(int g) const { return slot_series(x, g); }
void GR::set(int g, const Series& s) { put_slot(x, g, s, false); }
void GR::add(int g, const Series& s) { put_slot(x, g, s, true); }

GR operator+(const GR& a, const GR& b) {
  same_group(a.G, b.G);
  GR r = a;
  add_into(r.x, b.x, 1);
  return r;
}

GR operator-(const GR& a, const GR& b) {
  same_group(a.G, b.G);
  GR r = a;
  add_into(r.x, b.x, -1);
  return r;
}

GR operator*(const GR& a, const GR& b) {
  same_group(a.G, b.G);
  return GR{a.G, block_mul(a.x, b.x, need_table(a.G), a.G->order)};
}

bool operator==(const GR& a, const GR& b) {
  same_group(a.G, b.G);
  return equal_at(a.x, b.x);
}

GR gr_scale(const GR& a, const Series& s) { return GR::scalar(a.G, s) * a; }

Series augmentation(const GR& a) {
  Series s = Series::zero(a.x.b);
  s.k = a.x.k;
  const i64 m = a.x.b.modulus(s.k);
  for (int g = 0; g < a.x.slots; ++g)
    for (int i = 0; i < a.x.b.n; ++i) s.c[i] = pmod(s.c[i] + a.x.at(g, i), m);
  return s;
}

GR gr_inverse(const GR& a) { return GR{a.G, ring_inverse(a.x, need_table(a.G), a.G->order, a.G->id)}; }
GR gr_pow(const GR& a, i64 e) { return GR{a.G, ring_pow(a.x, e, need_table(a.G), a.G->order, a.G->id)}; }
GR gr_log(const GR& a) { return GR{a.G, ring_log(a.x, need_table(a.G), a.G->order, a.G->id)}; }
GR gr_exp(const GR& a) { return GR{a.G, ring_exp(a.x, need_table(a.G), a.G->order, a.G->id)}; }

bool gr_is_unit(const GR& a) { return a.x.integral() && aug_residue(a.x) != 0; }

GR gr_push(const GR& a, const GroupPtr& H, const std::vector<int>& image) {
  GR r = GR::zero(H, a.x.b);
  r.x.k = a.x.k;
  const i64 m = a.x.b.modulus(r.x.k);
  for (int g = 0; g < a.G->order; ++g)
    for (int i = 0; i < a.x.b.n; ++i) r.x.at(image[g], i) = pmod(r.x.at(image[g], i) + a.x.at(g, i), m);
  return r;
}

GR gr_restrict(const GR& a, const Subgroup& U) {
  GR r = GR::zero(U.as_group(), a.x.b);
  r.x.k = a.x.k;
  for (int g = 0; g < a.G->order; ++g) {
    bool nz = false;
    for (int i = 0; i < a.x.b.n; ++i) nz = nz || a.x.at(g, i) != 0;
    if (!nz) continue;
    if (!U.contains(g)) fail(Err::InvalidInput, "element is not supported on the subgroup");
    for (int i = 0; i < a.x.b.n; ++i) r.x.at(U.local[g], i) = a.x.at(g, i);
  }
  return r;
}

GR gr_lift(const GR& a, const Subgroup& U) {
  GR r = GR::zero(U.parent, a.x.b);
  r.x.k = a.x.k;
  for (int l = 0; l < U.order(); ++l)
    for (int i = 0; i < a.x.b.n; ++i) r.x.at(U.elems[l], i) = a.x.at(l, i);
  return r;
}

// ---------------------------------------------------------------- ConjVec

ConjVec ConjVec::zero(const GroupPtr& G, const Budget& b) { return ConjVec{G, zero_block(b, G->num_classes())}; }

ConjVec ConjVec::cls(const GroupPtr& G, const Budget& b, int g) {
  ConjVec r = zero(G, b);
  put_slot(r.y, G->class_of()[g], Series::one(b), false);
  return r;
}

Series ConjVec::coeff(int c) const { return slot_series(y, c); }

ConjVec operator+(const ConjVec& a, const ConjVec& b) {
  same_group(a.G, b.G);
  ConjVec r = a;
  add_into(r.y, b.y, 1);
  return r;
}

ConjVec operator-(const ConjVec& a, const ConjVec& b) {
  same_group(a.G, b.G);
  ConjVec r = a;
  add_into(r.y, b.y, -1);
  return r;
}

bool operator==(const ConjVec& a, const ConjVec& b) {
  same_group(a.G, b.G);
  return equal_at(a.y, b.y);
}

ConjVec cv_scale(const ConjVec& a, const Series& s) {
  ConjVec r = ConjVec::zero(a.G, a.y.b);
  for (int c = 0; c < a.y.slots; ++c) put_slot(r.y, c, a.coeff(c) * s, false);
  return r;
}

ConjVec class_projection(const GR& a) {
  ConjVec r = ConjVec::zero(a.G, a.x.b);
  r.y.k = a.x.k;
  const auto& co = a.G->class_of();
  const i64 m = a.x.b.modulus(r.y.k);
  for (int g = 0; g < a.G->order; ++g)
    for (int i = 0; i < a.x.b.n; ++i) r.y.at(co[g], i) = pmod(r.y.at(co[g], i) + a.x.at(g, i), m);
  return r;
}

GR cv_as_gr(const ConjVec& a) {
  if (!a.G->is_abelian()) fail(Err::NotAbelian, "class vector over a non-abelian group");
  GR r = GR::zero(a.G, a.y.b);
  const auto& cls = a.G->classes();
  r.x.k = a.y.k;
  for (size_t c = 0; c < cls.size(); ++c)
    for (int i = 0; i < a.y.b.n; ++i) r.x.at(cls[c][0], i) = a.y.at(static_cast<int>(c), i);
  return r;
}

ConjVec gr_as_cv(const GR& a) {
  if (!a.G->is_abelian()) fail(Err::NotAbelian, "group ring element over a non-abelian group");
  return class_projection(a);
}

ConjVec trace_hom(const ConjVec& y, const Subgroup& U) {
  const GroupPtr& G = y.G;
  GroupPtr UG = U.as_group();
  const auto& ucls = UG->class_of();
  const auto reps = left_transversal(U);
  ConjVec r = ConjVec::zero(UG, y.y.b);
  r.y.k = y.y.k;
  const i64 m = y.y.b.modulus(r.y.k);
  const auto& cls = G->classes();
  for (size_t c = 0; c < cls.size(); ++c) {
    const int g = cls[c][0];
    for (int a : reps) {
      const int x = G->conj(g, a);
      if (!U.contains(x)) continue;
      const int t = ucls[U.local[x]];
      for (int i = 0; i < y.y.b.n; ++i) r.y.at(t, i) = pmod(r.y.at(t, i) + y.y.at(static_cast<int>(c), i), m);
    }
  }
  return r;
}

ConjVec trace_hom_full(const ConjVec& y, const Subgroup& U) {
  const GroupPtr& G = y.G;
  GroupPtr UG = U.as_group();
  const auto& ucls = UG->class_of();
  const auto& cls = G->classes();
  ConjVec r = ConjVec::zero(UG, y.y.b);
  r.y.k = y.y.k;
  const i64 m = y.y.b.modulus(r.y.k);
  for (size_t c = 0; c < cls.size(); ++c) {
    // use the largest element of the class as representative
    const int g = cls[c].back();
    std::vector<i64> cnt(UG->num_classes(), 0);
    for (int a = 0; a < G->order; ++a) {
      const int x = G->conj(g, a);
      if (U.contains(x)) ++cnt[ucls[U.local[x]]];
    }
    for (int t = 0; t < UG->num_classes(); ++t) {
      if (cnt[t] % U.order() != 0) fail(Err::Inconsistent, "conjugate count not divisible by |U|");
      const i64 mult = cnt[t] / U.order();
      for (int i = 0; i < y.y.b.n; ++i)
        r.y.at(t, i) = pmod(r.y.at(t, i) + mulmod(mult, y.y.at(static_cast<int>(c), i), m), m);
    }
  }
  return r;
}

std::vector<i64> trace_int(const GroupPtr& P, int g, const Subgroup& U) {
  GroupPtr UG = U.as_group();
  std::vector<i64> v(UG->num_classes(), 0);
  for (int a : left_transversal(U)) {
    const int x = P->conj(g, a);
    if (U.contains(x)) ++v[UG->class_of()[U.local[x]]];
  }
  return v;
}

GR push_to_pair(const ConjVec& yU, const BrauerPair& bp) {
  GR r = GR::zero(bp.Q.group, yU.y.b);
  r.x.k = yU.y.k;
  const i64 m = yU.y.b.modulus(r.x.k);
  const auto& cls = yU.G->classes();
  for (size_t c = 0; c < cls.size(); ++c) {
    const int q = bp.Q.proj(cls[c][0]);
    for (int i = 0; i < yU.y.b.n; ++i) r.x.at(q, i) = pmod(r.x.at(q, i) + yU.y.at(static_cast<int>(c), i), m);
  }
  return r;
}

// ---------------------------------------------------------------- descriptors

Membership membership(const GR& x, const Descriptor& D) {
  Membership res;
  const Budget& b = x.x.b;
  if (D.kind == DescKind::AugModP) {
    Series a = augmentation(x);
    if (1 > a.k) fail(Err::PrecisionExhausted, "augmentation known below p^1");
    const i64 q = ipow(b.p, b.B + 1);
    for (i64 r : a.c)
      if (r % q != 0) {
        res.reason = "augmentation is not divisible by p";
        return res;
      }
    res.member = true;
    return res;
  }
  std::vector<char> covered(x.G->order, 0);
  for (const auto& g : D.gens) {
    Series s0 = x.coeff(g.support[0]);
    for (int u : g.support) {
      covered[u] = 1;
      if (!equal_at(x.coeff(u), s0)) {
        res.reason = "coefficients differ across generator " + g.label;
        return res;
      }
    }
    if (g.pexp > s0.k) {
      if (s0.is_zero()) {
        res.coords.push_back(Series::zero(b));
        continue;
      }
      fail(Err::PrecisionExhausted, "cannot certify divisibility by p^" + std::to_string(g.pexp) + " at precision " +
                                        std::to_string(s0.k));
    }
    if (!divisible_p_pow(s0, b.B + g.pexp)) {
      res.reason = "coefficient of " + g.label + " is not divisible by p^" + std::to_string(g.pexp);
      return res;
    }
    Series coord = s0;
    if (g.pexp > 0) {
      // value / p^e: divide residues, keep the scale
      coord = Series(div_p_pow(s0, g.pexp));
    }
    res.coords.push_back(coord);
  }
  for (int u = 0; u < x.G->order; ++u) {
    if (covered[u]) continue;
    if (!x.coeff(u).is_zero()) {
      res.reason = "element has support outside the module";
      res.coords.clear();
      return res;
    }
  }
  res.member = true;
  return res;
}

GR descriptor_element(const Descriptor& D, const std::vector<Series>& coords) {
  if (D.kind != DescKind::Monomial) fail(Err::InvalidInput, "coordinates exist only for monomial descriptors");
  GR r = GR::zero(D.amb, coords.at(0).b);
  for (size_t i = 0; i < D.gens.size(); ++i) {
    Series s = Series(mul_p_pow(coords[i], D.gens[i].pexp));
    for (int u : D.gens[i].support) r.add(u, s);
  }
  return r;
}

namespace {

std::string lbl(const std::string& what, int e) {
  std::ostringstream os;
  os << "p^" << e << "*" << what;
  return os.str();
}

}  // namespace

Descriptor image_I(const ArtinFamilyC& F, int idx) {
  const auto& e = F.entries.at(idx);
  const GroupPtr& G = F.base.G;
  const int N = G->N, p = G->p;
  Descriptor D;
  D.amb = e.U.as_group();
  auto L = [&](int g) { return e.U.local[g]; };
  switch (e.kind) {
    case AKind::Gamma:
      D.name = "I_Gamma";
      D.gens.push_back({{L(G->id)}, N, lbl("e", N)});
      break;
    case AKind::Cyclic:
      D.name = "I_U_h(h=" + std::to_string(e.h) + ")";
      D.gens.push_back({{L(G->id)}, N - 1, lbl("e", N - 1)});
      for (int i = 1; i < p; ++i)
        D.gens.push_back({{L(G->power(e.h, i))}, e.n_h - 1, lbl("h^" + std::to_string(i), e.n_h - 1)});
      break;
    case AKind::WithC: {
      const int c = F.c;
      D.name = std::string("I_U_hc(h=") + std::to_string(e.h) + (e.tag == CaseTag::A ? ",a)" : ",b)");
      for (int j = 0; j < p; ++j) D.gens.push_back({{L(G->power(c, j))}, N - 2, lbl("c^" + std::to_string(j), N - 2)});
      for (int i = 1; i < p; ++i) {
        const int hi = G->power(e.h, i);
        if (e.tag == CaseTag::A) {
          for (int j = 0; j < p; ++j)
            D.gens.push_back({{L(G->mul(hi, G->power(c, j)))}, e.n_h - 2,
                              lbl("h^" + std::to_string(i) + "c^" + std::to_string(j), e.n_h - 2)});
        } else {
          std::vector<int> sup;
          for (int j = 0; j < p; ++j) sup.push_back(L(G->mul(hi, G->power(c, j))));
          D.gens.push_back({sup, e.n_h - 2, lbl("h^" + std::to_string(i) + "(1+c+..+c^{p-1})", e.n_h - 2)});
        }
      }
      break;
    }
  }
  return D;
}

Descriptor image_I_prime(const ArtinFamilyC& F, int idx) {
  const auto& e = F.entries.at(idx);
  const GroupPtr& G = F.base.G;
  const int N = G->N, p = G->p;
  Descriptor D;
  D.amb = e.U.as_group();
  auto L = [&](int g) { return e.U.local[g]; };
  auto all_single = [&](int ex) {
    for (int u : e.U.elems) D.gens.push_back({{L(u)}, ex, lbl("u" + std::to_string(u), ex)});
  };
  switch (e.kind) {
    case AKind::Gamma:
      D.name = "I'_Gamma";
      D.gens.push_back({{L(G->id)}, N, lbl("e", N)});
      break;
    case AKind::Cyclic:
      D.name = "I'_U_h(h=" + std::to_string(e.h) + ")";
      all_single(e.n_h - 1);
      break;
    case AKind::WithC: {
      const int c = F.c;
      D.name = std::string("I'_U_hc(h=") + std::to_string(e.h) + (e.tag == CaseTag::A ? ",a)" : ",b)");
      if (e.tag == CaseTag::A) {
        all_single(e.n_h - 2);
        break;
      }
      for (int j = 0; j < p; ++j)
        D.gens.push_back({{L(G->power(c, j))}, e.n_h - 1, lbl("c^" + std::to_string(j), e.n_h - 1)});
      for (int i = 1; i < p; ++i) {
        const int hi = G->power(e.h, i);
        std::vector<int> sup;
        for (int j = 0; j < p; ++j) sup.push_back(L(G->mul(hi, G->power(c, j))));
        D.gens.push_back({sup, e.n_h - 2, lbl("h^" + std::to_string(i) + "(1+c+..+c^{p-1})", e.n_h - 2)});
      }
      break;
    }
  }
  return D;
}

Descriptor J_ideal(const GroupPtr& UV) {
  Descriptor D;
  D.amb = UV;
  D.kind = DescKind::AugModP;
  D.name = "J";
  return D;
}

Descriptor I_W_descriptor(const RWFamily& F) {
  const GroupPtr& G = F.G;
  Descriptor D;
  D.amb = F.W.as_group();
  D.name = "I_W";
  std::vector<char> done(G->order, 0);
  for (int w : F.W.elems) {
    if (done[w]) continue;
    std::vector<int> orb;
    int x = w;
    do {
      done[x] = 1;
      orb.push_back(F.W.local[x]);
      x = G->mul(G->mul(F.lambda, x), G->inverse(F.lambda));
    } while (x != w);
    std::sort(orb.begin(), orb.end());
    const int e = orb.size() == 1 ? 1 : 0;
    D.gens.push_back({orb, e, lbl("orbit(" + std::to_string(w) + ")", e)});
  }
  return D;
}

SpanCheck compare_span(const Descriptor& D, const std::vector<std::vector<i64>>& vecs, int p) {
  SpanCheck sc;
  const int n = D.amb->order;
  int maxe = 1;
  for (const auto& g : D.gens) maxe = std::max(maxe, g.pexp);
  const int K = maxe + 6;
  const i64 mod = ipow(p, K);
  // span ⊆ D
  sc.span_in_D = true;
  for (size_t v = 0; v < vecs.size() && sc.span_in_D; ++v) {
    const auto& x = vecs[v];
    if (D.kind == DescKind::AugModP) {
      i64 s = 0;
      for (i64 t : x) s += t;
      if (pmod(s, p) != 0) sc.span_in_D = false;
      continue;
    }
    std::vector<char> cov(n, 0);
    for (const auto& g : D.gens) {
      const i64 v0 = x[g.support[0]];
      for (int u : g.support) {
        cov[u] = 1;
        if (x[u] != v0) sc.span_in_D = false;
      }
      if (pmod(v0, ipow(p, g.pexp)) != 0) sc.span_in_D = false;
    }
    for (int u = 0; u < n; ++u)
      if (!cov[u] && x[u] != 0) sc.span_in_D = false;
    if (!sc.span_in_D) sc.detail = "vector " + std::to_string(v) + " lies outside " + D.name;
  }
  // D ⊆ span: each generator solves A c = gen over Z/p^K
  std::vector<std::vector<i64>> targets;
  if (D.kind == DescKind::AugModP) {
    std::vector<i64> t(n, 0);
    t[D.amb->id] = p;
    targets.push_back(t);
    for (int u = 0; u < n; ++u) {
      if (u == D.amb->id) continue;
      std::vector<i64> s(n, 0);
      s[u] = 1;
      s[D.amb->id] = -1;
      targets.push_back(s);
    }
  } else {
    for (const auto& g : D.gens) {
      std::vector<i64> t(n, 0);
      for (int u : g.support) t[u] = ipow(p, g.pexp);
      targets.push_back(t);
    }
  }
  std::vector<std::vector<i64>> A(n, std::vector<i64>(vecs.size(), 0));
  for (size_t j = 0; j < vecs.size(); ++j)
    for (int i = 0; i < n; ++i) A[i][j] = pmod(vecs[j][i], mod);
  sc.D_in_span = true;
  for (size_t t = 0; t < targets.size(); ++t) {
    std::vector<i64> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = pmod(targets[t][i], mod);
    auto sol = solve_mod_pk(A, rhs, p, K);
    if (!sol) {
      sc.D_in_span = false;
      sc.detail = "generator " + std::to_string(t) + " of " + D.name + " is not in the span";
      break;
    }
    // certificate check
    for (int i = 0; i < n; ++i) {
      i64 acc = 0;
      for (size_t j = 0; j < vecs.size(); ++j) acc = pmod(acc + mulmod(A[i][j], (*sol)[j], mod), mod);
      if (acc != rhs[i]) {
        sc.D_in_span = false;
        sc.detail = "solver certificate failed";
      }
    }
  }
  return sc;
}

std::string describe(const Descriptor& D) {
  if (D.kind == DescKind::AugModP) return D.name + " = {x : aug(x) in p*Lambda(Gamma)}";
  std::ostringstream os;
  os << D.name << " =";
  for (size_t i = 0; i < D.gens.size(); ++i) os << (i ? " + " : " ") << D.gens[i].label;
  return os.str();
}

}  // namespace iwt
