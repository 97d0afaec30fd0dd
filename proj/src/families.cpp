#include "iwt/families.hpp"

#include <algorithm>
#include <set>

namespace iwt {

ArtinFamily build_artin_family(const GroupPtr& G) {
  ArtinFamily F;
  F.G = G;
  F.entries.push_back({G->id, trivial_subgroup(G), G->N});
  std::vector<char> seen(G->order, 0);
  seen[G->id] = 1;
  for (int g = 0; g < G->order; ++g) {
    if (seen[g]) continue;
    Subgroup C = generate(G, {g});
    // every conjugate of <g>; g is the least element of the union since we scan upwards
    for (int a = 0; a < G->order; ++a)
      for (int x : C.elems) seen[G->conj(x, a)] = 1;
    F.entries.push_back({g, C, log_p(G->p, normalizer(G, C).order())});
  }
  return F;
}

int choose_central_c(const GroupPtr& G) {
  if (G->is_abelian()) fail(Err::AbelianInput, "group is abelian");
  Subgroup Z = centre(G), D = commutator_subgroup(G);
  for (int x : intersect(Z, D).elems)
    if (x != G->id) return x;
  fail(Err::AbelianInput, "centre meets commutator trivially");
}

CaseInfo classify_case(const GroupPtr& G, int h, int c) {
  CaseInfo ci;
  ci.U = generate(G, {h, c});
  Subgroup NU = normalizer(G, ci.U);
  Subgroup CU = centralizer(G, ci.U.elems);
  ci.n_norm = log_p(G->p, NU.order());
  ci.tag = (CU.order() == NU.order()) ? CaseTag::A : CaseTag::B;
  return ci;
}

ArtinFamilyC build_artin_family_c(const GroupPtr& G) {
  ArtinFamilyC F;
  F.base = build_artin_family(G);
  for (const auto& e : F.base.entries) {
    ACEntry a;
    a.kind = (e.h == G->id) ? AKind::Gamma : AKind::Cyclic;
    a.h = e.h;
    a.U = e.U;
    a.n_h = e.n;
    a.n_norm = e.n;
    F.entries.push_back(a);
  }
  if (G->is_abelian()) return F;
  F.c = choose_central_c(G);
  for (const auto& e : F.base.entries) {
    if (e.h == G->id || e.h == F.c) continue;
    CaseInfo ci = classify_case(G, e.h, F.c);
    ACEntry a;
    a.kind = AKind::WithC;
    a.h = e.h;
    a.U = ci.U;
    a.n_h = e.n;
    a.tag = ci.tag;
    a.n_norm = ci.n_norm;
    F.entries.push_back(a);
  }
  return F;
}

int BrauerFamily::find(const Subgroup& U) const {
  for (size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].U == U) return static_cast<int>(i);
  return -1;
}

BrauerPair make_brauer_pair(const GroupPtr& G, const Subgroup& U, const Subgroup& V) {
  if (!subset_of(V, U) || !is_normal(V, U)) fail(Err::NotNormal, "V must be normal in U");
  BrauerPair bp;
  bp.U = U;
  bp.V = V;
  bp.UG = U.as_group();
  bp.Q = quotient(bp.UG, restrict_to(V, U));
  if (!bp.Q.group->is_abelian()) fail(Err::NotAbelian, "U/V must be abelian");
  bp.index = G->order / U.order();
  return bp;
}

BrauerPair make_brauer_pair(const GroupPtr& G, const Subgroup& U) {
  return make_brauer_pair(G, U, commutator_subgroup(G, U));
}

BrauerFamily build_brauer_family(const GroupPtr& G) {
  BrauerFamily F;
  F.G = G;
  for (auto& U : enumerate_subgroups(G)) F.pairs.push_back(make_brauer_pair(G, U));
  F.top = static_cast<int>(F.pairs.size()) - 1;
  const int P = static_cast<int>(F.pairs.size());
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      const auto &Ui = F.pairs[i].U, &Uj = F.pairs[j].U;
      if (Uj.order() * G->p == Ui.order() && subset_of(Uj, Ui)) F.covers.push_back({i, j});
    }
  for (int i = 0; i < P; ++i) {
    const Subgroup& U = F.pairs[i].U;
    Subgroup NU = normalizer(G, U);
    for (int g : NU.gens) F.links.push_back({i, i, g});
    for (int r : right_transversal(NU)) {
      if (NU.contains(r)) continue;
      int j = F.find(conjugate(U, r));
      F.links.push_back({i, j, r});
    }
  }
  return F;
}

namespace {

// coordinates of an elementary abelian group over a chosen basis
struct FpSpace {
  int p = 3, d = 0;
  std::vector<int> basis;
  std::vector<std::vector<int>> vec;  // local index -> coordinates
  std::vector<int> elem;              // packed coordinates -> local index
  int pack(const std::vector<int>& v) const {
    int x = 0;
    for (int i = d - 1; i >= 0; --i) x = x * p + v[i];
    return x;
  }
};

FpSpace coordinates(const GroupPtr& A) {
  FpSpace S;
  S.p = A->p;
  std::vector<int> span{A->id};
  std::vector<char> in(A->order, 0);
  in[A->id] = 1;
  for (int x = 0; x < A->order; ++x) {
    if (in[x]) continue;
    S.basis.push_back(x);
    std::vector<int> next;
    for (int y : span)
      for (int k = 0; k < S.p; ++k) {
        int z = A->mul(y, A->power(x, k));
        if (!in[z]) in[z] = 1;
        next.push_back(z);
      }
    span = next;
  }
  S.d = static_cast<int>(S.basis.size());
  S.vec.assign(A->order, std::vector<int>(S.d, 0));
  S.elem.assign(A->order, -1);
  int total = A->order;
  for (int code = 0; code < total; ++code) {
    std::vector<int> v(S.d);
    int c = code, g = A->id;
    for (int i = 0; i < S.d; ++i) {
      v[i] = c % S.p;
      c /= S.p;
      g = A->mul(g, A->power(S.basis[i], v[i]));
    }
    S.vec[g] = v;
    S.elem[code] = g;
  }
  return S;
}

std::set<int> span_of(const FpSpace& S, const std::vector<int>& codes) {
  std::set<int> out{0};
  for (int c : codes) {
    std::set<int> next;
    auto v = [&](int code) {
      std::vector<int> r(S.d);
      for (int i = 0; i < S.d; ++i) {
        r[i] = code % S.p;
        code /= S.p;
      }
      return r;
    };
    const auto cv = v(c);
    for (int x : out) {
      auto xv = v(x);
      for (int k = 0; k < S.p; ++k) {
        std::vector<int> w(S.d);
        for (int i = 0; i < S.d; ++i) w[i] = (xv[i] + k * cv[i]) % S.p;
        next.insert(S.pack(w));
      }
    }
    out = next;
  }
  return out;
}

}  // namespace

RWFamily build_rw_family(const GroupPtr& G, const Subgroup& W) {
  if (W.order() * G->p != G->order) fail(Err::NotIndexP, "W must have index p");
  if (!W.as_group()->is_abelian()) fail(Err::NotAbelian, "W must be abelian");
  if (!is_normal(W, whole(G))) fail(Err::NotNormal, "W must be normal");
  RWFamily F;
  F.G = G;
  F.W = W;
  for (int x = 0; x < G->order; ++x)
    if (!W.contains(x)) {
      F.lambda = x;
      break;
    }
  GroupPtr A = W.as_group();
  FpSpace S = coordinates(A);
  const int total = A->order, p = G->p;
  auto code_of = [&](int local) { return S.pack(S.vec[local]); };
  // N = (lambda-action) - 1 on packed coordinates
  std::vector<int> Nmap(total);
  for (int code = 0; code < total; ++code) {
    int w = S.elem[code];
    int lw = W.local[G->mul(G->mul(F.lambda, W.elems[w]), G->inverse(F.lambda))];
    std::vector<int> a = S.vec[lw], b = S.vec[w], r(S.d);
    for (int i = 0; i < S.d; ++i) r[i] = ((a[i] - b[i]) % p + p) % p;
    Nmap[code] = S.pack(r);
  }
  auto Npow = [&](int code, int k) {
    for (int t = 0; t < k; ++t) code = Nmap[code];
    return code;
  };
  std::vector<std::set<int>> ker{{0}};
  for (int k = 1;; ++k) {
    std::set<int> K;
    for (int code = 0; code < total; ++code)
      if (Npow(code, k) == 0) K.insert(code);
    ker.push_back(K);
    if (static_cast<int>(K.size()) == total) break;
  }
  const int top = static_cast<int>(ker.size()) - 1;
  std::vector<int> tops;  // chosen chain tops, any level
  for (int k = top; k >= 1; --k) {
    // Q = ker N^{k-1} + N(ker N^{k+1}), then extend by chosen level-k tops
    std::vector<int> gens(ker[k - 1].begin(), ker[k - 1].end());
    if (k + 1 <= top)
      for (int x : ker[k + 1]) gens.push_back(Nmap[x]);
    std::vector<int> level;
    std::set<int> cur = span_of(S, gens);
    for (int v : ker[k]) {
      if (cur.count(v)) continue;
      level.push_back(v);
      gens.push_back(v);
      cur = span_of(S, gens);
      JordanBlock jb;
      jb.m = k;
      jb.basis.resize(k);
      for (int j = 1; j <= k; ++j) jb.basis[j - 1] = W.elems[S.elem[Npow(v, k - j)]];
      F.blocks.push_back(jb);
    }
    for (int v : level) tops.push_back(v);
  }
  std::vector<int> top_elems;
  for (const auto& jb : F.blocks) top_elems.push_back(jb.basis.back());
  F.Wprime = generate(G, top_elems);
  F.Wc = intersect(W, commutator_subgroup(G));
  (void)code_of;
  return F;
}

}  // namespace iwt
