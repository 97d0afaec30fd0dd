#include "iwt/pgroup.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace iwt {

namespace {

constexpr int kTableLimit = 4096;

int label_index(const std::vector<int>& e, int p) {
  int idx = 0;
  for (int x : e) idx = idx * p + x;
  return idx;
}

std::vector<int> index_label(int idx, int E, int p) {
  std::vector<int> e(E);
  for (int t = E - 1; t >= 0; --t) {
    e[t] = idx % p;
    idx /= p;
  }
  return e;
}

// above-diagonal entries of a (D x D) unitriangular matrix, row-major
std::vector<int> mat_mul_labels(const std::vector<int>& a, const std::vector<int>& b, int D, int p) {
  std::vector<std::vector<int>> A(D, std::vector<int>(D, 0)), Bm = A;
  int t = 0;
  for (int i = 0; i < D; ++i) {
    A[i][i] = Bm[i][i] = 1;
    for (int j = i + 1; j < D; ++j, ++t) {
      A[i][j] = a[t];
      Bm[i][j] = b[t];
    }
  }
  std::vector<int> out;
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j) {
      int s = 0;
      for (int k = i; k <= j; ++k) s += A[i][k] * Bm[k][j];
      out.push_back(s % p);
    }
  return out;
}

void compute_gens(Group& g) {
  std::vector<char> in(g.order, 0);
  in[g.id] = 1;
  std::vector<int> elems{g.id};
  g.gens.clear();
  for (int x = 0; x < g.order; ++x) {
    if (in[x]) continue;
    g.gens.push_back(x);
    // closure by right multiplication with all generators
    std::deque<int> q(elems.begin(), elems.end());
    while (!q.empty()) {
      int y = q.front();
      q.pop_front();
      for (int s : g.gens) {
        int z = g.mul(y, s);
        if (!in[z]) {
          in[z] = 1;
          elems.push_back(z);
          q.push_back(z);
        }
      }
    }
  }
}

void check_axioms(const Group& g, bool require_exponent_p) {
  // Light's associativity test over the generators
  for (int s : g.gens)
    for (int x = 0; x < g.order; ++x)
      for (int y = 0; y < g.order; ++y)
        if (g.mul(g.mul(x, y), s) != g.mul(x, g.mul(y, s)))
          fail(Err::InvalidInput, "multiplication is not associative");
  for (int x = 0; x < g.order; ++x)
    if (g.mul(x, g.inv[x]) != g.id || g.mul(g.inv[x], x) != g.id)
      fail(Err::InvalidInput, "inverse table is inconsistent");
  if (require_exponent_p)
    for (int x = 0; x < g.order; ++x)
      if (g.power(x, g.p) != g.id) fail(Err::ExponentViolation, "an element has order larger than p");
}

}  // namespace

int log_p(int p, i64 order) {
  int n = 0;
  while (order % p == 0 && order > 1) {
    order /= p;
    ++n;
  }
  if (order != 1) fail(Err::InvalidInput, "order is not a power of p");
  return n;
}

int Group::mul(int a, int b) const {
  if (!table.empty()) return table[static_cast<size_t>(a) * order + b];
  return label_index(mat_mul_labels(labels[a], labels[b], mat_dim, p), p);
}

int Group::power(int a, i64 e) const {
  int r = id, b = a;
  while (e > 0) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

bool Group::is_abelian() const {
  for (int a : gens)
    for (int b : gens)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

const std::vector<std::vector<int>>& Group::classes() const {
  std::call_once(cls_once_, [this] {
    class_of_.assign(order, -1);
    for (int x = 0; x < order; ++x) {
      if (class_of_[x] >= 0) continue;
      const int c = static_cast<int>(classes_.size());
      std::vector<int> orb{x};
      class_of_[x] = c;
      for (size_t i = 0; i < orb.size(); ++i)
        for (int s : gens) {
          int y = conj(orb[i], s);
          if (class_of_[y] < 0) {
            class_of_[y] = c;
            orb.push_back(y);
          }
        }
      std::sort(orb.begin(), orb.end());
      classes_.push_back(orb);
    }
  });
  return classes_;
}

const std::vector<int>& Group::class_of() const {
  classes();
  return class_of_;
}

GroupPtr build_unitriangular(int N, int p) {
  if (p < 3 || !is_prime(p)) fail(Err::InvalidInput, "p must be an odd prime");
  if (N < 1) fail(Err::InvalidInput, "N must be at least 1");
  if (p <= N) fail(Err::ExponentViolation, "B^N(F_p) needs p > N for exponent p");
  auto g = std::make_shared<Group>();
  const int D = N + 1, E = N * (N + 1) / 2;
  g->p = p;
  g->N = E;
  g->order = static_cast<int>(ipow(p, E));
  if (g->order > 1000000) fail(Err::Unsupported, "group too large");
  g->mat_dim = D;
  g->id = 0;
  g->name = "B^" + std::to_string(N) + "(F_" + std::to_string(p) + ")";
  g->labels.resize(g->order);
  for (int i = 0; i < g->order; ++i) g->labels[i] = index_label(i, E, p);
  if (g->order <= kTableLimit) {
    g->table.resize(static_cast<size_t>(g->order) * g->order);
    for (int a = 0; a < g->order; ++a)
      for (int b = 0; b < g->order; ++b)
        g->table[static_cast<size_t>(a) * g->order + b] = label_index(mat_mul_labels(g->labels[a], g->labels[b], D, p), p);
  }
  g->inv.resize(g->order);
  for (int a = 0; a < g->order; ++a) g->inv[a] = g->power(a, p - 1);
  // superdiagonal elementary matrices generate
  int t = 0;
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j, ++t)
      if (j == i + 1) {
        std::vector<int> e(E, 0);
        e[t] = 1;
        g->gens.push_back(label_index(e, p));
      }
  if (g->has_table()) {
    check_axioms(*g, true);
  } else {
    for (int x = 0; x < g->order; ++x)
      if (g->power(x, p) != g->id) fail(Err::ExponentViolation, "an element has order larger than p");
  }
  return g;
}

GroupPtr group_from_table(int p, const std::vector<std::vector<int>>& mult, bool require_exponent_p,
                          const std::string& name) {
  if (p < 2 || !is_prime(p)) fail(Err::InvalidInput, "p must be prime");
  const int n = static_cast<int>(mult.size());
  if (n == 0) fail(Err::InvalidInput, "empty table");
  auto g = std::make_shared<Group>();
  g->p = p;
  g->order = n;
  g->N = log_p(p, n);
  g->exponent_p = require_exponent_p;
  g->name = name;
  g->table.resize(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(mult[a].size()) != n) fail(Err::InvalidInput, "table is not square");
    std::vector<char> seen(n, 0);
    for (int b = 0; b < n; ++b) {
      const int v = mult[a][b];
      if (v < 0 || v >= n) fail(Err::InvalidInput, "table entry out of range");
      if (seen[v]) fail(Err::InvalidInput, "table row is not a permutation");
      seen[v] = 1;
      g->table[static_cast<size_t>(a) * n + b] = v;
    }
  }
  for (int b = 0; b < n; ++b) {
    std::vector<char> seen(n, 0);
    for (int a = 0; a < n; ++a) {
      const int v = mult[a][b];
      if (seen[v]) fail(Err::InvalidInput, "table column is not a permutation");
      seen[v] = 1;
    }
  }
  g->id = -1;
  for (int e = 0; e < n && g->id < 0; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = mult[e][x] == x && mult[x][e] == x;
    if (ok) g->id = e;
  }
  if (g->id < 0) fail(Err::InvalidInput, "no identity element");
  g->inv.resize(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (mult[a][b] == g->id) g->inv[a] = b;
  compute_gens(*g);
  check_axioms(*g, require_exponent_p);
  return g;
}

GroupPtr cyclic_group(int p, int order, bool require_exponent_p) {
  std::vector<std::vector<int>> t(order, std::vector<int>(order));
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) t[a][b] = (a + b) % order;
  return group_from_table(p, t, require_exponent_p, "C_" + std::to_string(order));
}

GroupPtr direct_product(const GroupPtr& a, const GroupPtr& b, bool require_exponent_p) {
  const int na = a->order, nb = b->order;
  std::vector<std::vector<int>> t(na * nb, std::vector<int>(na * nb));
  for (int x = 0; x < na * nb; ++x)
    for (int y = 0; y < na * nb; ++y) t[x][y] = a->mul(x / nb, y / nb) * nb + b->mul(x % nb, y % nb);
  return group_from_table(a->p, t, require_exponent_p, a->name + "x" + b->name);
}

GroupPtr elementary_abelian(int p, int rank) {
  GroupPtr g = cyclic_group(p, p);
  for (int i = 1; i < rank; ++i) g = direct_product(g, cyclic_group(p, p));
  return g;
}

static Subgroup make_sub(const GroupPtr& G, std::vector<int> elems, std::vector<int> gens) {
  Subgroup s;
  s.parent = G;
  std::sort(elems.begin(), elems.end());
  s.elems = std::move(elems);
  s.gens = std::move(gens);
  s.local.assign(G->order, -1);
  for (int i = 0; i < s.order(); ++i) s.local[s.elems[i]] = i;
  return s;
}

Subgroup generate(const GroupPtr& G, const std::vector<int>& gens) {
  std::vector<char> in(G->order, 0);
  in[G->id] = 1;
  std::vector<int> elems{G->id};
  std::vector<int> real;
  for (int s : gens)
    if (s != G->id) real.push_back(s);
  for (size_t i = 0; i < elems.size(); ++i)
    for (int s : real) {
      int z = G->mul(elems[i], s);
      if (!in[z]) {
        in[z] = 1;
        elems.push_back(z);
      }
    }
  return make_sub(G, elems, real);
}

Subgroup from_elements(const GroupPtr& G, std::vector<int> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  for (int x : elems)
    if (x < 0 || x >= G->order) fail(Err::NotASubgroup, "element index out of range");
  Subgroup s = generate(G, elems);
  if (s.elems != elems) fail(Err::NotASubgroup, "element set is not closed under multiplication");
  return s;
}

Subgroup whole(const GroupPtr& G) {
  std::vector<int> all(G->order);
  for (int i = 0; i < G->order; ++i) all[i] = i;
  return make_sub(G, all, G->gens);
}

Subgroup trivial_subgroup(const GroupPtr& G) { return make_sub(G, {G->id}, {}); }

Subgroup centralizer(const GroupPtr& G, const std::vector<int>& S) {
  std::vector<int> el;
  for (int g = 0; g < G->order; ++g) {
    bool ok = true;
    for (int s : S) ok = ok && G->mul(g, s) == G->mul(s, g);
    if (ok) el.push_back(g);
  }
  return generate(G, el).order() == static_cast<int>(el.size()) ? make_sub(G, el, el) : generate(G, el);
}

Subgroup centre(const GroupPtr& G) {
  Subgroup z = centralizer(G, G->gens);
  return generate(G, z.elems);
}

Subgroup commutator_subgroup(const GroupPtr& G, const Subgroup& H) {
  std::vector<int> hs = H.gens;
  std::vector<int> cg;
  for (int a : hs)
    for (int b : hs) {
      int c = G->commutator(a, b);
      if (c != G->id) cg.push_back(c);
    }
  Subgroup C = generate(G, cg);
  for (bool changed = true; changed;) {
    changed = false;
    for (int c : std::vector<int>(C.gens))
      for (int h : hs) {
        int d = G->conj(c, h);
        if (!C.contains(d)) {
          cg.push_back(d);
          C = generate(G, cg);
          changed = true;
        }
      }
  }
  return C;
}

Subgroup commutator_subgroup(const GroupPtr& G) { return commutator_subgroup(G, whole(G)); }

Subgroup normalizer(const GroupPtr& G, const Subgroup& U) {
  std::vector<int> el;
  for (int g = 0; g < G->order; ++g) {
    bool ok = true;
    for (int u : U.gens) ok = ok && U.contains(G->conj(u, g));
    if (ok) el.push_back(g);
  }
  Subgroup s = generate(G, el);
  return s;
}

Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  std::vector<int> el;
  for (int x : a.elems)
    if (b.contains(x)) el.push_back(x);
  return generate(a.parent, el);
}

Subgroup conjugate(const Subgroup& U, int a) {
  std::vector<int> gens;
  for (int u : U.gens) gens.push_back(U.parent->conj(u, a));
  return generate(U.parent, gens);
}

bool subset_of(const Subgroup& a, const Subgroup& b) {
  for (int x : a.elems)
    if (!b.contains(x)) return false;
  return true;
}

bool is_normal(const Subgroup& N, const Subgroup& in) {
  const Group& G = *N.parent;
  for (int h : in.gens)
    for (int n : N.gens)
      if (!N.contains(G.conj(n, h))) return false;
  return subset_of(N, in);
}

std::vector<Subgroup> enumerate_subgroups(const GroupPtr& G) {
  std::set<std::vector<int>> seen;
  std::vector<Subgroup> out;
  std::deque<Subgroup> q;
  Subgroup t = trivial_subgroup(G);
  seen.insert(t.elems);
  q.push_back(t);
  while (!q.empty()) {
    Subgroup S = q.front();
    q.pop_front();
    out.push_back(S);
    std::vector<char> done(G->order, 0);
    for (int x : S.elems) done[x] = 1;
    for (int g = 0; g < G->order; ++g) {
      if (done[g]) continue;
      // one candidate per coset gS
      for (int s : S.elems) done[G->mul(g, s)] = 1;
      std::vector<int> gens = S.gens;
      gens.push_back(g);
      Subgroup T = generate(G, gens);
      if (seen.insert(T.elems).second) q.push_back(T);
    }
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.elems < b.elems;
  });
  return out;
}

std::vector<int> left_transversal(const Subgroup& U) {
  const Group& G = *U.parent;
  std::vector<char> done(G.order, 0);
  std::vector<int> reps;
  for (int a = 0; a < G.order; ++a) {
    if (done[a]) continue;
    reps.push_back(a);
    for (int u : U.elems) done[G.mul(a, u)] = 1;
  }
  return reps;
}

std::vector<int> right_transversal(const Subgroup& U) {
  const Group& G = *U.parent;
  std::vector<char> done(G.order, 0);
  std::vector<int> reps;
  for (int a = 0; a < G.order; ++a) {
    if (done[a]) continue;
    reps.push_back(a);
    for (int u : U.elems) done[G.mul(u, a)] = 1;
  }
  return reps;
}

GroupPtr Subgroup::as_group() const {
  std::call_once(*once_, [this] {
    if (order() == parent->order) {
      *grp_ = parent;
      return;
    }
    auto g = std::make_shared<Group>();
    const Group& P = *parent;
    g->p = P.p;
    g->order = order();
    g->N = log_p(P.p, order());
    g->exponent_p = P.exponent_p;
    g->id = local[P.id];
    g->name = P.name + "-sub" + std::to_string(order());
    g->table.resize(static_cast<size_t>(order()) * order());
    for (int a = 0; a < order(); ++a)
      for (int b = 0; b < order(); ++b) g->table[static_cast<size_t>(a) * order() + b] = local[P.mul(elems[a], elems[b])];
    g->inv.resize(order());
    for (int a = 0; a < order(); ++a) g->inv[a] = local[P.inverse(elems[a])];
    for (int s : gens) g->gens.push_back(local[s]);
    if (g->gens.empty() && order() > 1) compute_gens(*g);
    *grp_ = g;
  });
  return *grp_;
}

Subgroup restrict_to(const Subgroup& V, const Subgroup& U) {
  GroupPtr UG = U.as_group();
  std::vector<int> gens;
  for (int v : V.elems)
    if (!U.contains(v)) fail(Err::NotASubgroup, "subgroup is not contained in U");
  for (int s : V.gens) gens.push_back(U.local[s]);
  std::vector<int> el;
  for (int v : V.elems) el.push_back(U.local[v]);
  return make_sub(UG, el, gens);
}

Subgroup lift_from(const Subgroup& V, const Subgroup& U) {
  std::vector<int> el, gens;
  for (int v : V.elems) el.push_back(U.elems[v]);
  for (int s : V.gens) gens.push_back(U.elems[s]);
  return make_sub(U.parent, el, gens);
}

bool GroupMap::is_hom() const {
  for (int x = 0; x < domain->order; ++x)
    for (int g : domain->gens)
      if (image[domain->mul(x, g)] != codomain->mul(image[x], image[g])) return false;
  return image[domain->id] == codomain->id;
}

Quotient quotient(const GroupPtr& G, const Subgroup& N, bool require_exponent_p) {
  if (!is_normal(N, whole(G))) fail(Err::NotNormal, "subgroup is not normal");
  std::vector<int> coset(G->order, -1), rep;
  for (int x = 0; x < G->order; ++x) {
    if (coset[x] >= 0) continue;
    const int c = static_cast<int>(rep.size());
    rep.push_back(x);
    for (int n : N.elems) coset[G->mul(x, n)] = c;
  }
  const int q = static_cast<int>(rep.size());
  std::vector<std::vector<int>> t(q, std::vector<int>(q));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) t[a][b] = coset[G->mul(rep[a], rep[b])];
  Quotient Q;
  Q.group = group_from_table(G->p, t, require_exponent_p && G->exponent_p, G->name + "/N" + std::to_string(N.order()));
  Q.proj.domain = G;
  Q.proj.codomain = Q.group;
  Q.proj.image = coset;
  Q.rep = rep;
  return Q;
}

int verlagerung(const Subgroup& U, int g, const Quotient& uab) {
  const Group& G = *U.parent;
  const std::vector<int> reps = left_transversal(U);
  std::vector<int> which(G.order, -1);
  for (size_t i = 0; i < reps.size(); ++i)
    for (int u : U.elems) which[G.mul(reps[i], u)] = static_cast<int>(i);
  int acc = uab.group->id;
  for (int a : reps) {
    const int ga = G.mul(g, a);
    const int aj = reps[which[ga]];
    const int u = G.mul(G.inverse(aj), ga);
    acc = uab.group->mul(acc, uab.proj(U.local[u]));
  }
  return acc;
}

}  // namespace iwt
