#pragma once
#include "iwt/k1_norms.hpp"

namespace iwt::testutil {

inline Budget budget(int p, int n = 4, int M = 6, int B = 4) {
  Budget b;
  b.p = p;
  b.n = n;
  b.M = M;
  b.B = B;
  return b;
}

inline Series rand_series(Rng& r, const Budget& b, int digits = -1) {
  std::vector<i64> v(b.n);
  const i64 m = ipow(b.p, digits < 0 ? b.M : digits);
  for (auto& x : v) x = r.below(m);
  return Series::from_ints(b, v);
}

inline ConjVec rand_cv(Rng& r, const GroupPtr& G, const Budget& b) {
  ConjVec y = ConjVec::zero(G, b);
  for (int c = 0; c < G->num_classes(); ++c) y = y + cv_scale(ConjVec::cls(G, b, G->classes()[c][0]), rand_series(r, b));
  return y;
}

inline GR rand_gr(Rng& r, const GroupPtr& G, const Budget& b, int digits = -1) {
  GR x = GR::zero(G, b);
  for (int g = 0; g < G->order; ++g) x.set(g, rand_series(r, b, digits));
  return x;
}

// random unit; principal when requested (augmentation constant ≡ 1 mod p)
inline GR rand_unit(Rng& r, const GroupPtr& G, const Budget& b, bool principal = false) {
  for (;;) {
    GR x = rand_gr(r, G, b);
    const i64 a = aug_residue(x.x);
    if (a == 0) continue;
    if (principal && a != 1) {
      x.add(G->id, Series::constant(b, 1 - a));
      if (aug_residue(x.x) != 1) continue;
    }
    return x;
  }
}

}  // namespace iwt::testutil
