#include "iwt/precision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iwt {

void Budget::validate() const {
  if (p < 3 || !is_prime(p)) fail(Err::InvalidInput, "p must be an odd prime");
  if (M < 1 || n < 1 || B < 0) fail(Err::InvalidInput, "need M,n >= 1 and B >= 0");
  if (M + B > max_wide_digits(p)) fail(Err::InvalidInput, "p^(M+B) does not fit the residue word");
}

std::string Budget::str() const {
  std::ostringstream os;
  os << "(p=" << p << ",M=" << M << ",n=" << n << ",B=" << B << ")";
  return os.str();
}

void Block::normalize() {
  if (k > b.M) k = b.M;
  if (k < 1) fail(Err::PrecisionExhausted, "known precision dropped below 1");
  const i64 m = b.modulus(k);
  for (auto& r : c) r = pmod(r, m);
}

bool Block::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](i64 r) { return r == 0; });
}

int Block::valuation() const {
  int v = k;
  for (i64 r : c)
    if (r != 0) v = std::min(v, vp(r, b.p) - b.B);
  return v;
}

Block zero_block(const Budget& b, int slots, int k) {
  Block z;
  z.b = b;
  z.k = k < 0 ? b.M : k;
  z.slots = slots;
  z.c.assign(static_cast<size_t>(slots) * b.n, 0);
  return z;
}

void check_same(const Block& a, const Block& b) {
  if (!(a.b == b.b)) fail(Err::BudgetMismatch, a.b.str() + " vs " + b.b.str());
  if (a.slots != b.slots) fail(Err::BudgetMismatch, "slot count differs");
}

void add_into(Block& a, const Block& b, i64 sign) {
  check_same(a, b);
  a.k = std::min(a.k, b.k);
  const i64 m = a.b.modulus(a.k);
  for (size_t i = 0; i < a.c.size(); ++i) a.c[i] = pmod(a.c[i] + sign * pmod(b.c[i], m), m);
}

Block with_precision(const Block& a, int k) {
  Block r = a;
  r.k = std::min(a.k, k);
  r.normalize();
  return r;
}

Block scale_int(const Block& a, i64 s) {
  Block r = a;
  if (s == 0) {
    r.k = a.b.M;
    std::fill(r.c.begin(), r.c.end(), 0);
    return r;
  }
  r.k = std::min(a.b.M, a.k + vp(s, a.b.p));
  const i64 m = a.b.modulus(r.k);
  const i64 sm = pmod(s, m);
  for (auto& x : r.c) x = mulmod(x, sm, m);
  return r;
}

Block mul_p_pow(const Block& a, int e) { return scale_int(a, ipow(a.b.p, e)); }

bool divisible_p_pow(const Block& a, int e) {
  const i64 q = ipow(a.b.p, e);
  return std::all_of(a.c.begin(), a.c.end(), [q](i64 r) { return r % q == 0; });
}

Block div_p_pow(const Block& a, int e) {
  if (e == 0) return a;
  if (e > a.k + a.b.B || !divisible_p_pow(a, e))
    fail(Err::PrecisionExhausted, "division by p^" + std::to_string(e) + " is not exact");
  Block r = a;
  const i64 q = ipow(a.b.p, e);
  for (auto& x : r.c) x /= q;
  r.k = a.k - e;
  r.normalize();
  return r;
}

bool equal_at(const Block& a, const Block& b) {
  check_same(a, b);
  const int k = std::min(a.k, b.k);
  const i64 m = a.b.modulus(k);
  for (size_t i = 0; i < a.c.size(); ++i)
    if (pmod(a.c[i] - b.c[i], m) != 0) return false;
  return true;
}

i64 int_value(const Block& a, int slot, int i) {
  const i64 r = a.at(slot, i);
  const i64 s = a.b.scale();
  if (r % s != 0) fail(Err::IntegralityFailure, "coefficient is not integral");
  return pmod(r / s, ipow(a.b.p, a.k));
}

Block block_mul(const Block& a, const Block& b, const int* table, int order) {
  check_same(a, b);
  if (a.slots != order) fail(Err::BudgetMismatch, "slot count does not match the group");
  const int n = a.b.n;
  std::vector<i128> acc(static_cast<size_t>(order) * n, 0);
  for (int g = 0; g < order; ++g) {
    const i64* ag = &a.c[static_cast<size_t>(g) * n];
    bool nz = false;
    for (int i = 0; i < n; ++i) nz = nz || ag[i] != 0;
    if (!nz) continue;
    for (int h = 0; h < order; ++h) {
      const i64* bh = &b.c[static_cast<size_t>(h) * n];
      const int t = table ? table[static_cast<size_t>(g) * order + h] : 0;
      i128* out = &acc[static_cast<size_t>(t) * n];
      for (int i = 0; i < n; ++i) {
        if (ag[i] == 0) continue;
        for (int j = 0; i + j < n; ++j) out[i + j] += i128(ag[i]) * bh[j];
      }
    }
  }
  Block r = zero_block(a.b, order);
  const int va = a.valuation(), vb = b.valuation();
  r.k = std::min({a.b.M, a.k + vb, b.k + va});
  if (r.k < 1) fail(Err::PrecisionExhausted, "product precision dropped below 1");
  const i64 s = a.b.scale();
  const i64 m = a.b.modulus(r.k);
  for (size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] % s != 0) fail(Err::PrecisionExhausted, "product denominator exceeds p^B");
    r.c[i] = static_cast<i64>(pmod128(acc[i] / s, m));
  }
  return r;
}

// ---------------------------------------------------------------- Series

Series Series::zero(const Budget& b) { return Series(zero_block(b, 1)); }

Series Series::constant(const Budget& b, i64 v) {
  Series s = zero(b);
  s.c[0] = mulmod(pmod(v, b.full_modulus()), b.scale(), b.full_modulus());
  return s;
}

Series Series::one(const Budget& b) { return constant(b, 1); }

Series Series::T(const Budget& b) { return from_ints(b, {0, 1}); }

Series Series::from_ints(const Budget& b, const std::vector<i64>& v) {
  Series s = zero(b);
  const i64 m = b.full_modulus();
  for (int i = 0; i < b.n && i < static_cast<int>(v.size()); ++i)
    s.c[i] = mulmod(pmod(v[i], m), b.scale(), m);
  return s;
}

std::vector<i64> Series::int_coeffs() const {
  std::vector<i64> out(b.n);
  for (int i = 0; i < b.n; ++i) out[i] = coeff_int(i);
  return out;
}

Series operator+(const Series& a, const Series& b) {
  Series r = a;
  add_into(r, b, 1);
  return r;
}
Series operator-(const Series& a, const Series& b) {
  Series r = a;
  add_into(r, b, -1);
  return r;
}
Series operator-(const Series& a) { return Series(scale_int(a, -1)); }
Series operator*(const Series& a, const Series& b) { return Series(block_mul(a, b, nullptr, 1)); }
bool operator==(const Series& a, const Series& b) { return equal_at(a, b); }

Series series_pow(const Series& a, i64 e) { return Series(ring_pow(a, e, nullptr, 1, 0)); }

Series series_invert(const Series& a) {
  if (!a.integral() || pmod(int_value(a, 0, 0), a.b.p) == 0)
    fail(Err::NotAUnit, "constant term is not a p-adic unit");
  return Series(ring_inverse(a, nullptr, 1, 0));
}

Series frobenius_gamma(const Series& a) {
  const Budget& b = a.b;
  const i64 m = b.modulus(a.k);
  // powers of (1+T)^p - 1 with integer coefficients
  std::vector<i64> ph(b.n, 0);
  for (int i = 1; i < b.n && i <= b.p; ++i) ph[i] = pmod(binom(b.p, i), m);
  std::vector<i64> pw(b.n, 0);
  pw[0] = 1;
  Series r = Series::zero(b);
  r.k = a.k;
  for (int i = 0; i < b.n; ++i) {
    if (a.c[i] != 0)
      for (int j = 0; j < b.n; ++j) r.c[j] = pmod(r.c[j] + static_cast<i64>(pmod128(i128(a.c[i]) * pw[j], m)), m);
    std::vector<i64> nx(b.n, 0);
    for (int s = 0; s < b.n; ++s) {
      if (pw[s] == 0) continue;
      for (int t = 1; s + t < b.n; ++t) nx[s + t] = pmod(nx[s + t] + mulmod(pw[s], ph[t], m), m);
    }
    pw = nx;
  }
  r.normalize();
  return r;
}

Series series_log(const Series& u) { return Series(ring_log(u, nullptr, 1, 0)); }

Series series_exp(const Series& x) {
  if (!x.b.exp_ok()) fail(Err::PrecisionExhausted, "exp needs B >= floor((n-1)/(p-1))");
  if (x.c[0] != 0 && vp(x.c[0], x.b.p) - x.b.B < 1)
    fail(Err::OutOfDomain, "exp needs a constant term in p*Z_p");
  return Series(ring_exp(x, nullptr, 1, 0));
}

std::optional<Series> series_divide(const Series& a, const Series& d) {
  check_same(a, d);
  if (!d.integral()) fail(Err::InvalidInput, "divisor must be integral");
  const Budget& b = a.b;
  const int k = std::min(a.k, d.k);
  const int n = b.n;
  std::vector<std::vector<i64>> A(n, std::vector<i64>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) A[i][j] = int_value(d, 0, i - j);
  std::vector<i64> rhs(a.c.begin(), a.c.end());
  auto sol = solve_mod_pk(A, rhs, b.p, k + b.B);
  if (!sol) return std::nullopt;
  // lower bounds for v_p of the coefficients of 1/d; the quotient is only pinned down
  // mod p^{k - loss}, loss = -min of these
  std::vector<int> vd(n), vinv(n);
  for (int i = 0; i < n; ++i) {
    const i64 c = int_value(d, 0, i);
    vd[i] = c == 0 ? k : std::min(k, vp(c, b.p));
  }
  int loss = vd[0];
  vinv[0] = -vd[0];
  for (int i = 1; i < n && loss < k; ++i) {
    int m = k;
    for (int j = 1; j <= i; ++j) m = std::min(m, vd[j] + vinv[i - j]);
    vinv[i] = m - vd[0];
    loss = std::max(loss, -vinv[i]);
  }
  if (k - loss < 1) fail(Err::PrecisionExhausted, "quotient has no known p-adic digits; raise the precision");
  Series q = Series::zero(b);
  q.k = k - loss;
  for (int i = 0; i < n; ++i) q.c[i] = (*sol)[i];
  q.normalize();
  return q;
}

i64 series_at_zero(const Series& a) { return int_value(a, 0, 0); }

// ---------------------------------------------------------------- Localized

bool in_p_lambda(const Series& s) { return s.valuation() >= 1; }

Localized Localized::of(const Series& a) { return {a, Series::one(a.b)}; }

Localized Localized::make(const Series& num, const Series& den) {
  check_same(num, den);
  if (!den.integral() || in_p_lambda(den)) fail(Err::NotSInvertible, "denominator lies in p*Lambda");
  return {num, den};
}

Localized loc_add(const Localized& a, const Localized& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

Localized loc_mul(const Localized& a, const Localized& b) { return {a.num * b.num, a.den * b.den}; }

Localized loc_invert(const Localized& a) {
  if (!a.num.integral() || in_p_lambda(a.num)) fail(Err::NotSInvertible, "numerator lies in p*Lambda");
  return {a.den, a.num};
}

bool loc_equal(const Localized& a, const Localized& b) { return a.num * b.den == b.num * a.den; }

// ---------------------------------------------------------------- Cyclo

Cyclo Cyclo::zero(int p, int M) {
  Cyclo z;
  z.p = p;
  z.M = M;
  z.k = M;
  z.c.assign(p - 1, 0);
  return z;
}

Cyclo Cyclo::integer(int p, int M, i64 v) {
  Cyclo z = zero(p, M);
  z.c[0] = pmod(v, ipow(p, M));
  return z;
}

Cyclo Cyclo::one(int p, int M) { return integer(p, M, 1); }

Cyclo Cyclo::zeta_pow(int p, int M, i64 e) {
  e = pmod(e, p);
  Cyclo z = zero(p, M);
  const i64 m = ipow(p, M);
  if (e < p - 1) {
    z.c[e] = 1;
  } else {
    for (auto& x : z.c) x = m - 1;
  }
  return z;
}

bool Cyclo::is_unit() const {
  i64 s = 0;
  for (i64 x : c) s += x;
  return pmod(s, p) != 0;
}

bool Cyclo::operator==(const Cyclo& o) const {
  const i64 m = ipow(p, std::min(k, o.k));
  for (size_t i = 0; i < c.size(); ++i)
    if (pmod(c[i] - o.c[i], m) != 0) return false;
  return true;
}

static Cyclo cyc_norm(Cyclo z) {
  const i64 m = ipow(z.p, z.k);
  for (auto& x : z.c) x = pmod(x, m);
  return z;
}

Cyclo operator+(const Cyclo& a, const Cyclo& b) {
  Cyclo r = a;
  r.k = std::min(a.k, b.k);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return cyc_norm(r);
}

Cyclo operator-(const Cyclo& a, const Cyclo& b) {
  Cyclo r = a;
  r.k = std::min(a.k, b.k);
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return cyc_norm(r);
}

Cyclo operator*(const Cyclo& a, const Cyclo& b) {
  const int d = a.p - 1;
  Cyclo r = a;
  r.k = std::min(a.k, b.k);
  const i64 m = ipow(a.p, r.k);
  std::vector<i64> t(2 * d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t[i + j] = pmod(t[i + j] + mulmod(a.c[i], b.c[j], m), m);
  for (int e = 2 * d - 1; e >= d; --e) {
    const i64 v = t[e];
    t[e] = 0;
    if (v == 0) continue;
    for (int i = 0; i < d; ++i) t[e - d + i] = pmod(t[e - d + i] - v, m);
  }
  for (int i = 0; i < d; ++i) r.c[i] = t[i];
  return r;
}

Cyclo cyclo_invert(const Cyclo& a) {
  if (!a.is_unit()) fail(Err::NotAUnit, "cyclotomic value is not a unit");
  i64 s = 0;
  for (i64 x : a.c) s += x;
  Cyclo z = Cyclo::integer(a.p, a.M, invmod(pmod(s, a.p), a.p));
  z.k = a.k;
  const Cyclo two = Cyclo::integer(a.p, a.M, 2);
  for (int it = 0; it < 64; ++it) {
    const Cyclo e = a * z;
    if (e == Cyclo::one(a.p, a.M)) return z;
    z = z * (two - e);
  }
  fail(Err::PrecisionExhausted, "cyclotomic inverse did not converge");
}

Cyclo cyclo_pow(const Cyclo& a, i64 e) {
  Cyclo r = Cyclo::one(a.p, a.M), b = a;
  r.k = a.k;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------- linear solve

std::optional<std::vector<i64>> solve_mod_pk(std::vector<std::vector<i64>> A, std::vector<i64> b, int p,
                                             int k, int* max_pivot) {
  const i64 m = ipow(p, k);
  const int rows = static_cast<int>(A.size());
  const int cols = rows ? static_cast<int>(A[0].size()) : 0;
  for (auto& row : A)
    for (auto& x : row) x = pmod(x, m);
  for (auto& x : b) x = pmod(x, m);
  // Q tracks column operations: x = Q y
  std::vector<std::vector<i64>> Q(cols, std::vector<i64>(cols, 0));
  for (int i = 0; i < cols; ++i) Q[i][i] = 1;
  int r = 0;
  std::vector<int> pivv;
  for (; r < std::min(rows, cols); ++r) {
    int bi = -1, bj = -1, bv = k;
    for (int i = r; i < rows; ++i)
      for (int j = r; j < cols; ++j)
        if (A[i][j] != 0) {
          const int v = vp(A[i][j], p);
          if (v < bv) {
            bv = v;
            bi = i;
            bj = j;
          }
        }
    if (bi < 0) break;
    std::swap(A[r], A[bi]);
    std::swap(b[r], b[bi]);
    for (int i = 0; i < rows; ++i) std::swap(A[i][r], A[i][bj]);
    for (int i = 0; i < cols; ++i) std::swap(Q[i][r], Q[i][bj]);
    const i64 pv = ipow(p, bv);
    const i64 u = invmod(A[r][r] / pv, m);
    for (int i = 0; i < rows; ++i) {
      if (i == r || A[i][r] == 0) continue;
      const i64 f = mulmod(A[i][r] / pv, u, m);
      for (int j = r; j < cols; ++j) A[i][j] = pmod(A[i][j] - mulmod(f, A[r][j], m), m);
      b[i] = pmod(b[i] - mulmod(f, b[r], m), m);
    }
    for (int j = r + 1; j < cols; ++j) {
      if (A[r][j] == 0) continue;
      const i64 f = mulmod(A[r][j] / pv, u, m);
      for (int i = 0; i < rows; ++i) A[i][j] = pmod(A[i][j] - mulmod(f, A[i][r], m), m);
      for (int i = 0; i < cols; ++i) Q[i][j] = pmod(Q[i][j] - mulmod(f, Q[i][r], m), m);
    }
    pivv.push_back(bv);
  }
  if (max_pivot) *max_pivot = r < cols ? k : (pivv.empty() ? 0 : *std::max_element(pivv.begin(), pivv.end()));
  std::vector<i64> y(cols, 0);
  for (int i = 0; i < rows; ++i) {
    if (i < r) {
      const int v = pivv[i];
      const i64 pv = ipow(p, v);
      if (b[i] % pv != 0) return std::nullopt;
      y[i] = mulmod(b[i] / pv, invmod(A[i][i] / pv, m), m);
    } else if (b[i] != 0) {
      return std::nullopt;
    }
  }
  std::vector<i64> x(cols, 0);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < cols; ++j) x[i] = pmod(x[i] + mulmod(Q[i][j], y[j], m), m);
  return x;
}

// ---------------------------------------------------------------- wide rings

WideRing make_wide(int p, int n, int order, const int* table, int id, int W) {
  if (W > max_wide_digits(p)) fail(Err::PrecisionExhausted, "working modulus exceeds the word size");
  WideRing R;
  R.p = p;
  R.n = n;
  R.order = order;
  R.table = table;
  R.id = id;
  R.W = W;
  R.mod = ipow(p, W);
  return R;
}

std::vector<i64> wide_mul(const WideRing& R, const std::vector<i64>& a, const std::vector<i64>& b) {
  const int n = R.n, order = R.order;
  std::vector<i128> acc(R.size(), 0);
  for (int g = 0; g < order; ++g) {
    const i64* ag = &a[static_cast<size_t>(g) * n];
    bool nz = false;
    for (int i = 0; i < n; ++i) nz = nz || ag[i] != 0;
    if (!nz) continue;
    for (int h = 0; h < order; ++h) {
      const i64* bh = &b[static_cast<size_t>(h) * n];
      const int t = R.table ? R.table[static_cast<size_t>(g) * order + h] : 0;
      i128* out = &acc[static_cast<size_t>(t) * n];
      for (int i = 0; i < n; ++i) {
        if (ag[i] == 0) continue;
        for (int j = 0; i + j < n; ++j) out[i + j] += i128(ag[i]) * bh[j];
      }
    }
  }
  std::vector<i64> r(R.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = static_cast<i64>(pmod128(acc[i], R.mod));
  return r;
}

std::vector<i64> wide_one(const WideRing& R) {
  std::vector<i64> r(R.size(), 0);
  r[static_cast<size_t>(R.id) * R.n] = 1;
  return r;
}

int wide_val(const WideRing& R, const std::vector<i64>& a) {
  int v = R.W;
  for (i64 x : a)
    if (x != 0) v = std::min(v, vp(x, R.p));
  return v;
}

std::vector<i64> wide_from_block(const WideRing& R, const Block& a) {
  std::vector<i64> r(R.size());
  for (int s = 0; s < a.slots; ++s)
    for (int i = 0; i < a.b.n; ++i) r[static_cast<size_t>(s) * R.n + i] = pmod(int_value(a, s, i), R.mod);
  return r;
}

static std::vector<i64> wide_pow(const WideRing& R, std::vector<i64> a, i64 e) {
  std::vector<i64> r = wide_one(R);
  while (e > 0) {
    if (e & 1) r = wide_mul(R, r, a);
    e >>= 1;
    if (e) a = wide_mul(R, a, a);
  }
  return r;
}

Block ring_one(const Budget& b, int order, int id) {
  Block r = zero_block(b, order);
  r.at(id, 0) = b.scale() % b.full_modulus();
  return r;
}

i64 aug_residue(const Block& x) {
  i64 s = 0;
  for (int g = 0; g < x.slots; ++g) s += pmod(int_value(x, g, 0), x.b.p);
  return pmod(s, x.b.p);
}

Block ring_pow(const Block& x, i64 e, const int* table, int order, int id) {
  Block r = ring_one(x.b, order, id);
  Block a = x;
  while (e > 0) {
    if (e & 1) r = block_mul(r, a, table, order);
    e >>= 1;
    if (e) a = block_mul(a, a, table, order);
  }
  return r;
}

Block ring_inverse(const Block& x, const int* table, int order, int id) {
  if (!x.integral()) fail(Err::NotAUnit, "non-integral element");
  const i64 a = aug_residue(x);
  if (a == 0) fail(Err::NotAUnit, "augmentation vanishes modulo p");
  const Budget& b = x.b;
  Block z = zero_block(b, order);
  z.at(id, 0) = mulmod(invmod(a, b.p), b.scale(), b.full_modulus());
  const Block one = ring_one(b, order, id);
  Block two = scale_int(one, 2);
  for (int it = 0; it < 80; ++it) {
    Block e = block_mul(x, z, table, order);
    if (equal_at(e, one) && e.k >= x.k) {
      z.k = std::min(z.k, x.k);
      z.normalize();
      return z;
    }
    Block d = two;
    add_into(d, e, -1);
    z = block_mul(z, d, table, order);
    z.k = std::max(z.k, std::min(x.k, b.M));
    z.normalize();
  }
  fail(Err::PrecisionExhausted, "inverse iteration did not converge");
}

Block ring_log(const Block& x, const int* table, int order, int id) {
  const Budget& b = x.b;
  if (!x.integral()) fail(Err::OutOfDomain, "log needs an integral argument");
  if (aug_residue(x) != 1) fail(Err::OutOfDomain, "log needs x = 1 modulo the maximal ideal");
  const int p = b.p, n = b.n;
  // find K with x^{p^K} = 1 mod p
  const WideRing R1 = make_wide(p, n, order, table, id, 1);
  std::vector<i64> y = wide_from_block(R1, x);
  const std::vector<i64> one1 = wide_one(R1);
  int K = 0;
  while (y != one1) {
    y = wide_pow(R1, y, p);
    if (++K > 40) fail(Err::OutOfDomain, "x is not unipotent modulo p");
  }
  const int need = b.M + K;
  int guard = 1;
  while (ipow(p, guard) <= 4 * (need + 8)) ++guard;
  const int W = need + guard;
  const WideRing R = make_wide(p, n, order, table, id, W);
  std::vector<i64> z = wide_from_block(R, x);
  for (int i = 0; i < K; ++i) z = wide_pow(R, z, p);
  const std::vector<i64> oneW = wide_one(R);
  for (size_t i = 0; i < z.size(); ++i) z[i] = pmod(z[i] - oneW[i], R.mod);
  if (wide_val(R, z) < 1) fail(Err::OutOfDomain, "x^{p^K} - 1 not in p*Lambda");
  std::vector<i64> L(R.size(), 0), zm = z;
  for (int m = 1;; ++m) {
    int lg = 0;
    for (i64 q = p; q <= m; q *= p) ++lg;
    if (m - lg >= W) break;
    const int v = vp(m, p);
    const i64 pv = ipow(p, v);
    const i64 inv = invmod(m / pv, R.mod);
    const i64 sgn = (m % 2 == 1) ? 1 : -1;
    for (size_t i = 0; i < L.size(); ++i) {
      if (zm[i] % pv != 0) fail(Err::PrecisionExhausted, "log term not divisible");
      L[i] = pmod(L[i] + sgn * mulmod(zm[i] / pv, inv, R.mod), R.mod);
    }
    zm = wide_mul(R, zm, z);
  }
  // L = p^K log x, known mod p^need
  Block r = zero_block(b, order);
  r.k = std::min(x.k, b.M);
  const i64 out_mod = b.modulus(r.k);
  for (size_t i = 0; i < L.size(); ++i) {
    i64 v = pmod(L[i], ipow(p, need));
    if (K <= b.B) {
      v = mulmod(v, ipow(p, b.B - K), ipow(p, need + b.B - K));
    } else {
      const i64 q = ipow(p, K - b.B);
      if (v % q != 0) fail(Err::PrecisionExhausted, "log denominator exceeds p^B");
      v /= q;
    }
    r.c[i] = pmod(v, out_mod);
  }
  r.normalize();
  return r;
}

static Block rebudget(const Block& a, const Budget& nb) {
  Block r = zero_block(nb, a.slots);
  r.k = std::min(a.k, nb.M);
  const i64 m = nb.modulus(r.k);
  for (size_t i = 0; i < a.c.size(); ++i) {
    i64 v = a.c[i];
    if (nb.B >= a.b.B) {
      v = static_cast<i64>(pmod128(i128(v) * ipow(a.b.p, nb.B - a.b.B), m));
    } else {
      const i64 q = ipow(a.b.p, a.b.B - nb.B);
      if (v % q != 0) fail(Err::PrecisionExhausted, "result denominator exceeds p^B");
      v = pmod(v / q, m);
    }
    r.c[i] = v;
  }
  r.normalize();
  return r;
}

static int vfact(i64 m, int p) {
  int v = 0;
  for (i64 q = p; q <= m; q *= p) v += static_cast<int>(m / q);
  return v;
}

// Internal exact-mode product: inputs are treated as exact, so k is pinned to M.
// Truncation error stays at p^M of the enlarged internal budget.
static Block mul_exact(const Block& a, const Block& b, const int* table, int order) {
  Block x = a, y = b;
  x.k = y.k = a.b.M;
  Block r = block_mul(x, y, table, order);
  r.k = a.b.M;
  return r;
}

// t / m in exact mode (the p-part of m must divide t)
static Block div_int_exact(const Block& t, i64 m) {
  const int p = t.b.p;
  const int v = vp(m, p);
  i64 u = m;
  while (u % p == 0) u /= p;
  const i64 q = ipow(p, v);
  Block r = t;
  const i64 mod = t.b.full_modulus();
  for (auto& x : r.c) {
    if (x % q != 0) fail(Err::PrecisionExhausted, "exp term denominator exceeds the internal budget");
    x = mulmod(x / q, invmod(u, mod), mod);
  }
  r.k = t.b.M;
  return r;
}

// exp of x with only constant coefficients; tail controlled by observed valuations of x^m
static Block exp_constant_part(const Block& x0, const int* table, int order, int id, int target) {
  const Budget& b = x0.b;
  const int p = b.p;
  Block sum = ring_one(b, order, id);
  Block term = ring_one(b, order, id);
  Block pw = ring_one(b, order, id);
  std::vector<int> vals{0};
  for (i64 m = 1; m < 4000; ++m) {
    pw = mul_exact(pw, x0, table, order);
    vals.push_back(pw.valuation());
    term = div_int_exact(mul_exact(term, x0, table, order), m);
    add_into(sum, term, 1);
    double best = 0;
    int besta = 1;
    for (int a = 1; a <= static_cast<int>(m); ++a)
      if (static_cast<double>(vals[a]) / a > best) {
        best = static_cast<double>(vals[a]) / a;
        besta = a;
      }
    if (best <= 1.0 / (p - 1) + 1e-9) continue;
    bool ok = true;
    for (i64 t = m + 1; t <= 8 * m + 8 && ok; ++t) {
      const i64 lb = (t / besta) * static_cast<i64>(vals[besta]) - vfact(t, p);
      if (lb < target) ok = false;
    }
    const double slope = best - 1.0 / (p - 1);
    if (ok && slope * (8 * m + 8) - vals[besta] - 1 >= target) return sum;
  }
  fail(Err::OutOfDomain, "exponential series does not converge");
}

Block ring_exp(const Block& x, const int* table, int order, int id) {
  const Budget& b = x.b;
  const int p = b.p;
  Budget bi = b;
  bi.B = b.B + b.n;
  bi.M = max_wide_digits(p) - bi.B;
  if (bi.M < b.M + 4) fail(Err::PrecisionExhausted, "internal exp budget too small");
  // computed as if exact; exp(x + d) = exp(x) exp(d) bounds the true loss afterwards
  Block X = rebudget(x, bi);
  X.k = bi.M;
  Block X0 = zero_block(bi, order), XT = zero_block(bi, order);
  for (int g = 0; g < order; ++g)
    for (int i = 0; i < b.n; ++i) (i == 0 ? X0 : XT).at(g, i) = X.at(g, i);
  const bool has0 = !X0.is_zero(), hasT = !XT.is_zero();
  if (has0 && hasT && table) {
    for (int g = 0; g < order; ++g)
      for (int h = 0; h < order; ++h)
        if (table[g * order + h] != table[h * order + g])
          fail(Err::Unsupported, "exp splitting needs a commutative group ring");
  }
  // T-part is nilpotent: finite sum
  Block ET = ring_one(bi, order, id), term = ring_one(bi, order, id);
  if (hasT) {
    for (int m = 1; m < b.n; ++m) {
      term = div_int_exact(mul_exact(term, XT, table, order), m);
      add_into(ET, term, 1);
    }
  }
  const int dET = std::max(0, -ET.valuation());
  Block E0 = has0 ? exp_constant_part(X0, table, order, id, b.M + dET + 1) : ring_one(bi, order, id);
  Block R = mul_exact(E0, ET, table, order);
  const int vR = R.valuation();
  Block out = rebudget(R, b);
  out.k = std::min(b.M, x.k + std::min(0, vR));
  out.normalize();
  return out;
}

}  // namespace iwt
