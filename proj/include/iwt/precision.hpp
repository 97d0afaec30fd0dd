#pragma once
#include <optional>
#include <string>
#include <vector>

#include "iwt/common.hpp"

namespace iwt {

struct Budget {
  int p = 3;
  int M = 6;  // p-adic precision
  int n = 8;  // T-adic truncation
  int B = 4;  // allowed power of p in denominators
  void validate() const;
  i64 scale() const { return ipow(p, B); }
  i64 modulus(int k) const { return ipow(p, k + B); }
  i64 full_modulus() const { return modulus(M); }
  bool exp_ok() const { return B >= (n - 1) / (p - 1); }
  bool operator==(const Budget&) const = default;
  std::string str() const;
};

// Flat storage shared by series, group ring elements and class vectors:
// `slots` consecutive blocks of n residues r with value r/p^B known mod p^k.
struct Block {
  Budget b;
  int k = 0;
  int slots = 1;
  std::vector<i64> c;

  i64 at(int slot, int i) const { return c[static_cast<size_t>(slot) * b.n + i]; }
  i64& at(int slot, int i) { return c[static_cast<size_t>(slot) * b.n + i]; }
  void normalize();
  bool is_zero() const;
  // min over coefficients of v_p(value), capped at k
  int valuation() const;
  bool integral() const { return valuation() >= 0; }
};

Block zero_block(const Budget& b, int slots, int k = -1);
void check_same(const Block& a, const Block& b);
void add_into(Block& a, const Block& b, i64 sign = 1);
Block with_precision(const Block& a, int k);
// exact integer multiple
Block scale_int(const Block& a, i64 s);
Block mul_p_pow(const Block& a, int e);
// throws PrecisionExhausted unless every residue is divisible by p^e
Block div_p_pow(const Block& a, int e);
bool divisible_p_pow(const Block& a, int e);
// equality of canonical residues at the smaller known precision
bool equal_at(const Block& a, const Block& b);
// value of one coefficient as an integer mod p^k (coefficient must be integral)
i64 int_value(const Block& a, int slot, int i);

// (p,M,n,B) product kernel: out[table[g][h]] += a[g]*b[h] as truncated series.
// table == nullptr means a single slot.
Block block_mul(const Block& a, const Block& b, const int* table, int order);

struct Series : Block {
  Series() = default;
  explicit Series(const Block& bl) : Block(bl) {}
  static Series zero(const Budget& b);
  static Series one(const Budget& b);
  static Series constant(const Budget& b, i64 v);
  static Series T(const Budget& b);
  // integer coefficients c_0, c_1, ...
  static Series from_ints(const Budget& b, const std::vector<i64>& v);
  i64 coeff_int(int i) const { return int_value(*this, 0, i); }
  std::vector<i64> int_coeffs() const;
};

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator-(const Series& a);
Series operator*(const Series& a, const Series& b);
bool operator==(const Series& a, const Series& b);
Series series_pow(const Series& a, i64 e);
Series series_invert(const Series& a);
// a((1+T)^p - 1)
Series frobenius_gamma(const Series& a);
Series series_log(const Series& u);
Series series_exp(const Series& x);
// d·q ≡ a mod (p^k, T^n) solved by elimination over Z/p^k; nullopt if no solution.
std::optional<Series> series_divide(const Series& a, const Series& d);
// evaluation a(0) mod p^k (integral)
i64 series_at_zero(const Series& a);

struct Localized {
  Series num, den;
  static Localized of(const Series& a);
  static Localized make(const Series& num, const Series& den);
};
bool in_p_lambda(const Series& s);
Localized loc_add(const Localized& a, const Localized& b);
Localized loc_mul(const Localized& a, const Localized& b);
Localized loc_invert(const Localized& a);
bool loc_equal(const Localized& a, const Localized& b);

// Z_p[zeta_p] = Z_p[X]/(1+X+...+X^{p-1}), coordinates of 1, X, ..., X^{p-2} mod p^k
struct Cyclo {
  int p = 3;
  int M = 6;
  int k = 6;
  std::vector<i64> c;
  static Cyclo zero(int p, int M);
  static Cyclo one(int p, int M);
  static Cyclo zeta_pow(int p, int M, i64 e);
  static Cyclo integer(int p, int M, i64 v);
  bool is_unit() const;
  bool operator==(const Cyclo& o) const;
};
Cyclo operator+(const Cyclo& a, const Cyclo& b);
Cyclo operator-(const Cyclo& a, const Cyclo& b);
Cyclo operator*(const Cyclo& a, const Cyclo& b);
Cyclo cyclo_invert(const Cyclo& a);
Cyclo cyclo_pow(const Cyclo& a, i64 e);

// Solve A x ≡ b (mod p^k) via a Smith-type reduction; nullopt if inconsistent.
// max_pivot receives the largest invariant-factor valuation (k when A is rank deficient).
std::optional<std::vector<i64>> solve_mod_pk(std::vector<std::vector<i64>> A, std::vector<i64> b, int p,
                                             int k, int* max_pivot = nullptr);

// Wide integral arithmetic used by log/exp/power: residues mod p^W, no denominators.
struct WideRing {
  int p = 3;
  int n = 8;
  int order = 1;
  const int* table = nullptr;
  int id = 0;
  int W = 0;
  i64 mod = 1;
  size_t size() const { return static_cast<size_t>(order) * n; }
};
WideRing make_wide(int p, int n, int order, const int* table, int id, int W);
std::vector<i64> wide_mul(const WideRing& R, const std::vector<i64>& a, const std::vector<i64>& b);
std::vector<i64> wide_one(const WideRing& R);
int wide_val(const WideRing& R, const std::vector<i64>& a);
std::vector<i64> wide_from_block(const WideRing& R, const Block& a);

// Generic truncated log/exp/inverse/power over a (group) ring given by a table.
Block ring_log(const Block& x, const int* table, int order, int id);
Block ring_exp(const Block& x, const int* table, int order, int id);
Block ring_inverse(const Block& x, const int* table, int order, int id);
Block ring_pow(const Block& x, i64 e, const int* table, int order, int id);
Block ring_one(const Budget& b, int order, int id);
// constant term of the augmentation, mod p (x integral)
i64 aug_residue(const Block& x);

}  // namespace iwt
