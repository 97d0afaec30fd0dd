#include "iwt/common.hpp"

namespace iwt {

const char* err_name(Err e) {
  switch (e) {
    case Err::BudgetMismatch: return "BUDGET_MISMATCH";
    case Err::NotAUnit: return "NOT_A_UNIT";
    case Err::OutOfDomain: return "OUT_OF_DOMAIN";
    case Err::PrecisionExhausted: return "PRECISION_EXHAUSTED";
    case Err::NotSInvertible: return "NOT_S_INVERTIBLE";
    case Err::ExponentViolation: return "EXPONENT_VIOLATION";
    case Err::NotASubgroup: return "NOT_A_SUBGROUP";
    case Err::NotNormal: return "NOT_NORMAL";
    case Err::AbelianInput: return "ABELIAN_INPUT";
    case Err::NotIndexP: return "NOT_INDEX_P";
    case Err::NotAbelian: return "NOT_ABELIAN";
    case Err::NotInPhi: return "NOT_IN_PHI";
    case Err::NotInPhiB: return "NOT_IN_PHI_B";
    case Err::Inconsistent: return "INCONSISTENT";
    case Err::NotInPhiRW: return "NOT_IN_PHI_RW";
    case Err::ExcludedTotalGroup: return "EXCLUDED_TOTAL_GROUP";
    case Err::IntegralityFailure: return "INTEGRALITY_FAILURE";
    case Err::NotInImage: return "NOT_IN_IMAGE";
    case Err::SingularMatrix: return "SINGULAR_MATRIX";
    case Err::BadCharacter: return "BAD_CHARACTER";
    case Err::NotIntegral: return "NOT_INTEGRAL";
    case Err::NotInPsi: return "NOT_IN_PSI";
    case Err::OracleGap: return "ORACLE_GAP";
    case Err::HypothesisFails: return "HYPOTHESIS_FAILS";
    case Err::ProviderGap: return "PROVIDER_GAP";
    case Err::Case2ChainFailure: return "CASE2_CHAIN_FAILURE";
    case Err::Unsupported: return "UNSUPPORTED";
    case Err::InvalidInput: return "INVALID_INPUT";
    case Err::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

int exit_code_for(Err e) {
  switch (e) {
    case Err::NotInPhi:
    case Err::NotInPhiB:
    case Err::Inconsistent:
    case Err::NotInPhiRW:
    case Err::NotInImage:
    case Err::NotIntegral:
    case Err::NotInPsi:
    case Err::HypothesisFails:
      return 2;
    case Err::ExponentViolation:
    case Err::NotASubgroup:
    case Err::NotNormal:
    case Err::AbelianInput:
    case Err::NotIndexP:
    case Err::NotAbelian:
    case Err::BadCharacter:
    case Err::OracleGap:
    case Err::ProviderGap:
    case Err::Case2ChainFailure:
    case Err::Unsupported:
    case Err::InvalidInput:
    case Err::Io:
    case Err::BudgetMismatch:
      return 3;
    default:
      return 1;
  }
}

void fail(Err code, const std::string& msg) { throw Error(code, msg); }

i64 ipow(i64 b, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > (i128(1) << 62)) fail(Err::PrecisionExhausted, "modulus exceeds 62 bits");
  }
  return static_cast<i64>(r);
}

int vp(i64 x, int p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v < cap ? v : cap;
}

i64 pmod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

i128 pmod128(i128 a, i64 m) {
  i128 r = a % m;
  return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>(pmod128(i128(a) * b, m)); }

i64 powmod(i64 a, i64 e, i64 m) {
  i64 r = 1 % m, b = pmod(a, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

i64 invmod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = pmod(a, m);
  while (a1 != 0) {
    i64 q = g / a1;
    i64 t = g - q * a1;
    g = a1;
    a1 = t;
    t = x - q * x1;
    x = x1;
    x1 = t;
  }
  if (g != 1) fail(Err::NotAUnit, "residue is not invertible");
  return pmod(x, m);
}

bool is_prime(i64 x) {
  if (x < 2) return false;
  for (i64 d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

i64 binom(i64 n, i64 k) {
  if (k < 0 || k > n) return 0;
  i128 r = 1;
  for (i64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<i64>(r);
}

int max_wide_digits(int p) {
  int w = 0;
  i128 v = 1;
  while (v * p < (i128(1) << 56)) {
    v *= p;
    ++w;
  }
  return w;
}

}  // namespace iwt
