#pragma once
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace iwt {

using i64 = std::int64_t;
using i128 = __int128;

enum class Err {
  BudgetMismatch,
  NotAUnit,
  OutOfDomain,
  PrecisionExhausted,
  NotSInvertible,
  ExponentViolation,
  NotASubgroup,
  NotNormal,
  AbelianInput,
  NotIndexP,
  NotAbelian,
  NotInPhi,
  NotInPhiB,
  Inconsistent,
  NotInPhiRW,
  ExcludedTotalGroup,
  IntegralityFailure,
  NotInImage,
  SingularMatrix,
  BadCharacter,
  NotIntegral,
  NotInPsi,
  OracleGap,
  HypothesisFails,
  ProviderGap,
  Case2ChainFailure,
  Unsupported,
  InvalidInput,
  Io,
};

const char* err_name(Err e);

// 1 = precision/domain, 2 = mathematical check, 3 = input
int exit_code_for(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& msg);

// exact p^e, throws if it leaves 63 bits
i64 ipow(i64 b, int e);
// v_p(x) for x != 0; returns cap when x == 0
int vp(i64 x, int p, int cap = 1 << 20);
i64 pmod(i64 a, i64 m);
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 a, i64 e, i64 m);
// inverse of a unit modulo m
i64 invmod(i64 a, i64 m);
i128 pmod128(i128 a, i64 m);
bool is_prime(i64 x);
i64 binom(i64 n, i64 k);

// digits of p that still keep p^W below 2^56 (safe i128 accumulation)
int max_wide_digits(int p);

// deterministic RNG; plain modulo mapping keeps streams identical across libraries
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  i64 below(i64 m) { return static_cast<i64>(eng_() % static_cast<std::uint64_t>(m)); }
  bool coin() { return (eng_() & 1) != 0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace iwt
