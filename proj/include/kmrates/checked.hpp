#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace kmrates {

/// Natural numbers used for rate values and sequence indices.
using Nat = std::uint64_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integer evaluation of a rate would exceed the representable range.
/// Raised instead of wrapping, so a certificate is never silently forged.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The iteration produced a non-finite value.
class NumericAbort : public Error {
 public:
  NumericAbort(Nat index, const std::string &what)
      : Error("non-finite value at index " + std::to_string(index) + ": " +
              what),
        index_(index) {}
  Nat index() const noexcept { return index_; }

 private:
  Nat index_;
};

namespace checked {

inline Nat add(Nat a, Nat b) {
  Nat r;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError("natural addition overflow: " + std::to_string(a) +
                        " + " + std::to_string(b));
  return r;
}

inline Nat mul(Nat a, Nat b) {
  Nat r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError("natural multiplication overflow: " +
                        std::to_string(a) + " * " + std::to_string(b));
  return r;
}

inline Nat pow(Nat base, unsigned exp) {
  Nat r = 1;
  for (unsigned i = 0; i < exp; ++i) r = mul(r, base);
  return r;
}

/// Truncated subtraction max(a - b, 0).
constexpr Nat monus(Nat a, Nat b) noexcept { return a > b ? a - b : 0; }

/// Subtraction that requires a >= b.
inline Nat sub(Nat a, Nat b) {
  if (b > a)
    throw OverflowError("natural subtraction underflow: " + std::to_string(a) +
                        " - " + std::to_string(b));
  return a - b;
}

/// ceil(a / b) for b > 0.
inline Nat ceil_div(Nat a, Nat b) {
  if (b == 0) throw DomainError("ceil_div by zero");
  return a / b + (a % b != 0 ? 1 : 0);
}

/// Exact ceil(num / den) where num may need up to 128 bits.
inline Nat ceil_div_wide(unsigned __int128 num, unsigned __int128 den) {
  if (den == 0) throw DomainError("ceil_div by zero");
  unsigned __int128 q = num / den + (num % den != 0 ? 1 : 0);
  if (q > std::numeric_limits<Nat>::max())
    throw OverflowError("quotient exceeds the 64-bit natural range");
  return static_cast<Nat>(q);
}

inline unsigned __int128 mul_wide(unsigned __int128 a, unsigned __int128 b) {
  unsigned __int128 r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError("128-bit intermediate overflow");
  return r;
}

}  // namespace checked

/// Conservative ceiling of a nonnegative double.
///
/// Returns ceil(x), plus one when x sits within 8 ulps below (or on) that
/// ceiling, since the exact real value may lie just above the boundary.
/// Nonpositive inputs map to 0. Values beyond the Nat range raise.
inline Nat ceil_guarded(double x) {
  if (std::isnan(x)) throw OverflowError("ceil of NaN");
  if (x <= 0.0) return 0;
  const double c = std::ceil(x);
  // 2^64 as a double
  if (!(c < 18446744073709551616.0))
    throw OverflowError("ceil exceeds the 64-bit natural range");
  Nat n = static_cast<Nat>(c);
  const double ulp = std::nextafter(c, std::numeric_limits<double>::infinity()) - c;
  if (c - x <= 8.0 * ulp) n = checked::add(n, 1);
  return n;
}

/// Plain ceiling of a nonnegative double into Nat, range-checked.
inline Nat ceil_nat(double x) {
  if (std::isnan(x)) throw OverflowError("ceil of NaN");
  if (x <= 0.0) return 0;
  const double c = std::ceil(x);
  if (!(c < 18446744073709551616.0))
    throw OverflowError("ceil exceeds the 64-bit natural range");
  return static_cast<Nat>(c);
}

}  // namespace kmrates
