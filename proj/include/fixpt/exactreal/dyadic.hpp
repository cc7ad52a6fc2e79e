#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

namespace fixpt::exactreal {

/// Precision index: an approximation at precision n is within 2^-n.
using Precision = int;

/// Exact binary rational m * 2^e with arbitrary-precision mantissa.
///
/// Always stored canonically: the mantissa is odd, or zero with exponent 0,
/// so structural equality is numeric equality.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT: integers convert implicitly
  Dyadic(int value) : Dyadic(static_cast<long>(value)) {}  // NOLINT
  Dyadic(mpz_class mantissa, std::int64_t exponent);

  static Dyadic pow2(std::int64_t k);
  /// Exact value of a finite double.
  static Dyadic from_double(double value);
  /// Parses the exact notation produced by str(): "5", "-3/8", "7*2^-90".
  static Dyadic parse(const std::string& text);

  const mpz_class& mantissa() const { return m_; }
  std::int64_t exponent() const { return e_; }
  int sign() const { return sgn(m_); }
  bool is_zero() const { return sgn(m_) == 0; }
  /// floor(log2 |x|). Undefined for zero.
  std::int64_t msb() const;

  Dyadic operator-() const;
  Dyadic& operator+=(const Dyadic& other);
  Dyadic& operator-=(const Dyadic& other);
  Dyadic& operator*=(const Dyadic& other);
  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

  Dyadic abs() const;
  /// x * 2^k.
  Dyadic shifted(std::int64_t k) const;
  Dyadic half() const { return shifted(-1); }

  /// Largest multiple of 2^-n not above x.
  Dyadic floor_to(Precision n) const;
  /// Smallest multiple of 2^-n not below x.
  Dyadic ceil_to(Precision n) const;
  /// Nearest multiple of 2^-n (ties upward); error at most 2^-(n+1).
  Dyadic round_to(Precision n) const;
  /// Smallest integer k with |x| <= 2^k. Returns a large negative number for 0.
  std::int64_t ceil_log2_abs() const;
  /// floor(x) as a machine integer; throws DomainError when it does not fit.
  std::int64_t floor_int() const;

  double to_double() const;
  /// Decimal rendering with the given number of significant digits.
  std::string decimal(int digits = 12) const;
  /// Exact rendering: "5", "-3/8" or "7*2^-90".
  std::string str() const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.e_ == b.e_ && a.m_ == b.m_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  void normalize();

  mpz_class m_;
  std::int64_t e_ = 0;
};

Dyadic min(const Dyadic& a, const Dyadic& b);
Dyadic max(const Dyadic& a, const Dyadic& b);

/// q with |q - a/b| < 2^-n (floor of the quotient on the 2^-n grid). b != 0.
Dyadic div_approx(const Dyadic& a, const Dyadic& b, Precision n);
/// Largest multiple of 2^-n not above sqrt(a). a >= 0.
Dyadic sqrt_floor(const Dyadic& a, Precision n);
/// Smallest multiple of 2^-n not below sqrt(a). a >= 0.
Dyadic sqrt_ceil(const Dyadic& a, Precision n);

}  // namespace fixpt::exactreal
