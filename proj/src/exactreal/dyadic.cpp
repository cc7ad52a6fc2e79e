#include "fixpt/exactreal/dyadic.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "fixpt/errors.hpp"

namespace fixpt::exactreal {

namespace {

mpz_class shl(const mpz_class& v, std::int64_t k) {
  mpz_class r;
  mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
  return r;
}

std::int64_t bit_length(const mpz_class& v) {
  return static_cast<std::int64_t>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

}  // namespace

Dyadic::Dyadic(long value) : m_(value), e_(0) { normalize(); }

Dyadic::Dyadic(mpz_class mantissa, std::int64_t exponent)
    : m_(std::move(mantissa)), e_(exponent) {
  normalize();
}

void Dyadic::normalize() {
  if (sgn(m_) == 0) {
    e_ = 0;
    return;
  }
  const auto tz = mpz_scan1(m_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_fdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz);
    e_ += static_cast<std::int64_t>(tz);
  }
}

Dyadic Dyadic::pow2(std::int64_t k) { return Dyadic(mpz_class(1), k); }

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite double has no dyadic value");
  if (value == 0.0) return Dyadic();
  int exp = 0;
  const double frac = std::frexp(value, &exp);
  static_assert(sizeof(long) >= 8, "53-bit mantissas must fit in long");
  const auto scaled = static_cast<long>(std::ldexp(frac, 53));
  return Dyadic(mpz_class(scaled), static_cast<std::int64_t>(exp) - 53);
}

Dyadic Dyadic::parse(const std::string& text) {
  try {
    if (auto star = text.find("*2^"); star != std::string::npos) {
      mpz_class m(text.substr(0, star), 10);
      return Dyadic(m, std::stoll(text.substr(star + 3)));
    }
    if (auto slash = text.find('/'); slash != std::string::npos) {
      mpz_class m(text.substr(0, slash), 10);
      mpz_class d(text.substr(slash + 1), 10);
      if (sgn(d) <= 0 || mpz_popcount(d.get_mpz_t()) != 1)
        throw DomainError("denominator is not a power of two: " + text);
      return Dyadic(m, -static_cast<std::int64_t>(mpz_scan1(d.get_mpz_t(), 0)));
    }
    return Dyadic(mpz_class(text, 10), 0);
  } catch (const std::invalid_argument&) {
    throw DomainError("not a dyadic literal: " + text);
  }
}

std::int64_t Dyadic::msb() const { return bit_length(m_) - 1 + e_; }

Dyadic Dyadic::operator-() const {
  Dyadic r = *this;
  r.m_ = -r.m_;
  return r;
}

Dyadic& Dyadic::operator+=(const Dyadic& other) {
  if (other.is_zero()) return *this;
  if (is_zero()) return *this = other;
  if (e_ == other.e_) {
    m_ += other.m_;
  } else if (e_ > other.e_) {
    m_ = shl(m_, e_ - other.e_) + other.m_;
    e_ = other.e_;
  } else {
    m_ += shl(other.m_, other.e_ - e_);
  }
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& other) { return *this += -other; }

Dyadic& Dyadic::operator*=(const Dyadic& other) {
  m_ *= other.m_;
  e_ += other.e_;
  normalize();
  return *this;
}

Dyadic Dyadic::abs() const {
  Dyadic r = *this;
  r.m_ = ::abs(r.m_);
  return r;
}

Dyadic Dyadic::shifted(std::int64_t k) const {
  if (is_zero()) return *this;
  Dyadic r = *this;
  r.e_ += k;
  return r;
}

Dyadic Dyadic::floor_to(Precision n) const {
  const std::int64_t target = -static_cast<std::int64_t>(n);
  if (e_ >= target || is_zero()) return *this;
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(target - e_));
  return Dyadic(q, target);
}

Dyadic Dyadic::ceil_to(Precision n) const {
  const std::int64_t target = -static_cast<std::int64_t>(n);
  if (e_ >= target || is_zero()) return *this;
  mpz_class q;
  mpz_cdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(target - e_));
  return Dyadic(q, target);
}

Dyadic Dyadic::round_to(Precision n) const {
  const std::int64_t target = -static_cast<std::int64_t>(n);
  if (e_ >= target || is_zero()) return *this;
  return (*this + pow2(target - 1)).floor_to(n);
}

std::int64_t Dyadic::ceil_log2_abs() const {
  if (is_zero()) return std::numeric_limits<std::int32_t>::min();
  const std::int64_t top = msb();
  // exact power of two iff the odd mantissa is +-1
  return (::abs(m_) == 1) ? top : top + 1;
}

std::int64_t Dyadic::floor_int() const {
  const Dyadic f = floor_to(0);
  const mpz_class v = shl(f.m_, f.e_);
  if (!v.fits_slong_p()) throw DomainError("integer part out of range: " + str());
  return v.get_si();
}

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  const std::int64_t bits = bit_length(m_);
  mpz_class top = m_;
  std::int64_t e = e_;
  if (bits > 60) {
    mpz_tdiv_q_2exp(top.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 60));
    e += bits - 60;
  }
  const double base = top.get_d();
  if (e > 4000) return base > 0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
  if (e < -4000) return 0.0;
  return std::ldexp(base, static_cast<int>(e));
}

std::string Dyadic::decimal(int digits) const {
  if (is_zero()) return "0";
  const auto prec = static_cast<mp_bitcnt_t>(bit_length(m_) + 64);
  mpf_class f(0, prec);
  mpf_set_z(f.get_mpf_t(), m_.get_mpz_t());
  if (e_ > 0) {
    mpf_mul_2exp(f.get_mpf_t(), f.get_mpf_t(), static_cast<mp_bitcnt_t>(e_));
  } else if (e_ < 0) {
    mpf_div_2exp(f.get_mpf_t(), f.get_mpf_t(), static_cast<mp_bitcnt_t>(-e_));
  }
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  gmp_snprintf(buf.data(), buf.size(), "%.*Fg", digits, f.get_mpf_t());
  return std::string(buf.data());
}

std::string Dyadic::str() const {
  if (e_ >= 0) return shl(m_, e_).get_str();
  if (e_ >= -62) return m_.get_str() + "/" + shl(mpz_class(1), -e_).get_str();
  return m_.get_str() + "*2^" + std::to_string(e_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const std::int64_t ma = a.msb();
  const std::int64_t mb = b.msb();
  if (ma != mb) return sa > 0 ? (ma <=> mb) : (mb <=> ma);
  int c = 0;
  if (a.exponent() == b.exponent()) {
    c = cmp(a.mantissa(), b.mantissa());
  } else if (a.exponent() > b.exponent()) {
    c = cmp(shl(a.mantissa(), a.exponent() - b.exponent()), b.mantissa());
  } else {
    c = cmp(a.mantissa(), shl(b.mantissa(), b.exponent() - a.exponent()));
  }
  return c <=> 0;
}

Dyadic min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

Dyadic div_approx(const Dyadic& a, const Dyadic& b, Precision n) {
  if (b.is_zero()) throw DomainError("division by zero");
  if (a.is_zero()) return Dyadic();
  // a/b = (ma/mb) * 2^(ea-eb); floor((ma/mb) * 2^(ea-eb+n)) / 2^n
  const std::int64_t s = a.exponent() - b.exponent() + n;
  mpz_class num = a.mantissa();
  mpz_class den = b.mantissa();
  if (s >= 0) {
    num = shl(num, s);
  } else {
    den = shl(den, -s);
  }
  if (sgn(den) < 0) {
    num = -num;
    den = -den;
  }
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Dyadic(q, -static_cast<std::int64_t>(n));
}

Dyadic sqrt_floor(const Dyadic& a, Precision n) {
  if (a.sign() < 0) throw DomainError("square root of a negative dyadic");
  if (a.is_zero()) return Dyadic();
  // floor(sqrt(a * 4^n)) / 2^n; floor(sqrt(floor(X))) == floor(sqrt(X)).
  const std::int64_t s = a.exponent() + 2 * static_cast<std::int64_t>(n);
  mpz_class scaled;
  if (s >= 0) {
    scaled = shl(a.mantissa(), s);
  } else {
    mpz_fdiv_q_2exp(scaled.get_mpz_t(), a.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
  }
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  return Dyadic(root, -static_cast<std::int64_t>(n));
}

Dyadic sqrt_ceil(const Dyadic& a, Precision n) {
  Dyadic r = sqrt_floor(a, n);
  if (r * r == a) return r;
  return r + Dyadic::pow2(-n);
}

}  // namespace fixpt::exactreal
