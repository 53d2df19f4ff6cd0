#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace defcalc {

/// Thrown when a computed object violates one of its structural invariants
/// (non-associative table, non-cocycle, failed flatness, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Scalar;

/// The coefficient field of a computation: the rationals or a prime field F_p
/// with p < 2^31. Fields are small values and compare by characteristic.
class Field {
 public:
  Field() = default;

  static Field rationals() { return Field{}; }

  static Field prime(std::uint64_t p) {
    if (p < 2 || p >= (std::uint64_t{1} << 31)) {
      throw std::invalid_argument("prime field modulus must lie in [2, 2^31)");
    }
    for (std::uint64_t q = 2; q * q <= p; ++q) {
      if (p % q == 0) {
        throw std::invalid_argument("field modulus " + std::to_string(p) + " is not prime");
      }
    }
    Field f;
    f.p_ = static_cast<std::uint32_t>(p);
    return f;
  }

  /// Accepts "Q" or "Fp:<p>".
  static Field parse(std::string_view text) {
    if (text == "Q") return rationals();
    if (text.substr(0, 3) == "Fp:") {
      const std::string digits(text.substr(3));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
          digits.size() > 10) {
        throw std::invalid_argument("malformed field '" + std::string(text) + "'");
      }
      return prime(std::stoull(digits));
    }
    throw std::invalid_argument("unknown field '" + std::string(text) + "' (expected Q or Fp:<p>)");
  }

  bool is_rational() const { return p_ == 0; }
  std::uint32_t characteristic() const { return p_; }

  std::string to_string() const { return p_ == 0 ? "Q" : "Fp:" + std::to_string(p_); }

  inline Scalar zero() const;
  inline Scalar one() const;
  inline Scalar from_int(long long value) const;
  /// Parses "a", "-a" or "a/b"; over F_p the rational is reduced mod p.
  inline Scalar parse_scalar(std::string_view text) const;

  friend bool operator==(Field a, Field b) { return a.p_ == b.p_; }
  friend bool operator!=(Field a, Field b) { return a.p_ != b.p_; }

 private:
  friend class Scalar;

  static Field from_validated(std::uint32_t p) {
    Field f;
    f.p_ = p;
    return f;
  }

  std::uint32_t p_ = 0;
};

/// Exact field element. Over Q the value is an arbitrary-precision rational;
/// over F_p it is a residue in [0, p). Mixing fields throws.
class Scalar {
 public:
  Scalar() = default;

  Field field() const {
    return Field::from_validated(p_);
  }
  std::uint32_t characteristic() const { return p_; }

  bool is_zero() const { return p_ == 0 ? sgn(q_) == 0 : r_ == 0; }
  bool is_one() const { return p_ == 0 ? q_ == 1 : r_ == 1; }

  /// Rational value (Q only).
  const mpq_class& rational() const {
    if (p_ != 0) throw std::logic_error("rational() called on a prime-field scalar");
    return q_;
  }
  /// Residue (F_p only).
  std::uint32_t residue() const {
    if (p_ == 0) throw std::logic_error("residue() called on a rational scalar");
    return r_;
  }

  /// Image of this scalar in F_P for an auxiliary prime P, or false when the
  /// denominator vanishes mod P. Used by modular rank prefilters.
  bool reduce_mod(std::uint32_t modulus, std::uint32_t& out) const {
    if (p_ != 0) {
      if (p_ != modulus) throw std::logic_error("modular reduction across prime fields");
      out = r_;
      return true;
    }
    const unsigned long num = mpz_fdiv_ui(q_.get_num_mpz_t(), modulus);
    const unsigned long den = mpz_fdiv_ui(q_.get_den_mpz_t(), modulus);
    if (den == 0) return false;
    out = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(num) * pow_mod(den, modulus - 2, modulus)) % modulus);
    return true;
  }

  Scalar inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    Scalar s = *this;
    if (p_ == 0) {
      s.q_ = 1 / q_;
    } else {
      s.r_ = static_cast<std::uint32_t>(pow_mod(r_, p_ - 2, p_));
    }
    return s;
  }

  Scalar operator-() const {
    Scalar s = *this;
    if (p_ == 0) {
      s.q_ = -q_;
    } else if (r_ != 0) {
      s.r_ = p_ - r_;
    }
    return s;
  }

  Scalar& operator+=(const Scalar& o) {
    check(o);
    if (p_ == 0) {
      q_ += o.q_;
    } else {
      r_ = static_cast<std::uint32_t>((std::uint64_t{r_} + o.r_) % p_);
    }
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    check(o);
    if (p_ == 0) {
      q_ -= o.q_;
    } else {
      r_ = static_cast<std::uint32_t>((std::uint64_t{r_} + p_ - o.r_) % p_);
    }
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    check(o);
    if (p_ == 0) {
      q_ *= o.q_;
    } else {
      r_ = static_cast<std::uint32_t>((std::uint64_t{r_} * o.r_) % p_);
    }
    return *this;
  }
  Scalar& operator/=(const Scalar& o) {
    check(o);
    return *this *= o.inverse();
  }

  /// this -= a * b without a temporary for the product over Q.
  void sub_mul(const Scalar& a, const Scalar& b) {
    check(a);
    check(b);
    if (p_ == 0) {
      mpq_class prod = a.q_ * b.q_;
      q_ -= prod;
    } else {
      const std::uint64_t prod = (std::uint64_t{a.r_} * b.r_) % p_;
      r_ = static_cast<std::uint32_t>((std::uint64_t{r_} + p_ - prod) % p_);
    }
  }
  /// this += a * b.
  void add_mul(const Scalar& a, const Scalar& b) {
    check(a);
    check(b);
    if (p_ == 0) {
      mpq_class prod = a.q_ * b.q_;
      q_ += prod;
    } else {
      const std::uint64_t prod = (std::uint64_t{a.r_} * b.r_) % p_;
      r_ = static_cast<std::uint32_t>((std::uint64_t{r_} + prod) % p_);
    }
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.p_ != b.p_) return false;
    return a.p_ == 0 ? a.q_ == b.q_ : a.r_ == b.r_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// "p/q" (or "p" for integers) over Q; the residue over F_p.
  std::string to_string() const { return p_ == 0 ? q_.get_str() : std::to_string(r_); }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

 private:
  friend class Field;

  static std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp > 0) {
      if (exp & 1U) result = result * base % mod;
      base = base * base % mod;
      exp >>= 1U;
    }
    return result;
  }

  void check(const Scalar& o) const {
    if (o.p_ != p_) throw std::invalid_argument("scalar field mismatch");
  }

  std::uint32_t p_ = 0;
  std::uint32_t r_ = 0;
  mpq_class q_;
};

inline Scalar Field::zero() const {
  Scalar s;
  s.p_ = p_;
  return s;
}

inline Scalar Field::one() const { return from_int(1); }

inline Scalar Field::from_int(long long value) const {
  Scalar s;
  s.p_ = p_;
  if (p_ == 0) {
    s.q_ = mpq_class(mpz_class(std::to_string(value)));
  } else {
    long long r = value % static_cast<long long>(p_);
    if (r < 0) r += p_;
    s.r_ = static_cast<std::uint32_t>(r);
  }
  return s;
}

inline Scalar Field::parse_scalar(std::string_view text) const {
  std::string t(text);
  const auto bad = [&] { return std::invalid_argument("malformed scalar '" + t + "'"); };
  if (t.empty()) throw bad();
  const auto slash = t.find('/');
  const std::string num_text = t.substr(0, slash);
  const std::string den_text = slash == std::string::npos ? "1" : t.substr(slash + 1);
  const auto valid_int = [](const std::string& s, bool allow_sign) {
    std::size_t start = (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    return s.size() > start && s.find_first_not_of("0123456789", start) == std::string::npos;
  };
  if (!valid_int(num_text, true) || !valid_int(den_text, false)) throw bad();
  mpz_class num(num_text[0] == '+' ? num_text.substr(1) : num_text);
  mpz_class den(den_text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + t + "'");
  Scalar s;
  s.p_ = p_;
  if (p_ == 0) {
    s.q_ = mpq_class(num, den);
    s.q_.canonicalize();
    return s;
  }
  const unsigned long d = mpz_fdiv_ui(den.get_mpz_t(), p_);
  if (d == 0) throw std::invalid_argument("denominator of '" + t + "' vanishes in " + to_string());
  const unsigned long n = mpz_fdiv_ui(num.get_mpz_t(), p_);
  s.r_ = static_cast<std::uint32_t>(
      (static_cast<std::uint64_t>(n) * Scalar::pow_mod(d, p_ - 2, p_)) % p_);
  return s;
}

}  // namespace defcalc
