#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace treelike {

/// Thrown when a value falls outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// A thin value wrapper over GMP's mpq_class. Every constructor canonicalizes,
/// and GMP arithmetic keeps results canonical, so structural equality of two
/// Rationals is numeric equality.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class value) : v_(std::move(value)) { v_.canonicalize(); }

  /// Parses "p/q" or "p". Throws DomainError on malformed input or q == 0.
  static Rational parse(std::string_view text);

  /// Lowest-terms "p/q"; integers print with an explicit "/1".
  std::string str() const;

  double to_double() const { return v_.get_d(); }
  const mpq_class& raw() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.v_.get_mpq_t(), b.v_.get_mpq_t()) != 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  std::size_t hash() const;

 private:
  mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// 2^k as a Rational; negative k gives 1/2^|k|.
Rational pow2(int k);

/// Floor of r as a signed integer (r must fit in a long).
long floor_long(const Rational& r);

/// Rounds r * scale to the nearest integer, ties to even, and prints the
/// result as a fixed-point decimal with `decimals` digits after the point.
std::string fixed_half_even(const Rational& r, int decimals);

}  // namespace treelike

template <>
struct std::hash<treelike::Rational> {
  std::size_t operator()(const treelike::Rational& r) const noexcept { return r.hash(); }
};
