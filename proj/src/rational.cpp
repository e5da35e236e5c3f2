#include "treelike/rational.hpp"

#include <cctype>

namespace treelike {

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(std::string_view text) {
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (k == s.size()) return false;
    for (; k < s.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    throw DomainError("malformed rational '" + std::string(text) + "'");
  mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw DomainError("rational with zero denominator");
  return Rational(mpq_class(n, d));
}

std::string Rational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::size_t Rational::hash() const {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](const mpz_srcptr z) {
    const std::size_t limbs = mpz_size(z);
    h ^= static_cast<std::size_t>(mpz_sgn(z) + 2);
    h *= 1099511628211ull;
    for (std::size_t i = 0; i < limbs; ++i) {
      h ^= static_cast<std::size_t>(mpz_getlimbn(z, static_cast<mp_size_t>(i)));
      h *= 1099511628211ull;
    }
  };
  mix(mpq_numref(v_.get_mpq_t()));
  mix(mpq_denref(v_.get_mpq_t()));
  return h;
}

Rational pow2(int k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k < 0 ? -k : k));
  return k < 0 ? Rational(mpq_class(mpz_class(1), p)) : Rational(mpq_class(p));
}

long floor_long(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  if (!q.fits_slong_p()) throw DomainError("floor does not fit in a long");
  return q.get_si();
}

std::string fixed_half_even(const Rational& r, int decimals) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(decimals));
  mpq_class x = r.raw() * scale;
  mpz_class q, rem;
  mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  // compare 2*rem with den
  const int c = cmp(mpz_class(rem * 2), x.get_den());
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  const bool neg = sgn(q) < 0;
  mpz_class mag = neg ? mpz_class(-q) : q;
  std::string digits = mag.get_str();
  if (decimals > 0) {
    if (digits.size() <= static_cast<std::size_t>(decimals))
      digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  }
  return neg ? "-" + digits : digits;
}

}  // namespace treelike
