#include "cascade/rational.hpp"

#include <stdexcept>

namespace cascade {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

BigInt ipow(unsigned long base, unsigned long exp) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

BigInt factorial(unsigned long n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

std::string to_string(const BigInt& v) { return v.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

bool abs_leq(const Rational& q, const BigInt& bound) {
  // |num| <= bound * den, all integers
  BigInt lhs = abs(q.get_num());
  BigInt rhs = bound * q.get_den();
  return lhs <= rhs;
}

}  // namespace cascade
