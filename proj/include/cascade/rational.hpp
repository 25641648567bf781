#pragma once

#include <gmpxx.h>

#include <string>

namespace cascade {

/// Exact rational scalar of the coefficient algebra. Arithmetic through
/// mpq_class always yields canonical (lowest-terms, positive denominator)
/// values; make_rational() canonicalizes explicit num/den pairs.
using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(long num, long den);

/// base^exp in arbitrary precision.
BigInt ipow(unsigned long base, unsigned long exp);

/// (n!) as a big integer.
BigInt factorial(unsigned long n);

std::string to_string(const BigInt& v);

double to_double(const Rational& q);

/// |q| <= bound, compared exactly.
bool abs_leq(const Rational& q, const BigInt& bound);

}  // namespace cascade
