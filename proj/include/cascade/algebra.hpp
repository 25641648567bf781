#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "cascade/rational.hpp"

// Finite combinations sum_j (alpha_j + beta_j a) P_j with P_j = H(a)^j, where
// a is an idempotent-up-to-scale multiplier (a^2 = lambda a; lambda = 1 for
// the indicator of [0,1]) and H(a) = (1/pi) log|x/(x-1)|.

namespace cascade {

template <class Scalar>
struct BasicCascadeElement {
  std::vector<Scalar> alpha;
  std::vector<Scalar> beta;

  BasicCascadeElement() : alpha(1), beta(1) {}
  explicit BasicCascadeElement(std::size_t max_power)
      : alpha(max_power + 1), beta(max_power + 1) {}

  static constexpr bool exact = std::is_same_v<Scalar, Rational>;

  std::size_t max_power() const { return alpha.size() - 1; }

  /// P_j
  static BasicCascadeElement power(std::size_t j) {
    BasicCascadeElement e(j);
    e.alpha[j] = 1;
    return e;
  }
  /// a P_j
  static BasicCascadeElement indicator_power(std::size_t j) {
    BasicCascadeElement e(j);
    e.beta[j] = 1;
    return e;
  }

  /// Zero-pads or cuts to the given degree (cutting discards coefficients).
  BasicCascadeElement resized(std::size_t max_power) const {
    BasicCascadeElement e = *this;
    e.alpha.resize(max_power + 1);
    e.beta.resize(max_power + 1);
    return e;
  }

  bool is_zero() const {
    for (std::size_t j = 0; j < alpha.size(); ++j)
      if (alpha[j] != 0 || beta[j] != 0) return false;
    return true;
  }

  BasicCascadeElement& operator+=(const BasicCascadeElement& o);
  BasicCascadeElement& operator-=(const BasicCascadeElement& o);
  BasicCascadeElement& operator*=(const Scalar& s);

  friend BasicCascadeElement operator+(BasicCascadeElement x, const BasicCascadeElement& y) {
    return x += y;
  }
  friend BasicCascadeElement operator-(BasicCascadeElement x, const BasicCascadeElement& y) {
    return x -= y;
  }
  friend BasicCascadeElement operator*(const Scalar& s, BasicCascadeElement x) { return x *= s; }
  friend BasicCascadeElement operator-(BasicCascadeElement x) { return x *= Scalar(-1); }

  /// Equal after zero-padding to a common degree.
  friend bool operator==(const BasicCascadeElement& x, const BasicCascadeElement& y) {
    const std::size_t n = std::max(x.alpha.size(), y.alpha.size());
    const auto xp = x.resized(n - 1), yp = y.resized(n - 1);
    return xp.alpha == yp.alpha && xp.beta == yp.beta;
  }
};

using CascadeElement = BasicCascadeElement<Rational>;
using CascadeElementF = BasicCascadeElement<double>;

CascadeElementF to_floating(const CascadeElement& e);

/// Result of a degree-limited operator application; dropped_mass is the sum of
/// |coefficients| that fell above the requested degree.
template <class E>
struct Truncated {
  E value;
  double dropped_mass = 0.0;
};

/// Rows Q_k = H(a P_k), 0 <= k <= J_max, together with H(P_j) for
/// 1 <= j <= J_max + 1. Row k reads
///   Q_k = P_{k+1}/(k+1) + sum_{j<k} (b_j^k + c_j^k a) P_j.
class CoeffTable {
 public:
  /// Exact construction; rows are built sequentially in k.
  static CoeffTable build(std::size_t j_max, const Rational& lambda = Rational(1));

  std::size_t j_max() const { return j_max_; }
  const Rational& lambda() const { return lambda_; }

  const Rational& b(std::size_t k, std::size_t j) const;
  const Rational& c(std::size_t k, std::size_t j) const;

  const CascadeElement& row(std::size_t k) const;
  const CascadeElementF& row_f(std::size_t k) const;
  /// H(P_j)
  const CascadeElement& h_power(std::size_t j) const;
  const CascadeElementF& h_power_f(std::size_t j) const;

  /// Test hook: overwrite one entry (b if which == 'b', c if 'c'), keeping the
  /// floating copy in sync.
  void inject_fault(std::size_t k, std::size_t j, char which, const Rational& value);

 private:
  std::size_t j_max_ = 0;
  Rational lambda_{1};
  std::vector<CascadeElement> rows_;
  std::vector<CascadeElementF> rows_f_;
  std::vector<CascadeElement> h_powers_;  // index j, slot 0 unused
  std::vector<CascadeElementF> h_powers_f_;
};

/// a e with a^2 = lambda a: beta_j <- alpha_j + lambda beta_j, alpha <- 0. Exact.
template <class Scalar>
BasicCascadeElement<Scalar> mult_by_indicator(const BasicCascadeElement<Scalar>& e,
                                              const Scalar& lambda = Scalar(1));

/// H(P_j), 1 <= j <= J_max + 1.
const CascadeElement& expand_H_power(std::size_t j, const CoeffTable& table);

/// g -> H(a g), truncated at degree j_out.
template <class Scalar>
Truncated<BasicCascadeElement<Scalar>> apply_H_mult_a(const BasicCascadeElement<Scalar>& e,
                                                       const CoeffTable& table,
                                                       std::size_t j_out);

/// g -> H(g), truncated at degree j_out. The constant term is sent to zero
/// (H annihilates constants: the zero Fourier mode is discarded).
template <class Scalar>
Truncated<BasicCascadeElement<Scalar>> apply_H(const BasicCascadeElement<Scalar>& e,
                                                const CoeffTable& table, std::size_t j_out);

/// sum_j (alpha_j + beta_j chi(x)) P_1(x)^j by Horner. Throws std::domain_error at 0 and 1.
template <class Scalar>
double evaluate(const BasicCascadeElement<Scalar>& e, double x);

struct CoeffViolation {
  std::size_t k;
  std::size_t j;
  std::string property;  // "parity" or "bound"
  char which;            // 'b' or 'c'
};

struct CoeffReport {
  std::size_t j_max = 0;
  std::size_t entries_checked = 0;  // (k, j) index pairs; each holds a b and a c
  bool parity_ok = true;
  bool bound_ok = true;
  bool b0_zero = true;  // b_0^k = 0 for every k (observed, reported)
  std::vector<CoeffViolation> violations;
  /// max over j of max(|b_j^k|, |c_j^k|) / k^{k-j}, index k (slot 0 unused)
  std::vector<double> max_bound_ratio;
  /// C = max |b_j^k + c_j^k| / k^{k-j} over the table
  double tail_constant = 0.0;
  std::size_t b_positive = 0, b_negative = 0, c_positive = 0, c_negative = 0;

  bool ok() const { return parity_ok && bound_ok; }
};

CoeffReport verify_coeff_properties(const CoeffTable& table);

/// One line per (k, j): k,j,b_num,b_den,c_num,c_den,bound_k_pow.
std::string coeff_table_csv(const CoeffTable& table);

}  // namespace cascade
