#include "cascade/algebra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cascade/hilbert.hpp"

namespace cascade {

namespace {

double magnitude(const Rational& q) { return std::abs(q.get_d()); }
double magnitude(double v) { return std::abs(v); }

std::size_t highest_nonzero(const auto& e) {
  for (std::size_t j = e.alpha.size(); j-- > 0;)
    if (e.alpha[j] != 0 || e.beta[j] != 0) return j;
  return 0;
}

// P_1 * e: every power goes up by one.
template <class Scalar>
BasicCascadeElement<Scalar> shift_up(const BasicCascadeElement<Scalar>& e) {
  BasicCascadeElement<Scalar> out(e.max_power() + 1);
  for (std::size_t j = 0; j <= e.max_power(); ++j) {
    out.alpha[j + 1] = e.alpha[j];
    out.beta[j + 1] = e.beta[j];
  }
  return out;
}

template <class Scalar>
Truncated<BasicCascadeElement<Scalar>> truncate(BasicCascadeElement<Scalar> e, std::size_t j_out) {
  double dropped = 0.0;
  for (std::size_t j = j_out + 1; j <= e.max_power(); ++j)
    dropped += magnitude(e.alpha[j]) + magnitude(e.beta[j]);
  return {e.resized(j_out), dropped};
}

template <class Scalar>
const BasicCascadeElement<Scalar>& table_row(const CoeffTable& t, std::size_t k) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return t.row(k);
  else
    return t.row_f(k);
}

template <class Scalar>
const BasicCascadeElement<Scalar>& table_h_power(const CoeffTable& t, std::size_t j) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return t.h_power(j);
  else
    return t.h_power_f(j);
}

template <class Scalar>
Scalar table_lambda(const CoeffTable& t) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return t.lambda();
  else
    return t.lambda().get_d();
}

// sum_i w_i Q_i where w = coefficients of a e
template <class Scalar>
BasicCascadeElement<Scalar> combine_rows(const BasicCascadeElement<Scalar>& ae,
                                         const CoeffTable& table) {
  const std::size_t top = highest_nonzero(ae);
  if (top > table.j_max())
    throw std::out_of_range("coefficient table too small: need row " + std::to_string(top) +
                            ", have J_max = " + std::to_string(table.j_max()));
  BasicCascadeElement<Scalar> out(top + 1);
  for (std::size_t i = 0; i <= top; ++i) {
    if (ae.beta[i] == 0) continue;
    const auto& row = table_row<Scalar>(table, i);
    for (std::size_t j = 0; j <= row.max_power(); ++j) {
      out.alpha[j] += ae.beta[i] * row.alpha[j];
      out.beta[j] += ae.beta[i] * row.beta[j];
    }
  }
  return out;
}

}  // namespace

template <class Scalar>
BasicCascadeElement<Scalar>& BasicCascadeElement<Scalar>::operator+=(const BasicCascadeElement& o) {
  if (o.alpha.size() > alpha.size()) {
    alpha.resize(o.alpha.size());
    beta.resize(o.beta.size());
  }
  for (std::size_t j = 0; j < o.alpha.size(); ++j) {
    alpha[j] += o.alpha[j];
    beta[j] += o.beta[j];
  }
  return *this;
}

template <class Scalar>
BasicCascadeElement<Scalar>& BasicCascadeElement<Scalar>::operator-=(const BasicCascadeElement& o) {
  if (o.alpha.size() > alpha.size()) {
    alpha.resize(o.alpha.size());
    beta.resize(o.beta.size());
  }
  for (std::size_t j = 0; j < o.alpha.size(); ++j) {
    alpha[j] -= o.alpha[j];
    beta[j] -= o.beta[j];
  }
  return *this;
}

template <class Scalar>
BasicCascadeElement<Scalar>& BasicCascadeElement<Scalar>::operator*=(const Scalar& s) {
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    alpha[j] *= s;
    beta[j] *= s;
  }
  return *this;
}

template struct BasicCascadeElement<Rational>;
template struct BasicCascadeElement<double>;

CascadeElementF to_floating(const CascadeElement& e) {
  CascadeElementF out(e.max_power());
  for (std::size_t j = 0; j <= e.max_power(); ++j) {
    out.alpha[j] = e.alpha[j].get_d();
    out.beta[j] = e.beta[j].get_d();
  }
  return out;
}

CoeffTable CoeffTable::build(std::size_t j_max, const Rational& lambda) {
  if (j_max < 1) throw std::invalid_argument("CoeffTable::build: J_max must be >= 1");
  CoeffTable t;
  t.j_max_ = j_max;
  t.lambda_ = lambda;
  t.rows_.reserve(j_max + 1);
  t.rows_.push_back(CascadeElement::power(1));  // H(a) = P_1

  // Tricomi with f = a P_{k-1}, g = P_1, then H(a Q_{k-1}) expanded through the
  // rows already known; the P_k/k part of Q_{k-1} produces Q_k/k, which is
  // moved to the left-hand side.
  for (std::size_t k = 1; k <= j_max; ++k) {
    const CascadeElement& prev = t.rows_[k - 1];
    CascadeElement acc = shift_up(prev);
    acc.beta[k - 1] -= lambda;
    for (std::size_t n = 0; n + 2 <= k; ++n) {
      const Rational w = prev.alpha[n] + lambda * prev.beta[n];
      if (w == 0) continue;
      acc -= w * t.rows_[n];
    }
    acc *= Rational(static_cast<long>(k), static_cast<long>(k + 1));
    t.rows_.push_back(acc.resized(k + 1));
  }

  // H(P_j) = P_1 H(P_{j-1}) - a P_{j-1} - H(a H(P_{j-1}))
  t.h_powers_.resize(j_max + 2);
  t.h_powers_[1] = -CascadeElement::indicator_power(0);
  for (std::size_t j = 2; j <= j_max + 1; ++j) {
    const CascadeElement& prev = t.h_powers_[j - 1];
    CascadeElement acc = shift_up(prev);
    acc.beta[j - 1] -= 1;
    acc -= combine_rows(mult_by_indicator(prev, lambda), t);
    t.h_powers_[j] = acc.resized(j - 1);
  }

  t.rows_f_.reserve(t.rows_.size());
  for (const auto& r : t.rows_) t.rows_f_.push_back(to_floating(r));
  t.h_powers_f_.resize(t.h_powers_.size());
  for (std::size_t j = 1; j < t.h_powers_.size(); ++j) t.h_powers_f_[j] = to_floating(t.h_powers_[j]);
  return t;
}

const Rational& CoeffTable::b(std::size_t k, std::size_t j) const {
  if (k < 1 || k > j_max_ || j >= k) throw std::out_of_range("CoeffTable::b: index out of range");
  return rows_[k].alpha[j];
}

const Rational& CoeffTable::c(std::size_t k, std::size_t j) const {
  if (k < 1 || k > j_max_ || j >= k) throw std::out_of_range("CoeffTable::c: index out of range");
  return rows_[k].beta[j];
}

const CascadeElement& CoeffTable::row(std::size_t k) const {
  if (k > j_max_) throw std::out_of_range("CoeffTable::row: k > J_max");
  return rows_[k];
}

const CascadeElementF& CoeffTable::row_f(std::size_t k) const {
  if (k > j_max_) throw std::out_of_range("CoeffTable::row_f: k > J_max");
  return rows_f_[k];
}

const CascadeElement& CoeffTable::h_power(std::size_t j) const {
  if (j < 1 || j > j_max_ + 1) throw std::out_of_range("H(P_j): j outside [1, J_max + 1]");
  return h_powers_[j];
}

const CascadeElementF& CoeffTable::h_power_f(std::size_t j) const {
  if (j < 1 || j > j_max_ + 1) throw std::out_of_range("H(P_j): j outside [1, J_max + 1]");
  return h_powers_f_[j];
}

void CoeffTable::inject_fault(std::size_t k, std::size_t j, char which, const Rational& value) {
  if (k < 1 || k > j_max_ || j >= k) throw std::out_of_range("inject_fault: index out of range");
  if (which == 'b') {
    rows_[k].alpha[j] = value;
    rows_f_[k].alpha[j] = value.get_d();
  } else if (which == 'c') {
    rows_[k].beta[j] = value;
    rows_f_[k].beta[j] = value.get_d();
  } else {
    throw std::invalid_argument("inject_fault: which must be 'b' or 'c'");
  }
}

template <class Scalar>
BasicCascadeElement<Scalar> mult_by_indicator(const BasicCascadeElement<Scalar>& e,
                                              const Scalar& lambda) {
  BasicCascadeElement<Scalar> out(e.max_power());
  for (std::size_t j = 0; j <= e.max_power(); ++j) out.beta[j] = e.alpha[j] + lambda * e.beta[j];
  return out;
}

const CascadeElement& expand_H_power(std::size_t j, const CoeffTable& table) {
  return table.h_power(j);
}

template <class Scalar>
Truncated<BasicCascadeElement<Scalar>> apply_H_mult_a(const BasicCascadeElement<Scalar>& e,
                                                       const CoeffTable& table,
                                                       std::size_t j_out) {
  return truncate(combine_rows(mult_by_indicator(e, table_lambda<Scalar>(table)), table), j_out);
}

template <class Scalar>
Truncated<BasicCascadeElement<Scalar>> apply_H(const BasicCascadeElement<Scalar>& e,
                                                const CoeffTable& table, std::size_t j_out) {
  const std::size_t top = highest_nonzero(e);
  BasicCascadeElement<Scalar> beta_part(top);
  for (std::size_t j = 0; j <= top; ++j) beta_part.beta[j] = e.beta[j];
  BasicCascadeElement<Scalar> out = combine_rows(beta_part, table);
  for (std::size_t j = 1; j <= top; ++j) {
    if (e.alpha[j] == 0) continue;
    const auto& hp = table_h_power<Scalar>(table, j);
    if (hp.max_power() + 1 > out.alpha.size()) out = out.resized(hp.max_power());
    for (std::size_t i = 0; i <= hp.max_power(); ++i) {
      out.alpha[i] += e.alpha[j] * hp.alpha[i];
      out.beta[i] += e.alpha[j] * hp.beta[i];
    }
  }
  return truncate(std::move(out), j_out);
}

template <class Scalar>
double evaluate(const BasicCascadeElement<Scalar>& e, double x) {
  const double p1 = hilbert_indicator(x);
  const double chi = (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
  double v = 0.0;
  for (std::size_t j = e.alpha.size(); j-- > 0;) {
    double a, b;
    if constexpr (std::is_same_v<Scalar, Rational>) {
      a = e.alpha[j].get_d();
      b = e.beta[j].get_d();
    } else {
      a = e.alpha[j];
      b = e.beta[j];
    }
    v = v * p1 + (a + b * chi);
  }
  return v;
}

template CascadeElement mult_by_indicator(const CascadeElement&, const Rational&);
template CascadeElementF mult_by_indicator(const CascadeElementF&, const double&);
template Truncated<CascadeElement> apply_H_mult_a(const CascadeElement&, const CoeffTable&,
                                                   std::size_t);
template Truncated<CascadeElementF> apply_H_mult_a(const CascadeElementF&, const CoeffTable&,
                                                    std::size_t);
template Truncated<CascadeElement> apply_H(const CascadeElement&, const CoeffTable&, std::size_t);
template Truncated<CascadeElementF> apply_H(const CascadeElementF&, const CoeffTable&, std::size_t);
template double evaluate(const CascadeElement&, double);
template double evaluate(const CascadeElementF&, double);

CoeffReport verify_coeff_properties(const CoeffTable& table) {
  CoeffReport rep;
  rep.j_max = table.j_max();
  rep.max_bound_ratio.assign(table.j_max() + 1, 0.0);
  for (std::size_t k = 1; k <= table.j_max(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      ++rep.entries_checked;
      const Rational& b = table.b(k, j);
      const Rational& c = table.c(k, j);
      const BigInt bound = ipow(k, k - j);
      if ((k - j) % 2 == 0) {
        if (b != 0) rep.violations.push_back({k, j, "parity", 'b'});
        if (c != 0) rep.violations.push_back({k, j, "parity", 'c'});
        if (b != 0 || c != 0) rep.parity_ok = false;
      }
      if (!abs_leq(b, bound)) {
        rep.violations.push_back({k, j, "bound", 'b'});
        rep.bound_ok = false;
      }
      if (!abs_leq(c, bound)) {
        rep.violations.push_back({k, j, "bound", 'c'});
        rep.bound_ok = false;
      }
      if (j == 0 && b != 0) rep.b0_zero = false;

      const Rational bound_q(bound);
      const Rational rb = abs(b) / bound_q;
      const Rational rc = abs(c) / bound_q;
      const Rational rs = abs(b + c) / bound_q;
      rep.max_bound_ratio[k] = std::max({rep.max_bound_ratio[k], rb.get_d(), rc.get_d()});
      rep.tail_constant = std::max(rep.tail_constant, rs.get_d());

      const int sb = sgn(b), sc = sgn(c);
      rep.b_positive += sb > 0;
      rep.b_negative += sb < 0;
      rep.c_positive += sc > 0;
      rep.c_negative += sc < 0;
    }
  }
  return rep;
}

std::string coeff_table_csv(const CoeffTable& table) {
  std::ostringstream out;
  out << "k,j,b_num,b_den,c_num,c_den,bound_k_pow\n";
  for (std::size_t k = 1; k <= table.j_max(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      const Rational& b = table.b(k, j);
      const Rational& c = table.c(k, j);
      out << k << ',' << j << ',' << to_string(b.get_num()) << ',' << to_string(b.get_den()) << ','
          << to_string(c.get_num()) << ',' << to_string(c.get_den()) << ','
          << to_string(ipow(k, k - j)) << '\n';
    }
  }
  return out.str();
}

}  // namespace cascade
