#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cascade/algebra.hpp"
#include "cascade/hilbert.hpp"
#include "support/pv_oracle.hpp"

using namespace cascade;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

const CoeffTable& table40() {
  static const CoeffTable t = CoeffTable::build(40);
  return t;
}

CascadeElement random_element(std::mt19937& rng, std::size_t degree, bool zero_constant) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 7);
  CascadeElement e(degree);
  for (std::size_t j = 0; j <= degree; ++j) {
    e.alpha[j] = make_rational(num(rng), den(rng));
    e.beta[j] = make_rational(num(rng), den(rng));
  }
  if (zero_constant) e.alpha[0] = 0;
  return e;
}

}  // namespace

TEST(CoeffTable, FirstRow) {
  const auto t = CoeffTable::build(1);
  EXPECT_EQ(t.b(1, 0), q(0));
  EXPECT_EQ(t.c(1, 0), q(-1, 2));
  EXPECT_EQ(t.row(1).alpha[2], q(1, 2));
}

TEST(CoeffTable, SecondRow) {
  const auto t = CoeffTable::build(2);
  EXPECT_EQ(t.b(2, 1), q(1, 3));
  EXPECT_EQ(t.c(2, 1), q(-1));
  EXPECT_EQ(t.b(2, 0), q(0));
  EXPECT_EQ(t.c(2, 0), q(0));
  EXPECT_EQ(t.row(2).alpha[3], q(1, 3));
}

// Rows 3 and 4 worked out by hand from the product rule and a^2 = a.
TEST(CoeffTable, ThirdAndFourthRows) {
  const auto t = CoeffTable::build(4);
  EXPECT_EQ(t.b(3, 2), q(1, 2));
  EXPECT_EQ(t.c(3, 2), q(-3, 2));
  EXPECT_EQ(t.b(3, 0), q(0));
  EXPECT_EQ(t.c(3, 0), q(-1, 4));
  EXPECT_EQ(t.b(4, 1), q(7, 15));
  EXPECT_EQ(t.c(4, 1), q(-1));
  EXPECT_EQ(t.b(4, 3), q(2, 3));
  EXPECT_EQ(t.c(4, 3), q(-2));
  EXPECT_EQ(t.row(4).alpha[5], q(1, 5));
}

TEST(CoeffTable, RejectsEmpty) { EXPECT_THROW(CoeffTable::build(0), std::invalid_argument); }

TEST(CoeffTable, IndexChecks) {
  const auto t = CoeffTable::build(3);
  EXPECT_THROW((void)t.b(4, 0), std::out_of_range);
  EXPECT_THROW((void)t.c(2, 2), std::out_of_range);
  EXPECT_THROW((void)t.b(0, 0), std::out_of_range);
}

TEST(CoeffTable, LeadingTermAndNoStrayTopEntries) {
  const auto& t = table40();
  for (std::size_t k = 0; k <= 40; ++k) {
    const auto& r = t.row(k);
    ASSERT_EQ(r.max_power(), k + 1);
    EXPECT_EQ(r.alpha[k + 1], q(1, static_cast<long>(k + 1)));
    EXPECT_EQ(r.beta[k + 1], 0);
    EXPECT_EQ(r.alpha[k], 0);
    EXPECT_EQ(r.beta[k], 0);
  }
}

TEST(CoeffTable, ParityAndBoundsTo40) {
  const auto rep = verify_coeff_properties(table40());
  EXPECT_TRUE(rep.parity_ok);
  EXPECT_TRUE(rep.bound_ok);
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_EQ(rep.entries_checked, 820u);
  EXPECT_TRUE(rep.b0_zero);
  EXPECT_DOUBLE_EQ(rep.tail_constant, 0.5);
  EXPECT_GT(rep.b_positive, 0u);  // b_1^2 = 1/3 already rules out an all-negative pattern
}

TEST(CoeffTable, SmallTablesPass) {
  for (std::size_t j : {1, 2}) {
    const auto rep = verify_coeff_properties(CoeffTable::build(j));
    EXPECT_TRUE(rep.ok());
  }
  const auto rep1 = verify_coeff_properties(CoeffTable::build(1));
  EXPECT_DOUBLE_EQ(rep1.max_bound_ratio[1], 0.5);
}

TEST(CoeffTable, FaultInjectionTripsParity) {
  auto t = CoeffTable::build(4);
  t.inject_fault(3, 1, 'c', q(1, 7));
  const auto rep = verify_coeff_properties(t);
  EXPECT_FALSE(rep.parity_ok);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].property, "parity");
  EXPECT_EQ(rep.violations[0].k, 3u);
  EXPECT_EQ(rep.violations[0].j, 1u);
}

TEST(CoeffTable, FaultInjectionTripsBound) {
  auto t = CoeffTable::build(4);
  t.inject_fault(2, 1, 'b', q(3));
  const auto rep = verify_coeff_properties(t);
  EXPECT_FALSE(rep.bound_ok);
  EXPECT_TRUE(rep.parity_ok);
}

// a^2 = lambda a: b_j^k scales as lambda^{k+1-j}, c_j^k as lambda^{k-j}.
TEST(CoeffTable, LambdaScaling) {
  const Rational lambda = q(3, 2);
  const auto t1 = CoeffTable::build(8);
  const auto tl = CoeffTable::build(8, lambda);
  for (std::size_t k = 1; k <= 8; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      Rational pb = 1, pc = 1;
      for (std::size_t i = 0; i < k + 1 - j; ++i) pb *= lambda;
      for (std::size_t i = 0; i < k - j; ++i) pc *= lambda;
      EXPECT_EQ(tl.b(k, j), pb * t1.b(k, j)) << k << "," << j;
      EXPECT_EQ(tl.c(k, j), pc * t1.c(k, j)) << k << "," << j;
    }
  }
}

TEST(CoeffTable, CsvRows) {
  const auto csv = coeff_table_csv(CoeffTable::build(2));
  EXPECT_EQ(csv,
            "k,j,b_num,b_den,c_num,c_den,bound_k_pow\n"
            "1,0,0,1,-1,2,1\n"
            "2,0,0,1,0,1,4\n"
            "2,1,1,3,-1,1,2\n");
}

TEST(ExpandHPower, FirstThree) {
  const auto t = CoeffTable::build(3);
  EXPECT_EQ(expand_H_power(1, t), -CascadeElement::indicator_power(0));

  CascadeElement h2(1);
  h2.alpha[1] = 1;
  h2.beta[1] = -2;
  EXPECT_EQ(expand_H_power(2, t), h2);

  CascadeElement h3(2);
  h3.alpha[2] = q(3, 2);
  h3.beta[2] = -3;
  h3.beta[0] = q(-1, 2);
  EXPECT_EQ(expand_H_power(3, t), h3);

  EXPECT_THROW(expand_H_power(5, t), std::out_of_range);
  EXPECT_THROW(expand_H_power(0, t), std::out_of_range);
}

TEST(ApplyHMultA, Examples) {
  const auto t = CoeffTable::build(4);
  auto r = apply_H_mult_a(CascadeElement::indicator_power(0), t, 4);
  EXPECT_EQ(r.value, CascadeElement::power(1));
  EXPECT_EQ(r.dropped_mass, 0.0);

  CascadeElement expect(2);
  expect.alpha[2] = q(1, 2);
  expect.beta[0] = q(-1, 2);
  EXPECT_EQ(apply_H_mult_a(CascadeElement::indicator_power(1), t, 4).value, expect);
  EXPECT_TRUE(apply_H_mult_a(CascadeElement(3), t, 4).value.is_zero());
}

TEST(ApplyHMultA, TruncationReportsDroppedMass) {
  const auto t = CoeffTable::build(4);
  auto r = apply_H_mult_a(CascadeElement::indicator_power(1), t, 1);
  EXPECT_EQ(r.value.max_power(), 1u);
  EXPECT_DOUBLE_EQ(r.dropped_mass, 0.5);
}

TEST(ApplyHMultA, TableTooSmall) {
  const auto t = CoeffTable::build(2);
  EXPECT_THROW(apply_H_mult_a(CascadeElement::power(3), t, 6), std::out_of_range);
}

TEST(ApplyHMultA, Linearity) {
  const auto& t = table40();
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = random_element(rng, 6, false);
    const auto f = random_element(rng, 6, false);
    const Rational l = q(static_cast<long>(trial) - 7, 3), m = q(5, static_cast<long>(trial) + 1);
    const auto lhs = apply_H_mult_a(l * e + m * f, t, 10).value;
    const auto rhs = l * apply_H_mult_a(e, t, 10).value + m * apply_H_mult_a(f, t, 10).value;
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(ApplyH, Examples) {
  const auto t = CoeffTable::build(4);
  EXPECT_EQ(apply_H(CascadeElement::indicator_power(0), t, 4).value, CascadeElement::power(1));
  EXPECT_EQ(apply_H(CascadeElement::power(1), t, 4).value, -CascadeElement::indicator_power(0));
  EXPECT_EQ(apply_H(CascadeElement::power(2), t, 4).value, expand_H_power(2, t));
  EXPECT_TRUE(apply_H(CascadeElement::power(0), t, 4).value.is_zero());
}

TEST(ApplyH, InvolutionOnRandomElements) {
  const auto& t = table40();
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t deg = 1 + static_cast<std::size_t>(trial % 12);
    const auto e = random_element(rng, deg, true);
    const auto h = apply_H(e, t, 40);
    ASSERT_EQ(h.dropped_mass, 0.0);
    EXPECT_EQ(apply_H(h.value, t, 40).value, -e) << "degree " << deg;
  }
}

TEST(ApplyH, RowsAreConsistentWithPowerExpansions) {
  // H(Q_k) = H H(a P_k) = -a P_k
  const auto& t = table40();
  for (std::size_t k = 0; k < 40; ++k)
    EXPECT_EQ(apply_H(t.row(k), t, 41).value, -CascadeElement::indicator_power(k)) << k;
}

TEST(ApplyH, FloatingModeTracksExact) {
  const auto& t = table40();
  std::mt19937 rng(7);
  const auto e = random_element(rng, 10, true);
  const auto exact = to_floating(apply_H(e, t, 20).value);
  const auto approx = apply_H(to_floating(e), t, 20).value;
  for (std::size_t j = 0; j <= 20; ++j) {
    EXPECT_NEAR(approx.alpha[j], exact.alpha[j], 1e-9 * (1 + std::abs(exact.alpha[j])));
    EXPECT_NEAR(approx.beta[j], exact.beta[j], 1e-9 * (1 + std::abs(exact.beta[j])));
  }
}

TEST(MultByIndicator, Examples) {
  EXPECT_EQ(mult_by_indicator(CascadeElement::power(0)), CascadeElement::indicator_power(0));
  EXPECT_EQ(mult_by_indicator(CascadeElement::indicator_power(0)),
            CascadeElement::indicator_power(0));
  CascadeElement e(1);
  e.alpha[1] = 1;
  e.beta[1] = 1;
  EXPECT_EQ(mult_by_indicator(e), q(2) * CascadeElement::indicator_power(1));
}

TEST(Evaluate, Examples) {
  const auto a = CascadeElement::indicator_power(0);
  EXPECT_DOUBLE_EQ(evaluate(a, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(a, 2.0), 0.0);
  EXPECT_NEAR(evaluate(CascadeElement::power(1), 2.0), std::log(2.0) / std::numbers::pi, 1e-15);
  CascadeElement e(1);
  e.beta[0] = 1;
  e.beta[1] = 1;
  EXPECT_NEAR(evaluate(e, 0.5), 1.0, 1e-15);
  EXPECT_THROW(evaluate(a, 0.0), std::domain_error);
  EXPECT_THROW(evaluate(a, 1.0), std::domain_error);
}

TEST(Evaluate, OddPowersAreOddAboutOneHalf) {
  for (std::size_t j : {1, 3, 5, 7}) {
    const auto e = CascadeElement::power(j);
    for (double s : {0.1, 0.3, 0.45, 0.8, 2.5})
      EXPECT_NEAR(evaluate(e, 0.5 + s), -evaluate(e, 0.5 - s), 1e-12);
  }
}

// Rows against a real-line principal-value quadrature of a P_k.
TEST(CoeffTable, RowsMatchPrincipalValueQuadrature) {
  const auto& t = table40();
  for (std::size_t k = 0; k <= 12; ++k) {
    for (double x : {-1.5, -0.3, 0.07, 0.31, 0.5, 0.77, 0.95, 1.2, 2.5}) {
      const double expect = oracle::pv_hilbert_log_power(static_cast<int>(k), x);
      const double got = evaluate(t.row(k), x);
      EXPECT_NEAR(got, expect, 1e-12 * (1.0 + std::abs(expect))) << "k=" << k << " x=" << x;
    }
  }
}
