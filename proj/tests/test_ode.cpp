#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cascade/ode.hpp"

using namespace cascade;

namespace {

const CoeffTable& table40() {
  static const CoeffTable t = CoeffTable::build(40);
  return t;
}

Rational q(long n, long d = 1) { return make_rational(n, d); }

IntegrateOptions with(Scheme s, std::size_t store_every = 1) {
  IntegrateOptions o;
  o.scheme = s;
  o.store_every = store_every;
  return o;
}

double decoupled_max_rel_error(const GammaTrajectory& tr, double t_min, std::size_t k_max) {
  double worst = 0.0;
  for (std::size_t m = 0; m < tr.size(); ++m) {
    const double t = tr.times[m];
    if (t == 0.0 || t < t_min - 1e-12) continue;
    for (std::size_t k = 0; k <= k_max; ++k) {
      const double ref = std::exp(log_gamma_reference(t, k));
      worst = std::max(worst, std::abs(tr.gamma(m, k) - ref) / ref);
    }
  }
  return worst;
}

}  // namespace

TEST(FullGenerator, ColumnsFromTheFirstRows) {
  const auto m = build_generator_full(table40(), 6);
  const auto a0 = m.beta_index(0);
  for (std::size_t r = 0; r < m.dim(); ++r)
    EXPECT_EQ(m.exact(r, a0), r == m.alpha_index(1) ? q(1) : q(0)) << r;
  const auto a1 = m.beta_index(1);
  EXPECT_EQ(m.exact(m.alpha_index(2), a1), q(1, 2));
  EXPECT_EQ(m.exact(m.beta_index(0), a1), q(-1, 2));
  for (std::size_t r = 0; r < m.dim(); ++r) EXPECT_EQ(m.exact(r, m.alpha_index(1)), m.exact(r, a1));
}

TEST(FullGenerator, TailMassOnlyInLastColumn) {
  const auto m = build_generator_full(table40(), 6);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(m.tail_mass(m.alpha_index(j)), 0.0);
    EXPECT_EQ(m.tail_mass(m.beta_index(j)), 0.0);
  }
  EXPECT_DOUBLE_EQ(m.tail_mass(m.beta_index(6)), 1.0 / 7.0);
}

TEST(FullGenerator, RejectsTooSmallTable) {
  const auto t = CoeffTable::build(5);
  EXPECT_THROW(build_generator_full(t, 6), std::invalid_argument);
}

TEST(FullGenerator, MatchesSymbolicOperator) {
  const std::size_t K = 12;
  const auto m = build_generator_full(table40(), K);
  std::mt19937 rng(99);
  std::uniform_int_distribution<long> num(-20, 20), den(1, 9);
  for (int trial = 0; trial < 10; ++trial) {
    CascadeElement e(K);
    for (std::size_t j = 0; j <= K; ++j) {
      e.alpha[j] = make_rational(num(rng), den(rng));
      e.beta[j] = make_rational(num(rng), den(rng));
    }
    EXPECT_EQ(m.apply_exact(e), apply_H_mult_a(e, table40(), K).value);
  }
}

TEST(MGenerator, WeightsAtZeroAndSquareIdentity) {
  for (int s : {1, -1}) {
    const SignConvention sign(s);
    EXPECT_EQ(MGeneratorFamily::weight(0, 0.0, sign), -s);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(MGeneratorFamily::weight(i, 0.0, sign), 0.0);
    for (double t : {1e-6, 0.01, 0.3, 1.0, 3.0}) {
      const double w4 = std::exp(t) + std::exp(-t) - 2.0;
      EXPECT_NEAR(MGeneratorFamily::weight(3, t, sign), s * w4, 1e-12 * (1 + w4));
      EXPECT_GE(s * MGeneratorFamily::weight(3, t, sign), 0.0);
    }
  }
  EXPECT_THROW(MGeneratorFamily::weight(4, 0.0, SignConvention{}), std::out_of_range);
}

TEST(MGenerator, OperatorsMatchCompositions) {
  const std::size_t K = 10;
  const auto fam = build_generator_M(table40(), K, SignConvention{});
  const auto& H = fam.ops[0];
  EXPECT_EQ(H.apply_exact(CascadeElement::indicator_power(0)), CascadeElement::power(1).resized(K));
  std::mt19937 rng(5);
  std::uniform_int_distribution<long> num(-9, 9), den(1, 5);
  CascadeElement e(K - 2);
  for (std::size_t j = 0; j <= K - 2; ++j) {
    e.alpha[j] = make_rational(num(rng), den(rng));
    e.beta[j] = make_rational(num(rng), den(rng));
  }
  EXPECT_EQ(fam.ops[0].apply_exact(e), apply_H(e, table40(), K).value);
  EXPECT_EQ(fam.ops[1].apply_exact(e), mult_by_indicator(apply_H(e, table40(), K).value));
  EXPECT_EQ(fam.ops[2].apply_exact(e), apply_H(mult_by_indicator(e), table40(), K).value);
  EXPECT_EQ(fam.ops[3].apply_exact(e),
            mult_by_indicator(apply_H(mult_by_indicator(e), table40(), K).value));
}

TEST(MGenerator, PureHAtTimeZero) {
  // M(0) = a: derivative -s H(a) = -s P_1, no beta component moves.
  for (int s : {1, -1}) {
    const auto gen = build_generator_M(table40(), 12, SignConvention(s)).generator();
    const auto v = indicator_initial_state(12);
    std::vector<double> d(v.size());
    gen.apply(0.0, v, d);
    for (std::size_t k = 0; k <= 12; ++k) {
      EXPECT_EQ(d[13 + k], 0.0) << k;
      EXPECT_EQ(d[k], k == 1 ? -s : 0.0) << k;
    }
  }
}

TEST(Integrate, ZeroLengthReturnsInitialState) {
  const auto gen = Generator::constant(build_generator_full(table40(), 8));
  const auto v = indicator_initial_state(8);
  const auto tr = integrate(gen, v, 0.0, 1e-3);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.states[0], v);
  EXPECT_EQ(tr.gamma(0, 0), 1.0);
}

TEST(Integrate, RejectsBadArguments) {
  const auto gen = Generator::constant(build_generator_full(table40(), 4));
  const auto v = indicator_initial_state(4);
  EXPECT_THROW(integrate(gen, v, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate(gen, v, -1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(integrate(gen, v, 0.15, 0.1), std::invalid_argument);
  EXPECT_THROW(integrate(gen, indicator_initial_state(3), 0.1, 0.1), std::invalid_argument);
  auto bad = v;
  bad[0] = std::nan("");
  EXPECT_THROW(integrate(gen, bad, 0.1, 0.1), std::invalid_argument);
}

TEST(Integrate, BlowUpIsReported) {
  Generator g = Generator::constant(build_generator_full(table40(), 4));
  g.terms[0].weight = [](double) { return 1e305; };
  EXPECT_THROW(integrate(g, indicator_initial_state(4), 0.1, 0.1), BlowUpError);
}

TEST(Integrate, StoreEveryKeepsFinalState) {
  const auto gen = Generator::constant(build_generator_decoupled(6));
  const auto tr = integrate(gen, indicator_initial_state(6), 0.1, 0.01, with(Scheme::rk4, 3));
  ASSERT_EQ(tr.times.size(), 5u);  // 0, 0.03, 0.06, 0.09, 0.1
  EXPECT_DOUBLE_EQ(tr.times.back(), 0.1);
}

// Second-order Taylor polynomial of the flow computed in exact arithmetic.
TEST(Integrate, SmallTimeMatchesExactTaylorPolynomial) {
  const std::size_t K = 20;
  const auto m = build_generator_full(table40(), K);
  CascadeElement v0 = CascadeElement::indicator_power(0).resized(K);
  const CascadeElement v1 = m.apply_exact(v0);
  const CascadeElement v2 = m.apply_exact(v1);
  const double t = 1e-3;
  const auto tr = integrate(Generator::constant(m), indicator_initial_state(K), t, 1e-4);
  const std::size_t last = tr.size() - 1;
  for (std::size_t k : {0, 1, 2}) {
    auto g = [k](const CascadeElement& e) { return to_double(Rational(e.alpha[k] + e.beta[k])); };
    const double taylor = g(v0) + t * g(v1) + 0.5 * t * t * g(v2);
    EXPECT_NEAR(tr.gamma(last, k), taylor, 1e-6 * std::abs(taylor)) << k;
  }
  EXPECT_NEAR(tr.gamma(last, 1), t, 1e-6 * t);
}

TEST(Decoupled, ClosedFormWithExponentialSteps) {
  const auto gen = Generator::constant(build_generator_decoupled(12));
  const auto tr = integrate(gen, indicator_initial_state(12), 0.5, 1e-4, with(Scheme::exp_euler, 10));
  EXPECT_LE(decoupled_max_rel_error(tr, 0.0, 10), 1e-8);
  const std::size_t m = tr.size() - 1;
  EXPECT_NEAR(tr.gamma(m, 1), 0.5, 1e-12);
  EXPECT_NEAR(tr.gamma(m, 2), 0.25 / 4, 1e-12);
  EXPECT_NEAR(tr.gamma(m, 3), 0.125 / 36, 1e-12);
}

TEST(Decoupled, ClosedFormWithRk4AwayFromStartUp) {
  const auto gen = Generator::constant(build_generator_decoupled(12));
  const auto tr = integrate(gen, indicator_initial_state(12), 0.5, 1e-4, with(Scheme::rk4, 10));
  EXPECT_LE(decoupled_max_rel_error(tr, 0.1, 10), 1e-8);
}

TEST(Decoupled, Rk4IsFourthOrder) {
  const auto gen = Generator::constant(build_generator_decoupled(12));
  std::vector<double> log_dt, log_err;
  for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
    const auto tr = integrate(gen, indicator_initial_state(12), 0.5, dt);
    const std::size_t m = tr.size() - 1;
    double err = 0.0;
    for (std::size_t k = 0; k <= 10; ++k) {
      const double ref = std::exp(log_gamma_reference(0.5, k));
      err = std::max(err, std::abs(tr.gamma(m, k) - ref) / ref);
    }
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
  }
  const double slope = (log_err.back() - log_err.front()) / (log_dt.back() - log_dt.front());
  EXPECT_NEAR(slope, 4.0, 0.2);
}

TEST(Bootstrap, BandAtSmallTime) {
  const auto gen = Generator::constant(build_generator_full(table40(), 40));
  const auto tr = integrate(gen, indicator_initial_state(40), 0.01, 1e-4, with(Scheme::exp_euler));
  const auto rep = check_gamma_lower_bound(tr, 0.5, 0.01, 1);
  EXPECT_TRUE(rep.pass);
  const std::size_t m = tr.size() - 1;
  EXPECT_GE(tr.gamma(m, 1), 0.005);
  EXPECT_LE(tr.gamma(m, 1), 0.01);
  EXPECT_GE(tr.gamma(m, 0), 0.5);
  EXPECT_THROW(check_gamma_lower_bound(tr, 0.5, 0.01, 41), std::invalid_argument);
}

TEST(Bootstrap, DetectsValuesOutsideBand) {
  GammaTrajectory tr;
  tr.K = 2;
  tr.dt = 0.01;
  tr.times = {0.0, 0.01};
  tr.states = {{0, 0, 0, 1, 0, 0}, {0, 0.02, 0, 1, 0, 0}};  // gamma_1 = 2t: above t
  EXPECT_FALSE(check_gamma_lower_bound(tr, 0.01, 0.01, 1).pass);
  tr.states[1][1] = 0.0;  // gamma_1 = 0: below c t
  EXPECT_FALSE(check_gamma_lower_bound(tr, 0.01, 0.01, 1).pass);
}

TEST(Bootstrap, DeltaFromTable) {
  EXPECT_DOUBLE_EQ(empirical_tail_constant(table40()), 0.5);
  EXPECT_NEAR(bootstrap_delta(0.5), 1.0 / (20.0 * std::sqrt(0.5)), 1e-15);
  EXPECT_THROW(bootstrap_delta(0.0), std::invalid_argument);
}

TEST(TailSummability, Report) {
  const auto rep = check_tail_summability();
  EXPECT_DOUBLE_EQ(rep.step_ratio[1], 1.0);  // a_2/a_1 = 1
  EXPECT_GT(rep.first_halving_k, 1u);
  EXPECT_TRUE(rep.step_ratio_decreasing);
  for (std::size_t k = 10; k <= 100; ++k) EXPECT_LT(rep.sum_ratio[k], 1.0) << k;
  // a_{k+1}/a_k -> e/(k+1)
  EXPECT_NEAR(rep.step_ratio[100] * 101.0 / std::exp(1.0), 1.0, 1e-2);
}

TEST(Truncation, IdenticalKGivesZero) {
  auto builder = [](std::size_t K) { return Generator::constant(build_generator_full(table40(), K)); };
  const auto rep = truncation_convergence(builder, {8, 8}, 0.05, 1e-3);
  EXPECT_EQ(rep.abs_diff[0], 0.0);
}

TEST(Truncation, DifferencesShrinkWithK) {
  auto builder = [](std::size_t K) { return Generator::constant(build_generator_full(table40(), K)); };
  const auto rep = truncation_convergence(builder, {2, 4, 8}, 0.05, 1e-3, with(Scheme::exp_euler));
  EXPECT_TRUE(rep.monotone);
  EXPECT_GT(rep.abs_diff[0], 0.0);
  EXPECT_LE(rep.abs_diff[1], rep.abs_diff[0] / 10.0);
  EXPECT_THROW(truncation_convergence(builder, {4}, 0.05, 1e-3), std::invalid_argument);
}

TEST(Truncation, Rk4TimeStepHalvingIsFourthOrderSmall) {
  const auto gen = Generator::constant(build_generator_full(table40(), 12));
  const auto a = integrate(gen, indicator_initial_state(12), 0.2, 0.02);
  const auto b = integrate(gen, indicator_initial_state(12), 0.2, 0.01);
  const auto c = integrate(gen, indicator_initial_state(12), 0.2, 0.005);
  const double d1 = std::abs(a.gamma(a.size() - 1, 3) - b.gamma(b.size() - 1, 3));
  const double d2 = std::abs(b.gamma(b.size() - 1, 3) - c.gamma(c.size() - 1, 3));
  EXPECT_NEAR(std::log2(d1 / d2), 4.0, 0.3);
}

TEST(MSystem, ModelClosedForm) {
  const auto gen = build_generator_M_model(12);
  const auto tr = integrate(gen, indicator_initial_state(12), 0.5, 1e-4, with(Scheme::exp_euler, 25));
  double worst = 0.0;
  for (std::size_t m = 1; m < tr.size(); ++m)
    for (std::size_t k = 0; k <= 10; ++k) {
      const double ref = std::exp(log_M_reference(tr.times[m], k));
      worst = std::max(worst, std::abs(log_basis(tr.beta(m, k), k) - ref) / ref);
    }
  EXPECT_LE(worst, 1e-8);
  const double t = 0.5;
  EXPECT_NEAR(log_basis(tr.beta(tr.size() - 1, 1), 1), t * t / (2 * std::numbers::pi), 1e-12);
}

TEST(MSystem, InitialData) {
  const auto tr = integrate_M_system(table40(), 10, 0.0, 1e-3, SignConvention(-1));
  EXPECT_EQ(tr.beta(0, 0), 1.0);
  for (std::size_t k = 0; k <= 10; ++k) EXPECT_EQ(tr.alpha(0, k), 0.0);
}

// The two orientations are mirror images under x -> 1 - x, which maps P_k to (-1)^k P_k.
TEST(MSystem, OrientationsAreMirrorImages) {
  const auto plus = integrate_M_system(table40(), 16, 0.05, 1e-3, SignConvention(1));
  const auto minus = integrate_M_system(table40(), 16, 0.05, 1e-3, SignConvention(-1));
  const std::size_t m = plus.size() - 1;
  for (std::size_t k = 0; k <= 16; ++k) {
    const double s = k % 2 == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(plus.alpha(m, k), s * minus.alpha(m, k), 1e-14 * (1 + std::abs(minus.alpha(m, k))));
    EXPECT_NEAR(plus.beta(m, k), s * minus.beta(m, k), 1e-14 * (1 + std::abs(minus.beta(m, k))));
  }
}

// Leading small-t orders, by hand: alpha_k ~ A_k t^{2k-1}, beta_k ~ B_k t^{2k} with
// A_k = D_{k-1}/(k(2k-1)), B_k = D_{k-1}/(2k^2), D_k = B_k - A_k, D_0 = 1.
TEST(MSystem, LeadingOrdersAtSmallTime) {
  const double t = 1e-3;
  const auto tr = integrate_M_system(table40(), 20, t, 1e-5, SignConvention(-1), with(Scheme::exp_euler));
  const std::size_t m = tr.size() - 1;
  double d = 1.0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const double kk = static_cast<double>(k);
    const double A = d / (kk * (2 * kk - 1)), B = d / (2 * kk * kk);
    d = B - A;
    EXPECT_NEAR(tr.alpha(m, k) / std::pow(t, 2 * kk - 1) / A, 1.0, 1e-2) << k;
    EXPECT_NEAR(tr.beta(m, k) / std::pow(t, 2 * kk) / B, 1.0, 1e-2) << k;
  }
}

TEST(MSystem, BandCheckerUsesOrientedLogBasis) {
  GammaTrajectory tr;
  tr.K = 1;
  tr.times = {0.0, 0.1};
  const double ref1 = std::exp(log_M_reference(0.1, 1)) * std::numbers::pi;  // P-basis value
  tr.states = {{0, 0, 1, 0}, {0, 0, 1, ref1}};
  EXPECT_TRUE(check_M_band(tr, 0.01, 100, 0.1, 1, SignConvention(-1)).pass);
  EXPECT_FALSE(check_M_band(tr, 0.01, 100, 0.1, 1, SignConvention(1)).pass);
}

TEST(Csv, Headers) {
  const auto gen = Generator::constant(build_generator_full(table40(), 3));
  const auto tr = integrate(gen, indicator_initial_state(3), 0.0, 1e-3);
  const auto csv = gamma_csv(tr, 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,k,gamma_k,reference,log10_gamma_k,log10_reference");
  EXPECT_NE(csv.find("\n0,0,1,1,0,0\n"), std::string::npos);
  const auto ms = msystem_csv(tr, 3);
  EXPECT_EQ(ms.substr(0, ms.find('\n')), "t,k,alpha_k,beta_k,beta_reference");
}
