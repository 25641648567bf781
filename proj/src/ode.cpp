#include "cascade/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cascade/io.hpp"
#include "cascade/kernels.hpp"

namespace cascade {

namespace {

constexpr double kBlowUp = 1e300;

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_state(std::span<const double> v, double t) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || std::abs(v[i]) > kBlowUp) {
      std::ostringstream msg;
      msg << "integration blew up at t = " << t << ", component " << i << " = " << v[i];
      throw BlowUpError(msg.str());
    }
  }
}

}  // namespace

OperatorMatrix::OperatorMatrix(std::size_t truncation, std::string description)
    : k_(truncation),
      description_(std::move(description)),
      exact_(dim() * dim()),
      values_(dim() * dim(), 0.0),
      tail_(dim(), 0.0) {}

void OperatorMatrix::set_column(std::size_t col, const Truncated<CascadeElement>& image) {
  if (col >= dim()) throw std::out_of_range("OperatorMatrix::set_column: column out of range");
  const CascadeElement e = image.value.resized(k_);
  for (std::size_t j = 0; j <= k_; ++j) {
    exact_[col * dim() + alpha_index(j)] = e.alpha[j];
    exact_[col * dim() + beta_index(j)] = e.beta[j];
    values_[col * dim() + alpha_index(j)] = e.alpha[j].get_d();
    values_[col * dim() + beta_index(j)] = e.beta[j].get_d();
  }
  tail_[col] = image.dropped_mass;
}

void OperatorMatrix::apply_add(std::span<const double> v, double weight,
                               std::span<double> out) const {
  const std::size_t n = dim();
  for (std::size_t col = 0; col < n; ++col) {
    const double s = weight * v[col];
    if (s == 0.0) continue;
    const double* c = values_.data() + col * n;
    for (std::size_t row = 0; row < n; ++row) out[row] += s * c[row];
  }
}

CascadeElement OperatorMatrix::apply_exact(const CascadeElement& e) const {
  if (e.max_power() > k_) throw std::invalid_argument("apply_exact: degree exceeds truncation");
  const CascadeElement in = e.resized(k_);
  CascadeElement out(k_);
  for (std::size_t j = 0; j <= k_; ++j) {
    for (int part = 0; part < 2; ++part) {
      const Rational& s = part == 0 ? in.alpha[j] : in.beta[j];
      if (s == 0) continue;
      const std::size_t col = part == 0 ? alpha_index(j) : beta_index(j);
      for (std::size_t i = 0; i <= k_; ++i) {
        out.alpha[i] += s * exact(alpha_index(i), col);
        out.beta[i] += s * exact(beta_index(i), col);
      }
    }
  }
  return out;
}

std::vector<double> stack(const CascadeElementF& e, std::size_t truncation) {
  const auto r = e.resized(truncation);
  std::vector<double> v(2 * (truncation + 1));
  std::copy(r.alpha.begin(), r.alpha.end(), v.begin());
  std::copy(r.beta.begin(), r.beta.end(), v.begin() + static_cast<std::ptrdiff_t>(truncation + 1));
  return v;
}

CascadeElementF unstack(std::span<const double> v) {
  if (v.size() < 2 || v.size() % 2 != 0) throw std::invalid_argument("unstack: bad length");
  const std::size_t n = v.size() / 2;
  CascadeElementF e(n - 1);
  std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), e.alpha.begin());
  std::copy(v.begin() + static_cast<std::ptrdiff_t>(n), v.end(), e.beta.begin());
  return e;
}

namespace {

// Column images of a linear map given on basis elements.
OperatorMatrix tabulate(std::size_t K, std::string description,
                        const std::function<Truncated<CascadeElement>(const CascadeElement&)>& op) {
  OperatorMatrix m(K, std::move(description));
  for (std::size_t j = 0; j <= K; ++j) {
    m.set_column(m.alpha_index(j), op(CascadeElement::power(j)));
    m.set_column(m.beta_index(j), op(CascadeElement::indicator_power(j)));
  }
  return m;
}

void require_table(const CoeffTable& table, std::size_t K) {
  if (K > table.j_max())
    throw std::invalid_argument("truncation K = " + std::to_string(K) + " exceeds table J_max = " +
                                std::to_string(table.j_max()));
}

}  // namespace

OperatorMatrix build_generator_full(const CoeffTable& table, std::size_t K) {
  require_table(table, K);
  return tabulate(K, "H(a g)", [&](const CascadeElement& e) { return apply_H_mult_a(e, table, K); });
}

OperatorMatrix build_generator_decoupled(std::size_t K) {
  return tabulate(K, "leading part of H(a g)", [K](const CascadeElement& e) {
    // a e = w a P_j  ->  w P_{j+1}/(j+1)
    const auto ae = mult_by_indicator(e);
    std::size_t j = 0;
    while (ae.beta[j] == 0 && j < ae.max_power()) ++j;
    CascadeElement out(j + 1);
    out.alpha[j + 1] = ae.beta[j] / Rational(static_cast<long>(j + 1));
    double dropped = 0.0;
    if (j + 1 > K) dropped = std::abs(out.alpha[j + 1].get_d());
    return Truncated<CascadeElement>{out.resized(std::min(j + 1, K)), dropped};
  });
}

void Generator::apply(double t, std::span<const double> v, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& term : terms) {
    const double w = term.weight(t);
    if (w != 0.0) term.matrix.apply_add(v, w, out);
  }
}

Generator Generator::constant(OperatorMatrix m) {
  Generator g;
  g.description = m.description();
  g.terms.push_back({[](double) { return 1.0; }, std::move(m)});
  return g;
}

double MGeneratorFamily::weight(std::size_t i, double t, SignConvention sign) {
  const double s = sign.factor();
  switch (i) {
    case 0: return -s;
    case 1: return -s * std::expm1(t);
    case 2: return -s * std::expm1(-t);
    case 3: {
      const double h = 2.0 * std::sinh(0.5 * t);  // e^t + e^{-t} - 2 = (e^{t/2} - e^{-t/2})^2
      return s * h * h;
    }
    default: throw std::out_of_range("MGeneratorFamily::weight: index must be 0..3");
  }
}

Generator MGeneratorFamily::generator() const {
  Generator g;
  g.description = sign.orientation() > 0 ? "M equation, +H" : "M equation, -H";
  for (std::size_t i = 0; i < 4; ++i) {
    const SignConvention s = sign;
    g.terms.push_back({[i, s](double t) { return weight(i, t, s); }, ops[i]});
  }
  return g;
}

MGeneratorFamily build_generator_M(const CoeffTable& table, std::size_t K, SignConvention sign) {
  require_table(table, K);
  MGeneratorFamily fam;
  fam.sign = sign;
  auto chi = [](const Truncated<CascadeElement>& t) {
    return Truncated<CascadeElement>{mult_by_indicator(t.value), t.dropped_mass};
  };
  fam.ops[0] = tabulate(K, "H", [&](const CascadeElement& e) { return apply_H(e, table, K); });
  fam.ops[1] =
      tabulate(K, "chi H", [&](const CascadeElement& e) { return chi(apply_H(e, table, K)); });
  fam.ops[2] = tabulate(K, "H chi",
                        [&](const CascadeElement& e) { return apply_H_mult_a(e, table, K); });
  fam.ops[3] = tabulate(
      K, "chi H chi", [&](const CascadeElement& e) { return chi(apply_H_mult_a(e, table, K)); });
  return fam;
}

Generator build_generator_M_model(std::size_t K) {
  OperatorMatrix b = tabulate(K, "model shift", [K](const CascadeElement& e) {
    // a P_j -> a P_{j+1}/(j+1); P_j -> 0
    CascadeElement out(K);
    double dropped = 0.0;
    for (std::size_t j = 0; j <= e.max_power(); ++j) {
      if (e.beta[j] == 0) continue;
      if (j + 1 <= K)
        out.beta[j + 1] = e.beta[j] / Rational(static_cast<long>(j + 1));
      else
        dropped += std::abs(e.beta[j].get_d()) / static_cast<double>(j + 1);
    }
    return Truncated<CascadeElement>{out, dropped};
  });
  Generator g;
  g.description = "M model: beta_k' = t beta_{k-1}/k";
  g.terms.push_back({[](double t) { return t; }, std::move(b)});
  return g;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "expEuler" || name == "exp_euler") return Scheme::exp_euler;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected rk4 or expEuler)");
}

std::string scheme_name(Scheme s) { return s == Scheme::rk4 ? "rk4" : "expEuler"; }

namespace {

void rk4_step(const Generator& gen, double t, double dt, std::vector<double>& v,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t n = v.size();
  gen.apply(t, v, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k1[i];
  gen.apply(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k2[i];
  gen.apply(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + dt * k3[i];
  gen.apply(t + dt, tmp, k4);
  kernels::serial::rk4_combine(v, k1, k2, k3, k4, dt, tmp);
  v.swap(tmp);
}

// exp(dt G(t + dt/2)) v by its Taylor series. Every component has to converge
// on its own: values span hundreds of orders of magnitude, and a component
// first reached at term m is zero in all earlier terms.
void exp_step(const Generator& gen, double t, double dt, std::vector<double>& v,
              std::vector<double>& term, std::vector<double>& next) {
  const std::size_t n = v.size();
  const double tm = t + 0.5 * dt;
  const std::size_t min_terms = n + 1;
  const std::size_t max_terms = 8 * n + 200;
  term = v;
  for (std::size_t m = 1;; ++m) {
    gen.apply(tm, term, next);
    const double scale = dt / static_cast<double>(m);
    bool converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      term[i] = scale * next[i];
      v[i] += term[i];
      if (std::abs(term[i]) > 1e-17 * std::abs(v[i])) converged = false;
    }
    if (m >= min_terms && converged) return;
    if (m >= max_terms)
      throw std::runtime_error("expEuler: exponential series did not converge; reduce dt");
  }
}

}  // namespace

GammaTrajectory integrate(const Generator& gen, std::span<const double> init, double t_end,
                          double dt, IntegrateOptions opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrate: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("integrate: t_end must be >= 0");
  if (init.size() != gen.dim()) throw std::invalid_argument("integrate: initial state size mismatch");
  if (opts.store_every == 0) throw std::invalid_argument("integrate: store_every must be >= 1");
  for (double x : init)
    if (!std::isfinite(x)) throw std::invalid_argument("integrate: non-finite initial state");
  const double steps_real = t_end / dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6)
    throw std::invalid_argument("integrate: t_end must be a whole number of steps dt");

  GammaTrajectory traj;
  traj.K = gen.truncation();
  traj.dt = dt;
  traj.scheme = opts.scheme;
  traj.description = gen.description;
  std::vector<double> v(init.begin(), init.end());
  traj.times.push_back(0.0);
  traj.states.push_back(v);

  const std::size_t n = v.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t m = 0; m < steps; ++m) {
    const double t = static_cast<double>(m) * dt;
    if (opts.scheme == Scheme::rk4)
      rk4_step(gen, t, dt, v, k1, k2, k3, k4, tmp);
    else
      exp_step(gen, t, dt, v, k1, k2);
    const double t_next = static_cast<double>(m + 1) * dt;
    check_state(v, t_next);
    if ((m + 1) % opts.store_every == 0 || m + 1 == steps) {
      traj.times.push_back(t_next);
      traj.states.push_back(v);
    }
  }
  return traj;
}

std::vector<double> indicator_initial_state(std::size_t K) {
  std::vector<double> v(2 * (K + 1), 0.0);
  v[K + 1] = 1.0;
  return v;
}

double log_gamma_reference(double t, std::size_t k) {
  if (k == 0) return 0.0;
  return static_cast<double>(k) * std::log(t) - 2.0 * std::lgamma(static_cast<double>(k) + 1.0);
}

double log_M_reference(double t, std::size_t k) {
  if (k == 0) return 0.0;
  return static_cast<double>(k) * std::log(t * t / (2.0 * std::numbers::pi)) -
         2.0 * std::lgamma(static_cast<double>(k) + 1.0);
}

double log_basis(double coeff, std::size_t k) {
  return coeff * std::exp(-static_cast<double>(k) * std::log(std::numbers::pi));
}

namespace {

BootstrapEntry band_entry(std::size_t k, double t, double value, double log_ref, double c_low,
                          double c_high) {
  BootstrapEntry e{k, t, value, log_ref, 0.0, false};
  if (value > 0.0) {
    const double log_ratio = std::log(value) - log_ref;
    e.ratio = std::exp(log_ratio);
    e.pass = log_ratio >= std::log(c_low) && log_ratio <= std::log(c_high) + kBandRoundoff;
  }
  return e;
}

void summarize(BootstrapReport& rep) {
  rep.pass = !rep.entries.empty();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (const auto& e : rep.entries) {
    rep.pass = rep.pass && e.pass;
    rep.min_ratio = std::min(rep.min_ratio, e.ratio);
    rep.max_ratio = std::max(rep.max_ratio, e.ratio);
  }
}

}  // namespace

BootstrapReport check_gamma_lower_bound(const GammaTrajectory& traj, double c, double delta,
                                        std::size_t k_check) {
  if (k_check > traj.K) throw std::invalid_argument("check_gamma_lower_bound: k_check > K");
  BootstrapReport rep;
  rep.c = c;
  rep.delta = delta;
  rep.k_check = k_check;
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const double t = traj.times[m];
    if (t > delta * (1.0 + 1e-12)) break;
    for (std::size_t k = 0; k <= k_check; ++k) {
      if (t == 0.0 && k > 0) continue;  // both sides vanish
      rep.entries.push_back(band_entry(k, t, traj.gamma(m, k), log_gamma_reference(t, k), c, 1.0));
    }
  }
  summarize(rep);
  return rep;
}

double empirical_tail_constant(const CoeffTable& table) {
  return verify_coeff_properties(table).tail_constant;
}

double bootstrap_delta(double tail_constant) {
  if (!(tail_constant > 0.0)) throw std::invalid_argument("bootstrap_delta: C must be > 0");
  return 1.0 / (20.0 * std::sqrt(tail_constant));
}

TailSummabilityReport check_tail_summability(std::size_t k_max, std::size_t terms) {
  auto log_a = [](std::size_t j) {
    const double x = static_cast<double>(j);
    return x * std::log(x) - 2.0 * std::lgamma(x + 1.0);
  };
  TailSummabilityReport rep;
  rep.sum_ratio.assign(k_max + 1, 0.0);
  rep.step_ratio.assign(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t j = k + 1; j <= k + terms; ++j) s = log_sum_exp(s, log_a(j));
    rep.sum_ratio[k] = std::exp(s - log_a(k));
    rep.step_ratio[k] = std::exp(log_a(k + 1) - log_a(k));
    if (rep.first_halving_k == 0 && rep.step_ratio[k] <= 0.5) rep.first_halving_k = k;
    if (rep.first_summable_k == 0 && rep.sum_ratio[k] < 1.0) rep.first_summable_k = k;
    if (k > 1 && rep.step_ratio[k] >= rep.step_ratio[k - 1]) rep.step_ratio_decreasing = false;
  }
  return rep;
}

ConvergenceReport truncation_convergence(const std::function<Generator(std::size_t)>& builder,
                                         const std::vector<std::size_t>& K_list, double t_end,
                                         double dt, IntegrateOptions opts) {
  if (K_list.size() < 2) throw std::invalid_argument("truncation_convergence: need >= 2 values of K");
  ConvergenceReport rep;
  rep.K_list = K_list;
  const std::size_t k_cmp = *std::min_element(K_list.begin(), K_list.end()) / 2;
  std::vector<GammaTrajectory> runs;
  for (std::size_t K : K_list) {
    const Generator gen = builder(K);
    runs.push_back(integrate(gen, indicator_initial_state(K), t_end, dt, opts));
  }
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    const auto& a = runs[r];
    const auto& b = runs[r + 1];
    double abs_d = 0.0, rel_d = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      for (std::size_t k = 0; k <= k_cmp; ++k) {
        const double d = std::abs(a.gamma(m, k) - b.gamma(m, k));
        abs_d = std::max(abs_d, d);
        const double ref = std::abs(b.gamma(m, k));
        if (ref > 0.0) rel_d = std::max(rel_d, d / ref);
        else if (d > 0.0) rel_d = std::numeric_limits<double>::infinity();
      }
    }
    rep.abs_diff.push_back(abs_d);
    rep.rel_diff.push_back(rel_d);
  }
  for (std::size_t i = 1; i < rep.abs_diff.size(); ++i)
    if (rep.abs_diff[i] > rep.abs_diff[i - 1]) rep.monotone = false;
  return rep;
}

GammaTrajectory integrate_M_system(const CoeffTable& table, std::size_t K, double t_end, double dt,
                                   SignConvention sign, IntegrateOptions opts) {
  const Generator gen = build_generator_M(table, K, sign).generator();
  return integrate(gen, indicator_initial_state(K), t_end, dt, opts);
}

BootstrapReport check_M_band(const GammaTrajectory& traj, double c_low, double c_high,
                             double delta, std::size_t k_check, SignConvention sign) {
  if (k_check > traj.K) throw std::invalid_argument("check_M_band: k_check > K");
  BootstrapReport rep;
  rep.c = c_low;
  rep.delta = delta;
  rep.k_check = k_check;
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const double t = traj.times[m];
    if (t > delta * (1.0 + 1e-12)) break;
    if (t == 0.0) continue;
    for (std::size_t k = 0; k <= k_check; ++k) {
      const double orient = (sign.orientation() < 0 || k % 2 == 0) ? 1.0 : -1.0;
      const double value = orient * log_basis(traj.beta(m, k), k);
      rep.entries.push_back(band_entry(k, t, value, log_M_reference(t, k), c_low, c_high));
    }
  }
  summarize(rep);
  return rep;
}

std::string gamma_csv(const GammaTrajectory& traj, std::size_t k_max) {
  std::ostringstream out;
  out << "t,k,gamma_k,reference,log10_gamma_k,log10_reference\n";
  const double ln10 = std::log(10.0);
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const double t = traj.times[m];
    for (std::size_t k = 0; k <= std::min(k_max, traj.K); ++k) {
      const double g = traj.gamma(m, k);
      const double log_ref = (t == 0.0 && k > 0) ? -std::numeric_limits<double>::infinity()
                                                 : log_gamma_reference(t, k);
      out << format_double(t) << ',' << k << ',' << format_double(g) << ','
          << format_double(std::exp(log_ref)) << ','
          << format_double(g > 0 ? std::log10(g) : -std::numeric_limits<double>::infinity()) << ','
          << format_double(log_ref / ln10) << '\n';
    }
  }
  return out.str();
}

std::string msystem_csv(const GammaTrajectory& traj, std::size_t k_max) {
  std::ostringstream out;
  out << "t,k,alpha_k,beta_k,beta_reference\n";
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const double t = traj.times[m];
    for (std::size_t k = 0; k <= std::min(k_max, traj.K); ++k) {
      const double ref = (t == 0.0 && k > 0) ? 0.0 : std::exp(log_M_reference(t, k));
      out << format_double(t) << ',' << k << ',' << format_double(log_basis(traj.alpha(m, k), k))
          << ',' << format_double(log_basis(traj.beta(m, k), k)) << ',' << format_double(ref)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace cascade
