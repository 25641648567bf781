#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/algebra.hpp"
#include "cascade/grid.hpp"

namespace cascade {

/// Linear map on stacked coefficients (alpha_0..alpha_K, beta_0..beta_K).
/// Column j is the image of P_j, column K+1+j the image of a P_j. Entries are
/// kept exactly and as doubles (converted once).
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t truncation, std::string description = {});

  std::size_t truncation() const { return k_; }
  std::size_t dim() const { return 2 * (k_ + 1); }
  std::size_t alpha_index(std::size_t j) const { return j; }
  std::size_t beta_index(std::size_t j) const { return k_ + 1 + j; }
  const std::string& description() const { return description_; }

  const Rational& exact(std::size_t row, std::size_t col) const { return exact_[col * dim() + row]; }
  double operator()(std::size_t row, std::size_t col) const { return values_[col * dim() + row]; }
  /// Sum of |coefficients| above degree K dropped when forming column col.
  double tail_mass(std::size_t col) const { return tail_[col]; }

  void set_column(std::size_t col, const Truncated<CascadeElement>& image);

  /// out += weight * M v
  void apply_add(std::span<const double> v, double weight, std::span<double> out) const;
  /// Exact product with the coefficients of e (degree <= K), truncated at K.
  CascadeElement apply_exact(const CascadeElement& e) const;

 private:
  std::size_t k_ = 0;
  std::string description_;
  std::vector<Rational> exact_;
  std::vector<double> values_;
  std::vector<double> tail_;
};

std::vector<double> stack(const CascadeElementF& e, std::size_t truncation);
CascadeElementF unstack(std::span<const double> v);

/// g -> H(a g) in coordinates. Requires K <= table.j_max().
OperatorMatrix build_generator_full(const CoeffTable& table, std::size_t K);

/// Only the leading part of H(a P_j), P_{j+1}/(j+1): gamma_k' = gamma_{k-1}/k.
OperatorMatrix build_generator_decoupled(std::size_t K);

/// Time-dependent linear generator G(t) = sum_i w_i(t) A_i.
struct Generator {
  struct Term {
    std::function<double(double)> weight;
    OperatorMatrix matrix;
  };
  std::vector<Term> terms;
  std::string description;

  std::size_t dim() const { return terms.empty() ? 0 : terms.front().matrix.dim(); }
  std::size_t truncation() const { return terms.empty() ? 0 : terms.front().matrix.truncation(); }
  /// out = G(t) v
  void apply(double t, std::span<const double> v, std::span<double> out) const;

  static Generator constant(OperatorMatrix m);
};

/// The four operators of the integrating-factor equation
///   M' = s [ -H M - (e^t-1) chi H M + (1-e^{-t}) H(chi M) + (e^t+e^{-t}-2) chi H(chi M) ]
/// with s the orientation of H.
struct MGeneratorFamily {
  std::array<OperatorMatrix, 4> ops;  // H, chi H, H chi, chi H chi
  SignConvention sign;

  static double weight(std::size_t i, double t, SignConvention sign);
  Generator generator() const;
};

MGeneratorFamily build_generator_M(const CoeffTable& table, std::size_t K, SignConvention sign);

/// beta_k' = t beta_{k-1} / k (H(a)-power basis); in the log basis this is
/// beta_k' = t beta_{k-1} / (pi k) with solution (t^2/2pi)^k/(k!)^2.
Generator build_generator_M_model(std::size_t K);

enum class Scheme { rk4, exp_euler };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct BlowUpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Stored states of a coefficient integration. States are stacked
/// (alpha_0..alpha_K, beta_0..beta_K).
struct GammaTrajectory {
  std::size_t K = 0;
  double dt = 0.0;
  Scheme scheme = Scheme::rk4;
  std::string description;
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  std::size_t size() const { return times.size(); }
  double alpha(std::size_t m, std::size_t k) const { return states[m][k]; }
  double beta(std::size_t m, std::size_t k) const { return states[m][K + 1 + k]; }
  double gamma(std::size_t m, std::size_t k) const { return alpha(m, k) + beta(m, k); }
};

struct IntegrateOptions {
  Scheme scheme = Scheme::rk4;
  std::size_t store_every = 1;  // keep every n-th step (the final state is always kept)
};

/// Fixed-step integration on t_m = m dt, m = 0..round(t_end/dt); t_end must be a
/// multiple of dt. exp_euler advances v <- exp(dt G(t + dt/2)) v with the
/// exponential summed to componentwise convergence: exact for constant
/// generators and for G(t) = t B.
GammaTrajectory integrate(const Generator& gen, std::span<const double> init, double t_end,
                          double dt, IntegrateOptions opts = {});

/// Stacked initial vector with beta_0 = 1 (the data f_0 = a).
std::vector<double> indicator_initial_state(std::size_t K);

struct BootstrapEntry {
  std::size_t k;
  double t;
  double value;
  double log_reference;  // log of the band reference
  double ratio;          // value / reference
  bool pass;
};

struct BootstrapReport {
  double c = 0.0;
  double delta = 0.0;
  std::size_t k_check = 0;
  std::vector<BootstrapEntry> entries;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool pass = true;
};

/// Relative slack allowed above the upper band edge, absorbing round-off in
/// values that sit on the edge (e.g. gamma_0 = 1 exactly at t = 0).
inline constexpr double kBandRoundoff = 1e-12;

/// c t^k/(k!)^2 <= gamma_k(t) <= t^k/(k!)^2 for 0 <= k <= k_check and stored
/// 0 < t <= delta (plus gamma_0 at t = 0). Compared in log space.
BootstrapReport check_gamma_lower_bound(const GammaTrajectory& traj, double c, double delta,
                                        std::size_t k_check);

/// C = max |b_j^k + c_j^k| / k^{k-j}; delta = 1/(20 sqrt C).
double empirical_tail_constant(const CoeffTable& table);
double bootstrap_delta(double tail_constant);

struct TailSummabilityReport {
  std::vector<double> sum_ratio;    // index k: sum_{j=k+1}^{k+200} a_j / a_k, a_j = j^j/(j!)^2
  std::vector<double> step_ratio;   // index k: a_{k+1}/a_k
  std::size_t first_halving_k = 0;  // smallest k with a_{k+1} <= a_k / 2
  std::size_t first_summable_k = 0; // smallest k with sum ratio < 1
  bool step_ratio_decreasing = true;
};

TailSummabilityReport check_tail_summability(std::size_t k_max = 100, std::size_t terms = 200);

struct ConvergenceReport {
  std::vector<std::size_t> K_list;
  std::vector<double> abs_diff;  // consecutive pairs, max |gamma^K - gamma^K'|
  std::vector<double> rel_diff;  // same, relative to |gamma^K'|
  bool monotone = true;
};

/// Runs builder(K) for each K with identical dt and compares gamma_k for
/// k <= min(K)/2 at every stored time.
ConvergenceReport truncation_convergence(const std::function<Generator(std::size_t)>& builder,
                                         const std::vector<std::size_t>& K_list, double t_end,
                                         double dt, IntegrateOptions opts = {});

GammaTrajectory integrate_M_system(const CoeffTable& table, std::size_t K, double t_end, double dt,
                                   SignConvention sign, IntegrateOptions opts = {});

/// Log-basis value of the beta_k coefficient: beta_k / pi^k.
double log_basis(double coeff, std::size_t k);

/// Band c_low <= ratio <= c_high for ratio = (-s)^k beta~_k / ((t^2/2pi)^k/(k!)^2),
/// beta~ the log-basis coefficient and s the orientation, 1 <= k <= k_check,
/// 0 < t <= delta.
BootstrapReport check_M_band(const GammaTrajectory& traj, double c_low, double c_high,
                             double delta, std::size_t k_check, SignConvention sign);

/// log((t^2/2pi)^k/(k!)^2)
double log_M_reference(double t, std::size_t k);
/// log(t^k/(k!)^2)
double log_gamma_reference(double t, std::size_t k);

std::string gamma_csv(const GammaTrajectory& traj, std::size_t k_max);
std::string msystem_csv(const GammaTrajectory& traj, std::size_t k_max);

}  // namespace cascade
