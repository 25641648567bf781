#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/algebra.hpp"

namespace cascade {

/// log I_0(y) for y >= 0: power series for y <= kBesselSwitch, asymptotic expansion above.
inline constexpr double kBesselSwitch = 2.0 * 5.477225575051661;  // 2 sqrt(30)
double log_i0(double y);
double log_i0_series(double y);
double log_i0_asymptotic(double y);

/// log sum_k z^k/(k!)^2 = log I_0(2 sqrt z), z >= 0.
double log_bessel_series(double z);

/// log G(x, t) with G = sum_k t^k Log|x/(x-1)|^k/(k!)^2, x in (1/2, 1), t >= 0.
double eval_G(double x, double t);

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LpOptions {
  double s_max = 0.0;         // initial truncation in s; 0 picks max(4 p^2 t, 50)
  bool extend = true;         // double s_max until the tail test passes
  double s_limit = 1e6;       // give up beyond this
  double tail_tol = 1e-12;    // tail bound relative to the accumulated integral
  double panel_width = 1.0;   // Gauss-Legendre panel width in s
};

struct LpResult {
  double log_integral = 0.0;  // log of int |f|^p
  double log_norm = 0.0;      // log_integral / p
  double s_max = 0.0;         // largest s reached by the substituted pieces
  std::size_t panels = 0;
  double log_tail = 0.0;      // log of the worst tail bound
};

/// (int_{1/2}^1 G^p dx)^{1/p} via x = 1 - e^{-s}.
LpResult lp_norm_G(double t, double p, const LpOptions& opts = {});

struct Interval {
  double lo;
  double hi;
};
using Window = std::vector<Interval>;

std::string describe_window(const Window& w);
/// Parses "[lo,hi]" or "[a,b]+[c,d]".
Window parse_window(const std::string& text);

/// L^p norm over a window of x -> sum_j (alpha_j + beta_j chi(x)) P_1(x)^j.
/// Within distance 1/2 of 0 or 1 the integral is taken in s with x = c -/+ e^{-s};
/// elsewhere with plain Gauss-Legendre panels.
LpResult lp_norm_cascade(const CascadeElementF& e, double p, const Window& window,
                         const LpOptions& opts = {});

struct GrowthRecord {
  std::string method;  // "series", "solver", "G", ...
  double t = 0.0;
  double p = 0.0;
  double log_norm = 0.0;
  std::string window;
};

struct ExponentFit {
  double t = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square
  double p_min = 0.0;
  double p_max = 0.0;
  std::size_t count = 0;
};

/// Least squares of log_norm against p (or against log p) at a common t.
/// Requires at least four distinct p.
ExponentFit fit_growth_exponent(const std::vector<GrowthRecord>& records);
ExponentFit fit_log_log(const std::vector<GrowthRecord>& records);

struct ElementaryReport {
  bool factorial_ok = true;  // (k!)^2 4^k >= (2k)! for k <= k_max
  std::size_t k_max = 200;
  double cosh_max_rel_error = 0.0;
  bool cosh_ok = true;
  double infimum_min = 0.0;     // min over the a-grid of int_0^inf e^{-(sqrt s - a)^2} ds
  double infimum_argmin = 0.0;
  bool infimum_ok = true;
  bool ok() const { return factorial_ok && cosh_ok && infimum_ok; }
};

ElementaryReport verify_elementary_inequalities();

/// Mantissa-exponent rendering of exp(log_value) that does not overflow.
std::string format_from_log(double log_value);

std::string growth_csv(const std::vector<GrowthRecord>& records);
std::string fits_csv(const std::vector<ExponentFit>& fits);

}  // namespace cascade
