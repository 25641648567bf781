#include "cascade/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "cascade/io.hpp"
#include "cascade/rational.hpp"

namespace cascade {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

// Running log of a sum of exponentials.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term > max_) {
      acc_ = acc_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      acc_ += std::exp(log_term - max_);
    }
  }
  void merge(const LogSum& o) {
    if (o.max_ == -kInf) return;
    add(o.max_ + std::log(o.acc_));
  }
  double value() const { return max_ == -kInf ? -kInf : max_ + std::log(acc_); }

 private:
  double max_ = -kInf;
  double acc_ = 0.0;
};

struct GaussRule {
  std::vector<double> x, w;
  GaussRule() {
    using rule = boost::math::quadrature::gauss<double, 30>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      x.push_back(a[i]);
      w.push_back(wt[i]);
      if (a[i] != 0.0) {
        x.push_back(-a[i]);
        w.push_back(wt[i]);
      }
    }
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule r;
  return r;
}

using LogIntegrand = std::function<double(double)>;

// Adds log int_a^b e^{psi} over ceil((b-a)/h) equal panels; returns the panel count.
std::size_t add_panels(const LogIntegrand& psi, double a, double b, double h, LogSum& sum) {
  if (!(b > a)) return 0;
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / h));
  const double width = (b - a) / static_cast<double>(n);
  const auto& g = gauss_rule();
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double half = 0.5 * width, mid = lo + half;
    for (std::size_t q = 0; q < g.x.size(); ++q) sum.add(std::log(g.w[q] * half) + psi(mid + half * g.x[q]));
  }
  return n;
}

struct PieceResult {
  LogSum sum;
  double s_end = 0.0;
  std::size_t panels = 0;
  double log_tail = -kInf;
};

// int_{s0}^inf e^{psi}; the tail beyond s_max is bounded by e^{psi(s_max)}/|psi'(s_max)|,
// valid once psi is decreasing and concave there.
PieceResult integrate_to_infinity(const LogIntegrand& psi, double s0, double s_init,
                                  const LpOptions& opts) {
  PieceResult r;
  double lo = s0, s_max = std::max(s_init, s0 + 1.0);
  for (;;) {
    r.panels += add_panels(psi, lo, s_max, opts.panel_width, r.sum);
    const double total = r.sum.value();
    const double v = psi(s_max);
    if (v == -kInf) {
      r.log_tail = -kInf;
      break;
    }
    const double eps = 1e-4 * std::max(1.0, s_max);
    const double d = (psi(s_max + eps) - psi(s_max - eps)) / (2.0 * eps);
    if (d < 0.0 && std::isfinite(d)) {
      r.log_tail = v - std::log(-d);
      if (r.log_tail <= total + std::log(opts.tail_tol)) break;
    } else {
      r.log_tail = kInf;
    }
    if (!opts.extend || 2.0 * s_max > opts.s_limit) {
      throw QuadratureError("L^p quadrature: tail not converged at s_max = " + format_double(s_max) +
                            " (tail bound exp(" + format_double(r.log_tail) + "), integral exp(" +
                            format_double(total) + "))");
    }
    lo = s_max;
    s_max *= 2.0;
  }
  r.s_end = s_max;
  return r;
}

double log_i0_series_z(double z) {
  // sum_k z^k/(k!)^2
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 10000; ++k) {
    term *= z / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::log(sum);
}

// Log G in the variable s with x = 1 - e^{-s}: Log|x/(x-1)| = s + log(1 - e^{-s}).
double log_G_at_s(double s, double t) {
  return log_bessel_series(t * (s + std::log1p(-std::exp(-s))));
}

void require_p(double p, const char* who) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument(std::string(who) + ": p must be >= 1");
}

}  // namespace

double log_i0_series(double y) {
  if (!(y >= 0.0)) throw std::domain_error("log_i0: y must be >= 0");
  return log_i0_series_z(0.25 * y * y);
}

double log_i0_asymptotic(double y) {
  if (!(y > 0.0)) throw std::domain_error("log_i0_asymptotic: y must be > 0");
  // I_0(y) ~ e^y/sqrt(2 pi y) sum_k ((2k-1)!!)^2/(k! (8y)^k), all terms positive;
  // summed up to the smallest term.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * y);
    if (next >= term || next < 1e-17 * sum) break;
    term = next;
    sum += term;
  }
  return y - 0.5 * std::log(2.0 * pi * y) + std::log(sum);
}

double log_i0(double y) { return y <= kBesselSwitch ? log_i0_series(y) : log_i0_asymptotic(y); }

double log_bessel_series(double z) {
  if (!(z >= 0.0)) throw std::domain_error("log_bessel_series: z must be >= 0");
  if (z <= 30.0) return log_i0_series_z(z);
  return log_i0_asymptotic(2.0 * std::sqrt(z));
}

double eval_G(double x, double t) {
  if (!(x > 0.5 && x < 1.0)) throw std::domain_error("eval_G: x must lie in (1/2, 1)");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("eval_G: t must be >= 0");
  return log_bessel_series(t * (std::log(x) - std::log1p(-x)));
}

LpResult lp_norm_G(double t, double p, const LpOptions& opts) {
  require_p(p, "lp_norm_G");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("lp_norm_G: t must be >= 0");
  auto psi = [t, p](double s) { return -s + p * log_G_at_s(s, t); };
  // e^{-s + 2p sqrt(ts)} peaks at s = p^2 t
  const double s_init = opts.s_max > 0.0 ? opts.s_max : std::max(4.0 * p * p * t, 50.0);
  const auto piece = integrate_to_infinity(psi, std::log(2.0), s_init, opts);
  LpResult r;
  r.log_integral = piece.sum.value();
  r.log_norm = r.log_integral / p;
  r.s_max = piece.s_end;
  r.panels = piece.panels;
  r.log_tail = piece.log_tail;
  return r;
}

std::string describe_window(const Window& w) {
  std::string out;
  for (const auto& iv : w) {
    if (!out.empty()) out += "+";
    out += "[" + format_double(iv.lo) + "," + format_double(iv.hi) + "]";
  }
  return out;
}

Window parse_window(const std::string& text) {
  Window w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '+' || text[pos] == ' ') {
      ++pos;
      continue;
    }
    const auto close = text.find(']', pos);
    if (text[pos] != '[' || close == std::string::npos)
      throw std::invalid_argument("window: expected [lo,hi] in '" + text + "'");
    const std::string body = text.substr(pos + 1, close - pos - 1);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("window: missing comma in '" + text + "'");
    try {
      std::size_t n1 = 0, n2 = 0;
      const std::string a = body.substr(0, comma), b = body.substr(comma + 1);
      const double lo = std::stod(a, &n1), hi = std::stod(b, &n2);
      if (n1 != a.size() || n2 != b.size()) throw std::invalid_argument("trailing characters");
      w.push_back({lo, hi});
    } catch (const std::exception&) {
      throw std::invalid_argument("window: bad number in '" + text + "'");
    }
    pos = close + 1;
  }
  if (w.empty()) throw std::invalid_argument("window: empty");
  for (const auto& iv : w)
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("window: need finite lo < hi in '" + text + "'");
  return w;
}

LpResult lp_norm_cascade(const CascadeElementF& e, double p, const Window& window, const LpOptions& opts) {
  require_p(p, "lp_norm_cascade");
  if (window.empty()) throw std::invalid_argument("lp_norm_cascade: empty window");
  std::size_t degree = 0;
  for (std::size_t j = 0; j <= e.max_power(); ++j)
    if (e.alpha[j] != 0.0 || e.beta[j] != 0.0) degree = j;
  auto log_abs_f = [&e](double p1, bool chi) {
    double v = 0.0;
    for (std::size_t j = e.max_power() + 1; j-- > 0;) v = v * p1 + (chi ? e.alpha[j] + e.beta[j] : e.alpha[j]);
    return std::log(std::abs(v));
  };
  const double s_init = std::max(4.0 * p * static_cast<double>(degree), 50.0);

  LogSum total;
  LpResult r;
  r.log_tail = -kInf;
  auto substituted = [&](double s_lo, double s_hi, auto p1_of_s, bool chi) {
    auto psi = [&](double s) { return -s + p * log_abs_f(p1_of_s(s), chi); };
    if (std::isinf(s_hi)) {
      auto piece = integrate_to_infinity(psi, s_lo, s_init, opts);
      total.merge(piece.sum);
      r.panels += piece.panels;
      r.s_max = std::max(r.s_max, piece.s_end);
      r.log_tail = std::max(r.log_tail, piece.log_tail);
    } else {
      LogSum sum;
      r.panels += add_panels(psi, s_lo, s_hi, opts.panel_width, sum);
      total.merge(sum);
      r.s_max = std::max(r.s_max, s_hi);
    }
  };
  auto s_of = [](double d) { return d <= 0.0 ? kInf : -std::log(d); };

  for (const auto& iv : window) {
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("lp_norm_cascade: window interval with lo >= hi");
    std::vector<double> cuts{iv.lo};
    for (double b : {-0.5, 0.0, 0.5, 1.0, 1.5})
      if (b > iv.lo && b < iv.hi) cuts.push_back(b);
    cuts.push_back(iv.hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double u = cuts[i], v = cuts[i + 1];
      if (u >= -0.5 && v <= 0.0) {  // x = -e^{-s}
        substituted(s_of(-u), s_of(-v),
                    [](double s) { return (-s - std::log1p(std::exp(-s))) / pi; }, false);
      } else if (u >= 0.0 && v <= 0.5) {  // x = e^{-s}
        substituted(s_of(v), s_of(u), [](double s) { return (-s - std::log1p(-std::exp(-s))) / pi; }, true);
      } else if (u >= 0.5 && v <= 1.0) {  // x = 1 - e^{-s}
        substituted(s_of(1.0 - u), s_of(1.0 - v),
                    [](double s) { return (s + std::log1p(-std::exp(-s))) / pi; }, true);
      } else if (u >= 1.0 && v <= 1.5) {  // x = 1 + e^{-s}
        substituted(s_of(v - 1.0), s_of(u - 1.0),
                    [](double s) { return (s + std::log1p(std::exp(-s))) / pi; }, false);
      } else {
        auto psi = [&](double x) {
          const double p1 = (std::log(std::abs(x)) - std::log(std::abs(x - 1.0))) / pi;
          return p * log_abs_f(p1, x > 0.0 && x < 1.0);
        };
        LogSum sum;
        r.panels += add_panels(psi, u, v, 0.25 * opts.panel_width, sum);
        total.merge(sum);
      }
    }
  }
  r.log_integral = total.value();
  r.log_norm = r.log_integral / p;
  return r;
}

namespace {

ExponentFit least_squares(const std::vector<GrowthRecord>& records, bool log_p) {
  if (records.size() < 4) throw std::invalid_argument("fit_growth_exponent: need at least 4 records");
  std::set<double> distinct;
  const double t = records.front().t;
  for (const auto& r : records) {
    if (std::abs(r.t - t) > 1e-12 * std::max(1.0, std::abs(t)))
      throw std::invalid_argument("fit_growth_exponent: records must share t");
    if (!std::isfinite(r.log_norm)) throw std::invalid_argument("fit_growth_exponent: non-finite log-norm");
    if (log_p && !(r.p > 0.0)) throw std::invalid_argument("fit_log_log: p must be positive");
    distinct.insert(r.p);
  }
  if (distinct.size() < 4) throw std::invalid_argument("fit_growth_exponent: degenerate p-range (< 4 distinct p)");
  const double n = static_cast<double>(records.size());
  double sx = 0, sy = 0;
  for (const auto& r : records) {
    sx += log_p ? std::log(r.p) : r.p;
    sy += r.log_norm;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& r : records) {
    const double dx = (log_p ? std::log(r.p) : r.p) - mx;
    sxx += dx * dx;
    sxy += dx * (r.log_norm - my);
  }
  ExponentFit f;
  f.t = t;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (const auto& r : records) {
    const double x = log_p ? std::log(r.p) : r.p;
    const double d = r.log_norm - (f.intercept + f.slope * x);
    ss += d * d;
  }
  f.residual = std::sqrt(ss / n);
  f.p_min = *distinct.begin();
  f.p_max = *distinct.rbegin();
  f.count = records.size();
  return f;
}

}  // namespace

ExponentFit fit_growth_exponent(const std::vector<GrowthRecord>& records) { return least_squares(records, false); }
ExponentFit fit_log_log(const std::vector<GrowthRecord>& records) { return least_squares(records, true); }

ElementaryReport verify_elementary_inequalities() {
  ElementaryReport rep;
  BigInt fact = 1, fact2 = 1, four = 1;
  for (std::size_t k = 0; k <= rep.k_max; ++k) {
    if (k > 0) {
      fact *= static_cast<unsigned long>(k);
      fact2 *= static_cast<unsigned long>(2 * k - 1);
      fact2 *= static_cast<unsigned long>(2 * k);
      four *= 4;
    }
    if (fact * fact * four < fact2) rep.factorial_ok = false;
  }

  for (double x : {0.0, 1e-3, 0.25, 1.0, 2.0, 10.0, 50.0, 100.0, 400.0}) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
      term *= x / ((2.0 * k - 1.0) * (2.0 * k));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    const double ref = std::cosh(std::sqrt(x));
    rep.cosh_max_rel_error = std::max(rep.cosh_max_rel_error, std::abs(sum - ref) / ref);
  }
  rep.cosh_ok = rep.cosh_max_rel_error <= 1e-13;

  // int_0^inf e^{-(sqrt s - a)^2} ds = 2 int_0^inf u e^{-(u-a)^2} du; the Gaussian factor is
  // below e^{-144} outside |u - a| < 12.
  rep.infimum_min = kInf;
  const auto& g = gauss_rule();
  for (int i = 0; i <= 1000; ++i) {
    const double a = 0.05 * i;
    const double lo = std::max(0.0, a - 12.0), hi = a + 12.0;
    double total = 0.0;
    const int panels = static_cast<int>(std::ceil(hi - lo));
    const double width = (hi - lo) / panels;
    for (int j = 0; j < panels; ++j) {
      const double half = 0.5 * width, mid = lo + width * j + half;
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        const double u = mid + half * g.x[q];
        total += g.w[q] * half * 2.0 * u * std::exp(-(u - a) * (u - a));
      }
    }
    if (total < rep.infimum_min) {
      rep.infimum_min = total;
      rep.infimum_argmin = a;
    }
  }
  rep.infimum_ok = rep.infimum_min >= 0.5 - 1e-9;
  return rep;
}

std::string format_from_log(double log_value) {
  if (std::isnan(log_value)) return "nan";
  if (log_value == -kInf) return "0";
  if (log_value == kInf) return "inf";
  const double l10 = log_value / std::numbers::ln10;
  double e = std::floor(l10);
  double m = std::pow(10.0, l10 - e);
  if (std::round(m * 1e5) >= 1e6) {
    m /= 10.0;
    e += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5fe%+03.0f", m, e);
  return buf;
}

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

std::string growth_csv(const std::vector<GrowthRecord>& records) {
  std::ostringstream os;
  os << "method,t,p,log_norm,norm_display,window\n";
  for (const auto& r : records)
    os << csv_field(r.method) << ',' << format_double(r.t) << ',' << format_double(r.p) << ','
       << format_double(r.log_norm) << ',' << format_from_log(r.log_norm) << ',' << csv_field(r.window) << '\n';
  return os.str();
}

std::string fits_csv(const std::vector<ExponentFit>& fits) {
  std::ostringstream os;
  os << "t,slope,intercept,residual\n";
  for (const auto& f : fits)
    os << format_double(f.t) << ',' << format_double(f.slope) << ',' << format_double(f.intercept) << ','
       << format_double(f.residual) << '\n';
  return os.str();
}

}  // namespace cascade
