#include "cascade/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cascade/hilbert.hpp"
#include "cascade/io.hpp"
#include "cascade/kernels.hpp"
#include "cascade/ode.hpp"

namespace cascade {

namespace kp = kernels::parallel;

namespace {

constexpr double kBlowUp = 1e300;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("EvolutionSpec." + field + ": " + why);
}

std::size_t step_index(double t, double dt, const std::string& field) {
  const double m = t / dt;
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-6) bad_field(field, "time " + format_double(t) + " is not a multiple of dt");
  return static_cast<std::size_t>(r);
}

template <class F>
void for_each_window_node(const GridSpec& g, const Window& w, double exclusion, F&& f) {
  for (const auto& iv : w) {
    const std::size_t i1 = g.lower_index(iv.hi);
    for (std::size_t i = g.lower_index(iv.lo); i < i1; ++i) {
      const double x = g.node(i);
      if (std::abs(x) < exclusion || std::abs(x - 1.0) < exclusion) continue;
      f(i);
    }
  }
}

// Right-hand side evaluator with scratch storage for one grid size.
class RightHandSide {
 public:
  RightHandSide(const EvolutionSpec& spec)
      : eq_(spec.equation),
        s_(spec.sign.factor()),
        a_(equation_multiplier(spec)),
        chi_(sample_indicator(spec.grid())),
        h_(spec.n_points),
        t1_(spec.n_points),
        t2_(spec.n_points),
        t3_(spec.n_points) {}

  void operator()(double t, std::span<const double> f, std::span<double> out) {
    switch (eq_) {
      case Equation::hilbert_chi:
      case Equation::hilbert_const_a:
      case Equation::hilbert_smooth_a:
        kp::multiply(a_.values(), f, t1_);
        h_.apply(t1_, out, s_);
        break;
      case Equation::g_equation:
        h_.apply(f, out, -s_);
        kp::multiply(chi_.values(), f, t1_);
        kp::axpy(-1.0, t1_, out);
        break;
      case Equation::M_equation: {
        const double w2 = -std::expm1(t), w3 = -std::expm1(-t);
        const double sh = 2.0 * std::sinh(0.5 * t), w4 = sh * sh;
        h_.apply(f, t1_);                 // H M
        kp::multiply(chi_.values(), f, t2_);
        h_.apply(t2_, t2_);               // H(chi M)
        std::fill(out.begin(), out.end(), 0.0);
        kp::axpy(-s_, t1_, out);
        kp::axpy(s_ * w3, t2_, out);
        kp::multiply(chi_.values(), t1_, t3_);
        kp::axpy(s_ * w2, t3_, out);
        kp::multiply(chi_.values(), t2_, t3_);
        kp::axpy(s_ * w4, t3_, out);
        break;
      }
    }
  }

 private:
  Equation eq_;
  double s_;
  GridFunction a_;
  GridFunction chi_;
  HilbertTransformer h_;
  std::vector<double> t1_, t2_, t3_;
};

void check_finite(std::span<const double> v, double t) {
  for (double x : v) {
    if (!std::isfinite(x) || std::abs(x) > kBlowUp) {
      std::ostringstream msg;
      msg << "solver: non-finite or blown-up state at t = " << format_double(t);
      throw BlowUpError(msg.str());
    }
  }
}

}  // namespace

Equation parse_equation(const std::string& name) {
  if (name == "hilbert_chi") return Equation::hilbert_chi;
  if (name == "hilbert_const_a") return Equation::hilbert_const_a;
  if (name == "hilbert_smooth_a") return Equation::hilbert_smooth_a;
  if (name == "g_equation") return Equation::g_equation;
  if (name == "M_equation") return Equation::M_equation;
  throw std::invalid_argument("unknown equation '" + name + "'");
}

std::string equation_name(Equation e) {
  switch (e) {
    case Equation::hilbert_chi: return "hilbert_chi";
    case Equation::hilbert_const_a: return "hilbert_const_a";
    case Equation::hilbert_smooth_a: return "hilbert_smooth_a";
    case Equation::g_equation: return "g_equation";
    case Equation::M_equation: return "M_equation";
  }
  return "?";
}

void EvolutionSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) bad_field("dt", "must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) bad_field("t_end", "must be >= 0");
  step_index(t_end, dt, "t_end");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) bad_field("half_width", "must be positive");
  if (n_points < 16 || !is_power_of_two(n_points)) bad_field("n_points", "must be a power of two >= 16");
  if (!std::isfinite(const_a)) bad_field("const_a", "must be finite");
  if (!(smooth_width > 0.0 && smooth_width < 1.0)) bad_field("smooth_width", "must lie in (0, 1)");
  for (double ts : snapshot_times) {
    if (!(ts >= 0.0 && ts <= t_end + 1e-12)) bad_field("snapshot_times", "must lie in [0, t_end]");
    step_index(ts, dt, "snapshot_times");
  }
  for (double p : p_list)
    if (!(p >= 1.0) || !std::isfinite(p)) bad_field("p_list", "every p must be >= 1");
  if (window.empty()) bad_field("window", "must not be empty");
  for (const auto& iv : window)
    if (!(iv.lo < iv.hi) || iv.lo < -half_width || iv.hi > half_width)
      bad_field("window", "intervals need lo < hi inside [-half_width, half_width]");
}

GridFunction equation_multiplier(const EvolutionSpec& spec) {
  const GridSpec g = spec.grid();
  switch (spec.equation) {
    case Equation::hilbert_const_a:
      return GridFunction(g, std::vector<double>(g.size(), spec.const_a));
    case Equation::hilbert_smooth_a:
      return sample_mollified_indicator(g, spec.smooth_width);
    default:
      return sample_indicator(g);
  }
}

double grid_log_lp_norm(const GridFunction& f, double p, const Window& window) {
  if (!(p >= 1.0)) throw std::invalid_argument("grid_log_lp_norm: p must be >= 1");
  const GridSpec& g = f.grid();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> parts;
  for (const auto& iv : window) {
    const std::size_t i0 = g.lower_index(iv.lo), i1 = g.lower_index(iv.hi);
    if (i1 <= i0) continue;
    parts.push_back(kp::log_lp_sum(f.values().subspan(i0, i1 - i0), p, g.cell()));
    m = std::max(m, parts.back());
  }
  if (std::isinf(m)) return m;
  double acc = 0.0;
  for (double v : parts) acc += std::exp(v - m);
  return (m + std::log(acc)) / p;
}

SolverTrajectory solve(const EvolutionSpec& spec, const GridFunction& f0) {
  spec.validate();
  if (!(f0.grid() == spec.grid())) throw std::invalid_argument("solve: f0 is not on the spec grid");
  const std::size_t n = spec.n_points;
  const std::size_t m_end = step_index(spec.t_end, spec.dt, "t_end");
  std::set<std::size_t> stored{0, m_end};
  for (double ts : spec.snapshot_times) stored.insert(step_index(ts, spec.dt, "snapshot_times"));

  SolverTrajectory tr;
  tr.spec = spec;
  auto record = [&](std::size_t m, const std::vector<double>& f) {
    tr.times.push_back(static_cast<double>(m) * spec.dt);
    tr.snapshots.emplace_back(spec.grid(), f);
    std::vector<double> norms;
    for (double p : spec.p_list) norms.push_back(grid_log_lp_norm(tr.snapshots.back(), p, spec.window));
    tr.log_norms.push_back(std::move(norms));
  };

  RightHandSide rhs(spec);
  std::vector<double> f(f0.values().begin(), f0.values().end()), y(n), k1(n), k2(n), k3(n), k4(n);
  record(0, f);
  const double dt = spec.dt;
  for (std::size_t m = 0; m < m_end; ++m) {
    const double t = static_cast<double>(m) * dt;
    rhs(t, f, k1);
    std::copy(f.begin(), f.end(), y.begin());
    kp::axpy(0.5 * dt, k1, y);
    rhs(t + 0.5 * dt, y, k2);
    std::copy(f.begin(), f.end(), y.begin());
    kp::axpy(0.5 * dt, k2, y);
    rhs(t + 0.5 * dt, y, k3);
    std::copy(f.begin(), f.end(), y.begin());
    kp::axpy(dt, k3, y);
    rhs(t + dt, y, k4);
    kp::rk4_combine(f, k1, k2, k3, k4, dt, f);
    check_finite(f, t + dt);
    ++tr.steps;
    if (stored.count(m + 1)) record(m + 1, f);
  }
  tr.max_abs_final = kp::max_abs(f);
  return tr;
}

SolverTrajectory solve_M(EvolutionSpec spec, const GridFunction& f0) {
  spec.equation = Equation::M_equation;
  return solve(spec, f0);
}

GridFunction evaluate_on_grid(const CascadeElementF& e, const GridSpec& grid) {
  const auto basis = sample_log_kernel(grid);
  const auto chi = sample_indicator(grid);
  std::vector<double> out(grid.size());
  kp::horner_series(e.alpha, e.beta, basis.values(), chi.values(), out);
  return GridFunction(grid, std::move(out));
}

ReductionReport solve_g_and_verify_reduction(EvolutionSpec spec) {
  const GridSpec g = spec.grid();
  const auto chi = sample_indicator(g);
  spec.equation = Equation::g_equation;
  const auto gt = solve(spec, chi);
  spec.equation = Equation::M_equation;
  const auto mt = solve(spec, chi);
  ReductionReport rep;
  for (std::size_t s = 0; s < gt.times.size(); ++s) {
    const double t = gt.times[s];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double factor = std::exp(t * chi[i]);
      rep.factor_identity_error =
          std::max(rep.factor_identity_error, std::abs(factor - (std::expm1(t) * chi[i] + 1.0)));
      worst = std::max(worst, std::abs(factor * gt.snapshots[s][i] - mt.snapshots[s][i]));
    }
    rep.times.push_back(t);
    rep.max_discrepancy.push_back(worst);
    rep.worst = std::max(rep.worst, worst);
  }
  return rep;
}

GrowthExperiment growth_experiment(EvolutionSpec spec, const GridFunction& f0, const std::vector<double>& p_list,
                                   const std::vector<double>& t_list) {
  if (p_list.empty()) throw std::invalid_argument("growth_experiment: p_list is empty");
  if (t_list.empty()) throw std::invalid_argument("growth_experiment: t_list is empty");
  spec.p_list = p_list;
  spec.snapshot_times = t_list;
  spec.t_end = *std::max_element(t_list.begin(), t_list.end());
  const auto tr = solve(spec, f0);

  GrowthExperiment out;
  const std::string method = "solver:" + equation_name(spec.equation);
  const std::string window = describe_window(spec.window);
  for (double t : t_list) {
    std::size_t s = 0;
    while (s < tr.times.size() && std::abs(tr.times[s] - t) > 1e-9 * std::max(1.0, t)) ++s;
    std::vector<GrowthRecord> at_t;
    for (std::size_t i = 0; i < p_list.size(); ++i) at_t.push_back({method, t, p_list[i], tr.log_norms[s][i], window});
    out.records.insert(out.records.end(), at_t.begin(), at_t.end());
    try {
      out.fits.push_back(fit_growth_exponent(at_t));
      out.log_fits.push_back(fit_log_log(at_t));
    } catch (const std::invalid_argument& e) {
      out.warnings.push_back("fit skipped at t = " + format_double(t) + ": " + e.what());
    }
  }
  return out;
}

double grid_expansion_error(const CoeffTable& table, std::size_t k, const GridSpec& grid, const Window& window,
                            double exclusion) {
  const auto p1 = sample_log_kernel(grid);
  const auto chi = sample_indicator(grid);
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = chi[i] * std::pow(p1[i], static_cast<double>(k));
  const auto hf = hilbert_transform(GridFunction(grid, std::move(f)));
  const auto exact = evaluate_on_grid(table.row_f(k), grid);
  double worst = 0.0;
  for_each_window_node(grid, window, exclusion,
                       [&](std::size_t i) { worst = std::max(worst, std::abs(hf[i] - exact[i])); });
  return worst;
}

double relative_l2_gap(const GridFunction& f, const GridFunction& reference, const Window& window,
                       double exclusion) {
  require_same_grid(f, reference, "relative_l2_gap");
  double num = 0.0, den = 0.0;
  for_each_window_node(f.grid(), window, exclusion, [&](std::size_t i) {
    const double d = f[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  });
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace cascade
