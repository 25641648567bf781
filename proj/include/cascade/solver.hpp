#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cascade/algebra.hpp"
#include "cascade/grid.hpp"
#include "cascade/quadrature.hpp"

namespace cascade {

enum class Equation {
  hilbert_chi,       // f' = s H(chi f)
  hilbert_const_a,   // f' = s H(c f)
  hilbert_smooth_a,  // f' = s H(a f), a the cosine-tapered indicator
  g_equation,        // g' = -chi g - s H(g)
  M_equation,        // M' = s[-H M - (e^t-1) chi H M + (1-e^{-t}) H(chi M) + (e^t+e^{-t}-2) chi H(chi M)]
};

Equation parse_equation(const std::string& name);
std::string equation_name(Equation e);

struct EvolutionSpec {
  Equation equation = Equation::hilbert_chi;
  SignConvention sign;
  double t_end = 0.1;
  double dt = 1e-4;
  double half_width = 32.0;
  std::size_t n_points = std::size_t{1} << 16;
  double const_a = 1.0;        // hilbert_const_a
  double smooth_width = 0.1;   // hilbert_smooth_a taper width
  std::vector<double> snapshot_times;  // besides 0 and t_end; multiples of dt
  std::vector<double> p_list;          // norms recorded at every snapshot
  Window window{{-8.0, 9.0}};

  GridSpec grid() const { return GridSpec(half_width, n_points); }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SolverTrajectory {
  EvolutionSpec spec;
  std::vector<double> times;
  std::vector<GridFunction> snapshots;
  std::vector<std::vector<double>> log_norms;  // [snapshot][index into spec.p_list]
  std::size_t steps = 0;
  double max_abs_final = 0.0;
};

/// Multiplier a of the linear equations (chi for g/M equations).
GridFunction equation_multiplier(const EvolutionSpec& spec);

/// Fixed-step RK4; each right-hand side is pointwise products plus FFT Hilbert transforms.
/// Throws BlowUpError (ode.hpp) on non-finite or |f| > 1e300.
SolverTrajectory solve(const EvolutionSpec& spec, const GridFunction& f0);

/// solve() with the M equation forced.
SolverTrajectory solve_M(EvolutionSpec spec, const GridFunction& f0);

/// log( sum over window nodes of cell |f|^p )^{1/p}; -inf for the zero function.
double grid_log_lp_norm(const GridFunction& f, double p, const Window& window);

/// Series sum_j (alpha_j + beta_j chi) P_1^j at the grid nodes.
GridFunction evaluate_on_grid(const CascadeElementF& e, const GridSpec& grid);

struct ReductionReport {
  std::vector<double> times;
  std::vector<double> max_discrepancy;  // max |e^{t chi} g - M| per snapshot
  double worst = 0.0;
  double factor_identity_error = 0.0;   // max |e^{t chi} - ((e^t - 1) chi + 1)| over nodes and snapshots
};

/// Solves the g and M equations from chi and compares e^{t chi} g with M.
ReductionReport solve_g_and_verify_reduction(EvolutionSpec spec);

struct GrowthExperiment {
  std::vector<GrowthRecord> records;
  std::vector<ExponentFit> fits;        // log-norm vs p, per t
  std::vector<ExponentFit> log_fits;    // log-norm vs log p, per t
  std::vector<std::string> warnings;
};

/// Runs solve on f0 with snapshots at t_list and records windowed norms for p_list.
GrowthExperiment growth_experiment(EvolutionSpec spec, const GridFunction& f0,
                                   const std::vector<double>& p_list, const std::vector<double>& t_list);

/// Max |H_grid(chi P_1^k) - expansion of H(a P_k)| over window nodes at distance >= exclusion
/// from {0, 1}.
double grid_expansion_error(const CoeffTable& table, std::size_t k, const GridSpec& grid,
                            const Window& window, double exclusion);

/// Relative L^2 gap between two grid functions over window nodes at distance >= exclusion
/// from {0, 1}, relative to the second argument.
double relative_l2_gap(const GridFunction& f, const GridFunction& reference, const Window& window,
                       double exclusion);

}  // namespace cascade
