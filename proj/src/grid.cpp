#include "cascade/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cascade {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

GridSpec::GridSpec(double half_width, std::size_t n_points)
    : half_width_(half_width), n_(n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("GridSpec: half_width must be positive and finite");
  if (n_points < 16 || !is_power_of_two(n_points))
    throw std::invalid_argument("GridSpec: n_points must be a power of two >= 16, got " +
                                std::to_string(n_points));
  // log|x/(x-1)| must be finite at every node
  for (std::size_t i = 0; i < n_; ++i) {
    const double x = node(i);
    if (x == 0.0 || x == 1.0)
      throw std::invalid_argument("GridSpec: a node falls on a singular point of log|x/(x-1)|");
  }
}

std::size_t GridSpec::lower_index(double x) const {
  const double pos = (x + half_width_) / cell() - 0.5;
  if (pos <= 0.0) return 0;
  auto i = static_cast<std::size_t>(std::ceil(pos));
  i = std::min(i, n_);
  while (i > 0 && node(i - 1) >= x) --i;
  while (i < n_ && node(i) < x) ++i;
  return i;
}

GridFunction::GridFunction(GridSpec grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw std::invalid_argument("GridFunction: sample count does not match grid");
  for (double v : samples_)
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite sample");
}

GridFunction GridFunction::sample(const GridSpec& grid, const std::function<double(double)>& f) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = f(grid.node(i));
  return GridFunction(grid, std::move(s));
}

GridFunction GridFunction::zeros(const GridSpec& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

void require_same_grid(const GridFunction& f, const GridFunction& g, const char* what) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

SignConvention::SignConvention(int orientation) : orientation_(orientation) {
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("SignConvention: orientation must be +1 or -1");
}

GridFunction sample_indicator(const GridSpec& grid) {
  return GridFunction::sample(grid, [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; });
}

GridFunction sample_mollified_indicator(const GridSpec& grid, double width) {
  if (!(width > 0.0) || width >= 1.0)
    throw std::invalid_argument("sample_mollified_indicator: width must lie in (0, 1)");
  const double half = 0.5 * width;
  auto ramp = [width](double u) {  // u in [0, width] -> [0, 1]
    return 0.5 * (1.0 - std::cos(std::numbers::pi * u / width));
  };
  return GridFunction::sample(grid, [=](double x) {
    if (x <= -half || x >= 1.0 + half) return 0.0;
    if (x < half) return ramp(x + half);
    if (x > 1.0 - half) return ramp(1.0 + half - x);
    return 1.0;
  });
}

GridFunction sample_bump(const GridSpec& grid, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("sample_bump: empty support");
  const double mid = 0.5 * (lo + hi);
  const double rad = 0.5 * (hi - lo);
  return GridFunction::sample(grid, [=](double x) {
    const double u = (x - mid) / rad;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  });
}

GridFunction sample_log_kernel(const GridSpec& grid) {
  return GridFunction::sample(grid, [](double x) {
    return std::log(std::abs(x / (x - 1.0))) / std::numbers::pi;
  });
}

}  // namespace cascade
