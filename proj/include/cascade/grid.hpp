#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cascade {

/// Uniform periodic grid on [-L, L) with half-cell offset:
/// x_i = -L + (i + 1/2) * (2L / N).
class GridSpec {
 public:
  GridSpec(double half_width, std::size_t n_points);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double cell() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  double node(std::size_t i) const {
    return -half_width_ + (static_cast<double>(i) + 0.5) * cell();
  }
  /// First index with node >= x (clamped to [0, N]).
  std::size_t lower_index(double x) const;

  bool operator==(const GridSpec&) const = default;

 private:
  double half_width_;
  std::size_t n_;
};

bool is_power_of_two(std::size_t n);

/// Immutable sampled real function on a GridSpec. All samples are finite.
class GridFunction {
 public:
  GridFunction(GridSpec grid, std::vector<double> samples);

  static GridFunction sample(const GridSpec& grid, const std::function<double(double)>& f);
  static GridFunction zeros(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> values() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

 private:
  GridSpec grid_;
  std::vector<double> samples_;
};

void require_same_grid(const GridFunction& f, const GridFunction& g, const char* what);

/// Orientation of the Hilbert transform: +1 is H with H(chi_[0,1]) = (1/pi) log|x/(x-1)|,
/// -1 is -H.
class SignConvention {
 public:
  constexpr SignConvention() = default;
  explicit SignConvention(int orientation);

  constexpr int orientation() const { return orientation_; }
  constexpr double factor() const { return static_cast<double>(orientation_); }
  bool operator==(const SignConvention&) const = default;

 private:
  int orientation_ = +1;
};

// Samplers for the functions the experiments need.

/// chi_[0,1] sampled as exact 0/1 values.
GridFunction sample_indicator(const GridSpec& grid);

/// Cosine-tapered indicator: equals chi_[0,1] outside [-w/2, w/2] and [1-w/2, 1+w/2],
/// raised-cosine ramps inside. Lipschitz, hence Dini continuous.
GridFunction sample_mollified_indicator(const GridSpec& grid, double width);

/// C-infinity bump exp(1 - 1/(1 - u^2)) with u mapping [lo, hi] onto [-1, 1]; peak value 1.
GridFunction sample_bump(const GridSpec& grid, double lo, double hi);

/// (1/pi) log|x/(x-1)| at every node.
GridFunction sample_log_kernel(const GridSpec& grid);

}  // namespace cascade
