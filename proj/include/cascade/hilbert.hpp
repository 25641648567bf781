#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

#include "cascade/grid.hpp"

namespace cascade {

/// Periodic Hilbert transform on N samples via real FFTs: mode k is multiplied
/// by -i sgn(k); the zero mode and the Nyquist mode are cleared.
///
/// Owns its FFTW plans and scratch buffers, so one instance must not be used
/// from two threads at once. Plans are created with FFTW_ESTIMATE, which keeps
/// the algorithm (and hence every output bit) independent of machine timing.
class HilbertTransformer {
 public:
  explicit HilbertTransformer(std::size_t n);
  ~HilbertTransformer();
  HilbertTransformer(const HilbertTransformer&) = delete;
  HilbertTransformer& operator=(const HilbertTransformer&) = delete;
  HilbertTransformer(HilbertTransformer&&) noexcept;
  HilbertTransformer& operator=(HilbertTransformer&&) noexcept;

  std::size_t size() const;

  /// out = orientation * H(in). `in` and `out` may alias.
  void apply(std::span<const double> in, std::span<double> out, double orientation = 1.0);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Periodic conjugate-function approximation of the real-line Hilbert transform.
GridFunction hilbert_transform(const GridFunction& f, SignConvention sign = {});

/// Closed form H(chi_[0,1])(x) = (1/pi) log|x/(x-1)|. Throws std::domain_error at x in {0, 1}.
double hilbert_indicator(double x);

/// Max-norm of H(fg) - g H(f) - f H(g) - H(H(f) H(g)) with the discrete transform.
double tricomi_residual(const GridFunction& f, const GridFunction& g);

/// [a, H] f = a H(f) - H(a f).
GridFunction commutator(const GridFunction& a, const GridFunction& f);

}  // namespace cascade
