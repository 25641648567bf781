#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cascade/kernels.hpp"

namespace cascade::kernels::serial {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out) {
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = y[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void hilbert_multiplier(std::span<std::complex<double>> half_spectrum, double scale) {
  const std::size_t m = half_spectrum.size();
  if (m == 0) return;
  half_spectrum[0] = 0.0;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const auto z = half_spectrum[k];
    half_spectrum[k] = {scale * z.imag(), -scale * z.real()};
  }
  if (m > 1) half_spectrum[m - 1] = 0.0;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double log_lp_sum(std::span<const double> f, double p, double cell) {
  const double peak = max_abs(f);
  if (peak == 0.0) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double v : f) s += std::pow(std::abs(v) / peak, p);
  return p * std::log(peak) + std::log(s) + std::log(cell);
}

void horner_series(std::span<const double> alpha, std::span<const double> beta,
                   std::span<const double> basis, std::span<const double> chi,
                   std::span<double> out) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("horner_series: size mismatch");
  const std::size_t terms = alpha.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = terms; j-- > 0;) v = v * basis[i] + (alpha[j] + beta[j] * chi[i]);
    out[i] = v;
  }
}

}  // namespace cascade::kernels::serial
