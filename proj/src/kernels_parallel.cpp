#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cascade/kernels.hpp"

namespace cascade::kernels::parallel {

namespace {

using Index = std::ptrdiff_t;

// Fixed partition of [0, n) into kReductionChunks pieces; chunk c covers
// [n*c/C, n*(c+1)/C).
template <class ChunkFn>
std::array<double, kReductionChunks> chunked(std::size_t n, ChunkFn&& fn) {
  std::array<double, kReductionChunks> partial{};
  const auto chunks = static_cast<Index>(kReductionChunks);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const std::size_t lo = n * static_cast<std::size_t>(c) / kReductionChunks;
    const std::size_t hi = n * static_cast<std::size_t>(c + 1) / kReductionChunks;
    partial[static_cast<std::size_t>(c)] = fn(lo, hi);
  }
  return partial;
}

}  // namespace

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const auto n = static_cast<Index>(out.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<Index>(y.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out) {
  const double w = dt / 6.0;
  const auto n = static_cast<Index>(out.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = y[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void hilbert_multiplier(std::span<std::complex<double>> half_spectrum, double scale) {
  const auto m = static_cast<Index>(half_spectrum.size());
  if (m == 0) return;
#pragma omp parallel for schedule(static)
  for (Index k = 1; k < m - 1; ++k) {
    const auto z = half_spectrum[k];
    half_spectrum[k] = {scale * z.imag(), -scale * z.real()};
  }
  half_spectrum[0] = 0.0;
  if (m > 1) half_spectrum[m - 1] = 0.0;
}

double dot(std::span<const double> a, std::span<const double> b) {
  auto partial = chunked(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

double max_abs(std::span<const double> a) {
  auto partial = chunked(a.size(), [&](std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i]));
    return m;
  });
  return *std::max_element(partial.begin(), partial.end());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  auto partial = chunked(a.size(), [&](std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  });
  return *std::max_element(partial.begin(), partial.end());
}

double log_lp_sum(std::span<const double> f, double p, double cell) {
  const double peak = max_abs(f);
  if (peak == 0.0) return -std::numeric_limits<double>::infinity();
  auto partial = chunked(f.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::abs(f[i]) / peak, p);
    return s;
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return p * std::log(peak) + std::log(s) + std::log(cell);
}

void horner_series(std::span<const double> alpha, std::span<const double> beta,
                   std::span<const double> basis, std::span<const double> chi,
                   std::span<double> out) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("horner_series: size mismatch");
  const std::size_t terms = alpha.size();
  const auto n = static_cast<Index>(out.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = terms; j-- > 0;) v = v * basis[i] + (alpha[j] + beta[j] * chi[i]);
    out[i] = v;
  }
}

}  // namespace cascade::kernels::parallel
