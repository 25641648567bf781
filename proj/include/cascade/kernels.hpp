#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Data-parallel inner loops used by the grid code. Each kernel exists twice:
// `serial` is the plain reference loop, `parallel` the OpenMP version used in
// production paths. Reductions in `parallel` split the range into a fixed
// number of chunks independent of the thread count and combine partials in
// order, so results are reproducible across thread counts.

namespace cascade::kernels {

inline constexpr std::size_t kReductionChunks = 64;

namespace serial {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// out = y + dt/6 (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out);
/// Multiplies the half spectrum of a real signal (modes 0..N/2) by scale * (-i sgn k);
/// the zero and Nyquist modes are cleared.
void hilbert_multiplier(std::span<std::complex<double>> half_spectrum, double scale);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// log( sum_i cell * |f_i|^p ); -inf when every sample is zero.
double log_lp_sum(std::span<const double> f, double p, double cell);
/// out_i = sum_j (alpha_j + beta_j chi_i) basis_i^j, Horner in basis_i.
void horner_series(std::span<const double> alpha, std::span<const double> beta,
                   std::span<const double> basis, std::span<const double> chi,
                   std::span<double> out);

}  // namespace serial

namespace parallel {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out);
void hilbert_multiplier(std::span<std::complex<double>> half_spectrum, double scale);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double log_lp_sum(std::span<const double> f, double p, double cell);
void horner_series(std::span<const double> alpha, std::span<const double> beta,
                   std::span<const double> basis, std::span<const double> chi,
                   std::span<double> out);

}  // namespace parallel

}  // namespace cascade::kernels
