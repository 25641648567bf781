#pragma once

// Real-line principal-value quadrature for (1/pi) p.v. int_0^1 P_1(y)^k/(x-y) dy
// with P_1(y) = (1/pi) log(y/(1-y)). Independent of the FFT transform and of
// the coefficient recursion; used as an oracle for both.
//
// Near y = 1 the integrand is written in u = 1 - y so that the endpoint mass of
// log^k (which sits at distances far below double spacing around 1) is resolved.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

namespace cascade::oracle {

inline double pv_hilbert_log_power(int k, double x) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::tanh_sinh;
  const double pi = std::numbers::pi;
  tanh_sinh<double> ts(15);
  const double tol = 1e-15;

  auto p1_left = [pi](double y) { return (std::log(y) - std::log1p(-y)) / pi; };   // y near 0
  auto p1_right = [pi](double u) { return (std::log1p(-u) - std::log(u)) / pi; };  // y = 1 - u
  auto h = [k](double p) { return std::pow(p, k); };

  if (x < 0.0 || x > 1.0) {
    auto fl = [&](double y) { return h(p1_left(y)) / (x - y); };
    auto fr = [&](double u) { return h(p1_right(u)) / (x - 1.0 + u); };
    return (ts.integrate(fl, 0.0, 0.5, tol) + ts.integrate(fr, 0.0, 0.5, tol)) / pi;
  }
  // subtract h(x): p.v. int_0^1 dy/(x-y) = log|x/(x-1)|
  const double hx = h(p1_left(x));
  auto f = [&](double y) { return (h(p1_left(y)) - hx) / (x - y); };
  auto fr = [&](double u) { return (h(p1_right(u)) - hx) / (x - 1.0 + u); };
  const double a = 0.5 * x, b = 0.5 * (1.0 + x);
  double s = ts.integrate(f, 0.0, a, tol);
  s += gauss<double, 30>::integrate(f, a, x);
  s += gauss<double, 30>::integrate(f, x, b);
  s += ts.integrate(fr, 0.0, 1.0 - b, tol);
  return (s + hx * std::log(std::abs(x / (x - 1.0)))) / pi;
}

}  // namespace cascade::oracle
