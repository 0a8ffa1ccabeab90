#pragma once

// Reference implementations kept deliberately naive and independent of the
// library code paths they check.

#include <cmath>
#include <complex>
#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double gaussian_pdf(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * kPi) * sigma);
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// Ensemble signal for a Gaussian spread of local shifts by brute-force
// Simpson integration over +-10 sigma.
inline std::vector<double> ensemble_gaussian(double omega0, double delta, double sigma, const std::vector<double>& t,
                                             int panels = 20000) {
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    out[k] = simpson(
        [&](double x) {
          const double d = delta + x;
          const double w2 = omega0 * omega0 + d * d;
          return gaussian_pdf(x, sigma) * omega0 * omega0 / w2 * std::pow(std::sin(0.5 * std::sqrt(w2) * t[k]), 2);
        },
        -10 * sigma, 10 * sigma, panels);
  }
  return out;
}

// Resonant two-level atom with every coherence damped at rate gamma: the
// inversion w obeys w'' + gamma w' + omega0^2 w = 0, w(0) = 1, w'(0) = 0,
// and P1 = (1 - w) / 2.
inline double p1_dephased_resonant(double omega0, double gamma, double t) {
  const double wd2 = omega0 * omega0 - 0.25 * gamma * gamma;
  const double wd = std::sqrt(std::abs(wd2));
  double w;
  if (wd2 > 0) {
    w = std::exp(-0.5 * gamma * t) * (std::cos(wd * t) + 0.5 * gamma / wd * std::sin(wd * t));
  } else {
    w = std::exp(-0.5 * gamma * t) * (std::cosh(wd * t) + 0.5 * gamma / wd * std::sinh(wd * t));
  }
  return 0.5 * (1.0 - w);
}

// Peak prominence by walking outwards from every local maximum until a
// higher sample.
inline std::vector<double> prominences(const std::vector<double>& y) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    double lmin = y[i], rmin = y[i];
    for (std::size_t j = i; j-- > 0 && y[j] <= y[i];) lmin = std::min(lmin, y[j]);
    for (std::size_t j = i + 1; j < y.size() && y[j] <= y[i]; ++j) rmin = std::min(rmin, y[j]);
    out[i] = y[i] - std::max(lmin, rmin);
  }
  return out;
}

// Generic fixed-step RK4 for a small complex linear ODE y' = A y.
inline std::vector<std::complex<double>> rk4_linear(const std::vector<std::vector<std::complex<double>>>& a,
                                                    std::vector<std::complex<double>> y, double t, int steps) {
  const std::size_t n = y.size();
  auto f = [&](const std::vector<std::complex<double>>& v) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i] += a[i][j] * v[j];
    return out;
  };
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    auto k1 = f(y);
    std::vector<std::complex<double>> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    auto k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    auto k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    auto k4 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

}  // namespace oracle
