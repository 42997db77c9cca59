#pragma once
// Independent reference computations shared by the tests. Nothing here calls
// into the library's integrator or inner-layer code.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline const double kRho3 = std::sqrt(3.0 - std::sqrt(3.0));
inline const double kRho4 = std::sqrt(3.0 + std::sqrt(3.0));

// Classical fixed-step RK4.
inline std::vector<double> rk4(
    const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
    std::vector<double> y, double t0, double t1, int steps) {
  const std::size_t n = y.size();
  const double h = (t1 - t0) / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    f(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += h;
  }
  return y;
}

// sigma(beta) = -6 * int_0^beta db / (b^4 - 6 b^2 + 6), for |beta| < rho3, by
// partial fractions with a = 3 - sqrt3, b = 3 + sqrt3.
inline double sigma_of_beta(double beta) {
  const double a = 3.0 - std::sqrt(3.0);
  const double b = 3.0 + std::sqrt(3.0);
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  // 1/((x^2-a)(x^2-b)) = [1/(x^2-b) - 1/(x^2-a)]/(b-a)
  // int_0^x dx/(x^2-c) = (1/(2 sqrt c)) ln((sqrt c - x)/(sqrt c + x))
  const auto prim = [](double x, double sc) { return std::log((sc - x) / (sc + x)) / (2.0 * sc); };
  return -6.0 * (prim(beta, sb) - prim(beta, sa)) / (b - a);
}

// iota2 as a function of beta = iota1(sigma): ln iota2 = -1/2 [A ln|(b^2-a)/a| + B ln|(b^2-bb)/bb|].
inline double iota2_of_beta(double beta) {
  const double a = 3.0 - std::sqrt(3.0);
  const double b = 3.0 + std::sqrt(3.0);
  const double A = a / (a - b);
  const double B = b / (b - a);
  const double x = beta * beta;
  return std::exp(-0.5 * (A * std::log(std::abs((x - a) / a)) + B * std::log(std::abs((x - b) / b))));
}

// iota1(sigma) by bisection on the closed-form sigma(beta).
inline double iota1_of_sigma(double sigma) {
  double lo = -kRho3 * (1.0 - 1e-16);
  double hi = kRho3 * (1.0 - 1e-16);
  // sigma(beta) is decreasing in beta.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sigma_of_beta(mid) > sigma) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// The same closed forms parametrized by d = rho3 - beta > 0, which keeps full
// relative precision as beta -> rho3 (sigma -> -inf).
inline double sigma_of_d(double d) {
  const double a = 3.0 - std::sqrt(3.0);
  const double b = 3.0 + std::sqrt(3.0);
  const double beta = kRho3 - d;
  const double sb = std::sqrt(b);
  const double pa = std::log(d / (2.0 * kRho3 - d)) / (2.0 * kRho3);
  const double pb = std::log((sb - beta) / (sb + beta)) / (2.0 * sb);
  return -6.0 * (pb - pa) / (b - a);
}

inline double iota2_of_d(double d) {
  const double a = 3.0 - std::sqrt(3.0);
  const double b = 3.0 + std::sqrt(3.0);
  const double A = a / (a - b);
  const double B = b / (b - a);
  const double beta = kRho3 - d;
  const double xa = d * (2.0 * kRho3 - d);  // a - beta^2
  return std::exp(-0.5 * (A * std::log(xa / a) + B * std::log((b - beta * beta) / b)));
}

// d(sigma) for sigma <= 0 by bisection in log d.
inline double d_of_sigma(double sigma) {
  double lo = std::log(1e-300);
  double hi = std::log(kRho3);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sigma_of_d(std::exp(mid)) < sigma) lo = mid; else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

inline double iota2_of_sigma(double sigma) { return iota2_of_d(d_of_sigma(-std::abs(sigma))); }

// Composite Simpson on a uniform grid.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// iota3(0) = int_0^rho3 6 iota2(beta)/P(beta) dbeta. With u = (rho3-beta)^p,
// p = a/(2(b-a)), the integrand becomes smooth on [0, rho3^p].
inline double iota3_at_0(int n = 20000) {
  const double a = 3.0 - std::sqrt(3.0);
  const double b = 3.0 + std::sqrt(3.0);
  const double p = a / (2.0 * (b - a));
  const double B = b / (b - a);
  const auto g = [&](double u) {
    const double d = std::pow(u, 1.0 / p);
    const double beta = kRho3 - d;
    const double xb = b - beta * beta;
    return 6.0 / p * std::pow(a, -p) * std::pow(2.0 * kRho3 - d, p - 1.0) *
           std::pow(xb / b, -0.5 * B) / xb;
  };
  return simpson(g, 0.0, std::pow(kRho3, p), n);
}

}  // namespace oracle
