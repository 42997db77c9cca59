#pragma once

#include <functional>

namespace sshock {

using ScalarFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7,15) quadrature on a finite interval.
/// Throws NoConvergence if `tol` is not reached within `max_intervals` subdivisions.
QuadResult quad_adaptive(const ScalarFn& f, double a, double b, double tol,
                         int max_intervals = 2000);

double quad(const ScalarFn& f, double a, double b, double tol);

/// Integral over [a, +inf) (to_plus_inf) or (-inf, a] for an integrand that decays
/// at least like exp(-rate*|x|) far out. The interval is truncated at the first
/// X (stepping by `probe` away from a) with |f(X)|/rate < tol/4, and the tail is
/// added as f(X)/rate. The returned error includes that remainder bound.
QuadResult quad_tail(const ScalarFn& f, double a, bool to_plus_inf, double rate, double tol,
                     double probe = 1.0);

}  // namespace sshock
