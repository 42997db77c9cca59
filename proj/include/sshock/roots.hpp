#pragma once

#include <functional>
#include <vector>

namespace sshock {

using VecFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct RootOptions {
  double tol = 1e-12;       // on the max-norm of F
  int max_iter = 60;
  int max_halvings = 30;    // damping steps per Newton iteration
  double fd_scale = 0.0;    // 0: sqrt(machine eps)
  double singular_rcond = 1e-14;
  bool parallel_jacobian = false;  // evaluate Jacobian columns concurrently (F must be thread-safe)
};

struct RootResult {
  std::vector<double> x;
  std::vector<double> fx;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton with a central finite-difference Jacobian (step sqrt(eps)*max(1,|x_i|)).
/// Evaluations of F that throw SolverError are treated as failed trial points
/// during damping. Throws NoConvergence or SingularJacobian.
RootResult solve_root(const VecFn& F, const std::vector<double>& x0, const RootOptions& opts = {});

double solve_root(const std::function<double(double)>& f, double x0, const RootOptions& opts = {});

/// Central finite-difference Jacobian, row-major (m x n).
std::vector<double> fd_jacobian(const VecFn& F, const std::vector<double>& x, std::size_t m,
                                double scale = 0.0, bool parallel = false);

/// Maximizer of a unimodal f on [a, b] (Brent's method).
std::pair<double, double> maximize_bracketed(const std::function<double(double)>& f, double a,
                                             double b);

}  // namespace sshock
