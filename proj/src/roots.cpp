#include "sshock/roots.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "sshock/errors.hpp"

namespace sshock {

namespace {

double max_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

std::vector<double> fd_jacobian(const VecFn& F, const std::vector<double>& x, std::size_t m,
                                double scale, bool parallel) {
  if (scale <= 0.0) scale = std::sqrt(std::numeric_limits<double>::epsilon());
  const std::size_t n = x.size();
  std::vector<double> jac(m * n, 0.0);
  const auto column = [&](std::size_t j) {
    std::vector<double> xp = x;
    const double h = scale * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    const auto fp = F(xp);
    xp[j] = x[j] - h;
    const auto fm = F(xp);
    if (fp.size() != m || fm.size() != m) throw std::invalid_argument("fd_jacobian: size mismatch");
    for (std::size_t i = 0; i < m; ++i) jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
  };
  if (!parallel) {
    for (std::size_t j = 0; j < n; ++j) column(j);
    return jac;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t j = 0; j < n; ++j) jobs.push_back(std::async(std::launch::async, column, j));
  for (auto& job : jobs) job.get();
  return jac;
}

RootResult solve_root(const VecFn& F, const std::vector<double>& x0, const RootOptions& opts) {
  const std::size_t n = x0.size();
  RootResult res;
  res.x = x0;
  res.fx = F(res.x);
  if (res.fx.size() != n) throw std::invalid_argument("solve_root: F must be square");
  res.residual = max_norm(res.fx);
  if (!std::isfinite(res.residual)) throw NoConvergence("NoConvergence: F is not finite at x0");

  for (int it = 0; it < opts.max_iter; ++it) {
    if (res.residual < opts.tol) return res;
    res.iterations = it + 1;
    const auto jac = fd_jacobian(F, res.x, n, opts.fd_scale, opts.parallel_jacobian);
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      rhs(i) = -res.fx[i];
      for (std::size_t j = 0; j < n; ++j) J(i, j) = jac[i * n + j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(n - 1) / sv(0) < opts.singular_rcond) {
      std::ostringstream msg;
      msg << "SingularJacobian: reciprocal condition " << (sv(0) > 0.0 ? sv(n - 1) / sv(0) : 0.0)
          << " at iteration " << it;
      throw SingularJacobian(msg.str());
    }
    const Eigen::VectorXd dx = svd.solve(rhs);

    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= opts.max_halvings; ++k, lambda *= 0.5) {
      std::vector<double> trial = res.x;
      for (std::size_t i = 0; i < n; ++i) trial[i] += lambda * dx(i);
      std::vector<double> ft;
      try {
        ft = F(trial);
      } catch (const SolverError&) {
        continue;
      }
      const double rt = max_norm(ft);
      if (rt < (1.0 - 1e-4 * lambda) * res.residual || rt < opts.tol) {
        res.x = std::move(trial);
        res.fx = std::move(ft);
        res.residual = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "NoConvergence: damped Newton stalled at residual " << res.residual;
      throw NoConvergence(msg.str());
    }
  }
  if (res.residual < opts.tol) return res;
  std::ostringstream msg;
  msg << "NoConvergence: residual " << res.residual << " after " << opts.max_iter << " iterations";
  throw NoConvergence(msg.str());
}

double solve_root(const std::function<double(double)>& f, double x0, const RootOptions& opts) {
  const VecFn F = [&f](const std::vector<double>& x) { return std::vector<double>{f(x[0])}; };
  return solve_root(F, {x0}, opts).x[0];
}

std::pair<double, double> maximize_bracketed(const std::function<double(double)>& f, double a,
                                             double b) {
  const auto r = boost::math::tools::brent_find_minima([&f](double x) { return -f(x); }, a, b,
                                                       std::numeric_limits<double>::digits / 2);
  return {r.first, -r.second};
}

}  // namespace sshock
