#include "sshock/inner_layer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sshock/errors.hpp"
#include "sshock/io.hpp"
#include "sshock/roots.hpp"

namespace sshock {

std::array<double, 4> inner_roots() {
  const double s3 = std::sqrt(3.0);
  const double r3 = std::sqrt(3.0 - s3);
  const double r4 = std::sqrt(3.0 + s3);
  return {-r4, -r3, r3, r4};
}

double rho3() { return inner_roots()[2]; }

double inner_beta_rate(double beta) {
  const double b2 = beta * beta;
  return -(b2 * b2 - 6.0 * b2 + 6.0) / 6.0;
}

namespace {

// (iota1, iota2, J) with J' = iota2.
void iota_field(double, std::span<const double> y, std::span<double> d) {
  d[0] = inner_beta_rate(y[0]);
  d[1] = y[0] * y[0] * y[0] * y[1] / 6.0;
  d[2] = y[1];
}

double tail_rate() {
  const double r = rho3();
  return r * r * r / 6.0;
}

}  // namespace

IotaValues IotaTable::at(double sigma) const {
  const double rate = tail_rate();
  IotaValues v;
  if (sigma < -Sigma) {
    const Vec& e = backward_->back();
    v.iota1 = rho3();
    v.iota2 = e[1] * std::exp(rate * (sigma + Sigma));
    v.iota3 = v.iota2 / rate;
    return v;
  }
  if (sigma > Sigma) {
    const Vec& e = forward_->back();
    v.iota1 = -rho3();
    v.iota2 = e[1] * std::exp(-rate * (sigma - Sigma));
    v.iota3 = 2.0 * iota3_at_0 - v.iota2 / rate;
    return v;
  }
  const Vec y = sigma <= 0.0 ? backward_->at(sigma) : forward_->at(sigma);
  v.iota1 = y[0];
  v.iota2 = y[1];
  v.iota3 = y[2] - j_minus_ + tail_mass;
  return v;
}

IotaTable build_iota_table(double Sigma, double tol, double grid_step) {
  if (!(Sigma > 0.0) || !(grid_step > 0.0)) throw std::invalid_argument("build_iota_table: bad grid");
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-16;
  const Field field = iota_field;
  const Vec y0{0.0, 1.0, 0.0};

  IotaTable t;
  t.Sigma = Sigma;
  t.backward_ = std::make_shared<Trajectory>(integrate(field, y0, 0.0, -Sigma, cfg));
  t.forward_ = std::make_shared<Trajectory>(integrate(field, y0, 0.0, Sigma, cfg));

  const double r3 = rho3();
  const Vec& left = t.backward_->back();
  const Vec& right = t.forward_->back();
  const double gap = std::max(std::abs(left[0] - r3), std::abs(right[0] + r3));
  if (!(gap < tol)) {
    std::ostringstream msg;
    msg << "TailNotConverged: |iota1(+-Sigma) -+ rho3| = " << gap << " >= " << tol
        << " at Sigma = " << Sigma;
    throw TailNotConverged(msg.str());
  }
  t.j_minus_ = left[2];
  t.tail_mass = left[1] / tail_rate();
  t.iota3_at_0 = -t.j_minus_ + t.tail_mass;

  const long half = std::lround(Sigma / grid_step);
  t.grid.reserve(2 * half + 1);
  for (long k = -half; k <= half; ++k) {
    const double s = k == 0 ? 0.0 : (k == -half ? -Sigma : (k == half ? Sigma : k * grid_step));
    const IotaValues v = t.at(s);
    t.grid.push_back(s);
    t.iota1.push_back(v.iota1);
    t.iota2.push_back(v.iota2);
    t.iota3.push_back(v.iota3);
  }

  const auto f = [&t](double s) { return t.backward_->at(s, 0) - 1.0; };
  RootOptions opts;
  opts.tol = 1e-14;
  t.sigma0 = solve_root(f, -1.0, opts);
  return t;
}

InnerConstants matching_constants(const RiemannAnalysis& analysis, const IotaTable& table) {
  if (analysis.e0 < 0.0 || !std::isfinite(analysis.e0)) {
    std::ostringstream msg;
    msg << "HypothesisViolated: H2 requires e0 > 0, got e0 = " << analysis.e0;
    throw HypothesisViolated(msg.str());
  }
  InnerConstants c;
  c.rho = inner_roots();
  c.iota3_at_0 = table.iota3_at_0;
  c.sigma0 = table.sigma0;
  c.kappa0 = analysis.e0 / (2.0 * table.iota3_at_0);
  c.omega0 = c.kappa0 * table.at(table.sigma0).iota2;
  return c;
}

std::array<double, 3> Gamma0Trajectory::at(const IotaTable& table, double s) const {
  if (s <= 0.0) {
    const IotaValues v = table.at(s);
    return {v.iota1, kappa0 * v.iota2, w2L - kappa0 * v.iota3};
  }
  const IotaValues v = table.at(s);
  const IotaValues m = table.at(-s);
  return {v.iota1, kappa0 * v.iota2, w2R + kappa0 * m.iota3};
}

Gamma0Trajectory build_gamma0(const RiemannAnalysis& analysis, const InnerConstants& constants,
                              const IotaTable& table, double tol) {
  Gamma0Trajectory g;
  g.kappa0 = constants.kappa0;
  g.w1 = analysis.wL[0];
  g.xi = analysis.s;
  g.w2L = analysis.wL[1];
  g.w2R = analysis.wR[1];
  g.w2_minus_inf = g.w2L;
  g.w2_plus_inf = g.w2R;

  const double k0 = constants.kappa0;
  const double i30 = table.iota3_at_0;
  const std::array<double, 3> left0{0.0, k0, g.w2L - k0 * i30};
  const std::array<double, 3> right0{0.0, k0, g.w2R + k0 * i30};
  for (int i = 0; i < 3; ++i) g.match_mismatch = std::max(g.match_mismatch, std::abs(left0[i] - right0[i]));
  if (!(g.match_mismatch <= tol)) {
    std::ostringstream msg;
    msg << "MatchFailure: gamma0 halves differ by " << g.match_mismatch << " at sigma = 0";
    throw MatchFailure(msg.str());
  }

  // Samples reuse the table grid; the right half is the mirror of the left.
  const std::size_t n = table.grid.size();
  const std::size_t mid = n / 2;
  g.sigma = table.grid;
  g.beta.resize(n);
  g.kappa.resize(n);
  g.w2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.beta[i] = table.iota1[i];
    g.kappa[i] = k0 * table.iota2[i];
    g.w2[i] = i <= mid ? g.w2L - k0 * table.iota3[i] : g.w2R + k0 * table.iota3[n - 1 - i];
  }

  if (k0 > 0.0) {
    const auto bk = [&table, k0](double s) {
      const IotaValues v = table.at(s);
      return k0 * v.iota1 * v.iota2;
    };
    const auto [smax, vmax] = maximize_bracketed(bk, table.sigma0 - 1.0, std::min(table.sigma0 + 1.0, 0.0));
    g.sigma_at_max = smax;
    g.max_beta_kappa = vmax;
    g.iota1_at_max = table.at(smax).iota1;
  }
  return g;
}

void write_iota_csv(const IotaTable& table, const std::string& path) {
  CsvWriter w(path, {"sigma", "iota1", "iota2", "iota3"});
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    w.row({table.grid[i], table.iota1[i], table.iota2[i], table.iota3[i]});
  }
}

void write_gamma0_csv(const Gamma0Trajectory& g, const std::string& path) {
  CsvWriter w(path, {"sigma", "beta", "kappa", "w2"});
  for (std::size_t i = 0; i < g.sigma.size(); ++i) w.row({g.sigma[i], g.beta[i], g.kappa[i], g.w2[i]});
}

}  // namespace sshock
