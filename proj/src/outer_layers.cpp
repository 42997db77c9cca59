#include "sshock/outer_layers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sshock/errors.hpp"
#include "sshock/io.hpp"

namespace sshock {

std::pair<double, double> compactify(State2 u, double shift) {
  const double v2 = u.u2 + shift;
  if (!(v2 > 0.0)) {
    std::ostringstream msg;
    msg << "NonpositiveU2: u2 + shift = " << v2 << " must be positive";
    throw NonpositiveU2(msg.str());
  }
  const double r = 1.0 / std::sqrt(v2);
  return {u.u1 * r, r};
}

State2 decompactify(double beta, double r, double shift) {
  return {beta / r, 1.0 / (r * r) - shift};
}

double default_shift(const RiemannAnalysis& a) {
  return std::max(0.0, 1.0 - std::min(a.uL.u2, a.uR.u2));
}

Vec2 shift_w(Vec2 w, double xi, double shift) { return {w[0] - shift, w[1] - xi * shift}; }
Vec2 unshift_w(Vec2 w, double xi, double shift) { return {w[0] + shift, w[1] + xi * shift}; }

std::array<double, 2> fast_field_2d(double beta, double r, double w1, double w2, double xi) {
  const double b2 = beta * beta;
  const double db = -(b2 * b2 - 6.0 * b2 + 6.0) / 6.0 +
                    r * (-0.5 * beta * xi + r * (0.5 * b2 - w1) + 0.5 * r * r * beta * w2);
  const double dr = -b2 * beta * r / 6.0 + 0.5 * r * r * (xi + r * beta + r * r * w2);
  return {db, dr};
}

void compact_field(std::span<const double> y, std::span<double> d) {
  const double beta = y[kBeta], r = y[kR], kappa = y[kKappa];
  const double w1 = y[kW1], w2 = y[kW2], xi = y[kXi];
  const auto [db, dr] = fast_field_2d(beta, r, w1, w2, xi);
  d[kBeta] = db;
  d[kR] = dr;
  d[kKappa] = beta * beta * beta * kappa / 6.0 - 0.5 * r * kappa * (xi + r * beta + r * r * w2);
  d[kW1] = -kappa * beta * r;
  d[kW2] = -kappa;
  d[kXi] = kappa * r * r;
}

Field compact_field_fn() {
  return [](double, std::span<const double> y, std::span<double> d) { compact_field(y, d); };
}

Linearization jacobian_at_P(CornerPoint which, double xi) {
  const auto rho = inner_roots();
  const double b0 = which == CornerPoint::P_L ? rho[2] : rho[1];
  const Vec base{b0, 0.0, 0.0, 0.0, 0.0, xi};
  Linearization lin;
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vec yp = base, ym = base, fp(6), fm(6);
    yp[j] += h;
    ym[j] -= h;
    compact_field(yp, fp);
    compact_field(ym, fm);
    for (int i = 0; i < 3; ++i) lin.jacobian(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  const double b3 = b0 * b0 * b0;
  const double l1 = -(4.0 * b3 - 12.0 * b0) / 6.0;
  lin.closed_form = {l1, -b3 / 6.0, b3 / 6.0};
  lin.closed_form_vectors.setZero();
  lin.closed_form_vectors(0, 0) = 1.0;
  Eigen::Vector3d v(0.5 * b0 * xi, l1 - lin.closed_form[1], 0.0);
  lin.closed_form_vectors.col(1) = v.normalized();
  lin.closed_form_vectors(2, 2) = 1.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(lin.jacobian);
  const auto vals = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  std::array<bool, 3> used{};
  for (int k = 0; k < 3; ++k) {
    int best = -1;
    for (int i = 0; i < 3; ++i) {
      if (used[i]) continue;
      if (best < 0 || std::abs(vals(i) - lin.closed_form[k]) < std::abs(vals(best) - lin.closed_form[k])) best = i;
    }
    used[best] = true;
    lin.eigenvalues[k] = vals(best).real();
    Eigen::Vector3d col = vecs.col(best).real().normalized();
    if (col.dot(lin.closed_form_vectors.col(k)) < 0.0) col = -col;
    lin.eigenvectors.col(k) = col;
  }
  return lin;
}

double default_r0(const RiemannAnalysis& a, double shift) {
  return 0.5 * std::min(compactify(a.uL, shift).second, compactify(a.uR, shift).second);
}

namespace {

enum class Side { L, R };

HeteroclinicResult compute_outer(const RiemannAnalysis& a, const HeteroclinicConfig& cfg, Side side) {
  if (!a.h1_holds) {
    throw HypothesisViolated("HypothesisViolated: H1 fails, end states are not a source/sink pair");
  }
  HeteroclinicResult res;
  res.shift = default_shift(a);
  res.r0 = cfg.r0 > 0.0 ? cfg.r0 : default_r0(a, res.shift);
  const bool left = side == Side::L;
  const State2 u = left ? a.uL : a.uR;
  const Vec2 w = shift_w(left ? a.wL : a.wR, a.s, res.shift);
  const auto [bt, rt] = compactify(u, res.shift);
  res.target = {bt, rt, 0.0, w[0], w[1], a.s};

  // Saddle in the (beta, r) plane; the r-direction eigenvector carries the orbit.
  const Linearization lin = jacobian_at_P(left ? CornerPoint::P_L : CornerPoint::P_R, a.s);
  Eigen::Vector2d v(lin.closed_form_vectors(0, 1), lin.closed_form_vectors(1, 1));
  if (v(1) < 0.0) v = -v;
  res.launch_direction = {v(0), v(1)};
  const double b0 = left ? rho3() : -rho3();
  res.launch_point = {b0 + cfg.delta_launch * v(0), cfg.delta_launch * v(1), 0.0, w[0], w[1], a.s};

  const double bt_ = bt, rt_ = rt;
  const double box = cfg.box;
  std::vector<EventSpec> events{
      {[bt_, rt_, tol = cfg.target_tol](double, std::span<const double> y) {
         return std::hypot(y[kBeta] - bt_, y[kR] - rt_) - tol;
       },
       EventDirection::falling, true},
      {[r0 = res.r0](double, std::span<const double> y) { return y[kR] - r0; }, EventDirection::any,
       false},
      {[box](double, std::span<const double> y) {
         return std::max(std::abs(y[kBeta]), y[kR]) - box;
       },
       EventDirection::rising, true},
      {[](double, std::span<const double> y) { return y[kR]; }, EventDirection::falling, true},
  };
  const double t1 = left ? -cfg.sigma_max : cfg.sigma_max;
  res.trajectory = integrate(compact_field_fn(), res.launch_point.to_vec(), 0.0, t1, cfg.integrator, events);

  const auto landed = res.trajectory.events_with_id(0);
  const char* name = left ? "gamma1" : "gamma2";
  if (landed.empty()) {
    std::ostringstream msg;
    const auto& e = res.trajectory.back();
    msg << "MissedTarget: " << name << " ended at (beta, r) = (" << e[kBeta] << ", " << e[kR]
        << ") without reaching the end state (" << bt << ", " << rt << ")";
    throw MissedTarget(msg.str());
  }
  const auto crossings = res.trajectory.events_with_id(1);
  if (crossings.size() != 1) {
    std::ostringstream msg;
    msg << "MissedTarget: " << name << " crosses r = r0 = " << res.r0 << " " << crossings.size()
        << " times, expected once";
    throw MissedTarget(msg.str());
  }
  res.section_point = CompactPoint::from(crossings[0].y);
  res.section_sigma = crossings[0].t;
  res.end_point = CompactPoint::from(res.trajectory.back());
  res.endpoint_error = std::hypot(res.end_point.beta - bt, res.end_point.r - rt);
  for (const Vec& y : res.trajectory.states()) {
    res.frozen_drift = std::max({res.frozen_drift, std::abs(y[kW1] - w[0]), std::abs(y[kW2] - w[1]),
                                 std::abs(y[kXi] - a.s)});
  }
  return res;
}

}  // namespace

HeteroclinicResult compute_gamma1(const RiemannAnalysis& a, const HeteroclinicConfig& cfg) {
  return compute_outer(a, cfg, Side::L);
}

HeteroclinicResult compute_gamma2(const RiemannAnalysis& a, const HeteroclinicConfig& cfg) {
  return compute_outer(a, cfg, Side::R);
}

namespace {

// Half-orbit of the r = 0 system started near the corner on the unstable (left) or
// stable (right) kappa-manifold, run to the section beta = 0.
Vec half_orbit_on_gamma(const RiemannAnalysis& a, const IotaTable& table, double shift, bool left,
                        double kbar, double alpha) {
  // Start where iota1 is still resolved: the beta = 0 crossing time amplifies
  // rounding in beta by about exp(1.3 S).
  const double S = 5.0;
  const State2 u = left ? a.uL : a.uR;
  const Vec2 wb = shift_w(left ? a.wL : a.wR, a.s, shift);
  const double u2 = u.u2 + shift;
  const double xi = a.s + alpha;
  const IotaValues v = table.at(left ? -S : S);
  const double w2_tail = left ? -kbar * v.iota3 : kbar * table.at(-S).iota3;
  Vec y0{v.iota1, 0.0, kbar * v.iota2, wb[0] - alpha * u.u1, wb[1] - alpha * u2 + w2_tail, xi};
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  cfg.event_tol = 1e-15;
  const std::vector<EventSpec> ev{{[](double, std::span<const double> y) { return y[kBeta]; },
                                   left ? EventDirection::falling : EventDirection::rising, true}};
  const auto tr = integrate(compact_field_fn(), y0, left ? -S : S, left ? S : -S, cfg, ev);
  if (tr.events().empty()) throw SectionMiss("SectionMiss: half-orbit never reached beta = 0");
  return tr.back();
}

int numeric_rank(const Eigen::VectorXd& sv, double rel) {
  int k = 0;
  for (int i = 0; i < sv.size(); ++i) k += sv(i) > rel * sv(0);
  return k;
}

}  // namespace

TransversalityReport transversality_frames(const RiemannAnalysis& a, const InnerConstants& c,
                                           const IotaTable& table) {
  const double shift = default_shift(a);
  TransversalityReport rep;
  const Vec2 wl = shift_w(a.wL, a.s, shift);
  rep.q0 = {0.0, 0.0, c.kappa0, wl[0], wl[1] - c.kappa0 * table.iota3_at_0, a.s};
  Vec f(6);
  compact_field(rep.q0.to_vec(), f);

  const double hk = 1e-5 * std::max(1.0, c.kappa0);
  const double ha = 1e-5;
  for (int side = 0; side < 2; ++side) {
    const bool left = side == 0;
    auto& frame = left ? rep.frame_L : rep.frame_R;
    const auto diff = [&](double dk, double da) {
      const Vec p = half_orbit_on_gamma(a, table, shift, left, c.kappa0 + dk, da);
      const Vec m = half_orbit_on_gamma(a, table, shift, left, c.kappa0 - dk, -da);
      Eigen::Matrix<double, 6, 1> d;
      for (int i = 0; i < 6; ++i) d(i) = (p[i] - m[i]) / (2.0 * (dk + da));
      return d;
    };
    for (int i = 0; i < 6; ++i) frame(i, 0) = -f[i];
    frame.col(1) = diff(hk, 0.0);
    frame.col(2) = diff(0.0, ha);
  }

  Eigen::Matrix<double, 6, 6> both;
  both << rep.frame_L, rep.frame_R;
  for (int i = 0, row = 0; i < 6; ++i) {
    if (i == kR) continue;
    rep.combined.row(row++) = both.row(i);
  }
  const double rel = 1e-6;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.combined);
  rep.singular_values = svd.singularValues();
  rep.rank = numeric_rank(rep.singular_values, rel);
  Eigen::JacobiSVD<Eigen::MatrixXd> sl(rep.combined.leftCols(3));
  Eigen::JacobiSVD<Eigen::MatrixXd> sr(rep.combined.rightCols(3));
  rep.rank_L = numeric_rank(sl.singularValues(), rel);
  rep.rank_R = numeric_rank(sr.singularValues(), rel);
  rep.intersection_dim = rep.rank_L + rep.rank_R - rep.rank;
  return rep;
}

void write_heteroclinic_csv(const HeteroclinicResult& h, const std::string& path) {
  CsvWriter w(path, {"sigma", "beta", "r", "u1", "u2"});
  std::vector<double> ts;
  std::vector<Vec> ys;
  h.trajectory.sample(4, ts, ys);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const State2 u = decompactify(ys[i][kBeta], ys[i][kR], h.shift);
    w.row({ts[i], ys[i][kBeta], ys[i][kR], u.u1, u.u2});
  }
}

}  // namespace sshock
