#include "sshock/pde_lf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sshock/errors.hpp"
#include "sshock/io.hpp"

namespace sshock {

namespace {

struct Grid {
  int n;
  double dx;
  std::vector<double> x;
};

Grid make_grid(const GridConfig& cfg) {
  if (cfg.cells < 100) throw std::invalid_argument("GridConfig: cells must be at least 100");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5)) throw std::invalid_argument("GridConfig: cfl must lie in (0, 0.5]");
  if (!(cfg.x_max > cfg.x_min)) throw std::invalid_argument("GridConfig: x_max must exceed x_min");
  if (cfg.steps < 0 || cfg.snapshot_every <= 0) throw std::invalid_argument("GridConfig: bad step counts");
  Grid g{cfg.cells, (cfg.x_max - cfg.x_min) / cfg.cells, {}};
  g.x.resize(g.n);
  for (int i = 0; i < g.n; ++i) g.x[i] = cfg.x_min + (i + 0.5) * g.dx;
  return g;
}

double max_speed(const std::vector<double>& u1) {
  double m = 0.0;
  for (double v : u1) m = std::max(m, std::abs(v) + 1.0);
  return m;
}

}  // namespace

std::vector<FieldSnapshot> run_lf(const RiemannData& rd, const GridConfig& cfg) {
  const Grid g = make_grid(cfg);
  const int n = g.n;
  const State2 uL = rd.left, uR = rd.right;
  if (!(std::isfinite(uL.u1) && std::isfinite(uL.u2) && std::isfinite(uR.u1) && std::isfinite(uR.u2))) {
    throw DegenerateData("Riemann data must be finite");
  }
  // Background step position; equal first components leave no shock speed, the step sits at 0.
  const double s = uL.u1 == uR.u1 ? 0.0 : analyze(rd).s;
  const double W = cfg.window_fraction * (cfg.x_max - cfg.x_min);

  std::vector<double> a(n), b(n), fa(n + 2), fb(n + 2), ea(n + 2), eb(n + 2);
  for (int i = 0; i < n; ++i) {
    const State2& u = g.x[i] < 0.0 ? uL : uR;
    a[i] = u.u1;
    b[i] = u.u2;
  }
  const double a0 = a.front(), b0 = b.front(), an = a.back(), bn = b.back();

  std::vector<FieldSnapshot> snaps;
  double t = 0.0;
  auto record = [&](long step) {
    FieldSnapshot sn;
    sn.step = step;
    sn.t = t;
    sn.x = g.x;
    sn.u1 = a;
    sn.u2 = b;
    sn.max_u1 = *std::max_element(a.begin(), a.end());
    sn.max_u2 = *std::max_element(b.begin(), b.end());
    const double xs = s * t;
    for (int i = 0; i < n; ++i) {
      sn.total_u1 += a[i] * g.dx;
      sn.total_u2 += b[i] * g.dx;
      if (std::abs(g.x[i] - xs) <= W) sn.spike_mass_u2 += (b[i] - (g.x[i] < xs ? uL.u2 : uR.u2)) * g.dx;
    }
    sn.edge_deviation = std::max({std::abs(a.front() - a0), std::abs(b.front() - b0),
                                  std::abs(a.back() - an), std::abs(b.back() - bn)});
    snaps.push_back(std::move(sn));
  };
  record(0);

  for (long step = 1; step <= cfg.steps; ++step) {
    const double dt = cfg.fixed_dt ? cfg.cfl * g.dx : cfg.cfl * g.dx / max_speed(a);
    // Extended arrays with one ghost cell per side.
    for (int i = 0; i < n; ++i) {
      ea[i + 1] = a[i];
      eb[i + 1] = b[i];
    }
    if (cfg.periodic) {
      ea[0] = a[n - 1], eb[0] = b[n - 1], ea[n + 1] = a[0], eb[n + 1] = b[0];
    } else {
      ea[0] = a[0], eb[0] = b[0], ea[n + 1] = a[n - 1], eb[n + 1] = b[n - 1];
    }
    for (int i = 0; i < n + 2; ++i) {
      const Vec2 f = flux({ea[i], eb[i]});
      fa[i] = f[0];
      fb[i] = f[1];
    }
    const double lam = dt / (2.0 * g.dx);
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      a[i] = 0.5 * (ea[i] + ea[i + 2]) - lam * (fa[i + 2] - fa[i]);
      b[i] = 0.5 * (eb[i] + eb[i + 2]) - lam * (fb[i + 2] - fb[i]);
      finite = finite && std::isfinite(a[i]) && std::isfinite(b[i]);
    }
    t += dt;
    if (!finite) {
      std::ostringstream msg;
      msg << "UnstableBlowup: non-finite cell at step " << step << ", t=" << t;
      throw UnstableBlowup(msg.str());
    }
    if (step % cfg.snapshot_every == 0 || step == cfg.steps) record(step);
  }
  return snaps;
}

GrowthFit fit_spike_growth(const std::vector<FieldSnapshot>& snapshots) {
  const std::size_t start = snapshots.size() / 2;
  const std::size_t m = snapshots.size() - start;
  if (m < 5) {
    throw InsufficientData("InsufficientData: spike growth fit needs at least 5 late-time snapshots, got " +
                           std::to_string(m));
  }
  double st = 0, sy = 0;
  for (std::size_t i = start; i < snapshots.size(); ++i) {
    st += snapshots[i].t;
    sy += snapshots[i].spike_mass_u2;
  }
  const double tm = st / m, ym = sy / m;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = start; i < snapshots.size(); ++i) {
    const double dt = snapshots[i].t - tm, dy = snapshots[i].spike_mass_u2 - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw InsufficientData("InsufficientData: snapshot times are not distinct");
  GrowthFit fit;
  fit.points = m;
  fit.slope = sty / stt;
  fit.intercept = ym - fit.slope * tm;
  const double ss_res = std::max(0.0, syy - fit.slope * sty);
  // A flat series fitted exactly counts as a perfect fit.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

void write_snapshot_csv(const FieldSnapshot& snap, const std::string& path) {
  CsvWriter w(path, {"x", "u1", "u2"});
  for (std::size_t i = 0; i < snap.x.size(); ++i) w.row({snap.x[i], snap.u1[i], snap.u2[i]});
}

void write_lf_summary_csv(const std::vector<FieldSnapshot>& snapshots, const std::string& path) {
  CsvWriter w(path, {"step", "t", "max_u1", "max_u2", "spike_mass"});
  for (const auto& s : snapshots) {
    w.row({static_cast<double>(s.step), s.t, s.max_u1, s.max_u2, s.spike_mass_u2});
  }
}

}  // namespace sshock
