#include "sshock/full_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "sshock/errors.hpp"
#include "sshock/io.hpp"
#include "sshock/roots.hpp"

namespace sshock {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Unit eigenvectors of Df(u): (1, u1 + 1) for u1 - 1 and (1, u1 - 1) for u1 + 1.
std::array<double, 4> unit_eigenvectors(const State2& u) {
  const double n1 = std::hypot(1.0, u.u1 + 1.0);
  const double n2 = std::hypot(1.0, u.u1 - 1.0);
  return {1.0 / n1, (u.u1 + 1.0) / n1, 1.0 / n2, (u.u1 - 1.0) / n2};
}

// Coordinates of d in the basis (v1, v2).
std::array<double, 2> eigen_coords(const std::array<double, 4>& v, double d1, double d2) {
  const double det = v[0] * v[3] - v[2] * v[1];
  return {(v[3] * d1 - v[2] * d2) / det, (-v[1] * d1 + v[0] * d2) / det};
}

// Mismatch of the fast equilibrium condition f(u) - xi u - w in the shifted frame.
double fast_mismatch(std::span<const double> y) {
  const double r = y[kR];
  const double u1 = y[kBeta] / r;
  const double v2 = 1.0 / (r * r);
  const double xi = y[kXi];
  const double g1 = u1 * u1 - v2 - xi * u1 - y[kW1];
  const double g2 = u1 * u1 * u1 / 3.0 - u1 - xi * v2 - y[kW2];
  return std::max(std::abs(g1), std::abs(g2));
}

struct Context {
  const RiemannAnalysis* analysis = nullptr;
  double eps = 0.0;
  double shift = 0.0;
  double r0 = 0.0;
  const ShootConfig* cfg = nullptr;
  State2 targetL;   // shifted
  State2 targetR;
  std::array<double, 4> vL{};
  std::array<double, 4> vR{};
};

enum EventId { kSettle = 0, kBox = 1, kSection = 2, kBetaPlus = 3, kBetaMinus = 4, kRecover = 5 };

Trajectory run_leg(const Context& ctx, const GammaPoint& q, bool left, bool full) {
  const Vec y0{0.0, ctx.eps / q.kappa, q.kappa, q.w1, q.w2, q.xi};
  const double settle = ctx.cfg->settle_tol;
  std::vector<EventSpec> events{
      {[settle](double, std::span<const double> y) { return fast_mismatch(y) - settle; },
       EventDirection::falling, true},
      {[](double, std::span<const double> y) { return std::max(std::abs(y[kBeta]), y[kR]) - 1e3; },
       EventDirection::rising, true},
  };
  if (full) {
    const State2 tgt = left ? ctx.targetL : ctx.targetR;
    const auto v = left ? ctx.vL : ctx.vR;
    const double delta = ctx.cfg->delta_recover;
    events.push_back({[r0 = ctx.r0](double, std::span<const double> y) { return y[kR] - r0; },
                      EventDirection::any, false});
    events.push_back({[](double, std::span<const double> y) { return y[kBeta] - 1.0; },
                      EventDirection::any, false});
    events.push_back({[](double, std::span<const double> y) { return y[kBeta] + 1.0; },
                      EventDirection::any, false});
    events.push_back({[tgt, v, delta](double, std::span<const double> y) {
                        const double r = y[kR];
                        const auto c = eigen_coords(v, y[kBeta] / r - tgt.u1, 1.0 / (r * r) - tgt.u2);
                        return std::hypot(c[0], c[1]) - delta;
                      },
                      EventDirection::falling, false});
  }
  const double t1 = left ? -ctx.cfg->sigma_max : ctx.cfg->sigma_max;
  Trajectory tr = integrate(compact_field_fn(), y0, 0.0, t1, ctx.cfg->integrator, events);
  if (tr.events_with_id(kSettle).empty()) {
    std::ostringstream msg;
    const auto& e = tr.back();
    msg << "MissedTarget: " << (left ? "backward" : "forward") << " leg from Gamma ended at sigma="
        << tr.t_end() << " with (beta, r) = (" << e[kBeta] << ", " << e[kR]
        << ") before reaching the end-state line";
    throw MissedTarget(msg.str());
  }
  return tr;
}

double surface_drift(const Trajectory& tr, double eps) {
  double d = 0.0;
  for (const Vec& y : tr.states()) d = std::max(d, std::abs(y[kR] * y[kKappa] / eps - 1.0));
  return d;
}

std::vector<double> residual(const Context& ctx, const GammaPoint& q, double* drift) {
  if (!(q.kappa > 0.0) || !std::isfinite(q.kappa)) throw NoConvergence("NoConvergence: kappa left (0, inf)");
  const Trajectory L = run_leg(ctx, q, true, false);
  const Trajectory R = run_leg(ctx, q, false, false);
  if (drift) *drift = std::max({*drift, surface_drift(L, ctx.eps), surface_drift(R, ctx.eps)});
  const auto& a = L.back();
  const auto& b = R.back();
  return {a[kBeta] / a[kR] - ctx.targetL.u1, 1.0 / (a[kR] * a[kR]) - ctx.targetL.u2,
          b[kBeta] / b[kR] - ctx.targetR.u1, 1.0 / (b[kR] * b[kR]) - ctx.targetR.u2};
}

Vec state_at(const ProfileSolution& p, double sigma) {
  return sigma <= 0.0 ? p.left->at(sigma) : p.right->at(sigma);
}

// Refine the maximum of g over [a, b] on the dense output.
std::pair<double, double> refine_max(const ProfileSolution& p, double a, double b,
                                     const std::function<double(const Vec&)>& g) {
  if (a > b) std::swap(a, b);
  const auto f = [&](double s) { return g(state_at(p, s)); };
  // Keep the search within one leg so the dense output stays smooth.
  if (a < 0.0 && b > 0.0) {
    const auto l = maximize_bracketed(f, a, 0.0);
    const auto r = maximize_bracketed(f, 0.0, b);
    return l.second >= r.second ? l : r;
  }
  return maximize_bracketed(f, a, b);
}

}  // namespace

LaunchState launch_state(const RiemannAnalysis& a, ProfileSide side, double alpha, double angle,
                         double delta, double eps) {
  const bool left = side == ProfileSide::L;
  const State2 u = left ? a.uL : a.uR;
  const Vec2 w = left ? a.wL : a.wR;
  const double xi = a.s + alpha;
  LaunchState out;
  out.eigenvalues = {u.u1 - 1.0 - xi, u.u1 + 1.0 - xi};
  const bool ok = left ? (out.eigenvalues[0] > 0.0 && out.eigenvalues[1] > 0.0)
                       : (out.eigenvalues[0] < 0.0 && out.eigenvalues[1] < 0.0);
  if (!ok) {
    std::ostringstream msg;
    msg << "HypothesisViolated: eigenvalues of Df(u) - xi I at xi = " << xi << " are ("
        << out.eigenvalues[0] << ", " << out.eigenvalues[1] << "), expected "
        << (left ? "both positive" : "both negative");
    throw HypothesisViolated(msg.str());
  }
  out.eigenvectors = unit_eigenvectors(u);
  const auto& v = out.eigenvectors;
  const double c = std::cos(angle), s = std::sin(angle);
  const State2 p{u.u1 + delta * (c * v[0] + s * v[2]), u.u2 + delta * (c * v[1] + s * v[3])};
  const double shift = default_shift(a);
  const auto [beta, r] = compactify(p, shift);
  const Vec2 wp{w[0] - alpha * u.u1, w[1] - alpha * u.u2};
  const Vec2 ws = shift_w(wp, xi, shift);
  out.point = {beta, r, eps / r, ws[0], ws[1], xi};
  return out;
}

GammaPoint singular_guess(const RiemannAnalysis& a, const InnerConstants& c) {
  const double shift = default_shift(a);
  const Vec2 w = shift_w(a.wL, a.s, shift);
  return {c.kappa0, w[0], w[1] - c.kappa0 * c.iota3_at_0, a.s};
}

ProfileSolution shoot_match(const RiemannAnalysis& a, const InnerConstants& constants, double eps,
                            const GammaPoint& guess, const ShootConfig& cfg) {
  if (!a.h1_holds) throw HypothesisViolated("HypothesisViolated: H1 fails for this Riemann data");
  if (!(a.e0 > 0.0)) throw HypothesisViolated("HypothesisViolated: H2 requires e0 > 0");
  if (!(eps > 0.0 && eps <= 0.05)) {
    throw std::invalid_argument("shoot_match: epsilon must lie in (0, 0.05]");
  }
  (void)constants;
  Context ctx;
  ctx.analysis = &a;
  ctx.eps = eps;
  ctx.shift = default_shift(a);
  ctx.r0 = cfg.r0 > 0.0 ? cfg.r0 : default_r0(a, ctx.shift);
  ctx.cfg = &cfg;
  ctx.targetL = {a.uL.u1, a.uL.u2 + ctx.shift};
  ctx.targetR = {a.uR.u1, a.uR.u2 + ctx.shift};
  ctx.vL = unit_eigenvectors(a.uL);
  ctx.vR = unit_eigenvectors(a.uR);

  double drift = 0.0;
  std::mutex drift_mutex;
  const VecFn F = [&](const std::vector<double>& x) {
    double local = 0.0;
    auto r = residual(ctx, {x[0], x[1], x[2], x[3]}, &local);
    std::lock_guard<std::mutex> lock(drift_mutex);
    drift = std::max(drift, local);
    return r;
  };
  RootOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.max_newton;
  opts.parallel_jacobian = cfg.parallel_jacobian;
  const RootResult root = solve_root(F, {guess.kappa, guess.w1, guess.w2, guess.xi}, opts);

  ProfileSolution p;
  p.epsilon = eps;
  p.shift = ctx.shift;
  p.r0 = ctx.r0;
  p.gamma = {root.x[0], root.x[1], root.x[2], root.x[3]};
  p.match_residual = root.residual;
  p.newton_iterations = root.iterations;
  if (!(eps / p.gamma.kappa < ctx.r0)) {
    std::ostringstream msg;
    msg << "SectionMiss: matched beta = 0 crossing at r = " << eps / p.gamma.kappa
        << " is outside the inner regime r < r0 = " << ctx.r0;
    throw SectionMiss(msg.str());
  }

  auto L = std::make_shared<Trajectory>(run_leg(ctx, p.gamma, true, true));
  auto R = std::make_shared<Trajectory>(run_leg(ctx, p.gamma, false, true));
  p.surface_drift = std::max({drift, surface_drift(*L, eps), surface_drift(*R, eps)});
  p.left = L;
  p.right = R;

  const auto secL = L->events_with_id(kSection);
  const auto secR = R->events_with_id(kSection);
  if (secL.size() != 1 || secR.size() != 1) {
    std::ostringstream msg;
    msg << "SectionMiss: r = r0 crossed " << secL.size() << " times before and " << secR.size()
        << " times after Gamma, expected once each";
    throw SectionMiss(msg.str());
  }
  const auto unshift = [&](const Vec& y) { return unshift_w({y[kW1], y[kW2]}, y[kXi], ctx.shift); };
  p.sigma_in = secL[0].t;
  p.sigma_out = secR[0].t;
  p.xi_in = secL[0].y[kXi];
  p.xi_out = secR[0].y[kXi];
  p.xi_gamma = p.gamma.xi;
  {
    const Vec2 wi = unshift(secL[0].y), wo = unshift(secR[0].y);
    p.w1_in = wi[0];
    p.w2_in = wi[1];
    p.w1_out = wo[0];
    p.w2_out = wo[1];
  }
  const auto bp = L->events_with_id(kBetaPlus);
  const auto bm = R->events_with_id(kBetaMinus);
  p.xi_beta_plus = bp.empty() ? kNaN : bp.front().y[kXi];
  p.xi_beta_minus = bm.empty() ? kNaN : bm.front().y[kXi];

  const auto recL = L->events_with_id(kRecover);
  const auto recR = R->events_with_id(kRecover);
  p.unknowns = {kNaN, kNaN, kNaN, kNaN};
  const auto recover = [&](const EventRecord& e, const State2& tgt, const std::array<double, 4>& v,
                           double& alpha, double& angle) {
    const double r = e.y[kR];
    const auto c = eigen_coords(v, e.y[kBeta] / r - tgt.u1, 1.0 / (r * r) - tgt.u2);
    alpha = e.y[kXi] - a.s;
    angle = std::atan2(c[1], c[0]);
  };
  if (!recL.empty()) recover(recL.back(), ctx.targetL, ctx.vL, p.unknowns.alpha1, p.unknowns.theta);
  if (!recR.empty()) recover(recR.back(), ctx.targetR, ctx.vR, p.unknowns.alpha2, p.unknowns.phi);

  // Samples ordered by increasing sigma (and xi).
  std::vector<double> tl, tr;
  std::vector<Vec> yl, yr;
  L->sample(cfg.samples_per_step, tl, yl);
  R->sample(cfg.samples_per_step, tr, yr);
  std::reverse(tl.begin(), tl.end());
  std::reverse(yl.begin(), yl.end());
  tl.pop_back();
  yl.pop_back();  // Gamma point repeats as the first right sample
  std::vector<double> ts = tl;
  std::vector<Vec> ys = yl;
  ts.insert(ts.end(), tr.begin(), tr.end());
  ys.insert(ys.end(), yr.begin(), yr.end());

  const std::size_t g = tl.size();  // index of Gamma
  const auto near = [&](const Vec& y, const State2& u) {
    const State2 ph = decompactify(y[kBeta], y[kR], ctx.shift);
    return std::hypot(ph.u1 - u.u1, ph.u2 - u.u2) < cfg.boundary_tol;
  };
  std::size_t lo = 0, hi = ts.size() - 1;
  for (std::size_t i = g; i-- > 0;) {
    if (near(ys[i], a.uL)) {
      lo = i;
      break;
    }
  }
  for (std::size_t i = g; i < ts.size(); ++i) {
    if (near(ys[i], a.uR)) {
      hi = i;
      break;
    }
  }
  for (std::size_t i = lo; i <= hi; ++i) {
    const Vec& y = ys[i];
    const State2 u = decompactify(y[kBeta], y[kR], ctx.shift);
    const Vec2 w = unshift(y);
    p.sigma.push_back(ts[i]);
    p.xi.push_back(y[kXi]);
    p.u1.push_back(u.u1);
    p.u2.push_back(u.u2);
    p.w1.push_back(w[0]);
    p.w2.push_back(w[1]);
    p.beta.push_back(y[kBeta]);
    p.r.push_back(y[kR]);
    p.kappa.push_back(y[kKappa]);
  }
  p.maxima = max_argmax(p);
  return p;
}

ProfileMaxima max_argmax(const ProfileSolution& p) {
  ProfileMaxima m;
  if (p.sigma.empty()) return m;
  const std::size_t n = p.sigma.size();
  std::size_t i2 = 0, ip = 0, im = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.u2[i] > p.u2[i2]) i2 = i;
    if (p.u1[i] > p.u1[ip]) ip = i;
    if (p.u1[i] < p.u1[im]) im = i;
  }
  const auto bracket = [&](std::size_t i) {
    return std::pair{p.sigma[i > 0 ? i - 1 : 0], p.sigma[std::min(i + 1, n - 1)]};
  };
  const double M = p.shift;
  const auto u2f = [M](const Vec& y) { return 1.0 / (y[kR] * y[kR]) - M; };
  const auto u1f = [](const Vec& y) { return y[kBeta] / y[kR]; };
  const auto neg_u1f = [](const Vec& y) { return -y[kBeta] / y[kR]; };

  if (p.left && p.right) {
    auto [a2, b2] = bracket(i2);
    const auto s2 = refine_max(p, a2, b2, u2f);
    auto [ap, bp] = bracket(ip);
    const auto sp = refine_max(p, ap, bp, u1f);
    auto [am, bm] = bracket(im);
    const auto sm = refine_max(p, am, bm, neg_u1f);
    const Vec y2 = state_at(p, s2.first), yp = state_at(p, sp.first), ym = state_at(p, sm.first);
    m.max_u2 = s2.second;
    m.argmax_u2 = y2[kXi];
    m.beta_at_max_u2 = y2[kBeta];
    m.max_u1_plus = sp.second;
    m.argmax_u1 = yp[kXi];
    m.beta_at_max_u1 = yp[kBeta];
    m.max_u1_minus = sm.second;
    m.argmin_u1 = ym[kXi];
    m.beta_at_min_u1 = ym[kBeta];
  } else {
    m.max_u2 = p.u2[i2];
    m.argmax_u2 = p.xi[i2];
    m.beta_at_max_u2 = p.beta[i2];
    m.max_u1_plus = p.u1[ip];
    m.argmax_u1 = p.xi[ip];
    m.beta_at_max_u1 = p.beta[ip];
    m.max_u1_minus = -p.u1[im];
    m.argmin_u1 = p.xi[im];
    m.beta_at_min_u1 = p.beta[im];
  }
  return m;
}

std::vector<double> geometric_eps(double start, double ratio, double end) {
  if (!(start > 0.0 && end > 0.0 && ratio > 0.0 && ratio < 1.0 && end <= start)) {
    throw std::invalid_argument("geometric_eps: need start >= end > 0 and ratio in (0, 1)");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double e = start * std::pow(ratio, k);
    if (e < end * (1.0 - 1e-9)) break;
    out.push_back(e);
  }
  if (out.back() > end * (1.0 + 1e-9)) out.push_back(end);
  return out;
}

ScalingReport measure_scaling(const RiemannAnalysis& a, const InnerConstants& c,
                              const std::vector<double>& eps_list, const ShootConfig& cfg,
                              bool keep_profiles) {
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("measure_scaling: epsilons must decrease");
  }
  ScalingReport rep;
  rep.kappa0_sq_ref = c.kappa0 * c.kappa0;
  rep.omega0_ref = c.omega0;
  rep.e0 = a.e0;

  struct Solved {
    double eps;
    GammaPoint q;
  };
  std::vector<Solved> history;
  const auto predict = [&](double eps) {
    if (history.empty()) return singular_guess(a, c);
    if (history.size() == 1) return history.back().q;
    const auto& p1 = history[history.size() - 1];
    const auto& p0 = history[history.size() - 2];
    const double t = std::log(eps / p1.eps) / std::log(p1.eps / p0.eps);
    return GammaPoint{p1.q.kappa + t * (p1.q.kappa - p0.q.kappa), p1.q.w1 + t * (p1.q.w1 - p0.q.w1),
                      p1.q.w2 + t * (p1.q.w2 - p0.q.w2), p1.q.xi + t * (p1.q.xi - p0.q.xi)};
  };
  // Solve at eps, falling back to the plain previous solution and then to
  // intermediate continuation steps.
  std::function<ProfileSolution(double, int)> solve = [&](double eps, int depth) -> ProfileSolution {
    try {
      return shoot_match(a, c, eps, predict(eps), cfg);
    } catch (const SolverError&) {
      if (history.size() >= 2) {
        try {
          return shoot_match(a, c, eps, history.back().q, cfg);
        } catch (const SolverError&) {
        }
      }
      if (depth >= 4 || history.empty()) throw;
      const double mid = std::sqrt(eps * history.back().eps);
      const ProfileSolution pm = solve(mid, depth + 1);
      history.push_back({mid, pm.gamma});
      return solve(eps, depth + 1);
    }
  };

  for (double eps : eps_list) {
    ProfileSolution p;
    try {
      p = solve(eps, 0);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "epsilon=" << eps << ": " << e.what();
      rep.failure = msg.str();
      break;
    }
    history.push_back({eps, p.gamma});
    ScalingRow row;
    row.epsilon = eps;
    row.eps2_max_u2 = eps * eps * p.maxima.max_u2;
    row.eps_max_u1_plus = eps * p.maxima.max_u1_plus;
    row.eps_max_u1_minus = eps * p.maxima.max_u1_minus;
    row.T_layer = p.T_layer();
    row.xi_width = p.xi_width();
    row.inner_xi_width = p.inner_xi_width();
    row.match_residual = p.match_residual;
    row.surface_drift = p.surface_drift;
    row.w2_drop = p.w2_in - p.w2_out;
    row.delta_w1 = p.w1_out - p.w1_in;
    row.unknowns = p.unknowns;
    rep.epsilons.push_back(eps);
    rep.rows.push_back(row);
    if (keep_profiles) rep.profiles.push_back(std::move(p));
  }
  return rep;
}

void write_profile_csv(const ProfileSolution& p, const std::string& path) {
  CsvWriter w(path, {"xi", "u1", "u2", "w1", "w2"});
  for (std::size_t i = 0; i < p.xi.size(); ++i) w.row({p.xi[i], p.u1[i], p.u2[i], p.w1[i], p.w2[i]});
}

void write_scaling_csv(const ScalingReport& r, const std::string& path) {
  CsvWriter w(path, {"epsilon", "eps2_max_u2", "eps_max_u1", "eps_max_minus_u1", "T_layer", "xi_width",
                     "inner_xi_width", "match_residual", "surface_drift", "w2_drop", "delta_w1",
                     "alpha1", "theta", "alpha2", "phi", "kappa0_sq_ref", "omega0_ref"});
  for (const auto& row : r.rows) {
    w.row({row.epsilon, row.eps2_max_u2, row.eps_max_u1_plus, row.eps_max_u1_minus, row.T_layer,
           row.xi_width, row.inner_xi_width, row.match_residual, row.surface_drift, row.w2_drop,
           row.delta_w1, row.unknowns.alpha1, row.unknowns.theta, row.unknowns.alpha2, row.unknowns.phi,
           r.kappa0_sq_ref, r.omega0_ref});
  }
}

}  // namespace sshock
