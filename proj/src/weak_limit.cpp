#include "sshock/weak_limit.hpp"

#include <cmath>
#include <stdexcept>

#include "sshock/io.hpp"
#include "sshock/quad.hpp"

namespace sshock {

double bump(double x, double center, double radius) {
  const double z = (x - center) / radius;
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

TestFunction bump_function(double center, double radius, std::string name) {
  return {[center, radius](double x) { return bump(x, center, radius); }, center - radius,
          center + radius, std::move(name)};
}

TestFunction2D separable_bump(double xc, double xr, double tc, double tr, std::string name) {
  return {[=](double x, double t) { return bump(x, xc, xr) * bump(t, tc, tr); },
          xc - xr, xc + xr, tc - tr, tc + tr, std::move(name)};
}

namespace {

constexpr double kQuadTol = 1e-12;

// Trapezoid of g(i) against xi over samples [i0, i1].
template <class G>
double trapezoid(const std::vector<double>& xi, std::size_t i0, std::size_t i1, G g) {
  double s = 0.0;
  for (std::size_t i = i0; i < i1; ++i) s += 0.5 * (xi[i + 1] - xi[i]) * (g(i) + g(i + 1));
  return s;
}

// Integral of psi times the profile over the whole line: native grid inside,
// end-state constants outside.
std::array<double, 2> integrate_against(const ProfileSolution& p, const RiemannAnalysis& a,
                                        const std::function<double(double)>& psi, double lo,
                                        double hi) {
  std::array<double, 2> out{};
  const double x0 = p.xi.front();
  const double x1 = p.xi.back();
  if (lo < x0) {
    const double m = quad(psi, lo, std::min(x0, hi), kQuadTol);
    out[0] += a.uL.u1 * m;
    out[1] += a.uL.u2 * m;
  }
  if (hi > x1) {
    const double m = quad(psi, std::max(x1, lo), hi, kQuadTol);
    out[0] += a.uR.u1 * m;
    out[1] += a.uR.u2 * m;
  }
  std::vector<double> w(p.xi.size());
  for (std::size_t i = 0; i < p.xi.size(); ++i) w[i] = psi(p.xi[i]);
  out[0] += trapezoid(p.xi, 0, p.xi.size() - 1, [&](std::size_t i) { return w[i] * p.u1[i]; });
  out[1] += trapezoid(p.xi, 0, p.xi.size() - 1, [&](std::size_t i) { return w[i] * p.u2[i]; });
  return out;
}

PairingReport finish(PairingReport r) {
  for (int k = 0; k < 2; ++k) r.discrepancy[k] = std::abs(r.computed[k] - r.predicted[k]);
  return r;
}

}  // namespace

LayerIntegrals layer_integrals(const ProfileSolution& p) {
  LayerIntegrals out;
  out.epsilon = p.epsilon;
  // Layer samples with the exact section states at both ends.
  std::vector<double> xi, u1, u2;
  const auto push = [&](double sigma) {
    const Vec y = sigma <= 0.0 ? p.left->at(sigma) : p.right->at(sigma);
    const State2 u = decompactify(y[kBeta], y[kR], p.shift);
    xi.push_back(y[kXi]);
    u1.push_back(u.u1);
    u2.push_back(u.u2);
  };
  push(p.sigma_in);
  for (std::size_t i = 0; i < p.sigma.size(); ++i) {
    if (p.sigma[i] > p.sigma_in && p.sigma[i] < p.sigma_out) {
      xi.push_back(p.xi[i]);
      u1.push_back(p.u1[i]);
      u2.push_back(p.u2[i]);
    }
  }
  push(p.sigma_out);
  const std::size_t n = xi.size() - 1;
  out.I_u1 = trapezoid(xi, 0, n, [&](std::size_t i) { return u1[i]; });
  out.I_abs_u1 = trapezoid(xi, 0, n, [&](std::size_t i) { return std::abs(u1[i]); });
  out.I_u2 = trapezoid(xi, 0, n, [&](std::size_t i) { return u2[i]; });

  const State2 uL = p.left ? decompactify(p.left->back()[kBeta], p.left->back()[kR], p.shift) : State2{};
  const State2 uR = p.right ? decompactify(p.right->back()[kBeta], p.right->back()[kR], p.shift) : State2{};
  std::size_t k_in = 0, k_out = p.sigma.size() - 1;
  while (k_in + 1 < p.sigma.size() && p.sigma[k_in + 1] <= p.sigma_in) ++k_in;
  while (k_out > 0 && p.sigma[k_out - 1] >= p.sigma_out) --k_out;
  out.tail_L = trapezoid(p.xi, 0, k_in, [&](std::size_t i) {
    return std::abs(p.u1[i] - uL.u1) + std::abs(p.u2[i] - uL.u2);
  });
  out.tail_R = trapezoid(p.xi, k_out, p.xi.size() - 1, [&](std::size_t i) {
    return std::abs(p.u1[i] - uR.u1) + std::abs(p.u2[i] - uR.u2);
  });
  return out;
}

PairingReport pair_1d(const ProfileSolution& p, const RiemannAnalysis& a, const TestFunction& psi) {
  PairingReport r;
  r.epsilon = p.epsilon;
  r.name = psi.name;
  r.computed = integrate_against(p, a, psi.f, psi.lo, psi.hi);
  const double s = a.s;
  const double mL = s > psi.lo ? quad(psi.f, psi.lo, std::min(s, psi.hi), kQuadTol) : 0.0;
  const double mR = s < psi.hi ? quad(psi.f, std::max(s, psi.lo), psi.hi, kQuadTol) : 0.0;
  r.predicted = {a.uL.u1 * mL + a.uR.u1 * mR, a.uL.u2 * mL + a.uR.u2 * mR + a.e0 * psi.f(s)};
  return finish(r);
}

PairingReport pair_2d(const ProfileSolution& p, const RiemannAnalysis& a, const TestFunction2D& phi) {
  if (!(phi.t_lo > 0.0)) {
    throw std::invalid_argument("pair_2d: test function support must lie in t > 0");
  }
  PairingReport r;
  r.epsilon = p.epsilon;
  r.name = phi.name;
  const double s = a.s;
  for (int k = 0; k < 2; ++k) {
    const auto inner = [&](double t) {
      const auto psi = [&](double xi) { return t * phi.f(t * xi, t); };
      return integrate_against(p, a, psi, phi.x_lo / t, phi.x_hi / t)[k];
    };
    r.computed[k] = quad(inner, phi.t_lo, phi.t_hi, 1e-10);
  }
  const auto side = [&](double t, bool left) {
    const auto g = [&](double x) { return phi.f(x, t); };
    const double st = s * t;
    if (left) return st > phi.x_lo ? quad(g, phi.x_lo, std::min(st, phi.x_hi), kQuadTol) : 0.0;
    return st < phi.x_hi ? quad(g, std::max(st, phi.x_lo), phi.x_hi, kQuadTol) : 0.0;
  };
  const double mL = quad([&](double t) { return side(t, true); }, phi.t_lo, phi.t_hi, 1e-10);
  const double mR = quad([&](double t) { return side(t, false); }, phi.t_lo, phi.t_hi, 1e-10);
  const double atom = quad([&](double t) { return t * phi.f(s * t, t); }, phi.t_lo, phi.t_hi, 1e-12);
  r.predicted = {a.uL.u1 * mL + a.uR.u1 * mR, a.uL.u2 * mL + a.uR.u2 * mR + a.e0 * atom};
  return finish(r);
}

void write_pairing_csv(const std::vector<PairingReport>& reports, const std::string& path) {
  CsvWriter w(path, {"test_function", "epsilon", "component", "computed", "predicted", "discrepancy"});
  for (const auto& r : reports) {
    for (int k = 0; k < 2; ++k) {
      w.row(r.name, {r.epsilon, static_cast<double>(k + 1), r.computed[k], r.predicted[k], r.discrepancy[k]});
    }
  }
}

}  // namespace sshock
