#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sshock/flux.hpp"
#include "sshock/full_profile.hpp"

namespace sshock {

/// Smooth test function of xi with support [lo, hi].
struct TestFunction {
  std::function<double(double)> f;
  double lo = 0.0;
  double hi = 0.0;
  std::string name;
};

/// Smooth test function of (x, t) supported in [x_lo, x_hi] x [t_lo, t_hi].
struct TestFunction2D {
  std::function<double(double, double)> f;
  double x_lo = 0.0, x_hi = 0.0, t_lo = 0.0, t_hi = 0.0;
  std::string name;
};

/// exp(1 - 1/(1 - z^2)) for z = (x - center)/radius in (-1, 1), zero elsewhere; peak value 1.
double bump(double x, double center, double radius);
TestFunction bump_function(double center, double radius, std::string name = "bump");
/// Product of bumps in x and t.
TestFunction2D separable_bump(double xc, double xr, double tc, double tr, std::string name = "bump2d");

struct LayerIntegrals {
  double epsilon = 0.0;
  double I_u1 = 0.0;       // int u1 over [xi_in, xi_out]
  double I_abs_u1 = 0.0;   // int |u1|
  double I_u2 = 0.0;
  double tail_L = 0.0;     // int |u - uL|_1 for xi < xi_in on the profile grid
  double tail_R = 0.0;
};

LayerIntegrals layer_integrals(const ProfileSolution& profile);

struct PairingReport {
  double epsilon = 0.0;
  std::array<double, 2> computed{};
  std::array<double, 2> predicted{};
  std::array<double, 2> discrepancy{};
  std::string name;
};

/// int psi u_eps dxi (trapezoid on the native grid, end-state constants outside) against
/// uL int_{xi<s} psi + uR int_{xi>s} psi + (0, e0) psi(s).
PairingReport pair_1d(const ProfileSolution& profile, const RiemannAnalysis& analysis,
                      const TestFunction& psi);

/// int int phi(x, t) u_eps(x/t) dx dt with x = t xi, against the step plus
/// (0, e0) int t phi(s t, t) dt. Requires t_lo > 0.
PairingReport pair_2d(const ProfileSolution& profile, const RiemannAnalysis& analysis,
                      const TestFunction2D& phi);

void write_pairing_csv(const std::vector<PairingReport>& reports, const std::string& path);

}  // namespace sshock
