#pragma once

#include <array>
#include <functional>
#include <utility>

namespace sshock {

using Vec2 = std::array<double, 2>;

/// Physical state u = (u1, u2) of the Keyfitz-Kranzer system.
struct State2 {
  double u1 = 0.0;
  double u2 = 0.0;

  friend bool operator==(const State2&, const State2&) = default;
};

struct RiemannData {
  State2 left;
  State2 right;
};

/// Shock data derived from a Riemann pair. e0 is the singular-shock strength,
/// the deficit in the second Rankine-Hugoniot condition.
struct RiemannAnalysis {
  State2 uL;
  State2 uR;
  double s = 0.0;
  Vec2 wL{};
  Vec2 wR{};
  double e0 = 0.0;
  bool h1_holds = false;
  bool h2_holds = false;
};

/// f(u) = (u1^2 - u2, u1^3/3 - u1).
Vec2 flux(State2 u);

/// Eigenvalues (u1 - 1, u1 + 1) of Df(u), ascending.
std::pair<double, double> eigenvalues(State2 u);

/// Speed s balancing the first flux component, w_{L,R} = f(u_{L,R}) - s u_{L,R},
/// e0 = w2L - w2R and the strict hypothesis checks
///   H1: lambda_+(uR) < s < lambda_-(uL),   H2: e0 > 0.
/// Throws DegenerateData when u1L == u1R.
RiemannAnalysis analyze(const RiemannData& rd);

/// Evaluates the Rankine-Hugoniot quantities for an arbitrary flux. Exposed for
/// tests that need a second flux; the eigenvalue callback drives H1.
using FluxFn = std::function<Vec2(State2)>;
using EigenFn = std::function<std::pair<double, double>(State2)>;
RiemannAnalysis analyze_with(const RiemannData& rd, const FluxFn& f, const EigenFn& eig);

/// Jacobian Df(u) row-major.
std::array<double, 4> flux_jacobian(State2 u);

}  // namespace sshock
