#include "sshock/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sshock/errors.hpp"

namespace sshock {

Vec2 flux(State2 u) {
  return {u.u1 * u.u1 - u.u2, u.u1 * u.u1 * u.u1 / 3.0 - u.u1};
}

std::pair<double, double> eigenvalues(State2 u) { return {u.u1 - 1.0, u.u1 + 1.0}; }

std::array<double, 4> flux_jacobian(State2 u) {
  return {2.0 * u.u1, -1.0, u.u1 * u.u1 - 1.0, 0.0};
}

RiemannAnalysis analyze_with(const RiemannData& rd, const FluxFn& f, const EigenFn& eig) {
  const State2& uL = rd.left;
  const State2& uR = rd.right;
  if (!(std::isfinite(uL.u1) && std::isfinite(uL.u2) && std::isfinite(uR.u1) &&
        std::isfinite(uR.u2))) {
    throw DegenerateData("Riemann data must be finite");
  }
  if (uL.u1 == uR.u1) {
    std::ostringstream msg;
    msg << "DegenerateData: u1L == u1R (" << uL.u1 << "), shock speed undefined";
    throw DegenerateData(msg.str());
  }

  const Vec2 fL = f(uL);
  const Vec2 fR = f(uR);

  RiemannAnalysis a;
  a.uL = uL;
  a.uR = uR;
  a.s = (fL[0] - fR[0]) / (uL.u1 - uR.u1);
  a.wL = {fL[0] - a.s * uL.u1, fL[1] - a.s * uL.u2};
  a.wR = {fR[0] - a.s * uR.u1, fR[1] - a.s * uR.u2};
  a.e0 = a.wL[1] - a.wR[1];

  // Real eigenvalues, so Re(lambda) is the eigenvalue itself.
  const auto [lmL, lpL] = eig(uL);
  const auto [lmR, lpR] = eig(uR);
  a.h1_holds = std::max(lmR, lpR) < a.s && a.s < std::min(lmL, lpL);
  a.h2_holds = a.e0 > 0.0;
  return a;
}

RiemannAnalysis analyze(const RiemannData& rd) {
  return analyze_with(rd, &flux, &eigenvalues);
}

}  // namespace sshock
