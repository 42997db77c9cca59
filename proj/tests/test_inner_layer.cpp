#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sshock/errors.hpp"
#include "sshock/inner_layer.hpp"
#include "sshock/quad.hpp"

using namespace sshock;

namespace {

const IotaTable& table() {
  static const IotaTable t = build_iota_table();
  return t;
}

const RiemannAnalysis& sample() {
  static const RiemannAnalysis a = analyze({{2, 6}, {-1.6, 4.56}});
  return a;
}

}  // namespace

TEST_CASE("roots of the inner quartic") {
  const auto r = inner_roots();
  CHECK(r[2] == doctest::Approx(1.1260325).epsilon(1e-7));
  CHECK(r[1] == -r[2]);
  CHECK(r[0] == -r[3]);
  for (double x : r) CHECK(std::abs(inner_beta_rate(x)) < 1e-14);
}

TEST_CASE("iota table basics") {
  const auto& t = table();
  const std::size_t mid = t.grid.size() / 2;
  CHECK(t.grid[mid] == 0.0);
  CHECK(t.iota1[mid] == 0.0);
  CHECK(t.iota2[mid] == 1.0);
  CHECK(std::abs(t.iota1.front() - rho3()) < 1e-8);
  CHECK(std::abs(t.iota1.back() + rho3()) < 1e-8);
  double odd = 0.0, even = 0.0;
  bool decreasing = true, increasing3 = true, bounded2 = true;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const std::size_t j = t.grid.size() - 1 - i;
    odd = std::max(odd, std::abs(t.iota1[i] + t.iota1[j]));
    even = std::max(even, std::abs(t.iota2[i] - t.iota2[j]));
    if (i > 0) {
      // Strict where the tail has not saturated to rounding level.
      const bool resolved = std::abs(std::abs(t.iota1[i]) - rho3()) > 1e-12;
      decreasing = decreasing && (resolved ? t.iota1[i] < t.iota1[i - 1] : t.iota1[i] <= t.iota1[i - 1]);
      increasing3 = increasing3 && t.iota3[i] > t.iota3[i - 1];
    }
    if (i != mid) bounded2 = bounded2 && t.iota2[i] < 1.0 && t.iota2[i] > 0.0;
  }
  CHECK(odd < 1e-8);
  CHECK(even < 1e-8);
  CHECK(decreasing);
  CHECK(increasing3);
  CHECK(bounded2);
}

TEST_CASE("iota functions match closed forms") {
  const auto& t = table();
  for (double s : {-12.0, -4.0, -1.3, -0.2, 0.5, 3.0, 9.0}) {
    const auto v = t.at(s);
    const double b = oracle::iota1_of_sigma(s);
    CHECK(std::abs(v.iota1 - b) < 1e-10);
    CHECK(std::abs(v.iota2 - oracle::iota2_of_beta(b)) < 1e-10);
    CHECK(std::abs(v.iota2 - oracle::iota2_of_sigma(s)) < 1e-10);
  }
}

TEST_CASE("iota3(0) agrees with independent quadratures") {
  const auto& t = table();
  // Adaptive quadrature of the closed-form iota2 over sigma, with the exponential tail.
  const double r = rho3();
  const auto q = quad_tail(oracle::iota2_of_sigma, 0.0, false, r * r * r / 6.0, 1e-11, 2.0);
  CHECK(std::abs(q.value - t.iota3_at_0) < 1e-9);
  // Substitution to a smooth integrand in beta, Simpson rule.
  CHECK(std::abs(oracle::iota3_at_0() - t.iota3_at_0) < 1e-9);
}

TEST_CASE("sigma0 and the maximizer of iota1 iota2") {
  const auto& t = table();
  CHECK(std::abs(t.at(t.sigma0).iota1 - 1.0) < 1e-10);
  CHECK(std::abs(t.sigma0 - oracle::sigma_of_beta(1.0)) < 1e-10);
  // Discrete maximizer of iota1 iota2 on the grid.
  std::size_t best = 0;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    if (t.iota1[i] * t.iota2[i] > t.iota1[best] * t.iota2[best]) best = i;
  }
  CHECK(std::abs(t.iota1[best] - 1.0) < 1e-3);
  // Unique sign change of d(iota1 iota2)/dsigma on the negative axis.
  int changes = 0;
  const std::size_t mid = t.grid.size() / 2;
  for (std::size_t i = 2; i <= mid; ++i) {
    const double d1 = t.iota1[i] * t.iota2[i] - t.iota1[i - 1] * t.iota2[i - 1];
    const double d0 = t.iota1[i - 1] * t.iota2[i - 1] - t.iota1[i - 2] * t.iota2[i - 2];
    if ((d1 > 0) != (d0 > 0)) ++changes;
  }
  CHECK(changes == 1);
}

TEST_CASE("Sigma too small for the tail") {
  CHECK_THROWS_AS(build_iota_table(3.0, 1e-10), TailNotConverged);
}

TEST_CASE("matching constants") {
  const auto& t = table();
  const auto c = matching_constants(sample(), t);
  CHECK(c.kappa0 == doctest::Approx(0.432 / (2.0 * t.iota3_at_0)).epsilon(1e-14));
  CHECK(c.kappa0 > 0.0);
  CHECK(c.omega0 == doctest::Approx(c.kappa0 * oracle::iota2_of_beta(1.0)).epsilon(1e-9));
  RiemannAnalysis doubled = sample();
  doubled.e0 *= 2.0;
  const auto c2 = matching_constants(doubled, t);
  CHECK(c2.kappa0 == 2.0 * c.kappa0);
  CHECK(c2.omega0 == 2.0 * c.omega0);
  RiemannAnalysis zero = sample();
  zero.e0 = 0.0;
  CHECK(matching_constants(zero, t).kappa0 == 0.0);
  zero.e0 = -0.1;
  CHECK_THROWS_AS(matching_constants(zero, t), HypothesisViolated);
}

TEST_CASE("gamma0 assembly") {
  const auto& t = table();
  const auto c = matching_constants(sample(), t);
  const auto g = build_gamma0(sample(), c, t);
  const std::size_t mid = g.sigma.size() / 2;
  CHECK(g.beta[mid] == 0.0);
  CHECK(g.kappa[mid] == c.kappa0);
  CHECK(g.match_mismatch < 1e-14);
  CHECK(std::abs(g.w2_minus_inf - g.w2_plus_inf - sample().e0) < 1e-12);
  // Total drop is int kappa dsigma, by an independent quadrature of the closed form.
  const auto k = [&c](double s) { return c.kappa0 * oracle::iota2_of_sigma(s); };
  const double r = rho3();
  const double drop = 2.0 * quad_tail(k, 0.0, false, r * r * r / 6.0, 1e-12, 2.0).value;
  CHECK(std::abs(drop - sample().e0) < 1e-8);
  // Symmetry and monotone w2.
  double sym = 0.0;
  bool mono = true;
  for (std::size_t i = 0; i < g.sigma.size(); ++i) {
    const std::size_t j = g.sigma.size() - 1 - i;
    sym = std::max({sym, std::abs(g.beta[i] + g.beta[j]), std::abs(g.kappa[i] - g.kappa[j])});
    if (i > 0) mono = mono && g.w2[i] < g.w2[i - 1];
  }
  CHECK(sym < 1e-8);
  CHECK(mono);
  // Max of beta*kappa against a grid search.
  double grid_max = 0.0;
  for (std::size_t i = 0; i < g.sigma.size(); ++i) grid_max = std::max(grid_max, g.beta[i] * g.kappa[i]);
  CHECK(std::abs(g.max_beta_kappa - c.omega0) < 1e-9);
  CHECK(std::abs(grid_max - c.omega0) < 1e-6);
  CHECK(std::abs(g.iota1_at_max - 1.0) < 1e-4);
}
