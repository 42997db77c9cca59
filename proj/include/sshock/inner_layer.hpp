#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "sshock/flux.hpp"
#include "sshock/ode.hpp"

namespace sshock {

/// Roots of beta^4 - 6 beta^2 + 6, ascending: rho1 < rho2 < 0 < rho3 < rho4.
std::array<double, 4> inner_roots();
double rho3();

/// Right-hand side of the inner equation beta' = -(beta^4 - 6 beta^2 + 6)/6.
double inner_beta_rate(double beta);

struct IotaValues {
  double iota1 = 0.0;
  double iota2 = 0.0;
  double iota3 = 0.0;
};

/// iota1 solves the inner equation with iota1(0) = 0, iota2 = exp(int_0 iota1^3/6),
/// iota3 = int_{-inf} iota2. Tabulated on a uniform grid over [-Sigma, Sigma] and
/// evaluable anywhere through the dense output of the generating integrations.
class IotaTable {
 public:
  std::vector<double> grid;
  std::vector<double> iota1;
  std::vector<double> iota2;
  std::vector<double> iota3;
  double Sigma = 0.0;
  double sigma0 = 0.0;      // iota1(sigma0) = 1
  double iota3_at_0 = 0.0;
  double tail_mass = 0.0;   // int_{-inf}^{-Sigma} iota2, added in closed form

  IotaValues at(double sigma) const;

 private:
  friend IotaTable build_iota_table(double, double, double);
  std::shared_ptr<const Trajectory> backward_;  // sigma from 0 to -Sigma, state (iota1, iota2, J)
  std::shared_ptr<const Trajectory> forward_;   // sigma from 0 to +Sigma
  double j_minus_ = 0.0;                        // J(-Sigma) = -int_{-Sigma}^0 iota2
};

/// Throws TailNotConverged if |iota1(-+Sigma) -+ rho3| >= tol.
IotaTable build_iota_table(double Sigma = 25.0, double tol = 1e-10, double grid_step = 1e-3);

struct InnerConstants {
  std::array<double, 4> rho{};
  double kappa0 = 0.0;
  double omega0 = 0.0;
  double sigma0 = 0.0;
  double iota3_at_0 = 0.0;
};

/// kappa0 = e0 / (2 iota3(0)), omega0 = kappa0 iota2(sigma0).
/// Throws HypothesisViolated for e0 < 0; e0 = 0 gives the trivial constants.
InnerConstants matching_constants(const RiemannAnalysis& analysis, const IotaTable& table);

/// gamma0 on {r = 0}: the left half (beta, kappa, w2) = (iota1, kappa0 iota2, w2L - kappa0 iota3)
/// for sigma <= 0 and the right half (iota1, kappa0 iota2, w2R + kappa0 iota3(-sigma)) for sigma >= 0.
/// w1 = w1L and xi = s stay frozen.
struct Gamma0Trajectory {
  std::vector<double> sigma;
  std::vector<double> beta;
  std::vector<double> kappa;
  std::vector<double> w2;
  double w1 = 0.0;
  double xi = 0.0;
  double kappa0 = 0.0;
  double w2L = 0.0;
  double w2R = 0.0;
  double w2_minus_inf = 0.0;
  double w2_plus_inf = 0.0;
  double match_mismatch = 0.0;   // max difference of the two halves at sigma = 0
  double max_beta_kappa = 0.0;   // refined on dense output
  double sigma_at_max = 0.0;
  double iota1_at_max = 0.0;

  /// Point of gamma0 at any sigma, from the half-trajectory formulas.
  std::array<double, 3> at(const IotaTable& table, double sigma) const;
};

/// Throws MatchFailure if the two halves disagree at sigma = 0 by more than tol.
Gamma0Trajectory build_gamma0(const RiemannAnalysis& analysis, const InnerConstants& constants,
                              const IotaTable& table, double tol = 1e-10);

void write_iota_csv(const IotaTable& table, const std::string& path);
void write_gamma0_csv(const Gamma0Trajectory& g, const std::string& path);

}  // namespace sshock
