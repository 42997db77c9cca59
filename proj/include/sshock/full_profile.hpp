#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sshock/flux.hpp"
#include "sshock/inner_layer.hpp"
#include "sshock/ode.hpp"
#include "sshock/outer_layers.hpp"

namespace sshock {

enum class ProfileSide { L, R };

/// Position along U_L or U_R and launch angle in the corresponding 2-D eigenplane.
struct ShootingUnknowns {
  double alpha1 = 0.0;
  double theta = 0.0;
  double alpha2 = 0.0;
  double phi = 0.0;
};

struct LaunchState {
  CompactPoint point;
  std::array<double, 2> eigenvalues{};     // of Df(u_side) - (s + alpha) I
  std::array<double, 4> eigenvectors{};    // v1 = (e[0], e[1]), v2 = (e[2], e[3]), unit length
};

/// Compactified image of (u_side + delta (cos(angle) v1 + sin(angle) v2), w_side - alpha u_side,
/// s + alpha) with kappa = eps / r. Throws HypothesisViolated unless both eigenvalues are
/// positive (L) or negative (R).
LaunchState launch_state(const RiemannAnalysis& analysis, ProfileSide side, double alpha, double angle,
                         double delta_launch, double epsilon);

/// Point on the matching section Gamma = {beta = 0}; r = eps / kappa is implied.
/// w is expressed in the shifted frame.
struct GammaPoint {
  double kappa = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double xi = 0.0;
};

/// q0 = gamma0(0): (kappa0, w1L, w2L - kappa0 iota3(0), s).
GammaPoint singular_guess(const RiemannAnalysis& analysis, const InnerConstants& constants);

struct ShootConfig {
  double newton_tol = 1e-10;       // max-norm of u_end - u_side
  int max_newton = 40;
  double settle_tol = 1e-11;       // |f(u) - xi u - w| at which an end state counts as reached
  double sigma_max = 2000.0;
  double r0 = 0.0;                 // 0: default_r0
  double boundary_tol = 1e-3;      // profile truncation near the end states
  double delta_recover = 1e-5;     // launch offset at which ShootingUnknowns are read off
  int samples_per_step = 64;
  bool parallel_jacobian = false;
  IntegratorConfig integrator{1e-12, 1e-14, std::numeric_limits<double>::infinity(), 2'000'000};
};

struct ProfileMaxima {
  double max_u2 = 0.0;
  double argmax_u2 = 0.0;        // xi location
  double beta_at_max_u2 = 0.0;
  double max_u1_plus = 0.0;
  double argmax_u1 = 0.0;
  double beta_at_max_u1 = 0.0;
  double max_u1_minus = 0.0;     // -min u1
  double argmin_u1 = 0.0;
  double beta_at_min_u1 = 0.0;
};

struct ProfileSolution {
  double epsilon = 0.0;
  double shift = 0.0;
  // Profile ordered by increasing xi, truncated within boundary_tol of the end states.
  std::vector<double> sigma;
  std::vector<double> xi;
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<double> w1;
  std::vector<double> w2;
  std::vector<double> beta;
  std::vector<double> r;
  std::vector<double> kappa;

  double xi_in = 0.0;        // r = r0 crossing before Gamma
  double xi_out = 0.0;       // r = r0 crossing after Gamma
  double sigma_in = 0.0;     // -T1
  double sigma_out = 0.0;    // T2
  double xi_gamma = 0.0;
  double xi_beta_plus = 0.0;   // beta = +1 before Gamma
  double xi_beta_minus = 0.0;  // beta = -1 after Gamma
  double r0 = 0.0;
  double w2_in = 0.0;
  double w2_out = 0.0;
  double w1_in = 0.0;
  double w1_out = 0.0;

  ProfileMaxima maxima;
  GammaPoint gamma;
  ShootingUnknowns unknowns;
  double match_residual = 0.0;
  double surface_drift = 0.0;      // max |r kappa / eps - 1| over accepted steps of every integration
  int newton_iterations = 0;

  double T_layer() const { return sigma_out - sigma_in; }
  double xi_width() const { return xi_out - xi_in; }
  double inner_xi_width() const { return xi_beta_minus - xi_beta_plus; }

  /// sigma < 0 runs from Gamma back to U_L, sigma > 0 from Gamma to U_R.
  std::shared_ptr<const Trajectory> left;
  std::shared_ptr<const Trajectory> right;
};

/// Newton shooting from Gamma: backward to U_L and forward to U_R, residual u_end - u_side.
/// Throws HypothesisViolated, NoConvergence, SectionMiss, StepLimitExceeded.
ProfileSolution shoot_match(const RiemannAnalysis& analysis, const InnerConstants& constants,
                            double epsilon, const GammaPoint& guess, const ShootConfig& cfg = {});

/// Recomputes the maxima of a converged profile on the dense output.
ProfileMaxima max_argmax(const ProfileSolution& profile);

struct ScalingRow {
  double epsilon = 0.0;
  double eps2_max_u2 = 0.0;
  double eps_max_u1_plus = 0.0;
  double eps_max_u1_minus = 0.0;
  double T_layer = 0.0;
  double xi_width = 0.0;         // between the r = r0 crossings
  double inner_xi_width = 0.0;   // between beta = +1 and beta = -1
  double match_residual = 0.0;
  double surface_drift = 0.0;
  double w2_drop = 0.0;
  double delta_w1 = 0.0;
  ShootingUnknowns unknowns;
};

struct ScalingReport {
  std::vector<double> epsilons;
  std::vector<ScalingRow> rows;
  std::vector<ProfileSolution> profiles;   // kept when requested
  double kappa0_sq_ref = 0.0;
  double omega0_ref = 0.0;
  double e0 = 0.0;
  std::string failure;                     // empty when every epsilon was solved
};

/// Geometric list start, start*ratio, ... down to end (end appended when not hit exactly).
std::vector<double> geometric_eps(double start, double ratio, double end);

/// Continuation in epsilon from the singular guess. Failures stop the sweep and are
/// reported in `failure` with the rows solved so far.
ScalingReport measure_scaling(const RiemannAnalysis& analysis, const InnerConstants& constants,
                              const std::vector<double>& eps_list, const ShootConfig& cfg = {},
                              bool keep_profiles = false);

void write_profile_csv(const ProfileSolution& p, const std::string& path);
void write_scaling_csv(const ScalingReport& r, const std::string& path);

}  // namespace sshock
