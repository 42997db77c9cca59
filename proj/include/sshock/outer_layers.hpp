#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <utility>

#include "sshock/flux.hpp"
#include "sshock/inner_layer.hpp"
#include "sshock/ode.hpp"

namespace sshock {

/// Point of the desingularized phase space. With u2 shifted by M:
/// beta = u1/sqrt(u2+M), r = 1/sqrt(u2+M), kappa = eps/r.
struct CompactPoint {
  double beta = 0.0;
  double r = 0.0;
  double kappa = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double xi = 0.0;

  Vec to_vec() const { return {beta, r, kappa, w1, w2, xi}; }
  static CompactPoint from(std::span<const double> y) { return {y[0], y[1], y[2], y[3], y[4], y[5]}; }
};

/// Component indices in the 6-vector ordering.
enum : std::size_t { kBeta = 0, kR = 1, kKappa = 2, kW1 = 3, kW2 = 4, kXi = 5 };

/// Throws NonpositiveU2 unless u2 + shift > 0.
std::pair<double, double> compactify(State2 u, double shift = 0.0);
State2 decompactify(double beta, double r, double shift = 0.0);

/// max(0, 1 - min(u2L, u2R)).
double default_shift(const RiemannAnalysis& analysis);

/// Replacing u2 by v2 = u2 + M leaves the system unchanged when w1 -> w1 - M and
/// w2 -> w2 - xi M. These map physical slow variables into the shifted frame and back.
Vec2 shift_w(Vec2 w, double xi, double shift);
Vec2 unshift_w(Vec2 w, double xi, double shift);

/// First two components of the compact system at frozen (w1, w2, xi).
std::array<double, 2> fast_field_2d(double beta, double r, double w1, double w2, double xi);

/// Full compact system in (beta, r, kappa, w1, w2, xi).
void compact_field(std::span<const double> y, std::span<double> dydt);
Field compact_field_fn();

enum class CornerPoint { P_L, P_R };

struct Linearization {
  Eigen::Matrix3d jacobian;                 // (beta, r, kappa) block, finite differences
  std::array<double, 3> eigenvalues{};      // numeric, ordered as the closed form
  std::array<double, 3> closed_form{};      // -P'(rho)/6, -rho^3/6, rho^3/6
  Eigen::Matrix3d eigenvectors;             // columns matched to eigenvalues, unit length
  Eigen::Matrix3d closed_form_vectors;      // (1,0,0), (rho xi/2, l1 - l2, 0), (0,0,1), normalized
};

Linearization jacobian_at_P(CornerPoint which, double xi);

struct HeteroclinicConfig {
  double r0 = 0.0;              // 0: half the smaller end-state r
  double delta_launch = 1e-7;
  double target_tol = 1e-9;     // stop once this close to the end state in (beta, r)
  double sigma_max = 1e5;
  double box = 1e3;             // |beta| and r bound for MissedTarget
  IntegratorConfig integrator{1e-12, 1e-14};
};

struct HeteroclinicResult {
  Trajectory trajectory;        // 6-D with kappa = 0, sigma runs away from the corner
  CompactPoint launch_point;
  CompactPoint section_point;   // r = r0 crossing
  double section_sigma = 0.0;
  CompactPoint end_point;
  CompactPoint target;
  double endpoint_error = 0.0;
  double frozen_drift = 0.0;    // max change of (w1, w2, xi) along the orbit
  double r0 = 0.0;
  double shift = 0.0;
  std::array<double, 2> launch_direction{};
};

/// gamma1: stable (beta, r) manifold of P_L at frozen (wL, s), integrated backward to u_L.
/// Throws HypothesisViolated without H1 and MissedTarget when the orbit does not land
/// or crosses r = r0 other than once.
HeteroclinicResult compute_gamma1(const RiemannAnalysis& analysis, const HeteroclinicConfig& cfg = {});
/// gamma2: unstable (beta, r) manifold of P_R at frozen (wR, s), integrated forward to u_R.
HeteroclinicResult compute_gamma2(const RiemannAnalysis& analysis, const HeteroclinicConfig& cfg = {});

double default_r0(const RiemannAnalysis& analysis, double shift);

struct TransversalityReport {
  Eigen::Matrix<double, 6, 3> frame_L;     // flow, d/dkappa_bar, d/dalpha at q0
  Eigen::Matrix<double, 6, 3> frame_R;
  Eigen::Matrix<double, 5, 6> combined;    // r row dropped
  Eigen::VectorXd singular_values;
  int rank_L = 0;
  int rank_R = 0;
  int rank = 0;
  int intersection_dim = 0;
  CompactPoint q0;
};

/// Tangent frames of the left and right r = 0 manifolds at q0 = gamma0(0), built from
/// finite differences of nearby half-orbits integrated from the corners to beta = 0.
TransversalityReport transversality_frames(const RiemannAnalysis& analysis,
                                           const InnerConstants& constants, const IotaTable& table);

void write_heteroclinic_csv(const HeteroclinicResult& h, const std::string& path);

}  // namespace sshock
