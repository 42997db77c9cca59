#pragma once

#include <string>
#include <vector>

#include "sshock/flux.hpp"

namespace sshock {

struct GridConfig {
  double x_min = -2.0;
  double x_max = 2.0;
  int cells = 2000;
  double cfl = 0.05;
  long steps = 50'000;
  long snapshot_every = 500;
  /// false: dt = cfl dx / lambda_max(current); true: dt = cfl dx (mesh ratio held fixed).
  bool fixed_dt = false;
  /// Periodic wrap instead of outflow copies; used for conservation checks.
  bool periodic = false;
  /// Half-width of the spike-mass window as a fraction of the domain length.
  double window_fraction = 0.1;
};

struct FieldSnapshot {
  long step = 0;
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u1;
  std::vector<double> u2;
  double max_u1 = 0.0;
  double max_u2 = 0.0;
  double spike_mass_u2 = 0.0;   // int (u2 - background step) over |x - s t| <= W
  double total_u1 = 0.0;        // sum u1 dx
  double total_u2 = 0.0;
  double edge_deviation = 0.0;  // max |u - initial value| over the two boundary cells
};

/// Two-point Lax-Friedrichs on cell values, Riemann data jumping at x = 0.
/// The initial state is returned as the step-0 snapshot.
/// Throws std::invalid_argument for a bad grid, UnstableBlowup on non-finite cells.
std::vector<FieldSnapshot> run_lf(const RiemannData& rd, const GridConfig& cfg = {});

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (t, spike_mass) over the last half of the snapshots.
/// Throws InsufficientData when fewer than 5 points remain.
GrowthFit fit_spike_growth(const std::vector<FieldSnapshot>& snapshots);

void write_snapshot_csv(const FieldSnapshot& snap, const std::string& path);
void write_lf_summary_csv(const std::vector<FieldSnapshot>& snapshots, const std::string& path);

}  // namespace sshock
