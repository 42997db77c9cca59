#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sshock {

using Vec = std::vector<double>;

/// Right-hand side dy/dt = F(t, y), written into `dydt`.
using Field = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 1'000'000;
  /// Raise BlowUp once the max-norm of the state exceeds this value.
  double blowup_norm = 1e12;
  /// Events are refined until |g| falls below this value (or the bracket collapses).
  double event_tol = 1e-12;
};

enum class EventDirection { rising, falling, any };

struct EventSpec {
  std::function<double(double t, std::span<const double> y)> function;
  EventDirection direction = EventDirection::any;
  bool terminal = false;
};

struct EventRecord {
  double t = 0.0;
  Vec y;
  int id = 0;
};

/// Accepted steps of an integration together with the 7th-order dense output
/// of each step. Times are strictly monotone in the direction of integration.
class Trajectory {
 public:
  Trajectory() = default;

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& states() const { return states_; }
  const std::vector<EventRecord>& events() const { return events_; }

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const Vec& front() const { return states_.front(); }
  const Vec& back() const { return states_.back(); }

  /// Dense-output state at any t in the covered span.
  Vec at(double t) const;
  double at(double t, std::size_t component) const;

  /// Events with the given id, in order of occurrence.
  std::vector<EventRecord> events_with_id(int id) const;

  /// Samples every accepted step plus `per_step - 1` interior dense points.
  void sample(int per_step, std::vector<double>& t_out, std::vector<Vec>& y_out) const;

 private:
  friend class Dop853;

  std::size_t locate(double t) const;
  void eval_segment(std::size_t seg, double t, double* out) const;

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<Vec> states_;
  std::vector<EventRecord> events_;
  // Per segment: step size and 8*dim interpolation coefficients.
  std::vector<double> seg_h_;
  std::vector<double> seg_t0_;
  std::vector<double> dense_;
};

/// Adaptive Dormand-Prince 8(5,3) integration from t0 to t1 (t1 < t0 runs
/// backward) with event location on the dense output. A terminal event ends the
/// trajectory at the located event time.
/// Throws StepLimitExceeded or BlowUp.
Trajectory integrate(const Field& field, const Vec& y0, double t0, double t1,
                     const IntegratorConfig& cfg = {}, std::span<const EventSpec> events = {});

}  // namespace sshock
