#pragma once

#include <string>
#include <vector>

#include "bohmium/model.hpp"
#include "bohmium/ode.hpp"

namespace bohmium {

enum class Precision { Standard, Extended };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Precision p) noexcept;
Method parse_method(const std::string& s);
Precision parse_precision(const std::string& s);

struct IntegratorConfig {
  Method method = Method::DP85;
  double atol = 1e-12;
  double rtol = 1e-12;
  double h_init = 1e-3;  // fixed step for RK4
  double h_min = 1e-12;
  double h_max = 0.5;
  long max_steps = 50'000'000;
  /// Extended evaluates the field and the integrator in 128-bit floating point.
  Precision precision = Precision::Standard;

  /// Throws DomainError on inconsistent step bounds or tolerances.
  void validate() const;
};

enum class FlagKind { ToleranceClamped, StepFloorReached, MaxStepsExceeded, NodeProximity };
std::string_view to_string(FlagKind k) noexcept;

struct TrajectoryFlag {
  FlagKind kind;
  double t;
  std::string detail;
};

struct TrajectorySample {
  double t, x, y, vx, vy;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryFlag> flags;
  /// False when integration stopped before t_end (see flags).
  bool complete = true;
  double t_reached = 0;
  double effective_atol = 0;
  double effective_rtol = 0;
  DriverStats stats;

  bool has_flag(FlagKind k) const;
  /// Throws the error corresponding to an incomplete run.
  void throw_if_incomplete() const;
};

/// Integrates the Bohmian equations from ic to t_end (either direction),
/// sampling at ic.t + i * sample_dt. Velocities at samples are evaluated
/// with bohmian_velocity.
Trajectory integrate(const SystemConfig& cfg, const PhasePoint& ic, double t_end, const IntegratorConfig& icfg,
                     double sample_dt = 0.01);

/// Growth of a tangent vector over consecutive renormalization intervals.
struct DeviationLog {
  double renorm_dt = 0.05;
  std::vector<double> times;   // interval ends
  std::vector<double> growth;  // |xi(end)| / |xi(start)|, xi(start) unit length
  std::vector<double> x;       // particle position at interval ends
  std::vector<double> y;
};

struct DeviationResult {
  Trajectory trajectory;
  DeviationLog log;
};

/// Co-integrates xi' = J(x(t), t) xi with the finite-difference Jacobian,
/// renormalizing xi to unit length every renorm_dt.
DeviationResult integrate_with_deviation(const SystemConfig& cfg, const PhasePoint& ic, std::array<double, 2> dev0,
                                         double t_end, const IntegratorConfig& icfg, double renorm_dt = 0.05,
                                         double sample_dt = 0.01);

}  // namespace bohmium
