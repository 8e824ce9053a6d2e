#pragma once

#include <optional>
#include <vector>

#include "bohmium/integrate.hpp"

namespace bohmium {

/// Stretching numbers above this value count as scattering events.
inline constexpr double kDefaultAlphaThreshold = 0.5;

struct ChaosEvent {
  double t;
  double alpha;
  double x, y;  // particle position at t
};

struct ChaosRecord {
  double t0 = 0.05;
  double t_start = 0;
  std::vector<double> times;
  std::vector<double> alpha;  // ln of the growth over each interval
  std::vector<double> chi;    // finite-time LCN, chi[n] = sum(alpha[0..n]) / ((n + 1) t0)
  std::vector<double> x, y;
  std::vector<ChaosEvent> events;
  std::optional<double> derailment_time;
};

/// Stretching numbers and finite-time LCN from a deviation log.
/// Throws DomainError on a non-positive growth factor.
ChaosRecord stretching_series(const DeviationLog& log, double t_start = 0.0);

/// Samples with alpha >= threshold, merged when closer than 2 t0: only the
/// largest spike of such a cluster is kept.
std::vector<ChaosEvent> detect_events(const ChaosRecord& rec, double alpha_threshold = kDefaultAlphaThreshold);

struct DerailmentOptions {
  double inflate = 1.5;
  /// Exit and non-return window; <= 0 selects 2 pi / min(omega).
  double window = 0;
  /// Events before t_start + warmup are ignored; < 0 selects the window.
  double warmup = -1;
};

/// Time of the first event after which the particle leaves the box spanned by
/// its motion so far (inflated about its centre) within one window, and stays
/// out for one further window. When more events precede that exit, the last
/// of them is reported. Uses rec.events, or detect_events with the default
/// threshold when the record has none.
std::optional<double> derailment_time(const Trajectory& traj, const ChaosRecord& rec, double char_period,
                                      DerailmentOptions opt = {});
std::optional<double> derailment_time(const Trajectory& traj, const ChaosRecord& rec, const SystemConfig& cfg,
                                      DerailmentOptions opt = {});

enum class ChaosClass { Ordered, Chaotic, Undetermined };
std::string_view to_string(ChaosClass c) noexcept;

struct LcnOptions {
  double ordered_slope = -0.8;
  double plateau_slope = 0.2;
  /// |chi| below this never counts as a plateau.
  double chi_floor = 1e-4;
  int fit_points = 64;
};

struct LcnClassification {
  ChaosClass kind = ChaosClass::Undetermined;
  double slope = 0;
  double chi_final = 0;
};

/// Least-squares slope of log|chi| against log t over the final decade,
/// on points resampled uniformly in log t. Throws InsufficientSpan when the
/// series covers less than two decades.
LcnClassification lcn_classification(const std::vector<double>& chi, const std::vector<double>& times,
                                     LcnOptions opt = {});

/// Two-trajectory estimate: a companion started `separation` away along dev0
/// is pulled back to that distance every renorm_dt. Standard precision only.
DeviationLog shadow_deviation_log(const SystemConfig& cfg, const PhasePoint& ic, std::array<double, 2> dev0,
                                  double t_end, const IntegratorConfig& icfg, double renorm_dt = 0.05,
                                  double separation = 1e-8);

}  // namespace bohmium
