#include "bohmium/integrate.hpp"

#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "bohmium/velocity.hpp"

namespace bohmium {

using Quad = boost::multiprecision::float128;

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::RK4: return "RK4";
    case Method::RKF45: return "RKF45";
    case Method::DP85: return "DP85";
  }
  return "?";
}

std::string_view to_string(Precision p) noexcept { return p == Precision::Standard ? "standard" : "extended"; }

Method parse_method(const std::string& s) {
  if (s == "RK4" || s == "rk4") return Method::RK4;
  if (s == "RKF45" || s == "rkf45") return Method::RKF45;
  if (s == "DP85" || s == "dp85" || s == "DP853" || s == "dp853") return Method::DP85;
  throw Error(ErrorKind::ConfigParse, "integrate", "unknown method '" + s + "'");
}

Precision parse_precision(const std::string& s) {
  if (s == "standard") return Precision::Standard;
  if (s == "extended") return Precision::Extended;
  throw Error(ErrorKind::ConfigParse, "integrate", "unknown precision '" + s + "'");
}

std::string_view to_string(FlagKind k) noexcept {
  switch (k) {
    case FlagKind::ToleranceClamped: return "ToleranceClamped";
    case FlagKind::StepFloorReached: return "StepFloorReached";
    case FlagKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case FlagKind::NodeProximity: return "NodeProximity";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::DomainError, "integrate", m); };
  if (!(atol > 0) || !(rtol > 0)) bad("tolerances must be positive");
  if (!(h_min > 0) || !(h_min <= h_init) || !(h_init <= h_max)) bad("need 0 < h_min <= h_init <= h_max");
  if (max_steps < 1) bad("max_steps must be at least 1");
}

bool Trajectory::has_flag(FlagKind k) const {
  for (const auto& f : flags)
    if (f.kind == k) return true;
  return false;
}

void Trajectory::throw_if_incomplete() const {
  if (complete) return;
  const auto kind = has_flag(FlagKind::MaxStepsExceeded) ? ErrorKind::MaxStepsExceeded : ErrorKind::StepFloorReached;
  throw Error(kind, "integrate", "integration stopped at t = " + std::to_string(t_reached));
}

namespace {

template <class Real>
DriverSettings<Real> make_settings(const IntegratorConfig& icfg, Trajectory& traj, double t0) {
  icfg.validate();
  const double eps = icfg.precision == Precision::Standard
                         ? std::numeric_limits<double>::epsilon()
                         : static_cast<double>(std::numeric_limits<Quad>::epsilon());
  const double floor = 4.0 * eps;
  traj.effective_atol = std::max(icfg.atol, floor);
  traj.effective_rtol = std::max(icfg.rtol, floor);
  if (traj.effective_atol != icfg.atol || traj.effective_rtol != icfg.rtol) {
    traj.flags.push_back({FlagKind::ToleranceClamped, t0,
                          "tolerances raised to " + std::to_string(floor) + " for this precision"});
  }
  DriverSettings<Real> s;
  s.method = icfg.method;
  s.atol = Real(traj.effective_atol);
  s.rtol = Real(traj.effective_rtol);
  s.h_init = Real(icfg.h_init);
  s.h_min = Real(icfg.h_min);
  s.h_max = Real(icfg.h_max);
  s.max_steps = icfg.max_steps;
  return s;
}

void push_sample(Trajectory& traj, const SystemConfig& cfg, double t, double x, double y) {
  TrajectorySample s{t, x, y, 0, 0};
  try {
    const Velocity v = bohmian_velocity({x, y, t}, cfg);
    s.vx = v.vx;
    s.vy = v.vy;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NodeProximity && e.kind() != ErrorKind::OverflowGuard) throw;
    s.vx = s.vy = std::numeric_limits<double>::quiet_NaN();
    traj.flags.push_back({FlagKind::NodeProximity, t, "sample on a node; velocity undefined"});
  }
  traj.samples.push_back(s);
}

void finish(Trajectory& traj, DriveStatus st, double t, const DriverStats& stats) {
  traj.t_reached = t;
  traj.stats = stats;
  if (stats.stage_failures > 0) {
    traj.flags.push_back({FlagKind::NodeProximity, t,
                          std::to_string(stats.stage_failures) + " step(s) retried after node proximity"});
  }
  if (st == DriveStatus::StepFloorReached) {
    traj.complete = false;
    traj.flags.push_back({FlagKind::StepFloorReached, t, "step size fell below h_min"});
  } else if (st == DriveStatus::MaxStepsExceeded) {
    traj.complete = false;
    traj.flags.push_back({FlagKind::MaxStepsExceeded, t, "step budget exhausted"});
  }
}

long last_index(double span, double dt) { return static_cast<long>(std::floor(span / dt + 1e-9)); }

void check_inputs(const PhasePoint& ic, double t_end, double dt) {
  if (!std::isfinite(ic.x) || !std::isfinite(ic.y) || !std::isfinite(ic.t) || !std::isfinite(t_end)) {
    throw Error(ErrorKind::DomainError, "integrate", "non-finite initial condition or end time");
  }
  if (!(dt > 0) || !std::isfinite(dt)) throw Error(ErrorKind::DomainError, "integrate", "sample_dt must be positive");
}

template <class Real>
Trajectory run_plain(const SystemConfig& cfg, const PhasePoint& ic, double t_end, const IntegratorConfig& icfg,
                     double dt) {
  using State = std::array<Real, 2>;
  Trajectory traj;
  const DriverSettings<Real> s = make_settings<Real>(icfg, traj, ic.t);
  const VelocityField<Real> field(cfg);
  auto rhs = [&field](Real t, const State& y, State& dy) {
    const auto v = field(y[0], y[1], t);
    dy[0] = v.vx;
    dy[1] = v.vy;
  };
  OdeDriver<Real, 2, decltype(rhs)> drv(rhs, s);

  const double dir = t_end >= ic.t ? 1.0 : -1.0;
  SampleCursor<Real> cur(ic.t, dir * dt, 1, last_index(std::abs(t_end - ic.t), dt));
  push_sample(traj, cfg, ic.t, ic.x, ic.y);
  Real t = Real(ic.t);
  State y{Real(ic.x), Real(ic.y)};
  const DriveStatus st = drv.advance(t, y, Real(t_end), cur, [&](Real ts, const State& ys) {
    push_sample(traj, cfg, static_cast<double>(ts), static_cast<double>(ys[0]), static_cast<double>(ys[1]));
  });
  finish(traj, st, static_cast<double>(t), drv.stats());
  return traj;
}

template <class Real>
DeviationResult run_deviation(const SystemConfig& cfg, const PhasePoint& ic, std::array<double, 2> dev0,
                              double t_end, const IntegratorConfig& icfg, double renorm_dt, double dt) {
  using State = std::array<Real, 4>;
  using std::sqrt;
  DeviationResult out;
  Trajectory& traj = out.trajectory;
  DeviationLog& log = out.log;
  log.renorm_dt = renorm_dt;

  const DriverSettings<Real> s = make_settings<Real>(icfg, traj, ic.t);
  const VelocityField<Real> field(cfg);
  const Real jac_h = std::is_same_v<Real, double> ? Real(kDefaultJacobianStep) : Real(1e-9);
  auto rhs = [&](Real t, const State& y, State& dy) {
    const auto v = field(y[0], y[1], t);
    Real j[4];
    central_jacobian<Real>(field, y[0], y[1], t, jac_h, j);
    dy[0] = v.vx;
    dy[1] = v.vy;
    dy[2] = j[0] * y[2] + j[1] * y[3];
    dy[3] = j[2] * y[2] + j[3] * y[3];
  };
  OdeDriver<Real, 4, decltype(rhs)> drv(rhs, s);

  const double n0 = std::hypot(dev0[0], dev0[1]);
  if (!(n0 > 0)) throw Error(ErrorKind::DomainError, "integrate", "deviation vector must be non-zero");
  const double dir = t_end >= ic.t ? 1.0 : -1.0;
  SampleCursor<Real> cur(ic.t, dir * dt, 1, last_index(std::abs(t_end - ic.t), dt));
  push_sample(traj, cfg, ic.t, ic.x, ic.y);
  auto on_sample = [&](Real ts, const State& ys) {
    push_sample(traj, cfg, static_cast<double>(ts), static_cast<double>(ys[0]), static_cast<double>(ys[1]));
  };

  Real t = Real(ic.t);
  State y{Real(ic.x), Real(ic.y), Real(dev0[0] / n0), Real(dev0[1] / n0)};
  const long intervals = last_index(std::abs(t_end - ic.t), renorm_dt);
  DriveStatus st = DriveStatus::Ok;
  for (long k = 1; k <= intervals && st == DriveStatus::Ok; ++k) {
    const Real stop = Real(ic.t + dir * renorm_dt * static_cast<double>(k));
    st = drv.advance(t, y, stop, cur, on_sample);
    if (st != DriveStatus::Ok) break;
    const Real g = sqrt(y[2] * y[2] + y[3] * y[3]);
    if (!(g > 0)) throw Error(ErrorKind::DomainError, "integrate", "deviation vector collapsed");
    log.times.push_back(static_cast<double>(t));
    log.growth.push_back(static_cast<double>(g));
    log.x.push_back(static_cast<double>(y[0]));
    log.y.push_back(static_cast<double>(y[1]));
    y[2] /= g;
    y[3] /= g;
    drv.invalidate();
  }
  if (st == DriveStatus::Ok) st = drv.advance(t, y, Real(t_end), cur, on_sample);
  finish(traj, st, static_cast<double>(t), drv.stats());
  return out;
}

}  // namespace

Trajectory integrate(const SystemConfig& cfg, const PhasePoint& ic, double t_end, const IntegratorConfig& icfg,
                     double sample_dt) {
  check_inputs(ic, t_end, sample_dt);
  if (icfg.precision == Precision::Extended) return run_plain<Quad>(cfg, ic, t_end, icfg, sample_dt);
  return run_plain<double>(cfg, ic, t_end, icfg, sample_dt);
}

DeviationResult integrate_with_deviation(const SystemConfig& cfg, const PhasePoint& ic, std::array<double, 2> dev0,
                                         double t_end, const IntegratorConfig& icfg, double renorm_dt,
                                         double sample_dt) {
  check_inputs(ic, t_end, sample_dt);
  if (!(renorm_dt > 0)) throw Error(ErrorKind::DomainError, "integrate", "renorm_dt must be positive");
  if (icfg.precision == Precision::Extended) {
    return run_deviation<Quad>(cfg, ic, dev0, t_end, icfg, renorm_dt, sample_dt);
  }
  return run_deviation<double>(cfg, ic, dev0, t_end, icfg, renorm_dt, sample_dt);
}

}  // namespace bohmium
