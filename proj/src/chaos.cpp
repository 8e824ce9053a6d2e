#include "bohmium/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bohmium/velocity.hpp"

namespace bohmium {

std::string_view to_string(ChaosClass c) noexcept {
  switch (c) {
    case ChaosClass::Ordered: return "Ordered";
    case ChaosClass::Chaotic: return "Chaotic";
    case ChaosClass::Undetermined: return "Undetermined";
  }
  return "?";
}

ChaosRecord stretching_series(const DeviationLog& log, double t_start) {
  if (!(log.renorm_dt > 0)) throw Error(ErrorKind::DomainError, "chaos", "renormalization interval must be positive");
  ChaosRecord r;
  r.t0 = log.renorm_dt;
  r.t_start = t_start;
  r.times = log.times;
  r.x = log.x;
  r.y = log.y;
  r.alpha.reserve(log.growth.size());
  r.chi.reserve(log.growth.size());
  double sum = 0;
  for (std::size_t n = 0; n < log.growth.size(); ++n) {
    const double g = log.growth[n];
    if (!(g > 0) || !std::isfinite(g)) {
      throw Error(ErrorKind::DomainError, "chaos", "non-positive growth factor at t = " + std::to_string(log.times[n]));
    }
    const double a = std::log(g);
    sum += a;
    r.alpha.push_back(a);
    r.chi.push_back(sum / (static_cast<double>(n + 1) * r.t0));
  }
  return r;
}

std::vector<ChaosEvent> detect_events(const ChaosRecord& rec, double alpha_threshold) {
  std::vector<ChaosEvent> out;
  const double reach = 2 * rec.t0 * (1 - 1e-9);
  const std::size_t n = rec.alpha.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rec.alpha[i];
    if (!(a >= alpha_threshold)) continue;
    // a larger spike closer than 2 t0 absorbs this one; ties go to the earlier
    bool peak = true;
    for (std::size_t j = i; j-- > 0 && rec.times[i] - rec.times[j] < reach;) peak = peak && !(rec.alpha[j] >= a);
    for (std::size_t j = i + 1; j < n && rec.times[j] - rec.times[i] < reach; ++j) peak = peak && !(rec.alpha[j] > a);
    if (!peak) continue;
    out.push_back({rec.times[i], a, i < rec.x.size() ? rec.x[i] : 0.0, i < rec.y.size() ? rec.y[i] : 0.0});
  }
  return out;
}

namespace {

struct Box {
  double x0, x1, y0, y1;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

Box motion_box(const std::vector<TrajectorySample>& s, double t_until, double inflate) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& p : s) {
    if (p.t > t_until) break;
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double hx = 0.5 * (x1 - x0) * inflate, hy = 0.5 * (y1 - y0) * inflate;
  return {cx - hx, cx + hx, cy - hy, cy + hy};
}

// Exit time after t_e that satisfies the window rules, if any.
std::optional<double> confirmed_exit(const std::vector<TrajectorySample>& s, double t_e, double window,
                                     double inflate) {
  const Box box = motion_box(s, t_e, inflate);
  const double slack = 1e-9 * (1 + std::abs(t_e));
  std::size_t i = 0;
  while (i < s.size() && s[i].t <= t_e) ++i;
  for (; i < s.size() && s[i].t - t_e <= window + slack; ++i) {
    if (box.contains(s[i].x, s[i].y)) continue;
    const double t_x = s[i].t;
    if (s.back().t < t_x + window - slack) return std::nullopt;
    for (std::size_t j = i; j < s.size() && s[j].t <= t_x + window + slack; ++j) {
      if (box.contains(s[j].x, s[j].y)) return std::nullopt;
    }
    return t_x;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> derailment_time(const Trajectory& traj, const ChaosRecord& rec, double char_period,
                                      DerailmentOptions opt) {
  if (traj.samples.empty()) return std::nullopt;
  const double window = opt.window > 0 ? opt.window : char_period;
  const double warmup = opt.warmup >= 0 ? opt.warmup : window;
  const std::vector<ChaosEvent> events = rec.events.empty() ? detect_events(rec) : rec.events;
  const double t_begin = traj.samples.front().t;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].t - t_begin < warmup) continue;
    auto exit = confirmed_exit(traj.samples, events[i].t, window, opt.inflate);
    if (!exit) continue;
    std::size_t best = i;
    for (std::size_t j = i + 1; j < events.size() && events[j].t < *exit; ++j) {
      if (auto e2 = confirmed_exit(traj.samples, events[j].t, window, opt.inflate)) {
        best = j;
        exit = e2;
      }
    }
    return events[best].t;
  }
  return std::nullopt;
}

std::optional<double> derailment_time(const Trajectory& traj, const ChaosRecord& rec, const SystemConfig& cfg,
                                      DerailmentOptions opt) {
  const double w = std::min(cfg.osc_x().omega(), cfg.osc_y().omega());
  return derailment_time(traj, rec, 2 * std::numbers::pi / w, opt);
}

LcnClassification lcn_classification(const std::vector<double>& chi, const std::vector<double>& times,
                                     LcnOptions opt) {
  if (chi.size() != times.size() || chi.size() < 2) {
    throw Error(ErrorKind::InsufficientSpan, "chaos", "need at least two matching chi samples");
  }
  const double t_first = times.front(), t_last = times.back();
  if (!(t_first > 0) || t_last < 100 * t_first) {
    throw Error(ErrorKind::InsufficientSpan, "chaos", "chi series spans less than two decades in t");
  }
  const double lo = std::log(t_last / 10), hi = std::log(t_last);
  const int n = std::max(opt.fit_points, 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, log_mag = 0;
  for (int k = 0; k < n; ++k) {
    const double target = std::exp(lo + (hi - lo) * k / (n - 1));
    auto it = std::lower_bound(times.begin(), times.end(), target);
    if (it == times.end()) --it;
    if (it != times.begin() && target - *std::prev(it) < *it - target) --it;
    const std::size_t idx = static_cast<std::size_t>(it - times.begin());
    const double lx = std::log(times[idx]);
    const double ly = std::log(std::max(std::abs(chi[idx]), std::numeric_limits<double>::min()));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    log_mag += ly;
  }
  LcnClassification c;
  c.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  c.chi_final = chi.back();
  const double typical = std::exp(log_mag / n);
  if (c.slope <= opt.ordered_slope) {
    c.kind = ChaosClass::Ordered;
  } else if (std::abs(c.slope) < opt.plateau_slope && c.chi_final > 0 && typical > opt.chi_floor) {
    c.kind = ChaosClass::Chaotic;
  }
  return c;
}

DeviationLog shadow_deviation_log(const SystemConfig& cfg, const PhasePoint& ic, std::array<double, 2> dev0,
                                  double t_end, const IntegratorConfig& icfg, double renorm_dt, double separation) {
  icfg.validate();
  const double n0 = std::hypot(dev0[0], dev0[1]);
  if (!(n0 > 0) || !(separation > 0) || !(renorm_dt > 0)) {
    throw Error(ErrorKind::DomainError, "chaos", "shadowing needs a non-zero direction, separation and interval");
  }
  using State = std::array<double, 4>;
  const VelocityField<double> field(cfg);
  auto rhs = [&field](double t, const State& y, State& dy) {
    const auto a = field(y[0], y[1], t);
    const auto b = field(y[2], y[3], t);
    dy = {a.vx, a.vy, b.vx, b.vy};
  };
  DriverSettings<double> s;
  s.method = icfg.method;
  s.atol = std::max(icfg.atol, 4 * std::numeric_limits<double>::epsilon());
  s.rtol = std::max(icfg.rtol, 4 * std::numeric_limits<double>::epsilon());
  s.h_init = icfg.h_init;
  s.h_min = icfg.h_min;
  s.h_max = icfg.h_max;
  s.max_steps = icfg.max_steps;
  OdeDriver<double, 4, decltype(rhs)> drv(rhs, s);

  DeviationLog log;
  log.renorm_dt = renorm_dt;
  const double dir = t_end >= ic.t ? 1.0 : -1.0;
  const long intervals = static_cast<long>(std::floor(std::abs(t_end - ic.t) / renorm_dt + 1e-9));
  double t = ic.t;
  State y{ic.x, ic.y, ic.x + separation * dev0[0] / n0, ic.y + separation * dev0[1] / n0};
  SampleCursor<double> none;
  for (long k = 1; k <= intervals; ++k) {
    const DriveStatus st = drv.advance(t, y, ic.t + dir * renorm_dt * static_cast<double>(k), none,
                                       [](double, const State&) {});
    if (st == DriveStatus::StepFloorReached) {
      throw Error(ErrorKind::StepFloorReached, "chaos", "shadowing stopped at t = " + std::to_string(t));
    }
    if (st == DriveStatus::MaxStepsExceeded) {
      throw Error(ErrorKind::MaxStepsExceeded, "chaos", "shadowing stopped at t = " + std::to_string(t));
    }
    const double dx = y[2] - y[0], dy = y[3] - y[1];
    const double d = std::hypot(dx, dy);
    if (!(d > 0)) throw Error(ErrorKind::DomainError, "chaos", "shadow trajectory merged with the reference");
    log.times.push_back(t);
    log.growth.push_back(d / separation);
    log.x.push_back(y[0]);
    log.y.push_back(y[1]);
    y[2] = y[0] + separation * dx / d;
    y[3] = y[1] + separation * dy / d;
    drv.invalidate();
  }
  return log;
}

}  // namespace bohmium
