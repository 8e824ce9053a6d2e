#include "bohmium/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bohmium {

namespace {

double coord_of(const TrajectorySample& s, Coordinate c) { return c == Coordinate::X ? s.x : s.y; }

double uniform_step(const std::vector<TrajectorySample>& s) {
  if (s.size() < 2) throw Error(ErrorKind::NonUniformSampling, "spectral", "need at least two samples");
  const double dt = (s.back().t - s.front().t) / static_cast<double>(s.size() - 1);
  if (!(dt > 0)) throw Error(ErrorKind::NonUniformSampling, "spectral", "samples must advance in time");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs(s[i].t - s[i - 1].t - dt) > 1e-9 * (dt + std::abs(s[i].t))) {
      throw Error(ErrorKind::NonUniformSampling, "spectral", "sample spacing varies at t = " + std::to_string(s[i].t));
    }
  }
  return dt;
}

// Position at s[i].t + tau (0 <= tau <= dt), cubic Hermite in each coordinate.
std::array<double, 2> hermite(const std::vector<TrajectorySample>& s, std::size_t i, double tau, double dt) {
  const auto& a = s[i];
  const auto& b = s[std::min(i + 1, s.size() - 1)];
  const double u = tau / dt;
  if (!std::isfinite(a.vx) || !std::isfinite(b.vx) || !std::isfinite(a.vy) || !std::isfinite(b.vy)) {
    return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
  }
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return {h00 * a.x + h10 * dt * a.vx + h01 * b.x + h11 * dt * b.vx,
          h00 * a.y + h10 * dt * a.vy + h01 * b.y + h11 * dt * b.vy};
}

// max over samples i with t_i <= t_0 + T of |r(t_i + T) - r(t_i)|
double return_distance(const std::vector<TrajectorySample>& s, double dt, double T) {
  const double lag = T / dt;
  const auto base = static_cast<std::size_t>(std::floor(lag));
  const double tau = (lag - static_cast<double>(base)) * dt;
  double worst = 0;
  for (std::size_t i = 0; i <= base && i + base + 1 < s.size(); ++i) {
    const auto p = hermite(s, i + base, tau, dt);
    worst = std::max(worst, std::hypot(p[0] - s[i].x, p[1] - s[i].y));
  }
  return worst;
}

}  // namespace

SpectrumReport harmonic_spectrum(const Trajectory& traj, Coordinate coord, double base_omega, int m_max) {
  if (!(base_omega > 0) || m_max < 1) throw Error(ErrorKind::DomainError, "spectral", "need base_omega > 0 and m_max >= 1");
  const auto& s = traj.samples;
  const double dt = uniform_step(s);
  const double span = s.back().t - s.front().t;
  const double periods = span * base_omega / (2 * std::numbers::pi);
  if (periods < 1 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-6 * std::max(1.0, periods)) {
    throw Error(ErrorKind::IncompleteWindow, "spectral", "window is not a whole number of base periods");
  }
  // the last sample repeats the first period's phase
  const std::size_t n = s.size() - 1;
  if (static_cast<double>(n) <= 2.0 * m_max * periods) {
    throw Error(ErrorKind::NonUniformSampling, "spectral", "too few samples for the requested harmonics");
  }
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += coord_of(s[i], coord);
  mean /= static_cast<double>(n);
  SpectrumReport r;
  r.base_omega = base_omega;
  double best = -1;
  for (int m = 1; m <= m_max; ++m) {
    double sc = 0, cc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = coord_of(s[i], coord) - mean;
      const double ph = m * base_omega * (s.front().t + static_cast<double>(i) * dt);
      sc += v * std::sin(ph);
      cc += v * std::cos(ph);
    }
    const double a = 2.0 / static_cast<double>(n) * std::hypot(sc, cc);
    r.harmonics.push_back({m, a});
    if (a > best) best = a, r.leading_m = m;
  }
  r.delta_x = range_of_motion(traj, coord);
  return r;
}

double range_of_motion(const Trajectory& traj, Coordinate coord) {
  if (traj.samples.empty()) throw Error(ErrorKind::DomainError, "spectral", "empty trajectory");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : traj.samples) {
    lo = std::min(lo, coord_of(p, coord));
    hi = std::max(hi, coord_of(p, coord));
  }
  return hi - lo;
}

double period_estimate(const Trajectory& traj, double tol) {
  const auto& s = traj.samples;
  const double dt = uniform_step(s);
  const std::size_t max_lag = (s.size() - 1) / 3;
  if (max_lag < 2) throw Error(ErrorKind::NoPeriodFound, "spectral", "window too short");
  std::vector<double> d(max_lag + 2, 0.0);
  for (std::size_t lag = 1; lag <= max_lag + 1; ++lag) d[lag] = return_distance(s, dt, lag * dt);
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    if (d[lag] > d[lag - 1] && lag > 1) continue;
    if (d[lag] > d[lag + 1]) continue;
    // golden-section search on [lag - 1, lag + 1] * dt
    double a = (static_cast<double>(lag) - 1) * dt, b = (static_cast<double>(lag) + 1) * dt;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = return_distance(s, dt, c), fe = return_distance(s, dt, e);
    for (int it = 0; it < 80 && b - a > 1e-14 * (1 + b); ++it) {
      if (fc < fe) {
        b = e, e = c, fe = fc;
        c = b - g * (b - a);
        fc = return_distance(s, dt, c);
      } else {
        a = c, c = e, fc = fe;
        e = a + g * (b - a);
        fe = return_distance(s, dt, e);
      }
    }
    const double T = fc < fe ? c : e;
    if (std::min(fc, fe) < tol && T > 0.5 * dt) return T;
  }
  throw Error(ErrorKind::NoPeriodFound, "spectral", "no return within tolerance in the window");
}

}  // namespace bohmium
