#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <type_traits>

#include "bohmium/detail/dp853_coefficients.hpp"
#include "bohmium/error.hpp"

// Explicit Runge-Kutta drivers (RK4, RKF4(5), DP8(5,3)) over fixed-size states,
// templated on the working floating-point type.

namespace bohmium {

enum class Method { RK4, RKF45, DP85 };

enum class DriveStatus { Ok, StepFloorReached, MaxStepsExceeded };

template <class Real>
Real parse_real(const char* s) {
  if constexpr (std::is_same_v<Real, double>) {
    return std::strtod(s, nullptr);
  } else {
    return Real(s);
  }
}

template <class Real>
struct Dp853Tableau {
  Real c[17]{};
  Real a[17][17]{};
  Real b[13]{};
  Real bhh[13]{};
  Real e5[13]{};
  Real d[8][17]{};

  static const Dp853Tableau& get() {
    static const Dp853Tableau t = [] {
      namespace k = detail::dp853;
      Dp853Tableau r;
      for (const auto& e : k::kNodes) r.c[e.i] = parse_real<Real>(e.v);
      r.c[12] = Real(1);
      r.c[13] = Real(1);
      for (const auto& e : k::kA) r.a[e.i][e.j] = parse_real<Real>(e.v);
      for (const auto& e : k::kB) r.b[e.i] = parse_real<Real>(e.v);
      for (const auto& e : k::kBhh) r.bhh[e.i] = parse_real<Real>(e.v);
      for (const auto& e : k::kE5) r.e5[e.i] = parse_real<Real>(e.v);
      for (const auto& e : k::kDense) r.d[e.i][e.j] = parse_real<Real>(e.v);
      return r;
    }();
    return t;
  }
};

/// Fehlberg 4(5); the solution is advanced with the 4th-order weights.
template <class Real>
struct Rkf45Tableau {
  Real c[6];
  Real a[6][5];
  Real b4[6];
  Real b5[6];

  static const Rkf45Tableau& get() {
    static const Rkf45Tableau t = [] {
      auto q = [](int n, int d) { return Real(n) / Real(d); };
      Rkf45Tableau r{};
      r.c[0] = 0;
      r.c[1] = q(1, 4);
      r.c[2] = q(3, 8);
      r.c[3] = q(12, 13);
      r.c[4] = 1;
      r.c[5] = q(1, 2);
      r.a[1][0] = q(1, 4);
      r.a[2][0] = q(3, 32);
      r.a[2][1] = q(9, 32);
      r.a[3][0] = q(1932, 2197);
      r.a[3][1] = q(-7200, 2197);
      r.a[3][2] = q(7296, 2197);
      r.a[4][0] = q(439, 216);
      r.a[4][1] = -8;
      r.a[4][2] = q(3680, 513);
      r.a[4][3] = q(-845, 4104);
      r.a[5][0] = q(-8, 27);
      r.a[5][1] = 2;
      r.a[5][2] = q(-3544, 2565);
      r.a[5][3] = q(1859, 4104);
      r.a[5][4] = q(-11, 40);
      r.b4[0] = q(25, 216);
      r.b4[2] = q(1408, 2565);
      r.b4[3] = q(2197, 4104);
      r.b4[4] = q(-1, 5);
      r.b5[0] = q(16, 135);
      r.b5[2] = q(6656, 12825);
      r.b5[3] = q(28561, 56430);
      r.b5[4] = q(-9, 50);
      r.b5[5] = q(2, 55);
      return r;
    }();
    return t;
  }
};

template <class Real>
struct DriverSettings {
  Method method = Method::DP85;
  Real atol = Real(1e-12);
  Real rtol = Real(1e-12);
  Real h_init = Real(1e-3);
  Real h_min = Real(1e-14);
  Real h_max = Real(1);
  long max_steps = 50'000'000;
};

struct DriverStats {
  long steps = 0;
  long rejected = 0;
  long stage_failures = 0;
  long evaluations = 0;
};

/// Sample times base + i * dt visited in the integration direction. Times are
/// formed in double so that every working precision sees the same grid.
template <class Real>
class SampleCursor {
 public:
  SampleCursor() = default;
  SampleCursor(double base, double dt, long first, long last) : base_(base), dt_(dt), i_(first), last_(last) {}

  bool done() const { return i_ > last_; }
  Real peek() const { return Real(base_ + static_cast<double>(i_) * dt_); }
  long index() const { return i_; }
  void pop() { ++i_; }

 private:
  double base_{0};
  double dt_{1};
  long i_{1};
  long last_{0};
};

/// Adaptive (or fixed-step) integration of y' = rhs(t, y).
///
/// `rhs(t, y, dy)` may throw Error with kind NodeProximity or OverflowGuard;
/// the driver treats that as a failed step and shrinks h.
template <class Real, std::size_t N, class Rhs>
class OdeDriver {
 public:
  using State = std::array<Real, N>;

  OdeDriver(Rhs rhs, DriverSettings<Real> s) : rhs_(std::move(rhs)), s_(s) {
    using std::abs;
    h_ = std::clamp(abs(s_.h_init), s_.h_min, s_.h_max);
  }

  const DriverStats& stats() const { return stats_; }
  Real step_size() const { return h_; }

  /// The state was modified externally; drop the cached derivative.
  void invalidate() { have_k1_ = false; }

  /// Advances (t, y) to exactly t_stop. For every cursor time in (t, t_stop]
  /// calls on_sample(ts, y(ts)); times within a step come from dense output
  /// (DP85) or the steps are shortened to land on them (RK4, RKF45).
  template <class OnSample>
  DriveStatus advance(Real& t, State& y, Real t_stop, SampleCursor<Real>& cur, OnSample&& on_sample) {
    using std::abs;
    const Real dir = t_stop >= t ? Real(1) : Real(-1);
    // times originate from doubles
    const Real eps = Real(std::numeric_limits<double>::epsilon());
    auto time_tol = [&](Real a) { return Real(64) * eps * (Real(1) + abs(a)); };
    // cursor times at or before t are stale
    while (!cur.done() && dir * (cur.peek() - t) <= time_tol(t)) cur.pop();

    while (dir * (t_stop - t) > time_tol(t_stop)) {
      if (stats_.steps >= s_.max_steps) return DriveStatus::MaxStepsExceeded;
      Real target = t_stop;
      const bool dense = s_.method == Method::DP85;
      if (!dense && !cur.done() && dir * (cur.peek() - target) < 0) target = cur.peek();

      if (s_.method == Method::RK4) {
        const Real span = abs(target - t);
        Real n = ceil_div(span, s_.h_init);
        const Real h = dir * span / n;
        bool ok = true;
        State yn;
        try {
          rk4(t, y, h, yn);
        } catch (const Error& e) {
          if (!recoverable(e)) throw;
          ok = false;
        }
        if (!ok || !finite(yn)) return DriveStatus::StepFloorReached;
        ++stats_.steps;
        const bool last = abs(target - (t + h)) <= time_tol(target);
        t = last ? target : t + h;
        y = yn;
        emit_landing(t, y, cur, on_sample, time_tol);
        continue;
      }

      Real h = dir * std::min(h_, s_.h_max);
      bool clipped = false;
      if (abs(h) >= abs(target - t)) {
        h = target - t;
        clipped = true;
      }
      State yn;
      Real err;
      bool ok = true;
      try {
        err = s_.method == Method::DP85 ? dp853(t, y, h, yn) : rkf45(t, y, h, yn);
        ok = finite(yn) && isfinite_(err);
      } catch (const Error& e) {
        if (!recoverable(e)) throw;
        ok = false;
        ++stats_.stage_failures;
      }
      if (!ok) {
        ++stats_.rejected;
        if (abs(h) <= s_.h_min) return DriveStatus::StepFloorReached;
        h_ = std::max(abs(h) * Real(0.25), s_.h_min);
        reject_streak_ = true;
        continue;
      }
      if (err > Real(1)) {
        ++stats_.rejected;
        if (abs(h) <= s_.h_min) return DriveStatus::StepFloorReached;
        using std::pow;
        const Real fac = std::max(Real(0.9) * pow(err, -alpha()), Real(0.2));
        h_ = std::max(abs(h) * fac, s_.h_min);
        reject_streak_ = true;
        continue;
      }

      // accepted
      ++stats_.steps;
      const Real t_old = t;
      const State y_old = y;
      t = clipped ? target : t + h;
      y = yn;
      dense_valid_ = false;
      if (s_.method == Method::DP85) {
        k1_ = k_[12];  // FSAL
        have_k1_ = true;
        while (!cur.done() && dir * (cur.peek() - t) < -time_tol(t)) {
          const Real ts = cur.peek();
          on_sample(ts, dense_eval(t_old, y_old, h, ts));
          cur.pop();
        }
      } else {
        have_k1_ = false;
      }
      emit_landing(t, y, cur, on_sample, time_tol);
      update_h(abs(h), err, clipped);
    }
    return DriveStatus::Ok;
  }

 private:
  static Real ceil_div(Real span, Real h) {
    using std::ceil;
    Real n = ceil(span / h - Real(1e-9));
    return n < Real(1) ? Real(1) : n;
  }

  static bool recoverable(const Error& e) {
    return e.kind() == ErrorKind::NodeProximity || e.kind() == ErrorKind::OverflowGuard;
  }

  static bool isfinite_(Real v) {
    using std::isfinite;
    return isfinite(v);
  }

  static bool finite(const State& y) {
    for (const Real& v : y)
      if (!isfinite_(v)) return false;
    return true;
  }

  template <class OnSample, class Tol>
  void emit_landing(Real t, const State& y, SampleCursor<Real>& cur, OnSample& on_sample, Tol& time_tol) {
    using std::abs;
    if (!cur.done() && abs(cur.peek() - t) <= time_tol(t)) {
      on_sample(cur.peek(), y);
      cur.pop();
    }
  }

  Real alpha() const { return s_.method == Method::DP85 ? Real(0.7) / Real(8) : Real(0.7) / Real(5); }
  Real beta() const { return s_.method == Method::DP85 ? Real(0.4) / Real(8) : Real(0.4) / Real(5); }

  void update_h(Real h_used, Real err, bool clipped) {
    using std::pow;
    const Real floor_err = Real(1e-4);
    const Real e = err < floor_err ? floor_err : err;
    Real fac = Real(0.9) * pow(e, -alpha()) * pow(err_old_, beta());
    fac = std::clamp(fac, Real(0.2), Real(5));
    if (reject_streak_ && fac > Real(1)) fac = Real(1);
    reject_streak_ = false;
    err_old_ = e;
    // a step shortened to hit a stop says nothing about the natural size
    const Real proposal = h_used * fac;
    if (!clipped || proposal > h_) h_ = proposal;
    h_ = std::clamp(h_, s_.h_min, s_.h_max);
  }

  void eval(Real t, const State& y, State& dy) {
    ++stats_.evaluations;
    rhs_(t, y, dy);
  }

  Real err_norm(const State& y0, const State& y1, const State& e) const {
    using std::abs;
    using std::sqrt;
    Real acc = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const Real sc = s_.atol + s_.rtol * std::max(abs(y0[i]), abs(y1[i]));
      acc += (e[i] / sc) * (e[i] / sc);
    }
    return sqrt(acc / Real(N));
  }

  void rk4(Real t, const State& y, Real h, State& yn) {
    State k1, k2, k3, k4, tmp;
    eval(t, y, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h / 2 * k1[i];
    eval(t + h / 2, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h / 2 * k2[i];
    eval(t + h / 2, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    eval(t + h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i) yn[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }

  Real rkf45(Real t, const State& y, Real h, State& yn) {
    const auto& T = Rkf45Tableau<Real>::get();
    State k[6], tmp;
    eval(t, y, k[0]);
    for (int s = 1; s < 6; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        Real acc = 0;
        for (int j = 0; j < s; ++j) acc += T.a[s][j] * k[j][i];
        tmp[i] = y[i] + h * acc;
      }
      eval(t + T.c[s] * h, tmp, k[s]);
    }
    State e;
    for (std::size_t i = 0; i < N; ++i) {
      Real inc4 = 0, inc5 = 0;
      for (int s = 0; s < 6; ++s) {
        inc4 += T.b4[s] * k[s][i];
        inc5 += T.b5[s] * k[s][i];
      }
      yn[i] = y[i] + h * inc4;
      e[i] = h * (inc5 - inc4);
    }
    return err_norm(y, yn, e);
  }

  // Stages 1..13 into k_[0..12]; returns the scaled error.
  Real dp853(Real t, const State& y, Real h, State& yn) {
    using std::abs;
    using std::sqrt;
    const auto& T = Dp853Tableau<Real>::get();
    if (!have_k1_) {
      eval(t, y, k1_);
      have_k1_ = true;
    }
    k_[0] = k1_;
    State tmp;
    for (int s = 2; s <= 12; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        Real acc = 0;
        for (int j = 1; j < s; ++j)
          if (T.a[s][j] != Real(0)) acc += T.a[s][j] * k_[j - 1][i];
        tmp[i] = y[i] + h * acc;
      }
      eval(t + T.c[s] * h, tmp, k_[s - 1]);
    }
    State inc;
    for (std::size_t i = 0; i < N; ++i) {
      Real acc = 0;
      for (int j = 1; j <= 12; ++j)
        if (T.b[j] != Real(0)) acc += T.b[j] * k_[j - 1][i];
      inc[i] = acc;
      yn[i] = y[i] + h * acc;
    }
    Real err3 = 0, err5 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const Real sc = s_.atol + s_.rtol * std::max(abs(y[i]), abs(yn[i]));
      const Real e3 = inc[i] - T.bhh[1] * k_[0][i] - T.bhh[9] * k_[8][i] - T.bhh[12] * k_[11][i];
      Real e5 = 0;
      for (int j = 1; j <= 12; ++j)
        if (T.e5[j] != Real(0)) e5 += T.e5[j] * k_[j - 1][i];
      err3 += (e3 / sc) * (e3 / sc);
      err5 += (e5 / sc) * (e5 / sc);
    }
    Real deno = err5 + Real(0.01) * err3;
    if (!(deno > 0)) deno = Real(1);
    const Real err = abs(h) * err5 * sqrt(Real(1) / (Real(N) * deno));
    // stage 13 at the new point; also the next step's first stage
    if (isfinite_(err) && err <= Real(1)) eval(t + h, yn, k_[12]);
    return err;
  }

  State dense_eval(Real t0, const State& y0, Real h, Real ts) {
    if (!dense_ready_for_(t0, h)) build_dense(t0, y0, h);
    const Real s = (ts - t0) / h;
    const Real s1 = Real(1) - s;
    State out;
    for (std::size_t i = 0; i < N; ++i) {
      const Real conpar = r_[4][i] + s * (r_[5][i] + s1 * (r_[6][i] + s * r_[7][i]));
      out[i] = r_[0][i] + s * (r_[1][i] + s1 * (r_[2][i] + s * (r_[3][i] + s1 * conpar)));
    }
    return out;
  }

  bool dense_ready_for_(Real t0, Real h) const { return dense_valid_ && dense_t0_ == t0 && dense_h_ == h; }

  void build_dense(Real t0, const State& y0, Real h) {
    const auto& T = Dp853Tableau<Real>::get();
    // y_new is y0 + h * sum b_j k_j; recompute from the stages
    State yn;
    for (std::size_t i = 0; i < N; ++i) {
      Real acc = 0;
      for (int j = 1; j <= 12; ++j)
        if (T.b[j] != Real(0)) acc += T.b[j] * k_[j - 1][i];
      yn[i] = y0[i] + h * acc;
    }
    for (std::size_t i = 0; i < N; ++i) {
      const Real ydiff = yn[i] - y0[i];
      const Real bspl = h * k_[0][i] - ydiff;
      r_[0][i] = y0[i];
      r_[1][i] = ydiff;
      r_[2][i] = bspl;
      r_[3][i] = ydiff - h * k_[12][i] - bspl;
    }
    State tmp;
    for (int s = 14; s <= 16; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        Real acc = 0;
        for (int j = 1; j < s; ++j)
          if (T.a[s][j] != Real(0)) acc += T.a[s][j] * k_[j - 1][i];
        tmp[i] = y0[i] + h * acc;
      }
      eval(t0 + T.c[s] * h, tmp, k_[s - 1]);
    }
    for (int r = 4; r <= 7; ++r) {
      for (std::size_t i = 0; i < N; ++i) {
        Real acc = 0;
        for (int j = 1; j <= 16; ++j)
          if (T.d[r][j] != Real(0)) acc += T.d[r][j] * k_[j - 1][i];
        r_[r][i] = h * acc;
      }
    }
    dense_valid_ = true;
    dense_t0_ = t0;
    dense_h_ = h;
  }

  Rhs rhs_;
  DriverSettings<Real> s_;
  DriverStats stats_;
  Real h_;
  Real err_old_ = Real(1e-4);
  bool reject_streak_ = false;
  bool have_k1_ = false;
  State k1_{};
  State k_[16]{};
  State r_[8]{};
  bool dense_valid_ = false;
  Real dense_t0_{0};
  Real dense_h_{0};
};

}  // namespace bohmium
