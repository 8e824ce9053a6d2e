#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bohmium/complex.hpp"
#include "bohmium/error.hpp"

// Coherent-state wavefunctions of two uncoupled oscillators and the entangled
// two-"qubit" states built from them. Units: hbar = m = 1.

namespace bohmium {

/// One harmonic oscillator carrying a coherent state |A(t)>.
///
/// `sigma` is the initial phase of A (wrapped into [0, 2pi)), `a0` = |A(0)|.
/// The mass is fixed to 1 throughout.
class OscillatorParams {
 public:
  OscillatorParams(double omega, double a0, double sigma = 0.0);

  double omega() const noexcept { return omega_; }
  double a0() const noexcept { return a0_; }
  double sigma() const noexcept { return sigma_; }

  /// The same oscillator with sigma + pi: the "left" partner of a right packet.
  OscillatorParams shifted_by_pi() const { return {omega_, a0_, sigma_ + std::numbers::pi}; }

 private:
  double omega_;
  double a0_;
  double sigma_;
};

enum class StateKind { Psi, Phi };

/// Psi = c1 Y_R(x) Y_L(y) + c2 Y_L(x) Y_R(y)
/// Phi = c1 Y_R(x) Y_R(y) + c2 Y_L(x) Y_L(y)
class SystemConfig {
 public:
  /// Normalizes (c1, c2) so that c1^2 + c2^2 = 1. Throws DomainError if both vanish.
  SystemConfig(OscillatorParams osc_x, OscillatorParams osc_y, double c1, double c2, StateKind kind);

  /// c1 = sqrt(1 - c2^2), the parameterization used throughout the experiments.
  static SystemConfig with_c2(double omega_x, double omega_y, double c2, StateKind kind = StateKind::Psi,
                              double a0 = 2.5);

  const OscillatorParams& osc_x() const noexcept { return osc_x_; }
  const OscillatorParams& osc_y() const noexcept { return osc_y_; }
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  StateKind kind() const noexcept { return kind_; }

 private:
  OscillatorParams osc_x_;
  OscillatorParams osc_y_;
  double c1_;
  double c2_;
  StateKind kind_;
};

struct PhasePoint {
  double x{0};
  double y{0};
  double t{0};
};

/// A(t) = |A0| exp(-i(omega t - sigma)).
ComplexValue coherent_amplitude(double t, const OscillatorParams& osc);

/// The global phase xi(t) of the coherent state.
double coherent_phase(double t, const OscillatorParams& osc);

/// Y(x, t) as (log modulus, phase); stays finite far outside the packet.
struct LogComplex {
  double log_mod;
  double phase;
};
LogComplex coherent_log(double x, double t, const OscillatorParams& osc);

ComplexValue coherent_value(double x, double t, const OscillatorParams& osc);

/// |<a2|a1>|^2 = exp(-|A1 - A2|^2)
double overlap(ComplexValue a1, ComplexValue a2);

ComplexValue state_value(const PhasePoint& p, const SystemConfig& cfg);

// ---------------------------------------------------------------------------
// Closed-form auxiliary terms shared by the velocity field.

/// Constants of the closed-form field, converted once to the working precision.
template <class Real>
struct FieldConstants {
  Real kappa_x, kappa_y;  // sqrt(2 omega) a0
  Real omega_x, omega_y;
  Real sigma_x, sigma_y;
  Real c1, c2;
  StateKind kind;

  static FieldConstants from(const SystemConfig& cfg) {
    using std::sqrt;
    auto r = [](double v) { return Real(v); };
    FieldConstants k;
    k.omega_x = r(cfg.osc_x().omega());
    k.omega_y = r(cfg.osc_y().omega());
    k.kappa_x = sqrt(Real(2) * k.omega_x) * r(cfg.osc_x().a0());
    k.kappa_y = sqrt(Real(2) * k.omega_y) * r(cfg.osc_y().a0());
    k.sigma_x = r(cfg.osc_x().sigma());
    k.sigma_y = r(cfg.osc_y().sigma());
    k.c1 = r(cfg.c1());
    k.c2 = r(cfg.c2());
    k.kind = cfg.kind();
    return k;
  }
};

/// f, g and the branch terms (A, B, G) for Psi or (C, D, G') for Phi.
///
/// `a`, `b`, `g` carry a common factor exp(-log_scale) so they stay
/// representable far from the origin; only their ratios enter the dynamics.
template <class Real>
struct AuxTermsT {
  Real f_x, f_y, g_x, g_y;
  Real a, b, g;
  Real log_scale;
  Real cos_x, sin_x, cos_y, sin_y;  // of (omega t - sigma)
  StateKind kind;
};

using AuxTerms = AuxTermsT<double>;

template <class Real>
AuxTermsT<Real> compute_aux(Real x, Real y, Real t, const FieldConstants<Real>& k) {
  using std::cos;
  using std::exp;
  using std::isfinite;
  using std::sin;
  AuxTermsT<Real> r;
  r.kind = k.kind;
  const Real th_x = k.omega_x * t - k.sigma_x;
  const Real th_y = k.omega_y * t - k.sigma_y;
  r.cos_x = cos(th_x);
  r.sin_x = sin(th_x);
  r.cos_y = cos(th_y);
  r.sin_y = sin(th_y);
  r.f_x = k.kappa_x * r.cos_x * x;
  r.f_y = k.kappa_y * r.cos_y * y;
  r.g_x = k.kappa_x * r.sin_x * x;
  r.g_y = k.kappa_y * r.sin_y * y;
  if (!isfinite(r.f_x) || !isfinite(r.f_y) || !isfinite(r.g_x) || !isfinite(r.g_y)) {
    throw Error(ErrorKind::OverflowGuard, "model", "non-finite exponent in auxiliary terms");
  }
  const Real cross = Real(2) * k.c1 * k.c2;
  if (k.kind == StateKind::Psi) {
    const Real ex = Real(4) * r.f_x;
    const Real ey = Real(4) * r.f_y;
    const Real m = ex > ey ? ex : ey;  // 2fx + 2fy never exceeds this
    const Real w_x = exp(ex - m);
    const Real w_y = exp(ey - m);
    const Real w_c = exp(Real(2) * r.f_x + Real(2) * r.f_y - m);
    const Real phase = Real(2) * (r.g_x - r.g_y);
    r.a = cross * w_c * sin(phase);
    r.b = k.c1 * k.c1 * w_x - k.c2 * k.c2 * w_y;
    r.g = cross * w_c * cos(phase) + k.c2 * k.c2 * w_y + k.c1 * k.c1 * w_x;
    r.log_scale = m;
  } else {
    const Real e = Real(4) * (r.f_x + r.f_y);
    const Real m = e > Real(0) ? e : Real(0);
    const Real w_1 = exp(e - m);
    const Real w_0 = exp(-m);
    const Real w_c = exp(Real(2) * r.f_x + Real(2) * r.f_y - m);
    const Real phase = Real(2) * (r.g_x + r.g_y);
    r.a = cross * w_c * sin(phase);
    r.b = k.c1 * k.c1 * w_1 - k.c2 * k.c2 * w_0;
    r.g = k.c1 * k.c1 * w_1 + cross * w_c * cos(phase) + k.c2 * k.c2 * w_0;
    r.log_scale = m;
  }
  return r;
}

AuxTerms aux_terms(const PhasePoint& p, const SystemConfig& cfg);

}  // namespace bohmium
