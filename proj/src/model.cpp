#include "bohmium/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bohmium {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::OverflowGuard: return "OverflowGuard";
    case ErrorKind::NodeProximity: return "NodeProximity";
    case ErrorKind::StepFloorReached: return "StepFloorReached";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::NodalDegeneracy: return "NodalDegeneracy";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OnlyNodeRoot: return "OnlyNodeRoot";
    case ErrorKind::InsufficientSpan: return "InsufficientSpan";
    case ErrorKind::NonUniformSampling: return "NonUniformSampling";
    case ErrorKind::IncompleteWindow: return "IncompleteWindow";
    case ErrorKind::NoPeriodFound: return "NoPeriodFound";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

OscillatorParams::OscillatorParams(double omega, double a0, double sigma)
    : omega_(omega), a0_(a0), sigma_(wrap_angle(sigma)) {
  if (!(omega > 0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::DomainError, "model", "omega must be positive, got " + std::to_string(omega));
  }
  if (!(a0 > 0) || !std::isfinite(a0)) {
    throw Error(ErrorKind::DomainError, "model", "a0 must be positive, got " + std::to_string(a0));
  }
  if (!std::isfinite(sigma)) throw Error(ErrorKind::DomainError, "model", "sigma must be finite");
}

SystemConfig::SystemConfig(OscillatorParams osc_x, OscillatorParams osc_y, double c1, double c2, StateKind kind)
    : osc_x_(osc_x), osc_y_(osc_y), c1_(c1), c2_(c2), kind_(kind) {
  const double n = std::hypot(c1, c2);
  if (!(n > 0) || !std::isfinite(n)) {
    throw Error(ErrorKind::DomainError, "model", "superposition coefficients must not both vanish");
  }
  c1_ = c1 / n;
  c2_ = c2 / n;
}

SystemConfig SystemConfig::with_c2(double omega_x, double omega_y, double c2, StateKind kind, double a0) {
  if (!(std::abs(c2) <= 1.0)) {
    throw Error(ErrorKind::DomainError, "model", "c2 must lie in [-1, 1]");
  }
  return {OscillatorParams(omega_x, a0), OscillatorParams(omega_y, a0), std::sqrt(1.0 - c2 * c2), c2, kind};
}

ComplexValue coherent_amplitude(double t, const OscillatorParams& osc) {
  const double ph = osc.sigma() - osc.omega() * t;
  return {osc.a0() * std::cos(ph), osc.a0() * std::sin(ph)};
}

double coherent_phase(double t, const OscillatorParams& osc) {
  const double wt = osc.omega() * t;
  return 0.5 * (osc.a0() * osc.a0() * std::sin(2.0 * (wt - osc.sigma())) - wt);
}

LogComplex coherent_log(double x, double t, const OscillatorParams& osc) {
  const double w = osc.omega();
  const ComplexValue a = coherent_amplitude(t, osc);
  const double d = x - std::sqrt(2.0 / w) * a.re;
  return {0.25 * std::log(w / std::numbers::pi) - 0.5 * w * d * d,
          std::sqrt(2.0 * w) * a.im * x + coherent_phase(t, osc)};
}

ComplexValue coherent_value(double x, double t, const OscillatorParams& osc) {
  const LogComplex l = coherent_log(x, t, osc);
  return ComplexValue::polar_exp(l.log_mod, l.phase);
}

double overlap(ComplexValue a1, ComplexValue a2) { return std::exp(-(a1 - a2).norm2()); }

ComplexValue state_value(const PhasePoint& p, const SystemConfig& cfg) {
  const OscillatorParams rx = cfg.osc_x();
  const OscillatorParams lx = rx.shifted_by_pi();
  const OscillatorParams ry = cfg.osc_y();
  const OscillatorParams ly = ry.shifted_by_pi();
  const LogComplex xr = coherent_log(p.x, p.t, rx);
  const LogComplex xl = coherent_log(p.x, p.t, lx);
  const LogComplex yr = coherent_log(p.y, p.t, ry);
  const LogComplex yl = coherent_log(p.y, p.t, ly);

  const LogComplex& y1 = cfg.kind() == StateKind::Psi ? yl : yr;  // partner of Y_R(x)
  const LogComplex& y2 = cfg.kind() == StateKind::Psi ? yr : yl;  // partner of Y_L(x)
  const ComplexValue t1 = ComplexValue::polar_exp(xr.log_mod + y1.log_mod, xr.phase + y1.phase);
  const ComplexValue t2 = ComplexValue::polar_exp(xl.log_mod + y2.log_mod, xl.phase + y2.phase);
  return cfg.c1() * t1 + cfg.c2() * t2;
}

AuxTerms aux_terms(const PhasePoint& p, const SystemConfig& cfg) {
  return compute_aux<double>(p.x, p.y, p.t, FieldConstants<double>::from(cfg));
}

}  // namespace bohmium
