#include "bohmium/velocity.hpp"

#include <algorithm>
#include <cmath>

namespace bohmium {

Velocity bohmian_velocity(const PhasePoint& p, const SystemConfig& cfg, FieldOptions opt) {
  return VelocityField<double>(cfg, opt)(p.x, p.y, p.t);
}

namespace {

// d/dx log Y(x, t) = -omega (x - sqrt(2/omega) Re A) + i sqrt(2 omega) Im A
ComplexValue dlog_coherent(double x, double t, const OscillatorParams& osc) {
  const double w = osc.omega();
  const ComplexValue a = coherent_amplitude(t, osc);
  return {-w * (x - std::sqrt(2.0 / w) * a.re), std::sqrt(2.0 * w) * a.im};
}

}  // namespace

Velocity oracle_velocity(const PhasePoint& p, const SystemConfig& cfg, FieldOptions opt) {
  const OscillatorParams rx = cfg.osc_x();
  const OscillatorParams lx = rx.shifted_by_pi();
  const OscillatorParams ry = cfg.osc_y();
  const OscillatorParams ly = ry.shifted_by_pi();
  const bool psi = cfg.kind() == StateKind::Psi;

  // Term 1 = c1 Y_R(x) Y_{L|R}(y), term 2 = c2 Y_L(x) Y_{R|L}(y).
  const OscillatorParams& y1 = psi ? ly : ry;
  const OscillatorParams& y2 = psi ? ry : ly;
  const LogComplex lx1 = coherent_log(p.x, p.t, rx);
  const LogComplex ly1 = coherent_log(p.y, p.t, y1);
  const LogComplex lx2 = coherent_log(p.x, p.t, lx);
  const LogComplex ly2 = coherent_log(p.y, p.t, y2);
  const double m1 = lx1.log_mod + ly1.log_mod;
  const double m2 = lx2.log_mod + ly2.log_mod;
  const double m = std::max(m1, m2);
  const ComplexValue t1 = cfg.c1() * ComplexValue::polar_exp(m1 - m, lx1.phase + ly1.phase);
  const ComplexValue t2 = cfg.c2() * ComplexValue::polar_exp(m2 - m, lx2.phase + ly2.phase);

  const ComplexValue psi_v = t1 + t2;
  const ComplexValue dpsi_dx = t1 * dlog_coherent(p.x, p.t, rx) + t2 * dlog_coherent(p.x, p.t, lx);
  const ComplexValue dpsi_dy = t1 * dlog_coherent(p.y, p.t, y1) + t2 * dlog_coherent(p.y, p.t, y2);

  const double dens = psi_v.norm2();
  if (!(dens > opt.g_min)) {
    throw Error(ErrorKind::NodeProximity, "velocity", "oracle density floor reached near a node");
  }
  const Velocity v{(dpsi_dx * psi_v.conj()).im / dens, (dpsi_dy * psi_v.conj()).im / dens};
  if (!std::isfinite(v.vx) || !std::isfinite(v.vy)) {
    throw Error(ErrorKind::NodeProximity, "velocity", "non-finite oracle velocity");
  }
  return v;
}

Jacobian2 velocity_jacobian(const PhasePoint& p, const SystemConfig& cfg, double h, FieldOptions opt) {
  const VelocityField<double> field(cfg, opt);
  double j[4];
  central_jacobian<double>(field, p.x, p.y, p.t, h, j);
  return {j[0], j[1], j[2], j[3]};
}

}  // namespace bohmium
