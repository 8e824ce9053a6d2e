#pragma once

#include <cmath>

#include "bohmium/model.hpp"

namespace bohmium {

template <class Real>
struct VelocityT {
  Real vx{0};
  Real vy{0};
};
using Velocity = VelocityT<double>;

/// d(vx, vy) / d(x, y), row-major.
struct Jacobian2 {
  double dvx_dx{0}, dvx_dy{0};
  double dvy_dx{0}, dvy_dy{0};
};

struct FieldOptions {
  /// Floor on the log-scaled density G (or G'); at or below it the point is
  /// treated as sitting on a node.
  double g_min = 1e-300;
};

/// Closed-form Bohmian velocity of the Psi / Phi states.
template <class Real>
class VelocityField {
 public:
  explicit VelocityField(const SystemConfig& cfg, FieldOptions opt = {})
      : k_(FieldConstants<Real>::from(cfg)), g_min_(opt.g_min) {}

  VelocityT<Real> operator()(Real x, Real y, Real t) const {
    using std::isfinite;
    const AuxTermsT<Real> s = compute_aux<Real>(x, y, t, k_);
    if (!(s.g > g_min_)) {
      throw Error(ErrorKind::NodeProximity, "velocity", "density floor reached near a node");
    }
    VelocityT<Real> v;
    if (k_.kind == StateKind::Psi) {
      v.vx = -k_.kappa_x * (s.a * s.cos_x + s.b * s.sin_x) / s.g;
      v.vy = k_.kappa_y * (s.a * s.cos_y + s.b * s.sin_y) / s.g;
    } else {
      v.vx = -k_.kappa_x * (s.a * s.cos_x + s.b * s.sin_x) / s.g;
      v.vy = -k_.kappa_y * (s.a * s.cos_y + s.b * s.sin_y) / s.g;
    }
    if (!isfinite(v.vx) || !isfinite(v.vy)) {
      throw Error(ErrorKind::NodeProximity, "velocity", "non-finite velocity near a node");
    }
    return v;
  }

  const FieldConstants<Real>& constants() const noexcept { return k_; }

 private:
  FieldConstants<Real> k_;
  Real g_min_;
};

Velocity bohmian_velocity(const PhasePoint& p, const SystemConfig& cfg, FieldOptions opt = {});

/// Velocity from the guidance equation applied to state_value and its
/// analytic spatial derivatives. Independent of the closed form above.
Velocity oracle_velocity(const PhasePoint& p, const SystemConfig& cfg, FieldOptions opt = {});

/// Central differences with per-axis step h * (1 + |coordinate|).
template <class Real, class Field>
void central_jacobian(const Field& field, Real x, Real y, Real t, Real h, Real out[4]) {
  using std::abs;
  const Real hx = h * (Real(1) + abs(x));
  const Real hy = h * (Real(1) + abs(y));
  const auto xp = field(x + hx, y, t);
  const auto xm = field(x - hx, y, t);
  const auto yp = field(x, y + hy, t);
  const auto ym = field(x, y - hy, t);
  out[0] = (xp.vx - xm.vx) / (Real(2) * hx);
  out[1] = (yp.vx - ym.vx) / (Real(2) * hy);
  out[2] = (xp.vy - xm.vy) / (Real(2) * hx);
  out[3] = (yp.vy - ym.vy) / (Real(2) * hy);
}

inline constexpr double kDefaultJacobianStep = 1e-6;

Jacobian2 velocity_jacobian(const PhasePoint& p, const SystemConfig& cfg, double h = kDefaultJacobianStep,
                            FieldOptions opt = {});

}  // namespace bohmium
