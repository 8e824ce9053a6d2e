#include <cmath>
#include <numbers>
#include <random>

#include "bohmium/velocity.hpp"
#include "doctest.h"

using namespace bohmium;

namespace {

const double kSqrt3 = std::sqrt(3.0);

double rel_err(const Velocity& a, const Velocity& b) {
  const double scale = std::max({std::hypot(b.vx, b.vy), 1e-300});
  return std::hypot(a.vx - b.vx, a.vy - b.vy) / scale;
}

// Analytic Jacobian of the guidance velocity, from second derivatives of the
// product terms c_j X_j(x) Y_j(y).
Jacobian2 analytic_jacobian(const PhasePoint& p, const SystemConfig& cfg) {
  const bool psi = cfg.kind() == StateKind::Psi;
  const OscillatorParams rx = cfg.osc_x(), lx = rx.shifted_by_pi();
  const OscillatorParams ry = cfg.osc_y(), ly = ry.shifted_by_pi();
  const OscillatorParams xs[2] = {rx, lx};
  const OscillatorParams ys[2] = {psi ? ly : ry, psi ? ry : ly};
  const double cs[2] = {cfg.c1(), cfg.c2()};
  auto dlog = [&](double u, const OscillatorParams& o) {
    const double w = o.omega();
    const ComplexValue a = coherent_amplitude(p.t, o);
    return ComplexValue{-w * (u - std::sqrt(2.0 / w) * a.re), std::sqrt(2.0 * w) * a.im};
  };
  ComplexValue f{0, 0}, fx{0, 0}, fy{0, 0}, fxx{0, 0}, fxy{0, 0}, fyy{0, 0};
  for (int j = 0; j < 2; ++j) {
    const ComplexValue v = cs[j] * (coherent_value(p.x, p.t, xs[j]) * coherent_value(p.y, p.t, ys[j]));
    const ComplexValue dx = dlog(p.x, xs[j]), dy = dlog(p.y, ys[j]);
    f = f + v;
    fx = fx + v * dx;
    fy = fy + v * dy;
    fxx = fxx + v * (dx * dx + ComplexValue{-xs[j].omega(), 0});
    fyy = fyy + v * (dy * dy + ComplexValue{-ys[j].omega(), 0});
    fxy = fxy + v * dx * dy;
  }
  const double d = f.norm2();
  // v_i = Im(f_i f*) / |f|^2, d/dj = Im(f_ij f* + f_i f_j*) / d - v_i * 2 Re(f_j f*) / d
  auto comp = [&](ComplexValue fi, ComplexValue fj, ComplexValue fij) {
    const double vi = (fi * f.conj()).im / d;
    return (fij * f.conj() + fi * fj.conj()).im / d - vi * 2.0 * (fj * f.conj()).re / d;
  };
  return {comp(fx, fx, fxx), comp(fx, fy, fxy), comp(fy, fx, fxy), comp(fy, fy, fyy)};
}

double jac_err(const Jacobian2& a, const Jacobian2& b) {
  return std::max({std::abs(a.dvx_dx - b.dvx_dx), std::abs(a.dvx_dy - b.dvx_dy), std::abs(a.dvy_dx - b.dvy_dx),
                   std::abs(a.dvy_dy - b.dvy_dy)});
}

}  // namespace

TEST_CASE("closed form matches the gradient oracle at random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-5, 5), ut(0, 50);
  for (StateKind kind : {StateKind::Psi, StateKind::Phi}) {
    const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, std::sqrt(0.5), kind);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const PhasePoint p{u(rng), u(rng), ut(rng)};
      const Velocity a = bohmian_velocity(p, cfg);
      const Velocity b = oracle_velocity(p, cfg);
      worst = std::max(worst, rel_err(a, b));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("velocity vanishes at t = 0") {
  for (StateKind kind : {StateKind::Psi, StateKind::Phi}) {
    const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, 0.4, kind);
    for (double x : {-3.0, 0.5, 2.0}) {
      const Velocity v = bohmian_velocity({x, -1.0, 0.0}, cfg);
      CHECK(v.vx == 0.0);
      CHECK(v.vy == 0.0);
      const Velocity o = oracle_velocity({x, -1.0, 0.0}, cfg);
      CHECK(std::abs(o.vx) < 1e-12);
      CHECK(std::abs(o.vy) < 1e-12);
    }
  }
}

TEST_CASE("product state decouples") {
  const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, 0.0);
  for (double t : {0.4, 3.3, 17.0}) {
    for (double x : {-4.0, 1.0}) {
      const Velocity v = bohmian_velocity({x, 2.5, t}, cfg);
      CHECK(v.vx == doctest::Approx(-std::sqrt(2.0) * 2.5 * std::sin(t)).epsilon(1e-14));
      CHECK(v.vy == doctest::Approx(std::sqrt(2.0 * kSqrt3) * 2.5 * std::sin(kSqrt3 * t)).epsilon(1e-14));
      const Velocity o = oracle_velocity({x, 2.5, t}, cfg);
      CHECK(o.vx == doctest::Approx(v.vx).epsilon(1e-12));
      CHECK(o.vy == doctest::Approx(v.vy).epsilon(1e-12));
    }
    const Jacobian2 j = velocity_jacobian({0.3, -0.2, t}, cfg);
    CHECK(std::abs(j.dvx_dy) <= 1e-8);
    CHECK(std::abs(j.dvy_dx) <= 1e-8);
    CHECK(jac_err(j, {}) <= 1e-8);
  }
}

TEST_CASE("isotropic field identities") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4), ut(0, 30);
  const SystemConfig psi = SystemConfig::with_c2(1.0, 1.0, 0.4, StateKind::Psi);
  const SystemConfig phi = SystemConfig::with_c2(1.0, 1.0, 0.4, StateKind::Phi);
  for (int i = 0; i < 200; ++i) {
    const PhasePoint p{u(rng), u(rng), ut(rng)};
    const Velocity a = bohmian_velocity(p, psi);
    CHECK(std::abs(a.vx + a.vy) <= 1e-12 * std::max(1.0, std::abs(a.vx)));
    const Velocity b = bohmian_velocity(p, phi);
    CHECK(std::abs(b.vx - b.vy) <= 1e-12 * std::max(1.0, std::abs(b.vx)));
    const Jacobian2 j = velocity_jacobian(p, psi);
    CHECK(std::abs(j.dvx_dx + j.dvy_dx) <= 1e-6 * std::max(1.0, std::abs(j.dvx_dx)));
    CHECK(std::abs(j.dvx_dy + j.dvy_dy) <= 1e-6 * std::max(1.0, std::abs(j.dvx_dy)));
  }
}

TEST_CASE("time reversal antisymmetry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4, 4), ut(0, 40);
  for (StateKind kind : {StateKind::Psi, StateKind::Phi}) {
    const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, 0.3, kind);
    for (int i = 0; i < 300; ++i) {
      const double x = u(rng), y = u(rng), t = ut(rng);
      const Velocity f = bohmian_velocity({x, y, t}, cfg);
      const Velocity b = bohmian_velocity({x, y, -t}, cfg);
      CHECK(b.vx == doctest::Approx(-f.vx).epsilon(1e-12));
      CHECK(b.vy == doctest::Approx(-f.vy).epsilon(1e-12));
    }
  }
}

TEST_CASE("finite-difference jacobian converges at second order") {
  const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, 0.5);
  const PhasePoint p{-1.1, 0.9, 2.3};
  const Jacobian2 exact = analytic_jacobian(p, cfg);
  CHECK(jac_err(velocity_jacobian(p, cfg), exact) < 1e-6 * std::max(1.0, jac_err(exact, {})));
  const double e1 = jac_err(velocity_jacobian(p, cfg, 2e-3), exact);
  const double e2 = jac_err(velocity_jacobian(p, cfg, 1e-3), exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("node proximity is reported") {
  const SystemConfig cfg = SystemConfig::with_c2(1.0, kSqrt3, std::sqrt(0.5));
  FieldOptions strict;
  strict.g_min = 3.0;  // scaled G never exceeds (c1 + c2)^2
  CHECK_THROWS_AS(bohmian_velocity({0.1, 0.2, 1.0}, cfg, strict), Error);
  try {
    oracle_velocity({0.1, 0.2, 1.0}, cfg, FieldOptions{1e10});
    FAIL("expected NodeProximity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NodeProximity);
  }
}
