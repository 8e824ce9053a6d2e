#pragma once

#include <cmath>

namespace bohmium {

// Minimal complex number over an arbitrary real type. Only what the
// wavefunction code needs.
template <class Real>
struct BasicComplex {
  Real re{0};
  Real im{0};

  friend BasicComplex operator+(BasicComplex a, BasicComplex b) { return {a.re + b.re, a.im + b.im}; }
  friend BasicComplex operator-(BasicComplex a, BasicComplex b) { return {a.re - b.re, a.im - b.im}; }
  friend BasicComplex operator*(BasicComplex a, BasicComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BasicComplex operator*(Real s, BasicComplex a) { return {s * a.re, s * a.im}; }
  friend BasicComplex operator*(BasicComplex a, Real s) { return {s * a.re, s * a.im}; }

  BasicComplex conj() const { return {re, -im}; }
  Real norm2() const { return re * re + im * im; }
  Real abs() const {
    using std::hypot;
    return hypot(re, im);
  }

  /// exp(log_mod + i*phase)
  static BasicComplex polar_exp(Real log_mod, Real phase) {
    using std::cos;
    using std::exp;
    using std::sin;
    const Real m = exp(log_mod);
    return {m * cos(phase), m * sin(phase)};
  }
};

using ComplexValue = BasicComplex<double>;

}  // namespace bohmium
