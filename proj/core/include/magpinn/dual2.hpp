// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace magpinn::diff {

// Forward-mode scalar carrying the value and two spatial tangents
// (d/dx, d/dy).  Arithmetic follows the chain rule exactly.
struct Dual2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  static Dual2 seed_x(double x) { return {x, 1.0, 0.0}; }
  static Dual2 seed_y(double y) { return {y, 0.0, 1.0}; }
  static Dual2 constant(double c) { return {c, 0.0, 0.0}; }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy};
}
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.dx, -a.dy}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.dx - q * b.dx) * inv, (a.dy - q * b.dy) * inv};
}
inline Dual2 operator+(const Dual2& a, double c) { return {a.v + c, a.dx, a.dy}; }
inline Dual2 operator+(double c, const Dual2& a) { return a + c; }
inline Dual2 operator-(const Dual2& a, double c) { return {a.v - c, a.dx, a.dy}; }
inline Dual2 operator-(double c, const Dual2& a) { return {c - a.v, -a.dx, -a.dy}; }
inline Dual2 operator*(const Dual2& a, double c) {
  return {a.v * c, a.dx * c, a.dy * c};
}
inline Dual2 operator*(double c, const Dual2& a) { return a * c; }
inline Dual2 operator/(const Dual2& a, double c) { return a * (1.0 / c); }

inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.v);
  return {e, e * a.dx, e * a.dy};
}
inline Dual2 sin(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {s, c * a.dx, c * a.dy};
}
inline Dual2 cos(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {c, -s * a.dx, -s * a.dy};
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// SiLU z * sigmoid(z) with first and second derivatives; the second
// derivative feeds the reverse sweep through the spatial tangents.
inline double silu(double z) { return z * sigmoid(z); }
inline double silu_d(double z) {
  const double g = sigmoid(z);
  return g * (1.0 + z * (1.0 - g));
}
inline double silu_dd(double z) {
  const double g = sigmoid(z);
  return g * (1.0 - g) * (2.0 + z * (1.0 - 2.0 * g));
}

inline Dual2 silu(const Dual2& a) {
  const double d = silu_d(a.v);
  return {silu(a.v), d * a.dx, d * a.dy};
}

// Evaluate f(x, y) along with its spatial gradient.  f must be composed
// of the Dual2 primitive set above.
template <typename F>
struct SpatialGradient {
  double value;
  double ddx;
  double ddy;
};

template <typename F>
auto spatial_gradient(F&& f, double x, double y) {
  const Dual2 r = f(Dual2::seed_x(x), Dual2::seed_y(y));
  return SpatialGradient<F>{r.v, r.dx, r.dy};
}

// Adjoint of a Dual2 node: sensitivities of the objective to the node's
// value and to each of its spatial tangents.
struct Adjoint {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

// Reverse of c = a * b for dual operands.
inline void mul_backprop(const Dual2& a, const Dual2& b, const Adjoint& cbar,
                         Adjoint& abar, Adjoint& bbar) {
  abar.v += cbar.v * b.v + cbar.dx * b.dx + cbar.dy * b.dy;
  abar.dx += cbar.dx * b.v;
  abar.dy += cbar.dy * b.v;
  bbar.v += cbar.v * a.v + cbar.dx * a.dx + cbar.dy * a.dy;
  bbar.dx += cbar.dx * a.v;
  bbar.dy += cbar.dy * a.v;
}

// Reverse of c = silu(a).
inline void silu_backprop(const Dual2& a, const Adjoint& cbar, Adjoint& abar) {
  const double d1 = silu_d(a.v);
  const double d2 = silu_dd(a.v);
  abar.v += cbar.v * d1 + d2 * (cbar.dx * a.dx + cbar.dy * a.dy);
  abar.dx += cbar.dx * d1;
  abar.dy += cbar.dy * d1;
}

// Flat adjoint buffer aligned with a parameter vector.  One accumulator
// per worker thread; accumulation across samples is plain summation.
class GradientAccumulator {
 public:
  explicit GradientAccumulator(std::size_t n) : grad_(n, 0.0) {}

  void reset() { std::fill(grad_.begin(), grad_.end(), 0.0); }
  double* data() { return grad_.data(); }
  const double* data() const { return grad_.data(); }
  std::size_t size() const { return grad_.size(); }
  double operator[](std::size_t i) const { return grad_[i]; }

  void add(const GradientAccumulator& other) {
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += other.grad_[i];
  }
  void scale(double f) {
    for (auto& g : grad_) g *= f;
  }

 private:
  std::vector<double> grad_;
};

}  // namespace magpinn::diff
