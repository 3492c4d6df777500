// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "magpinn/dual2.hpp"
#include "magpinn/errors.hpp"
#include "magpinn/geometry.hpp"
#include "magpinn/rng.hpp"
#include "magpinn/scaling.hpp"

namespace magpinn {

// Architecture of the field approximator: Fourier encoding with m
// harmonics per axis feeding a ModResNet with L hidden layers of width d.
// d_xi is the number of free (network-visible) design parameters.
struct NetworkConfig {
  std::size_t L = 3;
  std::size_t d = 64;
  std::size_t m = 3;
  std::size_t d_xi = 10;

  std::size_t n_fourier() const { return (2 * m + 1) * (2 * m + 1); }
  std::size_t d0() const { return n_fourier() + d_xi; }
  std::size_t param_count() const;

  bool operator==(const NetworkConfig&) const = default;
};

// Flat parameter vector theta with the fixed block order
// (Wu, bu, Wv, bv, W0, b0, W1, b1, ..., W_{L-1}, b_{L-1}, WL, bL).
// Matrices are row-major.
struct NetworkParams {
  NetworkConfig cfg;
  std::vector<double> theta;

  explicit NetworkParams(const NetworkConfig& c)
      : cfg(c), theta(c.param_count(), 0.0) {}

  // Block offsets into theta.
  std::size_t off_wu() const { return 0; }
  std::size_t off_bu() const { return cfg.d * cfg.d0(); }
  std::size_t off_wv() const { return off_bu() + cfg.d; }
  std::size_t off_bv() const { return off_wv() + cfg.d * cfg.d0(); }
  std::size_t off_w(std::size_t k) const;  // hidden layer k = 0..L-1
  std::size_t off_b(std::size_t k) const;
  std::size_t off_wl() const { return off_w(cfg.L); }
  std::size_t off_bl() const { return off_wl() + cfg.d; }
};

// Zero-mean normal Glorot weights, stddev sqrt(2/(fan_in+fan_out));
// biases zero.  Deterministic under the rng state.
NetworkParams glorot_init(const NetworkConfig& cfg, Rng& rng);

// Scaled domain lengths; these double as the Fourier wavelengths.
struct ScaledLengths {
  double L_x;
  double L_y;
};
ScaledLengths scaled_lengths(const DeviceLayout& layout,
                             const ScalingConstants& c);

// Fourier feature encoding: h0 = (vec(phi_x phi_y^T)^T, xi_bar^T)^T.
// T is double or diff::Dual2 (the latter carries spatial tangents).
template <typename T>
void encode(const T& x_bar, const T& y_bar, std::span<const double> xi_bar,
            const NetworkConfig& cfg, const ScaledLengths& lam,
            std::vector<T>& out) {
  const std::size_t n = 2 * cfg.m + 1;
  if (xi_bar.size() != cfg.d_xi) {
    throw ShapeMismatchError("encode: xi_bar size mismatch");
  }
  if (cfg.m > 15) throw ShapeMismatchError("encode: m > 15 unsupported");
  out.resize(cfg.d0());
  std::array<T, 31> phi_x{}, phi_y{};
  phi_x[0] = T{} + 1.0;
  phi_y[0] = T{} + 1.0;
  using std::cos;
  using std::sin;
  for (std::size_t j = 1; j <= cfg.m; ++j) {
    const double wx = 2.0 * static_cast<double>(j) * std::numbers::pi / lam.L_x;
    const double wy = 2.0 * static_cast<double>(j) * std::numbers::pi / lam.L_y;
    phi_x[2 * j - 1] = cos(x_bar * wx);
    phi_x[2 * j] = sin(x_bar * wx);
    phi_y[2 * j - 1] = cos(y_bar * wy);
    phi_y[2 * j] = sin(y_bar * wy);
  }
  // vec() stacks columns of Phi = phi_x phi_y^T.
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      out[col * n + row] = phi_x[row] * phi_y[col];
    }
  }
  for (std::size_t i = 0; i < cfg.d_xi; ++i) {
    out[n * n + i] = T{} + xi_bar[i];
  }
}

// ModResNet forward pass; the record keeps every intermediate needed by
// the reverse sweep.
struct ForwardRecord {
  std::vector<diff::Dual2> h0;       // d0
  std::vector<diff::Dual2> zu, zv;   // d
  std::vector<diff::Dual2> u, v;     // d
  std::vector<diff::Dual2> z;        // L*d, gate pre-activations
  std::vector<diff::Dual2> sig;      // L*d, silu(z)
  std::vector<diff::Dual2> h;        // L*d, h^(1)..h^(L)
  diff::Dual2 N;
  diff::Dual2 D;
  diff::Dual2 A;
  // Reverse-sweep scratch, kept here so repeated samples do not allocate.
  std::vector<diff::Adjoint> hbar, hbar_prev, ubar, vbar, zbar, zubar, zvbar;
};

// Plain forward pass on doubles (no record); returns N.
double forward(const NetworkParams& params, std::span<const double> encoded);

// D = x y (Lx - x)(Ly - y) in scaled coordinates; zero on the boundary.
inline diff::Dual2 boundary_multiplier(const diff::Dual2& x,
                                       const diff::Dual2& y,
                                       const ScaledLengths& lam) {
  return x * y * (lam.L_x - x) * (lam.L_y - y);
}

struct MvpEval {
  double A;    // scaled MVP
  double Ax;   // d(A)/d(x_bar)
  double Ay;   // d(A)/d(y_bar)
};

// A_hat = D * N with exact spatial gradients.  Record is reusable
// workspace; one instance per thread.
MvpEval evaluate_mvp(const NetworkParams& params, double x_bar, double y_bar,
                     std::span<const double> xi_bar, const ScaledLengths& lam,
                     ForwardRecord& rec);

// Reverse sweep: accumulates d(objective)/d(theta) into grad given the
// adjoint seed on (A, Ax, Ay) of the last evaluate_mvp on this record.
void mvp_backward(const NetworkParams& params, ForwardRecord& rec,
                  const diff::Adjoint& seed, diff::GradientAccumulator& grad);

// Physical B components from a scaled evaluation (2-D curl convention:
// B_x = B* dA/dy_bar, B_y = -B* dA/dx_bar).
struct BField {
  double Bx;
  double By;
  double mag() const { return std::sqrt(Bx * Bx + By * By); }
};
inline BField physical_b(const MvpEval& e, const ScalingConstants& c) {
  return {c.B_star * e.Ay, -c.B_star * e.Ax};
}

}  // namespace magpinn
