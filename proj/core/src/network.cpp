// SPDX-License-Identifier: Apache-2.0
#include "magpinn/network.hpp"

namespace magpinn {

using diff::Adjoint;
using diff::Dual2;

std::size_t NetworkConfig::param_count() const {
  const std::size_t din = d0();
  std::size_t n = 2 * (d * din + d);  // Wu, bu, Wv, bv
  n += d * din + d;                   // W0, b0
  if (L >= 2) n += (L - 1) * (d * d + d);
  n += d + 1;  // WL, bL
  return n;
}

std::size_t NetworkParams::off_w(std::size_t k) const {
  const std::size_t base = off_bv() + cfg.d;
  if (k == 0) return base;
  const std::size_t after0 = base + cfg.d * cfg.d0() + cfg.d;
  return after0 + (k - 1) * (cfg.d * cfg.d + cfg.d);
}

std::size_t NetworkParams::off_b(std::size_t k) const {
  return off_w(k) + cfg.d * (k == 0 ? cfg.d0() : cfg.d);
}

NetworkParams glorot_init(const NetworkConfig& cfg, Rng& rng) {
  NetworkParams p(cfg);
  const std::size_t d = cfg.d, din = cfg.d0();
  auto fill_matrix = [&](std::size_t off, std::size_t rows, std::size_t cols) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(rows + cols));
    for (std::size_t i = 0; i < rows * cols; ++i) {
      p.theta[off + i] = rng.normal(0.0, stddev);
    }
  };
  fill_matrix(p.off_wu(), d, din);
  fill_matrix(p.off_wv(), d, din);
  fill_matrix(p.off_w(0), d, din);
  for (std::size_t k = 1; k < cfg.L; ++k) fill_matrix(p.off_w(k), d, d);
  fill_matrix(p.off_wl(), 1, d);
  return p;  // biases stay zero
}

ScaledLengths scaled_lengths(const DeviceLayout& layout,
                             const ScalingConstants& c) {
  return {layout.L_x / c.x_star, layout.L_y / c.x_star};
}

namespace {

// z = W h + b for dual vectors; W row-major rows x cols.
inline void matvec(const double* W, const double* b, const Dual2* h,
                   std::size_t rows, std::size_t cols, Dual2* z) {
  for (std::size_t i = 0; i < rows; ++i) {
    double v = b[i], dx = 0.0, dy = 0.0;
    const double* w = W + i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      v += w[j] * h[j].v;
      dx += w[j] * h[j].dx;
      dy += w[j] * h[j].dy;
    }
    z[i] = {v, dx, dy};
  }
}

// Reverse of z = W h + b: accumulates into Wbar, bbar and (optionally)
// hbar.
inline void matvec_backprop(const double* W, const Dual2* h,
                            const Adjoint* zbar, std::size_t rows,
                            std::size_t cols, double* Wbar, double* bbar,
                            Adjoint* hbar) {
  for (std::size_t i = 0; i < rows; ++i) {
    const Adjoint& zb = zbar[i];
    const double* w = W + i * cols;
    double* wb = Wbar + i * cols;
    bbar[i] += zb.v;
    if (hbar) {
      for (std::size_t j = 0; j < cols; ++j) {
        wb[j] += zb.v * h[j].v + zb.dx * h[j].dx + zb.dy * h[j].dy;
        hbar[j].v += w[j] * zb.v;
        hbar[j].dx += w[j] * zb.dx;
        hbar[j].dy += w[j] * zb.dy;
      }
    } else {
      for (std::size_t j = 0; j < cols; ++j) {
        wb[j] += zb.v * h[j].v + zb.dx * h[j].dx + zb.dy * h[j].dy;
      }
    }
  }
}

}  // namespace

double forward(const NetworkParams& params, std::span<const double> encoded) {
  const NetworkConfig& cfg = params.cfg;
  const std::size_t d = cfg.d, din = cfg.d0();
  if (encoded.size() != din) {
    throw ShapeMismatchError("forward: encoded input size mismatch");
  }
  const double* th = params.theta.data();
  std::vector<double> u(d), v(d), h(d), z(d);
  auto affine = [&](std::size_t w_off, std::size_t b_off, const double* in,
                    std::size_t cols, std::vector<double>& out) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = th[b_off + i];
      const double* w = th + w_off + i * cols;
      for (std::size_t j = 0; j < cols; ++j) s += w[j] * in[j];
      out[i] = s;
    }
  };
  affine(params.off_wu(), params.off_bu(), encoded.data(), din, u);
  affine(params.off_wv(), params.off_bv(), encoded.data(), din, v);
  for (std::size_t i = 0; i < d; ++i) {
    u[i] = diff::silu(u[i]);
    v[i] = diff::silu(v[i]);
  }
  const double* hin = encoded.data();
  std::size_t cols = din;
  for (std::size_t k = 0; k < cfg.L; ++k) {
    affine(params.off_w(k), params.off_b(k), hin, cols, z);
    for (std::size_t i = 0; i < d; ++i) {
      const double s = diff::silu(z[i]);
      h[i] = (1.0 - s) * u[i] + s * v[i];
    }
    hin = h.data();
    cols = d;
  }
  double out = th[params.off_bl()];
  const double* wl = th + params.off_wl();
  for (std::size_t i = 0; i < d; ++i) out += wl[i] * h[i];
  return out;
}

MvpEval evaluate_mvp(const NetworkParams& params, double x_bar, double y_bar,
                     std::span<const double> xi_bar, const ScaledLengths& lam,
                     ForwardRecord& rec) {
  const NetworkConfig& cfg = params.cfg;
  const std::size_t d = cfg.d, din = cfg.d0(), L = cfg.L;
  encode(Dual2::seed_x(x_bar), Dual2::seed_y(y_bar), xi_bar, cfg, lam, rec.h0);

  rec.zu.resize(d);
  rec.zv.resize(d);
  rec.u.resize(d);
  rec.v.resize(d);
  rec.z.resize(L * d);
  rec.sig.resize(L * d);
  rec.h.resize(L * d);

  const double* th = params.theta.data();
  matvec(th + params.off_wu(), th + params.off_bu(), rec.h0.data(), d, din,
         rec.zu.data());
  matvec(th + params.off_wv(), th + params.off_bv(), rec.h0.data(), d, din,
         rec.zv.data());
  for (std::size_t i = 0; i < d; ++i) {
    rec.u[i] = diff::silu(rec.zu[i]);
    rec.v[i] = diff::silu(rec.zv[i]);
  }

  const Dual2* hin = rec.h0.data();
  std::size_t cols = din;
  for (std::size_t k = 0; k < L; ++k) {
    Dual2* zk = rec.z.data() + k * d;
    Dual2* sk = rec.sig.data() + k * d;
    Dual2* hk = rec.h.data() + k * d;
    matvec(th + params.off_w(k), th + params.off_b(k), hin, d, cols, zk);
    for (std::size_t i = 0; i < d; ++i) {
      sk[i] = diff::silu(zk[i]);
      // h^(k+1) = (1 - sig) o u + sig o v
      hk[i] = (1.0 - sk[i]) * rec.u[i] + sk[i] * rec.v[i];
    }
    hin = hk;
    cols = d;
  }

  const double* wl = th + params.off_wl();
  const Dual2* hl = rec.h.data() + (L - 1) * d;
  double nv = th[params.off_bl()], ndx = 0.0, ndy = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    nv += wl[i] * hl[i].v;
    ndx += wl[i] * hl[i].dx;
    ndy += wl[i] * hl[i].dy;
  }
  rec.N = {nv, ndx, ndy};
  rec.D = boundary_multiplier(Dual2::seed_x(x_bar), Dual2::seed_y(y_bar), lam);
  rec.A = rec.D * rec.N;
  return {rec.A.v, rec.A.dx, rec.A.dy};
}

void mvp_backward(const NetworkParams& params, ForwardRecord& rec,
                  const Adjoint& seed, diff::GradientAccumulator& grad) {
  const NetworkConfig& cfg = params.cfg;
  const std::size_t d = cfg.d, din = cfg.d0(), L = cfg.L;
  if (grad.size() != params.theta.size()) {
    throw ShapeMismatchError("mvp_backward: gradient buffer size mismatch");
  }
  const double* th = params.theta.data();
  double* gr = grad.data();

  // A = D * N; D carries no theta dependence.
  Adjoint nbar{}, dbar_unused{};
  diff::mul_backprop(rec.D, rec.N, seed, dbar_unused, nbar);

  auto& hbar = rec.hbar;
  auto& hbar_prev = rec.hbar_prev;
  auto& ubar = rec.ubar;
  auto& vbar = rec.vbar;
  auto& zbar = rec.zbar;
  hbar.assign(d, Adjoint{});
  hbar_prev.assign(d, Adjoint{});
  ubar.assign(d, Adjoint{});
  vbar.assign(d, Adjoint{});
  zbar.assign(d, Adjoint{});

  // Output layer.
  const Dual2* hl = rec.h.data() + (L - 1) * d;
  const double* wl = th + params.off_wl();
  double* wlbar = gr + params.off_wl();
  for (std::size_t i = 0; i < d; ++i) {
    wlbar[i] += nbar.v * hl[i].v + nbar.dx * hl[i].dx + nbar.dy * hl[i].dy;
    hbar[i] = {nbar.v * wl[i], nbar.dx * wl[i], nbar.dy * wl[i]};
  }
  gr[params.off_bl()] += nbar.v;

  for (std::size_t k = L; k-- > 0;) {
    const Dual2* sk = rec.sig.data() + k * d;
    const Dual2* zk = rec.z.data() + k * d;
    // h^(k+1) = (1 - s) o u + s o v
    for (std::size_t i = 0; i < d; ++i) {
      const Dual2 w = 1.0 - sk[i];
      Adjoint wbar{}, sbar{};
      diff::mul_backprop(w, rec.u[i], hbar[i], wbar, ubar[i]);
      diff::mul_backprop(sk[i], rec.v[i], hbar[i], sbar, vbar[i]);
      sbar.v -= wbar.v;
      sbar.dx -= wbar.dx;
      sbar.dy -= wbar.dy;
      zbar[i] = {};
      diff::silu_backprop(zk[i], sbar, zbar[i]);
    }
    if (k == 0) {
      matvec_backprop(th + params.off_w(0), rec.h0.data(), zbar.data(), d, din,
                      gr + params.off_w(0), gr + params.off_b(0), nullptr);
    } else {
      const Dual2* hk = rec.h.data() + (k - 1) * d;
      std::fill(hbar_prev.begin(), hbar_prev.end(), Adjoint{});
      matvec_backprop(th + params.off_w(k), hk, zbar.data(), d, d,
                      gr + params.off_w(k), gr + params.off_b(k),
                      hbar_prev.data());
      std::swap(hbar, hbar_prev);
    }
  }

  // Transformation layers, used by every gate.
  auto& zubar = rec.zubar;
  auto& zvbar = rec.zvbar;
  zubar.assign(d, Adjoint{});
  zvbar.assign(d, Adjoint{});
  for (std::size_t i = 0; i < d; ++i) {
    diff::silu_backprop(rec.zu[i], ubar[i], zubar[i]);
    diff::silu_backprop(rec.zv[i], vbar[i], zvbar[i]);
  }
  matvec_backprop(th + params.off_wu(), rec.h0.data(), zubar.data(), d, din,
                  gr + params.off_wu(), gr + params.off_bu(), nullptr);
  matvec_backprop(th + params.off_wv(), rec.h0.data(), zvbar.data(), d, din,
                  gr + params.off_wv(), gr + params.off_bv(), nullptr);
}

}  // namespace magpinn
