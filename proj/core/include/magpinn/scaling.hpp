// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace magpinn {

inline constexpr double kNu0 = 1e7 / (4.0 * 3.14159265358979323846);  // m/H
inline constexpr std::size_t kNumParams = 10;

using ParamVector = std::array<double, kNumParams>;

// Design vector of the EI-core electromagnet, SI units throughout
// (lengths in m, magnetomotive force in A-turns).
struct DeviceParams {
  double w_c;  // E-core central leg width
  double w_e;  // E-core end leg width
  double w_i;  // I-core width
  double w_b;  // E-core base width
  double w_w;  // winding width
  double d_w;  // winding depth
  double c_d;  // winding depth clearance
  double c_w;  // winding width clearance
  double g;    // air gap
  double f_c;  // magnetomotive force

  ParamVector to_vector() const {
    return {w_c, w_e, w_i, w_b, w_w, d_w, c_d, c_w, g, f_c};
  }
  static DeviceParams from_vector(const ParamVector& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
  }
};

// Component names in the canonical ordering of ParamVector.
std::string_view param_name(std::size_t i);

// Nondimensionalization constants plus the admissible design box.
// Immutable after construction; shared freely across threads.
struct ScalingConstants {
  double x_star;   // length scale [m]
  double A_star;   // vector potential scale [Wb/m]
  double J_star;   // current density scale [A/m^2]
  double nu_star;  // reluctivity scale, (x*)^2 J* / A* [m/H]
  double B_star;   // flux density scale, A*/x* [T]
  ParamVector xi_min;
  ParamVector xi_max;

  double scale_point(double x) const { return x / x_star; }
  double unscale_point(double xb) const { return xb * x_star; }
  double scale_mvp(double a) const { return a / A_star; }
  double unscale_mvp(double ab) const { return ab * A_star; }
  double scale_current(double j) const { return j / J_star; }
  double unscale_current(double jb) const { return jb * J_star; }
};

// Constants used throughout the study: x* = 0.11 m, A* = 12.1 mWb/m,
// J* = 5000/pi A/m^2, nu* = nu0/500, B* = A*/x*, and the Table I box.
ScalingConstants default_constants();

// Component-wise map of the design box onto [0,1]^10.  Strict by default:
// any component outside its range (beyond `tol`) raises OutOfBoxError
// naming the component.
ParamVector normalize_params(const DeviceParams& xi, const ScalingConstants& c,
                             double tol = 0.0);

// Unchecked variant for tests and deliberate extrapolation.
ParamVector normalize_params_unchecked(const DeviceParams& xi,
                                       const ScalingConstants& c);

// Exact inverse of normalize_params.
DeviceParams denormalize_params(const ParamVector& xi_bar,
                                const ScalingConstants& c);

// Which design components vary during training and which are frozen.
// The network sees only the free components (scaled), in canonical order.
struct ParamSpace {
  std::array<bool, kNumParams> is_fixed{};
  ParamVector fixed_value{};  // physical value where is_fixed

  std::size_t n_free() const {
    std::size_t n = 0;
    for (bool f : is_fixed) n += f ? 0 : 1;
    return n;
  }

  // Full physical design from the free scaled components.
  DeviceParams expand(const double* free_scaled,
                      const ScalingConstants& c) const {
    ParamVector v{};
    std::size_t j = 0;
    for (std::size_t i = 0; i < kNumParams; ++i) {
      v[i] = is_fixed[i] ? fixed_value[i]
                         : c.xi_min[i] +
                               free_scaled[j++] * (c.xi_max[i] - c.xi_min[i]);
    }
    return DeviceParams::from_vector(v);
  }

  // Free scaled components of a full physical design.
  std::vector<double> restrict(const DeviceParams& xi,
                               const ScalingConstants& c) const {
    const ParamVector v = xi.to_vector();
    std::vector<double> out;
    out.reserve(n_free());
    for (std::size_t i = 0; i < kNumParams; ++i) {
      if (!is_fixed[i]) {
        out.push_back((v[i] - c.xi_min[i]) / (c.xi_max[i] - c.xi_min[i]));
      }
    }
    return out;
  }

  // Everything frozen at the given design.
  static ParamSpace all_fixed(const DeviceParams& xi) {
    ParamSpace ps;
    ps.is_fixed.fill(true);
    ps.fixed_value = xi.to_vector();
    return ps;
  }

  static ParamSpace all_free() { return ParamSpace{}; }
};

// Midpoint of the design box.
DeviceParams box_midpoint(const ScalingConstants& c);

}  // namespace magpinn
