// SPDX-License-Identifier: Apache-2.0
#include "magpinn/scaling.hpp"

#include <cmath>
#include <string>

#include "magpinn/errors.hpp"

namespace magpinn {

namespace {
constexpr std::string_view kParamNames[kNumParams] = {
    "w_c", "w_e", "w_i", "w_b", "w_w", "d_w", "c_d", "c_w", "g", "f_c"};
}

std::string_view param_name(std::size_t i) { return kParamNames[i]; }

ScalingConstants default_constants() {
  ScalingConstants c{};
  c.x_star = 0.11;
  c.A_star = 12.1e-3;
  c.J_star = 5000.0 / 3.14159265358979323846;
  c.nu_star = c.x_star * c.x_star * c.J_star / c.A_star;
  c.B_star = c.A_star / c.x_star;
  // Table I ranges, converted to SI (cm and mm entries -> m).
  c.xi_min = {0.010, 0.005, 0.005, 0.005, 0.00945, 0.0378,
              0.001, 0.001, 0.001, 2400.0};
  c.xi_max = {0.030, 0.015, 0.015, 0.015, 0.021, 0.063,
              0.003, 0.003, 0.005, 6600.0};
  return c;
}

ParamVector normalize_params_unchecked(const DeviceParams& xi,
                                       const ScalingConstants& c) {
  const ParamVector v = xi.to_vector();
  ParamVector out{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    out[i] = (v[i] - c.xi_min[i]) / (c.xi_max[i] - c.xi_min[i]);
  }
  return out;
}

ParamVector normalize_params(const DeviceParams& xi, const ScalingConstants& c,
                             double tol) {
  const ParamVector v = xi.to_vector();
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (v[i] < c.xi_min[i] - tol || v[i] > c.xi_max[i] + tol) {
      throw OutOfBoxError("parameter " + std::string(kParamNames[i]) + " = " +
                          std::to_string(v[i]) + " outside [" +
                          std::to_string(c.xi_min[i]) + ", " +
                          std::to_string(c.xi_max[i]) + "]");
    }
  }
  return normalize_params_unchecked(xi, c);
}

DeviceParams box_midpoint(const ScalingConstants& c) {
  ParamVector v{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    v[i] = 0.5 * (c.xi_min[i] + c.xi_max[i]);
  }
  return DeviceParams::from_vector(v);
}

DeviceParams denormalize_params(const ParamVector& xi_bar,
                                const ScalingConstants& c) {
  ParamVector v{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    v[i] = c.xi_min[i] + xi_bar[i] * (c.xi_max[i] - c.xi_min[i]);
  }
  return DeviceParams::from_vector(v);
}

}  // namespace magpinn
