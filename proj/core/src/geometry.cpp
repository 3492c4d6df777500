// SPDX-License-Identifier: Apache-2.0
#include "magpinn/geometry.hpp"

#include <string>

#include "magpinn/errors.hpp"

namespace magpinn {

DeviceLayout build_layout(const DeviceParams& xi) {
  DeviceLayout l{};
  l.W_dev = 0.5 * xi.w_c + xi.w_w + xi.c_w + xi.w_e;
  l.L_x = kMarginX + l.W_dev;
  l.L_y = 2.0 * kMarginY + xi.w_i + xi.g + xi.d_w + xi.c_d + xi.w_b;

  const double y_base_lo = kMarginY;
  const double y_base_hi = y_base_lo + xi.w_b;
  const double y_leg_hi = y_base_hi + xi.d_w + xi.c_d;
  const double y_icore_lo = y_leg_hi + xi.g;

  l.e_base = {0.0, l.W_dev, y_base_lo, y_base_hi};
  l.e_center_leg = {0.0, 0.5 * xi.w_c, y_base_hi, y_leg_hi};
  l.e_end_leg = {0.5 * xi.w_c + xi.w_w + xi.c_w, l.W_dev, y_base_hi, y_leg_hi};
  l.winding = {0.5 * xi.w_c, 0.5 * xi.w_c + xi.w_w, y_base_hi,
               y_base_hi + xi.d_w};
  l.i_core = {0.0, l.W_dev, y_icore_lo, y_icore_lo + xi.w_i};
  l.gap_band = {0.0, l.W_dev, y_leg_hi, y_icore_lo};
  return l;
}

Region classify(const DeviceLayout& layout, const Point& p) {
  if (!layout.in_domain(p)) {
    throw OutsideDomainError("point (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + ") outside domain");
  }
  if (layout.e_base.contains(p) || layout.e_center_leg.contains(p) ||
      layout.e_end_leg.contains(p) || layout.i_core.contains(p)) {
    return Region::Core;
  }
  if (layout.winding.contains(p)) return Region::Winding;
  return Region::Air;
}

double current_density(const DeviceLayout& layout, const DeviceParams& xi,
                       const Point& p) {
  return classify(layout, p) == Region::Winding ? xi.f_c / (xi.w_w * xi.d_w)
                                                : 0.0;
}

std::vector<Point> sample_points(const DeviceLayout& layout, std::size_t n,
                                 Rng& rng) {
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform() * layout.L_x;
    p.y = rng.uniform() * layout.L_y;
  }
  return pts;
}

}  // namespace magpinn
