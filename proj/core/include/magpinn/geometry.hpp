// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "magpinn/rng.hpp"
#include "magpinn/scaling.hpp"

namespace magpinn {

struct Point {
  double x;
  double y;
};

struct Rect {
  double x_lo, x_hi, y_lo, y_hi;

  // Half-open membership so interface points classify deterministically.
  bool contains(const Point& p) const {
    return p.x >= x_lo && p.x < x_hi && p.y >= y_lo && p.y < y_hi;
  }
  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
};

enum class Region { Core, Winding, Air };

// Fixed margins between the device and the outer boundary.
inline constexpr double kMarginX = 5e-3;
inline constexpr double kMarginY = 5e-3;

// Half-symmetry EI-core layout: x measured from the symmetry axis,
// y from the bottom boundary.  Immutable.
struct DeviceLayout {
  double L_x;
  double L_y;
  double W_dev;       // 0.5 w_c + w_w + c_w + w_e
  Rect e_base;
  Rect e_center_leg;  // half-leg on the symmetry axis
  Rect e_end_leg;
  Rect winding;
  Rect i_core;
  Rect gap_band;      // air band between the legs and the I-core

  bool in_domain(const Point& p) const {
    return p.x >= 0.0 && p.x <= L_x && p.y >= 0.0 && p.y <= L_y;
  }
};

DeviceLayout build_layout(const DeviceParams& xi);

// Total on the closed domain; throws OutsideDomainError elsewhere.
Region classify(const DeviceLayout& layout, const Point& p);

// f_c / (w_w d_w) inside the winding, zero elsewhere.
double current_density(const DeviceLayout& layout, const DeviceParams& xi,
                       const Point& p);

// n i.i.d. uniform points on [0,L_x] x [0,L_y].
std::vector<Point> sample_points(const DeviceLayout& layout, std::size_t n,
                                 Rng& rng);

}  // namespace magpinn
