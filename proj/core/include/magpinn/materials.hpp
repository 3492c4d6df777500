// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "magpinn/scaling.hpp"

namespace magpinn {

// Ordered B-H samples of the core steel.  Knots for the reluctivity
// interpolator are derived as s_i = B_i^2, nu_i = H_i / B_i.
struct BHCurve {
  std::vector<double> H;  // A/m, strictly increasing
  std::vector<double> B;  // T, strictly increasing

  std::size_t size() const { return H.size(); }
};

// The Table II steel characteristic.
BHCurve default_bh_curve();

// Two columns (H [A/m], B [T]) per line, '#' comments.
BHCurve load_bh_curve(const std::string& path);

// Field-dependent reluctivity nu(s) of the steel, s = B^2, built as a
// monotone (Fritsch-Carlson) cubic Hermite spline over the derived knots,
// constant below the data range and extrapolated with slope 1/nu0 in B
// above it.  The energy density is the exact piecewise antiderivative,
// accumulated so it is C^1 on [0, inf).
class ReluctivityModel {
 public:
  explicit ReluctivityModel(const BHCurve& curve, double nu0 = kNu0);

  // Reluctivity [m/H] at squared flux density s [T^2].  Total on s >= 0.
  double nu(double s) const;

  // One-sided spline derivative d(nu)/ds; used by the FE Newton tangent.
  double dnu_ds(double s) const;

  // w(s) = 1/2 * integral_0^s nu(b^2) d(b^2)  [J/m^3].
  double energy(double s) const;

  // Scaled counterparts used by the training loss: nu_bar(s_bar) =
  // nu((B* )^2 s_bar)/nu* and w_bar = energy((B*)^2 s_bar)/(nu* (B*)^2).
  double nu_scaled(double s_bar, const ScalingConstants& c) const {
    return nu(c.B_star * c.B_star * s_bar) / c.nu_star;
  }
  double energy_scaled(double s_bar, const ScalingConstants& c) const {
    return energy(c.B_star * c.B_star * s_bar) / (c.nu_star * c.B_star * c.B_star);
  }

  double nu0() const { return nu0_; }
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  double nu_low() const { return nu_.front(); }

 private:
  std::size_t segment_of(double s) const;

  std::vector<double> s_;    // knot abscissae, B_i^2
  std::vector<double> nu_;   // knot reluctivities, H_i/B_i
  std::vector<double> tan_;  // limited Hermite tangents
  // Per-segment cubic coefficients in the local variable t = (s-s_i)/ds_i.
  std::vector<std::array<double, 4>> coef_;
  std::vector<double> energy_at_knot_;  // accumulated antiderivative offsets
  double nu0_;
  double H_max_;
  double B_max_;
  double energy_end_;  // energy at s_max
};

ReluctivityModel build_reluctivity(const BHCurve& curve, double nu0 = kNu0);

}  // namespace magpinn
