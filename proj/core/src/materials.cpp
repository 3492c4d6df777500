// SPDX-License-Identifier: Apache-2.0
#include "magpinn/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "magpinn/errors.hpp"

namespace magpinn {

BHCurve default_bh_curve() {
  // Table II steel characteristic, H converted from kA/m to A/m.
  BHCurve c;
  c.H = {70.0,   110.0,  170.0,  230.0,  370.0,   770.0,   1280.0,
         2100.0, 3250.0, 4720.0, 8720.0, 14880.0, 26020.0, 65520.0};
  c.B = {0.7, 1.0, 1.2, 1.3, 1.4, 1.5, 1.55, 1.6, 1.65, 1.7, 1.8, 1.9, 2.0, 2.1};
  return c;
}

BHCurve load_bh_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open B-H curve file: " + path);
  BHCurve c;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double h, b;
    if (ss >> h >> b) {
      c.H.push_back(h);
      c.B.push_back(b);
    }
  }
  if (c.size() < 2) throw Error("B-H curve needs at least two points: " + path);
  return c;
}

ReluctivityModel::ReluctivityModel(const BHCurve& curve, double nu0)
    : nu0_(nu0) {
  const std::size_t n = curve.size();
  if (n < 2 || curve.B.size() != n) {
    throw NonMonotoneDataError("B-H curve needs at least two (H,B) pairs");
  }
  s_.resize(n);
  nu_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (curve.B[i] <= curve.B[i - 1] || curve.H[i] <= curve.H[i - 1])) {
      throw NonMonotoneDataError("B-H data must be strictly increasing");
    }
    s_[i] = curve.B[i] * curve.B[i];
    nu_[i] = curve.H[i] / curve.B[i];
    if (i > 0 && nu_[i] < nu_[i - 1]) {
      throw NonMonotoneDataError("derived reluctivity knots decrease at index " +
                                 std::to_string(i));
    }
  }
  H_max_ = curve.H.back();
  B_max_ = curve.B.back();

  // Fritsch-Carlson limited tangents on (s_i, nu_i).
  const std::size_t m = n - 1;
  std::vector<double> ds(m), delta(m);
  for (std::size_t i = 0; i < m; ++i) {
    ds[i] = s_[i + 1] - s_[i];
    delta[i] = (nu_[i + 1] - nu_[i]) / ds[i];
  }
  tan_.assign(n, 0.0);
  tan_[0] = delta[0];
  tan_[n - 1] = delta[m - 1];
  for (std::size_t i = 1; i < m; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      tan_[i] = 0.0;
    } else {
      // Weighted harmonic mean keeps the interpolant monotone for
      // monotone data without further limiting in most cases.
      const double w1 = 2.0 * ds[i] + ds[i - 1];
      const double w2 = ds[i] + 2.0 * ds[i - 1];
      tan_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (delta[i] == 0.0) {
      tan_[i] = tan_[i + 1] = 0.0;
      continue;
    }
    const double a = tan_[i] / delta[i];
    const double b = tan_[i + 1] / delta[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      tan_[i] = t * a * delta[i];
      tan_[i + 1] = t * b * delta[i];
    }
  }

  // Cubic coefficients in t = (s - s_i)/ds_i:
  //   nu(t) = c0 + c1 t + c2 t^2 + c3 t^3.
  coef_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double y0 = nu_[i], y1 = nu_[i + 1];
    const double m0 = tan_[i] * ds[i], m1 = tan_[i + 1] * ds[i];
    coef_[i] = {y0, m0, -3.0 * y0 + 3.0 * y1 - 2.0 * m0 - m1,
                2.0 * y0 - 2.0 * y1 + m0 + m1};
  }

  // Accumulated antiderivative offsets so energy is C^1 on [0, inf).
  energy_at_knot_.resize(n);
  energy_at_knot_[0] = 0.5 * nu_[0] * s_[0];  // constant region below s_min
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = coef_[i];
    const double seg =
        0.5 * ds[i] * (c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0);
    energy_at_knot_[i + 1] = energy_at_knot_[i] + seg;
  }
  energy_end_ = energy_at_knot_.back();
}

std::size_t ReluctivityModel::segment_of(double s) const {
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t idx = static_cast<std::size_t>(it - s_.begin());
  return std::min(std::max<std::size_t>(idx, 1) - 1, s_.size() - 2);
}

double ReluctivityModel::nu(double s) const {
  if (s <= s_.front()) return nu_.front();
  if (s >= s_.back()) {
    const double b = std::sqrt(s);
    return (H_max_ + nu0_ * (b - B_max_)) / b;
  }
  const std::size_t i = segment_of(s);
  const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
  const auto& c = coef_[i];
  return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double ReluctivityModel::dnu_ds(double s) const {
  if (s <= s_.front()) return 0.0;
  if (s >= s_.back()) {
    // d/ds [ (H_max - nu0 B_max)/sqrt(s) + nu0 ]
    return -0.5 * (H_max_ - nu0_ * B_max_) / (s * std::sqrt(s));
  }
  const std::size_t i = segment_of(s);
  const double ds = s_[i + 1] - s_[i];
  const double t = (s - s_[i]) / ds;
  const auto& c = coef_[i];
  return (c[1] + t * (2.0 * c[2] + t * 3.0 * c[3])) / ds;
}

double ReluctivityModel::energy(double s) const {
  if (s <= s_.front()) return 0.5 * nu_.front() * s;
  if (s >= s_.back()) {
    const double b = std::sqrt(s);
    return energy_end_ + 0.5 * (2.0 * (H_max_ - nu0_ * B_max_) * (b - B_max_) +
                                nu0_ * (s - s_.back()));
  }
  const std::size_t i = segment_of(s);
  const double ds = s_[i + 1] - s_[i];
  const double t = (s - s_[i]) / ds;
  const auto& c = coef_[i];
  const double integral =
      t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
  return energy_at_knot_[i] + 0.5 * ds * integral;
}

ReluctivityModel build_reluctivity(const BHCurve& curve, double nu0) {
  return ReluctivityModel(curve, nu0);
}

}  // namespace magpinn
