// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <doctest.h>

#include "magpinn/errors.hpp"
#include "magpinn/rng.hpp"
#include "magpinn/scaling.hpp"

using namespace magpinn;

TEST_CASE("default constants") {
  const ScalingConstants c = default_constants();
  CHECK(c.x_star == 0.11);
  CHECK(c.A_star == 12.1e-3);
  CHECK(c.J_star == 5000.0 / 3.14159265358979323846);
  CHECK(c.B_star == c.A_star / c.x_star);
  CHECK(c.B_star == doctest::Approx(0.11).epsilon(1e-15));
  CHECK(c.nu_star == doctest::Approx(1591.549).epsilon(1e-6));
  // nu* = (x*)^2 J* / A* holds to machine precision.
  CHECK(c.nu_star == c.x_star * c.x_star * c.J_star / c.A_star);
  CHECK(c.nu_star * c.A_star / (c.x_star * c.x_star * c.J_star) == 1.0);
  CHECK(c.nu_star == doctest::Approx(kNu0 / 500.0).epsilon(1e-15));
  for (std::size_t i = 0; i < kNumParams; ++i) {
    CHECK(c.xi_min[i] < c.xi_max[i]);
  }
}

TEST_CASE("point/mvp/current scaling are exact inverse pairs") {
  const ScalingConstants c = default_constants();
  CHECK(c.scale_point(0.11) == 1.0);
  CHECK(c.scale_mvp(0.0) == 0.0);
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-10.0, 10.0);
    CHECK(c.unscale_point(c.scale_point(v)) ==
          doctest::Approx(v).epsilon(1e-15));
    CHECK(c.unscale_mvp(c.scale_mvp(v)) == doctest::Approx(v).epsilon(1e-15));
    CHECK(c.unscale_current(c.scale_current(v)) ==
          doctest::Approx(v).epsilon(1e-15));
  }
  // Powers of two round-trip bit-for-bit.
  CHECK(c.unscale_point(c.scale_point(0.25)) == 0.25);
  CHECK(c.unscale_mvp(c.scale_mvp(2.0)) == 2.0);
}

TEST_CASE("normalize_params endpoints and a hand value") {
  const ScalingConstants c = default_constants();
  const ParamVector lo = normalize_params(DeviceParams::from_vector(c.xi_min), c);
  const ParamVector hi = normalize_params(DeviceParams::from_vector(c.xi_max), c);
  for (std::size_t i = 0; i < kNumParams; ++i) {
    CHECK(lo[i] == 0.0);
    CHECK(hi[i] == 1.0);
  }
  // g = 3 mm in [1, 5] mm -> 0.5.
  DeviceParams mid = box_midpoint(c);
  mid.g = 3e-3;
  CHECK(normalize_params(mid, c)[8] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("normalize_params is strict; unchecked bypass exists") {
  const ScalingConstants c = default_constants();
  DeviceParams xi = box_midpoint(c);
  xi.g = c.xi_max[8] + 1e-4;
  CHECK_THROWS_AS(normalize_params(xi, c), OutOfBoxError);
  // The error names the offending component.
  try {
    normalize_params(xi, c);
  } catch (const OutOfBoxError& e) {
    CHECK(std::string(e.what()).find("g") != std::string::npos);
  }
  CHECK_NOTHROW(normalize_params_unchecked(xi, c));
  // A tolerance admits the same point.
  CHECK_NOTHROW(normalize_params(xi, c, 1e-3));
}

TEST_CASE("normalize/denormalize round-trip on random vectors") {
  const ScalingConstants c = default_constants();
  Rng rng(11);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    ParamVector v;
    for (std::size_t i = 0; i < kNumParams; ++i) {
      v[i] = c.xi_min[i] + rng.uniform() * (c.xi_max[i] - c.xi_min[i]);
    }
    const DeviceParams xi = DeviceParams::from_vector(v);
    const DeviceParams back =
        denormalize_params(normalize_params(xi, c, 1e-12), c);
    const ParamVector b = back.to_vector();
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const double rel = std::abs(b[i] - v[i]) / std::abs(v[i]);
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 4.0 * 2.220446049250313e-16);  // <= 4 ulp
}

TEST_CASE("ParamSpace expand/restrict round-trip and freeze mask") {
  const ScalingConstants c = default_constants();
  ParamSpace ps = ParamSpace::all_fixed(box_midpoint(c));
  ps.is_fixed[8] = false;  // g free
  ps.is_fixed[9] = false;  // f_c free
  CHECK(ps.n_free() == 2);
  const double free_scaled[2] = {0.25, 0.75};
  const DeviceParams xi = ps.expand(free_scaled, c);
  CHECK(xi.g == doctest::Approx(c.xi_min[8] + 0.25 * (c.xi_max[8] - c.xi_min[8])));
  CHECK(xi.w_c == box_midpoint(c).w_c);
  const auto back = ps.restrict(xi, c);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(back[1] == doctest::Approx(0.75).epsilon(1e-14));
}
