// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>

#include <doctest.h>

#include "magpinn/errors.hpp"
#include "magpinn/materials.hpp"
#include "magpinn/rng.hpp"

using namespace magpinn;

TEST_CASE("knot interpolation is exact") {
  const BHCurve bh = default_bh_curve();
  const ReluctivityModel m(bh);
  REQUIRE(bh.size() == 14);
  for (std::size_t i = 0; i < bh.size(); ++i) {
    const double s = bh.B[i] * bh.B[i];
    const double expect = bh.H[i] / bh.B[i];
    CHECK(m.nu(s) == doctest::Approx(expect).epsilon(4e-16));
  }
  CHECK(m.nu(0.7 * 0.7) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(m.nu(2.1 * 2.1) == doctest::Approx(31200.0).epsilon(1e-15));
}

TEST_CASE("below-range constant, above-range extrapolation, limit") {
  const ReluctivityModel m(default_bh_curve());
  CHECK(m.nu(0.25) == 100.0);  // B = 0.5 T < B_min
  CHECK(m.nu(0.0) == 100.0);
  // B = 3 T: (65520 + nu0 * 0.9) / 3.
  CHECK(m.nu(9.0) == doctest::Approx((65520.0 + kNu0 * 0.9) / 3.0)
                         .epsilon(1e-12));
  CHECK(m.nu(9.0) == doctest::Approx(260572.4).epsilon(1e-6));
  // nu -> nu0 as s -> infinity.
  CHECK(m.nu(1e12) == doctest::Approx(kNu0).epsilon(1e-4));
}

TEST_CASE("continuity at the range boundaries") {
  const ReluctivityModel m(default_bh_curve());
  const double eps = 1e-12;
  CHECK(m.nu(m.s_min() - eps) ==
        doctest::Approx(m.nu(m.s_min() + eps)).epsilon(1e-9));
  CHECK(m.nu(m.s_max() - eps) ==
        doctest::Approx(m.nu(m.s_max() + eps)).epsilon(1e-9));
}

TEST_CASE("monotone non-decreasing over dense samples") {
  const ReluctivityModel m(default_bh_curve());
  double prev = m.nu(0.0);
  for (int i = 1; i <= 100000; ++i) {
    const double s = 25.0 * i / 100000.0;
    const double v = m.nu(s);
    CHECK(v >= prev - 1e-12 * std::abs(prev));
    prev = v;
  }
}

TEST_CASE("constant synthetic curve gives linear-material energy") {
  // Two knots with equal nu -> spline constant, energy = nu*s/2 in range.
  BHCurve bh;
  bh.H = {100.0, 200.0};
  bh.B = {1.0, 2.0};
  const ReluctivityModel m(bh);
  for (double s : {0.0, 0.3, 1.0, 2.5, 4.0}) {
    CHECK(m.nu(std::min(s, 4.0)) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(m.energy(s) == doctest::Approx(0.5 * 100.0 * s).epsilon(1e-13));
  }
}

TEST_CASE("non-monotone data rejected") {
  BHCurve bh;
  bh.H = {100.0, 110.0};
  bh.B = {1.0, 2.0};  // nu drops from 100 to 55
  CHECK_THROWS_AS(ReluctivityModel{bh}, NonMonotoneDataError);
}

TEST_CASE("energy is C1 with derivative nu/2") {
  const ReluctivityModel m(default_bh_curve());
  CHECK(m.energy(0.0) == 0.0);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const double s = rng.uniform(1e-3, 16.0);
    const double h = 1e-6 * std::max(1.0, s);
    const double d = (m.energy(s + h) - m.energy(s - h)) / (2.0 * h);
    CHECK(d == doctest::Approx(0.5 * m.nu(s)).epsilon(1e-6));
  }
  // Strictly increasing.
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double e = m.energy(16.0 * i / 1000.0);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("scaled reluctivity stays in the documented band") {
  const ReluctivityModel m(default_bh_curve());
  const ScalingConstants c = default_constants();
  for (int i = 0; i <= 10000; ++i) {
    const double s = m.s_min() + (m.s_max() - m.s_min()) * i / 10000.0;
    const double nb = m.nu(s) / c.nu_star;
    CHECK(nb >= 0.05);
    CHECK(nb <= 100.0);
  }
}

TEST_CASE("curve file loading") {
  const char* path = "/tmp/magpinn_test_bh.txt";
  {
    FILE* f = fopen(path, "w");
    REQUIRE(f);
    fprintf(f, "# H B\n70 0.7\n110 1.0\n");
    fclose(f);
  }
  const BHCurve bh = load_bh_curve(path);
  REQUIRE(bh.size() == 2);
  CHECK(bh.H[0] == 70.0);
  CHECK(bh.B[1] == 1.0);
  remove(path);
}
