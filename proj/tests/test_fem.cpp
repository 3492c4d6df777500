// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <doctest.h>

#include "magpinn/errors.hpp"
#include "magpinn/fem.hpp"
#include "magpinn/materials.hpp"

using namespace magpinn;

namespace {

DeviceParams example_design() {
  DeviceParams xi{};
  xi.w_c = 0.02;
  xi.w_e = 0.01;
  xi.w_i = 0.01;
  xi.w_b = 0.01;
  xi.w_w = 0.015;
  xi.d_w = 0.05;
  xi.c_d = 2e-3;
  xi.c_w = 2e-3;
  xi.g = 3e-3;
  xi.f_c = 4500.0;
  return xi;
}

Mesh unit_square(double max_area) {
  return build_mesh(1.0, 1.0, {}, {}, max_area,
                    [](const Point&) { return Region::Air; });
}

FemProblem poisson_problem(double nu, double j) {
  FemProblem p;
  p.nu = [nu](Region, double) { return nu; };
  p.dnu_ds = [](Region, double) { return 0.0; };
  p.current = [j](Region) { return j; };
  return p;
}

// Series solution of -nu lap(A) = J on the unit square, A=0 boundary.
double poisson_center_exact() {
  double sum = 0.0;
  for (int m = 1; m < 400; m += 2) {
    for (int n = 1; n < 400; n += 2) {
      // sin(m pi/2) sin(n pi/2) = (-1)^((m+n)/2 - 1) for odd m, n.
      const double sgn = (((m + n) / 2) % 2 == 1) ? 1.0 : -1.0;
      sum += sgn * 16.0 /
             (std::pow(3.14159265358979323846, 4.0) * m * n *
              (static_cast<double>(m) * m + static_cast<double>(n) * n));
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("structured mesh counts on the unit square") {
  const Mesh mesh = unit_square(0.125);
  CHECK(mesh.nx() == 2);
  CHECK(mesh.ny() == 2);
  CHECK(mesh.n_nodes() == 9);
  CHECK(mesh.n_tris() == 8);
  double area = 0.0;
  for (double a : mesh.tri_area) {
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("device mesh conforms to the winding rectangle") {
  const DeviceParams xi = example_design();
  const DeviceLayout layout = build_layout(xi);
  const Mesh mesh = build_mesh(layout, 1e-6);
  double total = 0.0, winding = 0.0, core = 0.0;
  for (std::size_t e = 0; e < mesh.n_tris(); ++e) {
    total += mesh.tri_area[e];
    if (mesh.tri_region[e] == Region::Winding) winding += mesh.tri_area[e];
    if (mesh.tri_region[e] == Region::Core) core += mesh.tri_area[e];
  }
  CHECK(total == doctest::Approx(layout.L_x * layout.L_y).epsilon(1e-12));
  CHECK(winding == doctest::Approx(xi.w_w * xi.d_w).epsilon(1e-12));
  const double core_expect =
      layout.e_base.width() * layout.e_base.height() +
      layout.e_center_leg.width() * layout.e_center_leg.height() +
      layout.e_end_leg.width() * layout.e_end_leg.height() +
      layout.i_core.width() * layout.i_core.height();
  CHECK(core == doctest::Approx(core_expect).epsilon(1e-12));
}

TEST_CASE("boundary nodes flagged exactly on the outer rectangle") {
  const Mesh mesh = unit_square(0.02);
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) {
    const Point& p = mesh.nodes[n];
    const bool on_edge =
        p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0;
    CHECK(static_cast<bool>(mesh.node_boundary[n]) == on_edge);
  }
}

TEST_CASE("zero source gives the zero solution in one iteration") {
  const Mesh mesh = unit_square(0.01);
  const FemSolution sol = solve(mesh, poisson_problem(1.0, 0.0));
  for (double a : sol.A) CHECK(a == 0.0);
  CHECK(sol.report.iterations == 1);
}

TEST_CASE("unit-square Poisson center value and convergence order") {
  const double exact = poisson_center_exact();
  CHECK(exact == doctest::Approx(0.0736713).epsilon(1e-5));

  std::vector<double> errors;
  for (int cells : {16, 32, 64}) {
    const double h = 1.0 / cells;
    const Mesh mesh = unit_square(0.5 * h * h);
    CHECK(mesh.nx() == static_cast<std::size_t>(cells));
    const FemSolution sol = solve(mesh, poisson_problem(2.0, 3.0));
    const double center = evaluate(sol, {0.5, 0.5}).A;
    errors.push_back(std::abs(center - exact * 3.0 / 2.0));
  }
  // 0.5% at 1/64 and >= 3.5x reduction per halving.
  CHECK(errors[2] <= 0.005 * exact * 3.0 / 2.0);
  CHECK(errors[0] / errors[1] >= 3.5);
  CHECK(errors[1] / errors[2] >= 3.5);
}

TEST_CASE("evaluate: nodal exactness and constant element B") {
  const Mesh mesh = unit_square(0.02);
  FemSolution sol;
  sol.mesh = mesh;
  sol.A.resize(mesh.n_nodes());
  // Impose the linear field A = 2x - 3y.
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) {
    sol.A[n] = 2.0 * mesh.nodes[n].x - 3.0 * mesh.nodes[n].y;
  }
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) {
    const Point p = mesh.nodes[n];
    if (p.x == 1.0 || p.y == 1.0) continue;  // half-open edge lookup
    CHECK(evaluate(sol, p).A == doctest::Approx(sol.A[n]).epsilon(1e-12));
  }
  const FemEval e = evaluate(sol, {0.37, 0.61});
  CHECK(e.Bx == doctest::Approx(-3.0).epsilon(1e-12));  // dA/dy
  CHECK(e.By == doctest::Approx(-2.0).epsilon(1e-12));  // -dA/dx
}

TEST_CASE("nonlinear device solve converges") {
  const DeviceParams xi = example_design();
  const Mesh mesh = build_mesh(build_layout(xi), 2e-6);
  const ReluctivityModel materials(default_bh_curve());
  const FemSolution sol = solve(mesh, make_fem_problem(materials, xi));
  CHECK(sol.report.converged);
  // Boundary values pinned to zero.
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) {
    if (mesh.node_boundary[n]) CHECK(sol.A[n] == 0.0);
  }
  // The field is nontrivial.
  double amax = 0.0;
  for (double a : sol.A) amax = std::max(amax, std::abs(a));
  CHECK(amax > 1e-4);
}

TEST_CASE("newton damping replay rules") {
  CHECK(newton_damping({1.0, 0.5, 0.25}) == 1.0);
  CHECK(newton_damping({1.0, 2.0}) == 0.5);
  CHECK(newton_damping({1.0, 2.0, 4.0, 8.0, 16.0}) == 1.0 / 16.0);
  CHECK(newton_damping({1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) == 1.0 / 16.0);
}

TEST_CASE("non-convergence carries the residual history") {
  const DeviceParams xi = example_design();
  const Mesh mesh = build_mesh(build_layout(xi), 1e-5);
  const ReluctivityModel materials(default_bh_curve());
  FemSettings settings;
  settings.max_newton = 1;
  settings.tol = 1e-14;
  CHECK_THROWS_AS(solve(mesh, make_fem_problem(materials, xi), settings),
                  NonConvergenceError);
}
