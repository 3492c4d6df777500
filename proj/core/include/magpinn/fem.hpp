// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "magpinn/geometry.hpp"
#include "magpinn/materials.hpp"

namespace magpinn {

// Structured conforming triangulation of [0,Lx] x [0,Ly]: grid lines
// include every material-rectangle edge, cells are split along the same
// diagonal, and each triangle lies in exactly one region.
struct Mesh {
  std::vector<double> xs;  // grid lines, ascending, xs.front()==0
  std::vector<double> ys;
  std::vector<Point> nodes;                  // (nx+1)*(ny+1), row-major by y
  std::vector<std::array<int, 3>> tris;      // CCW node triples
  std::vector<Region> tri_region;
  std::vector<double> tri_area;
  std::vector<std::uint8_t> node_boundary;   // 1 on the outer rectangle

  std::size_t nx() const { return xs.size() - 1; }
  std::size_t ny() const { return ys.size() - 1; }
  std::size_t n_nodes() const { return nodes.size(); }
  std::size_t n_tris() const { return tris.size(); }
  int node_index(std::size_t i, std::size_t j) const {
    return static_cast<int>(j * xs.size() + i);
  }
};

// General form: explicit domain lengths, conforming breaklines, and a
// centroid classifier.
Mesh build_mesh(double L_x, double L_y, std::vector<double> breaklines_x,
                std::vector<double> breaklines_y, double max_area,
                const std::function<Region(const Point&)>& region_of);

// EI-core layout convenience wrapper.
Mesh build_mesh(const DeviceLayout& layout, double max_area);

// Per-region material and source description of the boundary value
// problem; s is the squared flux density.
struct FemProblem {
  std::function<double(Region, double)> nu;
  std::function<double(Region, double)> dnu_ds;
  std::function<double(Region)> current;
};

// The standard nonlinear EI-core problem: spline steel in the core,
// nu0 elsewhere, f_c/(w_w d_w) in the winding.
FemProblem make_fem_problem(const ReluctivityModel& materials,
                            const DeviceParams& xi);

struct FemSettings {
  double max_area = 0.25e-6;  // m^2; tighten to ~0.04e-6 for reference runs
  double tol = 1e-8;          // nonlinear residual, relative to the source
  std::size_t max_newton = 50;
  double cg_tol = 1e-10;
};

struct ConvergenceReport {
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

struct FemSolution {
  Mesh mesh;
  std::vector<double> A;  // nodal potentials [Wb/m]
  ConvergenceReport report;
};

// Galerkin P1 discretization of div(nu grad A) = -J with A = 0 on the
// boundary; damped Newton with the consistent tangent, inner solves by
// Jacobi-preconditioned CG.  Throws NonConvergenceError when max_newton
// is exhausted (residual history attached to the message).
FemSolution solve(Mesh mesh, const FemProblem& problem,
                  const FemSettings& settings = {});

struct FemEval {
  double A;
  double Bx;  //  dA/dy
  double By;  // -dA/dx
};

// Barycentric interpolation in the containing triangle; B is constant
// per element.
FemEval evaluate(const FemSolution& sol, const Point& p);

// Index of the triangle containing p (structured-grid arithmetic plus
// the diagonal test).
std::size_t locate_triangle(const Mesh& mesh, const Point& p);

// Step-scale replay of the damping rule over a residual-norm history:
// halve on increase (floor 1/16), full step again after two successive
// decreases.
double newton_damping(const std::vector<double>& residual_history);

// CSV exports (nodes: id,x,y,boundary; triangles: n1,n2,n3,region;
// solution: node_id,A).
void write_mesh_csv(const Mesh& mesh, const std::string& nodes_path,
                    const std::string& tris_path);
void write_solution_csv(const FemSolution& sol, const std::string& path);

}  // namespace magpinn
