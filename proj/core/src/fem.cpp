// SPDX-License-Identifier: Apache-2.0
#include "magpinn/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "magpinn/errors.hpp"

namespace magpinn {

namespace {

// Merge breaklines, drop duplicates, then split every interval so the
// worst cell satisfies dx*dy/2 <= max_area.
std::vector<double> refine_axis(std::vector<double> lines, double h) {
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end(),
                          [](double a, double b) {
                            return std::abs(a - b) < 1e-12;
                          }),
              lines.end());
  std::vector<double> out;
  out.push_back(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double lo = lines[i - 1], hi = lines[i];
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-12));
    for (std::size_t k = 1; k < n; ++k) {
      out.push_back(lo + (hi - lo) * static_cast<double>(k) /
                             static_cast<double>(n));
    }
    out.push_back(hi);
  }
  return out;
}

}  // namespace

Mesh build_mesh(double L_x, double L_y, std::vector<double> breaklines_x,
                std::vector<double> breaklines_y, double max_area,
                const std::function<Region(const Point&)>& region_of) {
  const double h = std::sqrt(2.0 * max_area);
  breaklines_x.push_back(0.0);
  breaklines_x.push_back(L_x);
  breaklines_y.push_back(0.0);
  breaklines_y.push_back(L_y);

  Mesh mesh;
  mesh.xs = refine_axis(std::move(breaklines_x), h);
  mesh.ys = refine_axis(std::move(breaklines_y), h);
  const std::size_t nx = mesh.nx(), ny = mesh.ny();

  mesh.nodes.reserve((nx + 1) * (ny + 1));
  mesh.node_boundary.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({mesh.xs[i], mesh.ys[j]});
      mesh.node_boundary.push_back(i == 0 || i == nx || j == 0 || j == ny);
    }
  }

  mesh.tris.reserve(2 * nx * ny);
  mesh.tri_region.reserve(2 * nx * ny);
  mesh.tri_area.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int n00 = mesh.node_index(i, j);
      const int n10 = mesh.node_index(i + 1, j);
      const int n01 = mesh.node_index(i, j + 1);
      const int n11 = mesh.node_index(i + 1, j + 1);
      const double area =
          0.5 * (mesh.xs[i + 1] - mesh.xs[i]) * (mesh.ys[j + 1] - mesh.ys[j]);
      // Same diagonal (n00 -> n11) in every cell.
      for (const auto& tri :
           {std::array<int, 3>{n00, n10, n11}, std::array<int, 3>{n00, n11, n01}}) {
        mesh.tris.push_back(tri);
        mesh.tri_area.push_back(area);
        const Point centroid{(mesh.nodes[tri[0]].x + mesh.nodes[tri[1]].x +
                              mesh.nodes[tri[2]].x) /
                                 3.0,
                             (mesh.nodes[tri[0]].y + mesh.nodes[tri[1]].y +
                              mesh.nodes[tri[2]].y) /
                                 3.0};
        mesh.tri_region.push_back(region_of(centroid));
      }
    }
  }
  return mesh;
}

Mesh build_mesh(const DeviceLayout& layout, double max_area) {
  std::vector<double> bx, by;
  for (const Rect* r : {&layout.e_base, &layout.e_center_leg, &layout.e_end_leg,
                        &layout.winding, &layout.i_core}) {
    bx.push_back(r->x_lo);
    bx.push_back(r->x_hi);
    by.push_back(r->y_lo);
    by.push_back(r->y_hi);
  }
  return build_mesh(layout.L_x, layout.L_y, std::move(bx), std::move(by),
                    max_area,
                    [&layout](const Point& p) { return classify(layout, p); });
}

FemProblem make_fem_problem(const ReluctivityModel& materials,
                            const DeviceParams& xi) {
  const double nu0 = materials.nu0();
  const double j_w = xi.f_c / (xi.w_w * xi.d_w);
  FemProblem p;
  p.nu = [&materials, nu0](Region r, double s) {
    return r == Region::Core ? materials.nu(s) : nu0;
  };
  p.dnu_ds = [&materials](Region r, double s) {
    return r == Region::Core ? materials.dnu_ds(s) : 0.0;
  };
  p.current = [j_w](Region r) { return r == Region::Winding ? j_w : 0.0; };
  return p;
}

double newton_damping(const std::vector<double>& residual_history) {
  double scale = 1.0;
  std::size_t successes = 0;
  for (std::size_t i = 1; i < residual_history.size(); ++i) {
    if (residual_history[i] > residual_history[i - 1]) {
      scale = std::max(scale * 0.5, 1.0 / 16.0);
      successes = 0;
    } else {
      if (++successes >= 2) scale = 1.0;
    }
  }
  return scale;
}

namespace {

// P1 gradients: grad phi_a = (y_b - y_c, x_c - x_b) / (2 area), cyclic.
struct ElementGeom {
  double gx[3];
  double gy[3];
  double area;
};

ElementGeom element_geom(const Mesh& mesh, std::size_t e) {
  const auto& t = mesh.tris[e];
  const Point& p0 = mesh.nodes[t[0]];
  const Point& p1 = mesh.nodes[t[1]];
  const Point& p2 = mesh.nodes[t[2]];
  const double two_a = (p1.x - p0.x) * (p2.y - p0.y) -
                       (p2.x - p0.x) * (p1.y - p0.y);
  ElementGeom g;
  g.area = 0.5 * two_a;
  g.gx[0] = (p1.y - p2.y) / two_a;
  g.gx[1] = (p2.y - p0.y) / two_a;
  g.gx[2] = (p0.y - p1.y) / two_a;
  g.gy[0] = (p2.x - p1.x) / two_a;
  g.gy[1] = (p0.x - p2.x) / two_a;
  g.gy[2] = (p1.x - p0.x) / two_a;
  return g;
}

// CSR over free nodes only.
struct Csr {
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void clear_values() { std::fill(val.begin(), val.end(), 0.0); }
  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = row_ptr.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        s += val[k] * x[col[k]];
      }
      y[i] = s;
    }
  }
};

// Jacobi-preconditioned CG; the tangent is SPD for this problem class.
std::size_t pcg(const Csr& A, const std::vector<double>& b,
                std::vector<double>& x, double rel_tol) {
  const std::size_t n = b.size();
  std::vector<double> r = b, z(n), p(n), Ap(n), diag(n);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 1.0;
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      if (A.col[k] == static_cast<int>(i)) d = A.val[k];
    }
    diag[i] = d;
  }
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return 0;

  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

  const std::size_t max_iter = 20 * n + 100;
  for (std::size_t it = 0; it < max_iter; ++it) {
    A.matvec(p, Ap);
    double pAp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    const double alpha = rz / pAp;
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rnorm += r[i] * r[i];
    }
    if (std::sqrt(rnorm) <= rel_tol * bnorm) return it + 1;
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = r[i] / diag[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return max_iter;
}

}  // namespace

FemSolution solve(Mesh mesh, const FemProblem& problem,
                  const FemSettings& settings) {
  const std::size_t n_nodes = mesh.n_nodes();
  std::vector<int> free_of(n_nodes, -1);
  std::vector<int> node_of;
  for (std::size_t n = 0; n < n_nodes; ++n) {
    if (!mesh.node_boundary[n]) {
      free_of[n] = static_cast<int>(node_of.size());
      node_of.push_back(static_cast<int>(n));
    }
  }
  const std::size_t n_free = node_of.size();

  // Fixed sparsity from node adjacency; values reassembled per Newton step.
  std::vector<std::vector<int>> adj(n_free);
  for (const auto& t : mesh.tris) {
    for (int a : t) {
      for (int b : t) {
        if (free_of[a] >= 0 && free_of[b] >= 0) {
          adj[free_of[a]].push_back(free_of[b]);
        }
      }
    }
  }
  Csr K;
  K.row_ptr.resize(n_free + 1, 0);
  for (std::size_t i = 0; i < n_free; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    K.row_ptr[i + 1] = K.row_ptr[i] + static_cast<int>(row.size());
    K.col.insert(K.col.end(), row.begin(), row.end());
  }
  K.val.resize(K.col.size(), 0.0);
  auto entry = [&](int fi, int fj) -> double& {
    const auto begin = K.col.begin() + K.row_ptr[fi];
    const auto end = K.col.begin() + K.row_ptr[fi + 1];
    const auto it = std::lower_bound(begin, end, fj);
    return K.val[static_cast<std::size_t>(it - K.col.begin())];
  };

  std::vector<ElementGeom> geom(mesh.n_tris());
  for (std::size_t e = 0; e < mesh.n_tris(); ++e) geom[e] = element_geom(mesh, e);

  // Source vector (constant per element, lumped one third per node).
  std::vector<double> f(n_free, 0.0);
  for (std::size_t e = 0; e < mesh.n_tris(); ++e) {
    const double je = problem.current(mesh.tri_region[e]);
    if (je == 0.0) continue;
    for (int a : mesh.tris[e]) {
      if (free_of[a] >= 0) f[free_of[a]] += je * geom[e].area / 3.0;
    }
  }
  double f_norm = 0.0;
  for (double v : f) f_norm = std::max(f_norm, std::abs(v));

  std::vector<double> A(n_nodes, 0.0);
  std::vector<double> resid(n_free), delta(n_free), rhs(n_free);

  auto residual = [&](const std::vector<double>& An, std::vector<double>& r) {
    std::fill(r.begin(), r.end(), 0.0);
    for (std::size_t e = 0; e < mesh.n_tris(); ++e) {
      const auto& t = mesh.tris[e];
      const ElementGeom& g = geom[e];
      const double ax = An[t[0]] * g.gx[0] + An[t[1]] * g.gx[1] + An[t[2]] * g.gx[2];
      const double ay = An[t[0]] * g.gy[0] + An[t[1]] * g.gy[1] + An[t[2]] * g.gy[2];
      const double s = ax * ax + ay * ay;
      const double nu = problem.nu(mesh.tri_region[e], s);
      for (int a = 0; a < 3; ++a) {
        const int fi = free_of[t[a]];
        if (fi >= 0) {
          r[fi] += nu * g.area * (ax * g.gx[a] + ay * g.gy[a]);
        }
      }
    }
    for (std::size_t i = 0; i < n_free; ++i) r[i] -= f[i];
  };

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  FemSolution sol;
  ConvergenceReport& rep = sol.report;
  const double abs_tol = settings.tol * std::max(f_norm, 1e-300);

  double scale = 1.0;
  std::size_t successes = 0;
  for (std::size_t it = 1; it <= settings.max_newton; ++it) {
    rep.iterations = it;
    residual(A, resid);
    const double rn = inf_norm(resid);
    rep.residual_history.push_back(rn);
    rep.residual = rn;
    if (rn <= abs_tol) {
      rep.converged = true;
      break;
    }
    if (rep.residual_history.size() >= 2) {
      const std::size_t m = rep.residual_history.size();
      if (rep.residual_history[m - 1] > rep.residual_history[m - 2]) {
        scale = std::max(scale * 0.5, 1.0 / 16.0);
        successes = 0;
      } else if (++successes >= 2) {
        scale = 1.0;
      }
    }

    // Consistent tangent.
    K.clear_values();
    for (std::size_t e = 0; e < mesh.n_tris(); ++e) {
      const auto& t = mesh.tris[e];
      const ElementGeom& g = geom[e];
      const double ax = A[t[0]] * g.gx[0] + A[t[1]] * g.gx[1] + A[t[2]] * g.gx[2];
      const double ay = A[t[0]] * g.gy[0] + A[t[1]] * g.gy[1] + A[t[2]] * g.gy[2];
      const double s = ax * ax + ay * ay;
      const Region reg = mesh.tri_region[e];
      const double nu = problem.nu(reg, s);
      const double dnu = problem.dnu_ds(reg, s);
      for (int a = 0; a < 3; ++a) {
        const int fi = free_of[t[a]];
        if (fi < 0) continue;
        const double ga_dot = ax * g.gx[a] + ay * g.gy[a];
        for (int b = 0; b < 3; ++b) {
          const int fj = free_of[t[b]];
          if (fj < 0) continue;
          const double gb_dot = ax * g.gx[b] + ay * g.gy[b];
          entry(fi, fj) += g.area * (nu * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b]) +
                                     2.0 * dnu * ga_dot * gb_dot);
        }
      }
    }

    for (std::size_t i = 0; i < n_free; ++i) rhs[i] = -resid[i];
    pcg(K, rhs, delta, settings.cg_tol);
    for (std::size_t i = 0; i < n_free; ++i) {
      A[node_of[i]] += scale * delta[i];
    }
  }

  if (!rep.converged) {
    std::ostringstream msg;
    msg << "Newton failed to converge in " << settings.max_newton
        << " iterations; residual history:";
    for (double r : rep.residual_history) msg << ' ' << r;
    throw NonConvergenceError(msg.str());
  }

  sol.mesh = std::move(mesh);
  sol.A = std::move(A);
  return sol;
}

std::size_t locate_triangle(const Mesh& mesh, const Point& p) {
  if (p.x < mesh.xs.front() - 1e-12 || p.x > mesh.xs.back() + 1e-12 ||
      p.y < mesh.ys.front() - 1e-12 || p.y > mesh.ys.back() + 1e-12) {
    throw OutsideDomainError("point outside mesh");
  }
  auto cell_of = [](const std::vector<double>& lines, double v) {
    auto it = std::upper_bound(lines.begin(), lines.end(), v);
    auto idx = static_cast<std::size_t>(it - lines.begin());
    idx = std::min(std::max<std::size_t>(idx, 1), lines.size() - 1);
    return idx - 1;
  };
  const std::size_t i = cell_of(mesh.xs, p.x);
  const std::size_t j = cell_of(mesh.ys, p.y);
  const double fx = (p.x - mesh.xs[i]) / (mesh.xs[i + 1] - mesh.xs[i]);
  const double fy = (p.y - mesh.ys[j]) / (mesh.ys[j + 1] - mesh.ys[j]);
  const std::size_t cell = j * mesh.nx() + i;
  return 2 * cell + (fy <= fx ? 0 : 1);  // below the n00->n11 diagonal first
}

FemEval evaluate(const FemSolution& sol, const Point& p) {
  const std::size_t e = locate_triangle(sol.mesh, p);
  const auto& t = sol.mesh.tris[e];
  const ElementGeom g = element_geom(sol.mesh, e);
  const Point& p0 = sol.mesh.nodes[t[0]];
  // Barycentric via the P1 shape functions: phi_a(p) = phi_a(p0) +
  // grad phi_a . (p - p0), with phi at vertices delta_ab.
  double a_val = 0.0, ax = 0.0, ay = 0.0;
  const double bary1 = g.gx[1] * (p.x - p0.x) + g.gy[1] * (p.y - p0.y);
  const double bary2 = g.gx[2] * (p.x - p0.x) + g.gy[2] * (p.y - p0.y);
  const double bary0 = 1.0 - bary1 - bary2;
  a_val = bary0 * sol.A[t[0]] + bary1 * sol.A[t[1]] + bary2 * sol.A[t[2]];
  for (int a = 0; a < 3; ++a) {
    ax += sol.A[t[a]] * g.gx[a];
    ay += sol.A[t[a]] * g.gy[a];
  }
  return {a_val, ay, -ax};
}

void write_mesh_csv(const Mesh& mesh, const std::string& nodes_path,
                    const std::string& tris_path) {
  std::ofstream nodes(nodes_path);
  if (!nodes) throw Error("cannot write " + nodes_path);
  nodes << "id,x,y,boundary\n";
  char buf[128];
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d\n", n, mesh.nodes[n].x,
                  mesh.nodes[n].y, static_cast<int>(mesh.node_boundary[n]));
    nodes << buf;
  }
  std::ofstream tris(tris_path);
  if (!tris) throw Error("cannot write " + tris_path);
  tris << "n1,n2,n3,region\n";
  static const char* names[] = {"core", "winding", "air"};
  for (std::size_t e = 0; e < mesh.n_tris(); ++e) {
    tris << mesh.tris[e][0] << ',' << mesh.tris[e][1] << ',' << mesh.tris[e][2]
         << ',' << names[static_cast<int>(mesh.tri_region[e])] << "\n";
  }
}

void write_solution_csv(const FemSolution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "node_id,A\n";
  char buf[64];
  for (std::size_t n = 0; n < sol.A.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", n, sol.A[n]);
    out << buf;
  }
}

}  // namespace magpinn
