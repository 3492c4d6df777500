// SPDX-License-Identifier: Apache-2.0
#include "magpinn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "magpinn/errors.hpp"
#include "magpinn/rng.hpp"

namespace magpinn {

FieldEvaluator make_pinn_evaluator(const NetworkParams& params,
                                   const std::vector<double>& xi_free,
                                   const DeviceLayout& layout,
                                   const ScalingConstants& scaling) {
  const ScaledLengths lam = scaled_lengths(layout, scaling);
  auto rec = std::make_shared<ForwardRecord>();
  return [&params, xi_free, lam, scaling, rec](const Point& p) -> FemEval {
    const MvpEval e = evaluate_mvp(params, p.x / scaling.x_star,
                                   p.y / scaling.x_star, xi_free, lam, *rec);
    const BField b = physical_b(e, scaling);
    return {scaling.A_star * e.A, b.Bx, b.By};
  };
}

FieldEvaluator make_fem_evaluator(const FemSolution& sol) {
  return [&sol](const Point& p) { return evaluate(sol, p); };
}

MstPath make_mst_path(const DeviceLayout& layout, const DeviceParams& xi,
                      std::size_t n) {
  const double half_gap = 0.5 * xi.g;
  const double y_a = layout.i_core.y_lo - half_gap;
  const double y_c = layout.i_core.y_hi + half_gap;
  const double x_b = layout.W_dev + half_gap;

  MstPath path;
  const double len_ac = x_b;  // a and c span x in [0, W_dev + g/2]
  const double len_b = y_c - y_a;
  path.delta_a = len_ac / static_cast<double>(n);
  path.delta_c = path.delta_a;
  path.delta_b = len_b / static_cast<double>(n);
  path.a.reserve(n);
  path.b.reserve(n);
  path.c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fa = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    path.a.push_back({fa * len_ac, y_a});
    path.c.push_back({fa * len_ac, y_c});
    path.b.push_back({x_b, y_a + fa * len_b});
  }
  return path;
}

double mst_force(const FieldEvaluator& field, const MstPath& path) {
  double sum_a = 0.0, sum_b = 0.0, sum_c = 0.0;
  for (const Point& p : path.a) {
    const FemEval e = field(p);
    sum_a += e.By * e.By - e.Bx * e.Bx;
  }
  for (const Point& p : path.b) {
    const FemEval e = field(p);
    sum_b += e.Bx * e.By;
  }
  for (const Point& p : path.c) {
    const FemEval e = field(p);
    sum_c += e.Bx * e.Bx - e.By * e.By;
  }
  return kNu0 * (path.delta_a * sum_a + 2.0 * path.delta_b * sum_b +
                 path.delta_c * sum_c);
}

double relative_mvp_error(const FemSolution& fe, const FieldEvaluator& pinn) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < fe.mesh.n_nodes(); ++n) {
    const double a_fe = fe.A[n];
    const double a_pinn = pinn(fe.mesh.nodes[n]).A;
    num += (a_fe - a_pinn) * (a_fe - a_pinn);
    den += a_fe * a_fe;
  }
  if (den == 0.0) {
    throw Error("degenerate reference: FE solution is identically zero");
  }
  return num / den;
}

void absolute_error_fields(const FemSolution& fe, const FieldEvaluator& pinn,
                           const DeviceLayout& layout,
                           const std::string& nodes_csv,
                           const std::string& midpoints_csv) {
  // Saturation thresholds used for the contour plots.
  constexpr double kSatA = 0.18e-3;  // Wb/m
  constexpr double kSatB = 40e-3;    // T
  static const char* names[] = {"core", "winding", "air"};
  char buf[256];

  std::ofstream nodes(nodes_csv);
  if (!nodes) throw Error("cannot write " + nodes_csv);
  nodes << "x,y,region,A_FE,A_PINN,e_A_abs,saturated\n";
  for (std::size_t n = 0; n < fe.mesh.n_nodes(); ++n) {
    const Point& p = fe.mesh.nodes[n];
    const double a_fe = fe.A[n];
    const double a_pinn = pinn(p).A;
    const double err = std::abs(a_fe - a_pinn);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g,%.17g,%d\n",
                  p.x, p.y, names[static_cast<int>(classify(layout, p))], a_fe,
                  a_pinn, err, err > kSatA ? 1 : 0);
    nodes << buf;
  }

  std::ofstream mids(midpoints_csv);
  if (!mids) throw Error("cannot write " + midpoints_csv);
  mids << "x,y,B_FE,B_PINN,e_B_abs,saturated\n";
  for (std::size_t e = 0; e < fe.mesh.n_tris(); ++e) {
    const auto& t = fe.mesh.tris[e];
    const Point mid{(fe.mesh.nodes[t[0]].x + fe.mesh.nodes[t[1]].x +
                     fe.mesh.nodes[t[2]].x) /
                        3.0,
                    (fe.mesh.nodes[t[0]].y + fe.mesh.nodes[t[1]].y +
                     fe.mesh.nodes[t[2]].y) /
                        3.0};
    const FemEval efe = evaluate(fe, mid);
    const FemEval epinn = pinn(mid);
    const double b_fe = std::hypot(efe.Bx, efe.By);
    const double b_pinn = std::hypot(epinn.Bx, epinn.By);
    const double err = std::abs(b_fe - b_pinn);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", mid.x,
                  mid.y, b_fe, b_pinn, err, err > kSatB ? 1 : 0);
    mids << buf;
  }
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("percentile of empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ErrorReport evaluate_suite(const NetworkParams& params,
                           const ScalingConstants& scaling,
                           const ParamSpace& space,
                           const ReluctivityModel& materials,
                           const SuiteSettings& settings) {
  Rng rng(settings.seed, Stream::Eval);
  ErrorReport report;
  const std::size_t n_free = space.n_free();

  std::vector<double> e_a, e_f;
  for (std::size_t k = 0; k < settings.n_designs; ++k) {
    std::vector<double> xi_free(n_free);
    for (auto& c : xi_free) c = rng.uniform();
    const DeviceParams xi = space.expand(xi_free.data(), scaling);
    const DeviceLayout layout = build_layout(xi);

    DesignResult res;
    res.xi = xi.to_vector();
    try {
      const Mesh mesh = build_mesh(layout, settings.fem.max_area);
      const FemSolution fe =
          solve(mesh, make_fem_problem(materials, xi), settings.fem);
      const FieldEvaluator pinn =
          make_pinn_evaluator(params, xi_free, layout, scaling);
      res.e_a_rel = relative_mvp_error(fe, pinn);

      const MstPath path = make_mst_path(layout, xi, settings.mst_points);
      res.f_fe = mst_force(make_fem_evaluator(fe), path);
      res.f_pinn = mst_force(pinn, path);
      res.e_f_rel = std::abs(res.f_fe - res.f_pinn) / std::abs(res.f_fe);
      e_a.push_back(res.e_a_rel);
      e_f.push_back(res.e_f_rel);
    } catch (const NonConvergenceError&) {
      res.fem_converged = false;
      ++report.n_failed;
    }
    report.designs.push_back(res);
  }

  if (!e_a.empty()) {
    double sum_a = 0.0, sum_f = 0.0;
    for (double v : e_a) sum_a += v;
    for (double v : e_f) sum_f += v;
    report.mean_e_a_rel = sum_a / static_cast<double>(e_a.size());
    report.mean_e_f_rel = sum_f / static_cast<double>(e_f.size());
    report.p2_5 = percentile(e_a, 2.5);
    report.p50 = percentile(e_a, 50.0);
    report.p97_5 = percentile(e_a, 97.5);
  }
  return report;
}

void write_report_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "design";
  for (std::size_t i = 0; i < kNumParams; ++i) out << ',' << param_name(i);
  out << ",e_A_rel,F_FE,F_PINN,e_F_rel,fem_converged\n";
  char buf[64];
  for (std::size_t k = 0; k < report.designs.size(); ++k) {
    const DesignResult& r = report.designs[k];
    out << k;
    for (double v : r.xi) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g", r.e_a_rel);
    out << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", r.f_fe);
    out << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", r.f_pinn);
    out << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", r.e_f_rel);
    out << buf;
    out << ',' << (r.fem_converged ? 1 : 0) << "\n";
  }
}

void write_report_summary(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "designs evaluated: " << report.designs.size() << "\n";
  out << "fem failures (excluded): " << report.n_failed << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "mean e_A_rel: %.6g\n", report.mean_e_a_rel);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "e_A_rel percentiles (2.5/50/97.5): %.6g / %.6g / %.6g\n",
                report.p2_5, report.p50, report.p97_5);
  out << buf;
  std::snprintf(buf, sizeof buf, "mean e_F_rel: %.6g\n", report.mean_e_f_rel);
  out << buf;
}

}  // namespace magpinn
