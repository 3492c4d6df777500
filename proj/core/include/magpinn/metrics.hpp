// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magpinn/fem.hpp"
#include "magpinn/geometry.hpp"
#include "magpinn/network.hpp"

namespace magpinn {

// Field evaluator on physical coordinates: returns (A [Wb/m], Bx, By [T]).
using FieldEvaluator = std::function<FemEval(const Point&)>;

// PINN adapter: scales the point, evaluates A_hat, unscales the outputs.
FieldEvaluator make_pinn_evaluator(const NetworkParams& params,
                                   const std::vector<double>& xi_free,
                                   const DeviceLayout& layout,
                                   const ScalingConstants& scaling);

FieldEvaluator make_fem_evaluator(const FemSolution& sol);

// Maxwell-stress integration path around the I-core at clearance g/2:
// segment a below, b to the right, c above; points at sub-interval
// midpoints so count * spacing equals the segment length exactly.
struct MstPath {
  std::vector<Point> a, b, c;
  double delta_a, delta_b, delta_c;
};

MstPath make_mst_path(const DeviceLayout& layout, const DeviceParams& xi,
                      std::size_t points_per_segment = 200);

// F_y [N/m] from the B-field on the path; the prefactors already account
// for the mirrored half of the device.
double mst_force(const FieldEvaluator& field, const MstPath& path);

// sum_nodes (A_FE - A_PINN)^2 / sum_nodes A_FE^2 at the FE mesh nodes.
double relative_mvp_error(const FemSolution& fe, const FieldEvaluator& pinn);

// Point-wise absolute error fields, written as CSV for contour plotting.
// Nodes: x,y,region,A_FE,A_PINN,e_A_abs,saturated; element midpoints:
// x,y,B_FE,B_PINN,e_B_abs,saturated.  The saturation flags mark values
// above 0.18 mWb/m (A) and 40 mT (B).
void absolute_error_fields(const FemSolution& fe, const FieldEvaluator& pinn,
                           const DeviceLayout& layout,
                           const std::string& nodes_csv,
                           const std::string& midpoints_csv);

// Linear interpolation of the order statistics.
double percentile(std::vector<double> values, double p);

struct DesignResult {
  ParamVector xi;
  double e_a_rel = 0.0;
  double f_fe = 0.0;
  double f_pinn = 0.0;
  double e_f_rel = 0.0;
  bool fem_converged = true;
};

struct ErrorReport {
  std::vector<DesignResult> designs;
  std::size_t n_failed = 0;  // FE non-convergence, excluded from aggregates
  double mean_e_a_rel = 0.0;
  double p2_5 = 0.0, p50 = 0.0, p97_5 = 0.0;
  double mean_e_f_rel = 0.0;
};

struct SuiteSettings {
  std::size_t n_designs = 10;
  std::uint64_t seed = 0;
  FemSettings fem;
  std::size_t mst_points = 200;
};

// Samples designs from the box (free components uniform, frozen ones at
// their checkpoint values), runs FE per design, and aggregates MVP and
// force errors.
ErrorReport evaluate_suite(const NetworkParams& params,
                           const ScalingConstants& scaling,
                           const ParamSpace& space,
                           const ReluctivityModel& materials,
                           const SuiteSettings& settings);

void write_report_csv(const ErrorReport& report, const std::string& path);
void write_report_summary(const ErrorReport& report, const std::string& path);

}  // namespace magpinn
