// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: Fourier encoding, the forward pass
// with spatial tangents, the reverse sweep, whole-batch gradients, the
// material spline, and the FE oracle (mesh build + nonlinear solve).

#include <benchmark/benchmark.h>

#include <vector>

#include "magpinn/fem.hpp"
#include "magpinn/materials.hpp"
#include "magpinn/metrics.hpp"
#include "magpinn/training.hpp"

namespace {

using namespace magpinn;

Problem midpoint_problem() {
  return {default_constants(), ReluctivityModel(default_bh_curve()),
          ParamSpace::all_fixed(box_midpoint(default_constants()))};
}

NetworkConfig study_net(std::size_t d_xi = 0) {
  NetworkConfig net;
  net.L = 3;
  net.d = 64;
  net.m = 3;
  net.d_xi = d_xi;
  return net;
}

void BM_Encode(benchmark::State& state) {
  const Problem problem = midpoint_problem();
  const DesignContext ctx = make_design_context({}, problem);
  const NetworkConfig net = study_net();
  std::vector<double> out;
  for (auto _ : state) {
    encode(0.37 * ctx.lam.L_x, 0.58 * ctx.lam.L_y,
           std::span<const double>{}, net, ctx.lam, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Encode);

void BM_EvaluateMvp(benchmark::State& state) {
  const Problem problem = midpoint_problem();
  const DesignContext ctx = make_design_context({}, problem);
  NetworkConfig net = study_net();
  net.L = static_cast<std::size_t>(state.range(0));
  net.d = static_cast<std::size_t>(state.range(1));
  Rng rng(1, Stream::Init);
  const NetworkParams params = glorot_init(net, rng);
  ForwardRecord rec;
  for (auto _ : state) {
    const MvpEval e = evaluate_mvp(params, 0.37 * ctx.lam.L_x,
                                   0.58 * ctx.lam.L_y, {}, ctx.lam, rec);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_EvaluateMvp)->Args({3, 64})->Args({4, 128});

void BM_SampleLossGrad(benchmark::State& state) {
  const Problem problem = midpoint_problem();
  const DesignContext ctx = make_design_context({}, problem);
  NetworkConfig net = study_net();
  net.L = static_cast<std::size_t>(state.range(0));
  net.d = static_cast<std::size_t>(state.range(1));
  Rng rng(1, Stream::Init);
  const NetworkParams params = glorot_init(net, rng);
  ForwardRecord rec;
  diff::GradientAccumulator grad(params.theta.size());
  for (auto _ : state) {
    const double l = sample_loss_grad(params, 0.37 * ctx.lam.L_x,
                                      0.58 * ctx.lam.L_y, ctx, problem, rec,
                                      grad);
    benchmark::DoNotOptimize(l);
  }
}
BENCHMARK(BM_SampleLossGrad)->Args({3, 64})->Args({4, 128});

// One full training iteration worth of work at the study batch size.
void BM_TrainIteration(benchmark::State& state) {
  const Problem problem = midpoint_problem();
  const NetworkConfig net = study_net();
  Rng ri(1, Stream::Init);
  NetworkParams params = glorot_init(net, ri);
  TrainConfig cfg;
  Optimizer opt(params.theta.size(), cfg);
  diff::GradientAccumulator grad(params.theta.size());
  Rng xi_rng(1, Stream::Xi), x_rng(1, Stream::X);
  ForwardRecord rec;
  const std::size_t n_x = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const Batch batch = draw_batch(problem, 1, n_x, xi_rng, x_rng);
    grad.reset();
    double sum = 0.0;
    for (std::size_t j = 0; j < n_x; ++j) {
      const Point& p = batch.points_scaled[j];
      sum += sample_loss_grad(params, p.x, p.y, batch.designs[0], problem,
                              rec, grad);
    }
    grad.scale(1.0 / static_cast<double>(n_x));
    opt.step(params.theta, grad, cfg.eta_1);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(n_x));
}
BENCHMARK(BM_TrainIteration)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ReluctivitySpline(benchmark::State& state) {
  const ReluctivityModel materials(default_bh_curve());
  double s = 0.01;
  for (auto _ : state) {
    // Sweep through the spline band so branch prediction is realistic.
    s = s < 3.0 ? s + 0.07 : 0.01;
    benchmark::DoNotOptimize(materials.nu(s));
  }
}
BENCHMARK(BM_ReluctivitySpline);

void BM_MeshBuild(benchmark::State& state) {
  const DeviceParams xi = box_midpoint(default_constants());
  const DeviceLayout layout = build_layout(xi);
  const double max_area = 1e-6 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const Mesh mesh = build_mesh(layout, max_area);
    benchmark::DoNotOptimize(mesh.n_tris());
  }
  state.SetLabel(std::to_string(build_mesh(layout, max_area).n_tris()) +
                 " tris");
}
BENCHMARK(BM_MeshBuild)->Arg(1)->Arg(4);

void BM_FemSolve(benchmark::State& state) {
  const DeviceParams xi = box_midpoint(default_constants());
  const ReluctivityModel materials(default_bh_curve());
  const FemProblem problem = make_fem_problem(materials, xi);
  FemSettings settings;
  settings.max_area = 1e-6 / static_cast<double>(state.range(0));
  const Mesh mesh = build_mesh(build_layout(xi), settings.max_area);
  for (auto _ : state) {
    const FemSolution sol = solve(mesh, problem, settings);
    benchmark::DoNotOptimize(sol.A.data());
  }
  state.SetLabel(std::to_string(mesh.n_nodes()) + " nodes");
}
BENCHMARK(BM_FemSolve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MstForce(benchmark::State& state) {
  const DeviceParams xi = box_midpoint(default_constants());
  const DeviceLayout layout = build_layout(xi);
  const ReluctivityModel materials(default_bh_curve());
  FemSettings settings;
  settings.max_area = 1e-6;
  const FemSolution sol =
      solve(build_mesh(layout, settings.max_area),
            make_fem_problem(materials, xi), settings);
  const FieldEvaluator eval = make_fem_evaluator(sol);
  const MstPath path =
      make_mst_path(layout, xi, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mst_force(eval, path));
  }
}
BENCHMARK(BM_MstForce)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
