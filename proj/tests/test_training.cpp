// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <doctest.h>

#include "magpinn/materials.hpp"
#include "magpinn/training.hpp"

using namespace magpinn;

namespace {

Problem fixed_problem() {
  return {default_constants(), ReluctivityModel(default_bh_curve()),
          ParamSpace::all_fixed(box_midpoint(default_constants()))};
}

Problem free_gf_problem() {
  ParamSpace space = ParamSpace::all_fixed(box_midpoint(default_constants()));
  space.is_fixed[8] = false;
  space.is_fixed[9] = false;
  return {default_constants(), ReluctivityModel(default_bh_curve()), space};
}

}  // namespace

TEST_CASE("zero theta gives zero loss everywhere") {
  const Problem problem = fixed_problem();
  const DesignContext ctx = make_design_context({}, problem);
  NetworkConfig net;
  net.L = 1;
  net.d = 4;
  net.m = 1;
  net.d_xi = 0;
  NetworkParams params(net);
  ForwardRecord rec;
  for (double t : {0.1, 0.37, 0.62, 0.9}) {
    CHECK(sample_loss(params, t * ctx.lam.L_x, t * ctx.lam.L_y, ctx, problem,
                      rec) == 0.0);
  }
}

TEST_CASE("air-point loss is the linear coenergy density") {
  const Problem problem = fixed_problem();
  const DesignContext ctx = make_design_context({}, problem);
  NetworkConfig net;
  net.L = 1;
  net.d = 8;
  net.m = 1;
  net.d_xi = 0;
  Rng rng(5, Stream::Init);
  NetworkParams params = glorot_init(net, rng);
  // The domain corner region is air with J = 0.
  const double xb = 0.02 * ctx.lam.L_x, yb = 0.02 * ctx.lam.L_y;
  ForwardRecord rec;
  const double l = sample_loss(params, xb, yb, ctx, problem, rec);
  const MvpEval e =
      evaluate_mvp(params, xb, yb, ctx.xi_free, ctx.lam, rec);
  const double s = e.Ax * e.Ax + e.Ay * e.Ay;
  const double nu_bar = kNu0 / problem.scaling.nu_star;
  const double expect = ctx.domain_volume * 0.5 * nu_bar * s;
  CHECK(l == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("batch determinism and estimator determinism") {
  const Problem problem = free_gf_problem();
  NetworkConfig net;
  net.L = 1;
  net.d = 8;
  net.m = 1;
  net.d_xi = 2;
  Rng ri(9, Stream::Init);
  NetworkParams params = glorot_init(net, ri);

  Rng xi1(9, Stream::Xi), x1(9, Stream::X);
  Rng xi2(9, Stream::Xi), x2(9, Stream::X);
  const Batch a = draw_batch(problem, 3, 50, xi1, x1);
  const Batch b = draw_batch(problem, 3, 50, xi2, x2);
  CHECK(loss_estimate(params, a, problem) == loss_estimate(params, b, problem));
}

TEST_CASE("ADAM first step moves each component by about eta") {
  TrainConfig cfg;
  Optimizer opt(3, cfg);
  std::vector<double> theta{1.0, -2.0, 0.5};
  const std::vector<double> start = theta;
  diff::GradientAccumulator g(3);
  g.data()[0] = 0.3;
  g.data()[1] = -7.0;
  g.data()[2] = 1e-3;
  opt.step(theta, g, cfg.eta_1);
  for (int i = 0; i < 3; ++i) {
    const double step = start[i] - theta[i];
    // Bias-corrected first step is eta * sign(g) to O(eps_adam).
    CHECK(step == doctest::Approx(cfg.eta_1 * (g[i] > 0 ? 1.0 : -1.0))
                      .epsilon(1e-4));
  }
}

TEST_CASE("zero gradient leaves theta unchanged") {
  TrainConfig cfg;
  Optimizer opt(2, cfg);
  std::vector<double> theta{0.7, -0.3};
  diff::GradientAccumulator g(2);
  opt.step(theta, g, cfg.eta_1);
  CHECK(theta[0] == 0.7);
  CHECK(theta[1] == -0.3);
}

TEST_CASE("SGD switch performs the plain update") {
  TrainConfig cfg;
  cfg.use_adam = false;
  Optimizer opt(2, cfg);
  std::vector<double> theta{1.0, 1.0};
  diff::GradientAccumulator g(2);
  g.data()[0] = 2.0;
  g.data()[1] = -4.0;
  opt.step(theta, g, 0.1);
  CHECK(theta[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(theta[1] == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("learning-rate schedule hits the final rate exactly") {
  TrainConfig cfg;
  cfg.eta_1 = 0.3e-3;
  cfg.eta_final = 0.3e-6;
  cfg.n_ite = 1000;
  CHECK(cfg.eta_at(1) == cfg.eta_1);
  CHECK(std::abs(cfg.eta_at(cfg.n_ite) - cfg.eta_final) / cfg.eta_final <=
        1e-12);
  // eta_k = eta_1 * gamma^(k-1) up to the rounding of gamma itself.
  const double gamma = cfg.gamma();
  CHECK(gamma > 0.0);
  CHECK(gamma < 1.0);
  for (std::size_t k : {std::size_t{2}, std::size_t{10}, std::size_t{500}}) {
    CHECK(cfg.eta_at(k) ==
          doctest::Approx(cfg.eta_1 *
                          std::pow(gamma, static_cast<double>(k - 1)))
              .epsilon(1e-9));
  }
  // Monotone decreasing.
  for (std::size_t k = 2; k <= cfg.n_ite; ++k) {
    CHECK(cfg.eta_at(k) < cfg.eta_at(k - 1));
  }
}

TEST_CASE("gradient linearity across samples") {
  const Problem problem = fixed_problem();
  const DesignContext ctx = make_design_context({}, problem);
  NetworkConfig net;
  net.L = 1;
  net.d = 6;
  net.m = 1;
  net.d_xi = 0;
  Rng ri(77, Stream::Init);
  NetworkParams params = glorot_init(net, ri);
  ForwardRecord rec;

  const std::vector<Point> pts{{0.3 * ctx.lam.L_x, 0.4 * ctx.lam.L_y},
                               {0.6 * ctx.lam.L_x, 0.7 * ctx.lam.L_y},
                               {0.52 * ctx.lam.L_x, 0.23 * ctx.lam.L_y}};
  diff::GradientAccumulator sum(params.theta.size());
  for (const Point& p : pts) {
    sample_loss_grad(params, p.x, p.y, ctx, problem, rec, sum);
  }
  diff::GradientAccumulator total(params.theta.size());
  for (const Point& p : pts) {
    diff::GradientAccumulator one(params.theta.size());
    sample_loss_grad(params, p.x, p.y, ctx, problem, rec, one);
    total.add(one);
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    CHECK(sum[i] == doctest::Approx(total[i]).epsilon(1e-14));
  }
}

TEST_CASE("train smoke: history length, reproducibility, n_ite honored") {
  const Problem problem = fixed_problem();
  NetworkConfig net;
  net.L = 1;
  net.d = 8;
  net.m = 1;
  net.d_xi = 0;
  TrainConfig cfg;
  cfg.n_ite = 20;
  cfg.n_xi = 1;
  cfg.n_x = 20;
  cfg.seed = 4;
  cfg.log_every = 1;
  const TrainResult a = train(cfg, net, problem);
  const TrainResult b = train(cfg, net, problem);
  REQUIRE(a.history.size() == 20);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss == b.history[i].loss);
    CHECK(a.history[i].eta == b.history[i].eta);
  }
  CHECK(a.params.theta == b.params.theta);
}

TEST_CASE("d_xi mismatch is rejected") {
  const Problem problem = free_gf_problem();  // two free components
  NetworkConfig net;
  net.L = 1;
  net.d = 4;
  net.m = 1;
  net.d_xi = 3;  // wrong
  TrainConfig cfg;
  cfg.n_ite = 1;
  CHECK_THROWS_AS(train(cfg, net, problem), ShapeMismatchError);
}
