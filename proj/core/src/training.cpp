// SPDX-License-Identifier: Apache-2.0
#include "magpinn/training.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

#include "magpinn/checkpoint.hpp"
#include "magpinn/errors.hpp"

namespace magpinn {

DesignContext make_design_context(const std::vector<double>& xi_free_scaled,
                                  const Problem& problem) {
  DesignContext ctx;
  ctx.xi_free = xi_free_scaled;
  ctx.xi = problem.space.expand(xi_free_scaled.data(), problem.scaling);
  ctx.layout = build_layout(ctx.xi);
  ctx.lam = scaled_lengths(ctx.layout, problem.scaling);
  ctx.domain_volume = ctx.lam.L_x * ctx.lam.L_y;
  return ctx;
}

namespace {

struct LossParts {
  double loss;
  double j_bar;      // scaled current density at the point
  double nu_bar;     // scaled reluctivity at s
  double vol;        // |Xi| * |X(xi)|
  MvpEval mvp;
};

LossParts loss_parts(const NetworkParams& params, double x_bar, double y_bar,
                     const DesignContext& ctx, const Problem& problem,
                     ForwardRecord& rec) {
  const ScalingConstants& sc = problem.scaling;
  const MvpEval e =
      evaluate_mvp(params, x_bar, y_bar, ctx.xi_free, ctx.lam, rec);
  const double s = e.Ax * e.Ax + e.Ay * e.Ay;

  // Clamp away the one-ulp overshoot from scale/unscale round trips.
  const Point p{std::min(x_bar * sc.x_star, ctx.layout.L_x),
                std::min(y_bar * sc.x_star, ctx.layout.L_y)};
  const Region region = classify(ctx.layout, p);

  double w_bar, nu_bar;
  if (region == Region::Core) {
    w_bar = problem.materials.energy_scaled(s, sc);
    nu_bar = problem.materials.nu_scaled(s, sc);
  } else {
    nu_bar = problem.materials.nu0() / sc.nu_star;
    w_bar = 0.5 * nu_bar * s;
  }
  const double j_bar =
      region == Region::Winding
          ? (ctx.xi.f_c / (ctx.xi.w_w * ctx.xi.d_w)) / sc.J_star
          : 0.0;

  // |Xi_bar| = 1 (unit hypercube).
  const double vol = 1.0 * ctx.domain_volume;
  return {vol * (w_bar - j_bar * e.A), j_bar, nu_bar, vol, e};
}

}  // namespace

double sample_loss(const NetworkParams& params, double x_bar, double y_bar,
                   const DesignContext& ctx, const Problem& problem,
                   ForwardRecord& rec) {
  return loss_parts(params, x_bar, y_bar, ctx, problem, rec).loss;
}

double sample_loss_grad(const NetworkParams& params, double x_bar,
                        double y_bar, const DesignContext& ctx,
                        const Problem& problem, ForwardRecord& rec,
                        diff::GradientAccumulator& grad) {
  const LossParts lp = loss_parts(params, x_bar, y_bar, ctx, problem, rec);
  // dl/dA = -vol*J_bar; dl/dAx = vol*nu_bar*Ax (since dw/ds = nu/2 and
  // ds/dAx = 2 Ax), likewise for Ay.
  const diff::Adjoint seed{-lp.vol * lp.j_bar, lp.vol * lp.nu_bar * lp.mvp.Ax,
                           lp.vol * lp.nu_bar * lp.mvp.Ay};
  mvp_backward(params, rec, seed, grad);
  return lp.loss;
}

Batch draw_batch(const Problem& problem, std::size_t n_xi, std::size_t n_x,
                 Rng& xi_rng, Rng& x_rng) {
  Batch batch;
  batch.n_x = n_x;
  batch.designs.reserve(n_xi);
  batch.points_scaled.reserve(n_xi * n_x);
  const std::size_t n_free = problem.space.n_free();
  for (std::size_t i = 0; i < n_xi; ++i) {
    std::vector<double> xi_free(n_free);
    for (auto& c : xi_free) c = xi_rng.uniform();
    batch.designs.push_back(make_design_context(xi_free, problem));
    const DesignContext& ctx = batch.designs.back();
    for (std::size_t j = 0; j < n_x; ++j) {
      batch.points_scaled.push_back({x_rng.uniform() * ctx.lam.L_x,
                                     x_rng.uniform() * ctx.lam.L_y});
    }
  }
  return batch;
}

double loss_estimate(const NetworkParams& params, const Batch& batch,
                     const Problem& problem) {
  ForwardRecord rec;
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.designs.size(); ++i) {
    const DesignContext& ctx = batch.designs[i];
    for (std::size_t j = 0; j < batch.n_x; ++j) {
      const Point& p = batch.points_scaled[i * batch.n_x + j];
      sum += sample_loss(params, p.x, p.y, ctx, problem, rec);
    }
  }
  return sum / static_cast<double>(batch.designs.size() * batch.n_x);
}

Optimizer::Optimizer(std::size_t n, const TrainConfig& cfg)
    : m_(n, 0.0),
      v_(n, 0.0),
      beta_1_(cfg.beta_1),
      beta_2_(cfg.beta_2),
      eps_(cfg.eps_adam),
      use_adam_(cfg.use_adam) {}

void Optimizer::step(std::vector<double>& theta,
                     const diff::GradientAccumulator& grad, double eta_k) {
  if (grad.size() != theta.size()) {
    throw ShapeMismatchError("optimizer: gradient/theta size mismatch");
  }
  ++step_;
  if (!use_adam_) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta_k * grad[i];
    return;
  }
  const double bc1 = 1.0 - std::pow(beta_1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta_2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta_1_ * m_[i] + (1.0 - beta_1_) * g;
    v_[i] = beta_2_ * v_[i] + (1.0 - beta_2_) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    theta[i] -= eta_k * mhat / (std::sqrt(vhat) + eps_);
  }
}

namespace {

// Evaluates loss + gradient over the whole batch.  Per-thread partial
// accumulators are reduced in thread order, so results are deterministic
// for a fixed thread count; threads == 1 is the strict reproducible mode.
double batch_gradient(const NetworkParams& params, const Batch& batch,
                      const Problem& problem, std::size_t threads,
                      diff::GradientAccumulator& grad) {
  const std::size_t total = batch.designs.size() * batch.n_x;
  grad.reset();
  if (threads <= 1) {
    ForwardRecord rec;
    double sum = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      const std::size_t i = t / batch.n_x;
      const Point& p = batch.points_scaled[t];
      sum += sample_loss_grad(params, p.x, p.y, batch.designs[i], problem, rec,
                              grad);
    }
    grad.scale(1.0 / static_cast<double>(total));
    return sum / static_cast<double>(total);
  }

  std::vector<diff::GradientAccumulator> partial(
      threads, diff::GradientAccumulator(grad.size()));
  std::vector<double> sums(threads, 0.0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      ForwardRecord rec;
      const std::size_t lo = total * w / threads;
      const std::size_t hi = total * (w + 1) / threads;
      double sum = 0.0;
      for (std::size_t t = lo; t < hi; ++t) {
        const std::size_t i = t / batch.n_x;
        const Point& p = batch.points_scaled[t];
        sum += sample_loss_grad(params, p.x, p.y, batch.designs[i], problem,
                                rec, partial[w]);
      }
      sums[w] = sum;
    });
  }
  for (auto& th : pool) th.join();
  double sum = 0.0;
  for (std::size_t w = 0; w < threads; ++w) {
    sum += sums[w];
    grad.add(partial[w]);
  }
  grad.scale(1.0 / static_cast<double>(total));
  return sum / static_cast<double>(total);
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const NetworkConfig& net,
                  const Problem& problem,
                  const std::function<void(const LossRecord&)>& on_log) {
  if (net.d_xi != problem.space.n_free()) {
    throw ShapeMismatchError(
        "network d_xi does not match the number of free design parameters");
  }
  Rng init_rng(cfg.seed, Stream::Init);
  Rng xi_rng(cfg.seed, Stream::Xi);
  Rng x_rng(cfg.seed, Stream::X);

  TrainResult result{glorot_init(net, init_rng), {}};
  NetworkParams& params = result.params;
  Optimizer opt(params.theta.size(), cfg);
  diff::GradientAccumulator grad(params.theta.size());
  double eta = cfg.eta_1;

  auto save = [&](const std::string& name) {
    if (cfg.out_dir.empty()) return;
    save_checkpoint({net, problem.scaling, problem.space, params.theta},
                    cfg.out_dir + "/" + name);
  };

  for (std::size_t k = 1; k <= cfg.n_ite; ++k) {
    eta = cfg.eta_at(k);
    const Batch batch = draw_batch(problem, cfg.n_xi, cfg.n_x, xi_rng, x_rng);
    const double loss =
        batch_gradient(params, batch, problem, cfg.threads, grad);
    if (!std::isfinite(loss)) {
      double norm = 0.0;
      for (double t : params.theta) norm = std::max(norm, std::abs(t));
      throw TrainingDivergedError(
          "loss became non-finite at iteration " + std::to_string(k) +
          " (theta inf-norm " + std::to_string(norm) + ")");
    }
    opt.step(params.theta, grad, eta);
    if (cfg.log_every > 0 && (k % cfg.log_every == 0 || k == cfg.n_ite)) {
      const LossRecord recd{k, eta, loss};
      result.history.push_back(recd);
      if (on_log) on_log(recd);
    }
    if (cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0 &&
        k != cfg.n_ite) {
      save("checkpoint_" + std::to_string(k) + ".txt");
    }
  }
  save("checkpoint_final.txt");
  if (!cfg.out_dir.empty()) {
    write_loss_csv(result.history, cfg.out_dir + "/loss.csv");
  }
  return result;
}

void write_loss_csv(const std::vector<LossRecord>& history,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write loss log: " + path);
  out << "iteration,eta,loss\n";
  char buf[96];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r.iteration, r.eta,
                  r.loss);
    out << buf;
  }
}

}  // namespace magpinn
