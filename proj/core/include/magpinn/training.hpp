// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "magpinn/dual2.hpp"
#include "magpinn/geometry.hpp"
#include "magpinn/materials.hpp"
#include "magpinn/network.hpp"
#include "magpinn/scaling.hpp"

namespace magpinn {

struct TrainConfig {
  std::size_t n_ite = 1000;
  std::size_t n_xi = 1;   // parameter samples per iteration
  std::size_t n_x = 100;  // spatial samples per parameter sample
  double eta_1 = 0.3e-3;
  double eta_final = 0.3e-6;
  double beta_1 = 0.9;
  double beta_2 = 0.999;
  double eps_adam = 1e-8;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 0;  // 0 = final checkpoint only
  std::size_t log_every = 1;
  bool use_adam = true;  // false = plain SGD update
  std::size_t threads = 1;
  std::string out_dir;  // empty = no files written

  // Per-iteration decay so eta_k = eta_1 * gamma^(k-1) hits eta_final
  // exactly at k = n_ite.
  double gamma() const {
    if (n_ite <= 1) return 1.0;
    return std::pow(eta_final / eta_1, 1.0 / static_cast<double>(n_ite - 1));
  }

  // eta_k = eta_1 * gamma^(k-1), evaluated in closed form rather than by
  // repeated multiplication: powering a rounded gamma loses ~(N-1) ulp,
  // while the direct form reproduces eta_final exactly at k = n_ite.
  double eta_at(std::size_t k) const {
    if (n_ite <= 1) return eta_1;
    const double t =
        static_cast<double>(k - 1) / static_cast<double>(n_ite - 1);
    return eta_1 * std::pow(eta_final / eta_1, t);
  }
};

// The physical problem the loss integrates: materials, scaling, and the
// design-space freeze mask.
struct Problem {
  ScalingConstants scaling;
  ReluctivityModel materials;
  ParamSpace space;
};

// Per-design context reused by all spatial samples of one xi draw.
struct DesignContext {
  std::vector<double> xi_free;  // scaled free components, network input
  DeviceParams xi;              // full physical design
  DeviceLayout layout;
  ScaledLengths lam;
  double domain_volume;  // |X_bar| = L_x_bar * L_y_bar
};

DesignContext make_design_context(const std::vector<double>& xi_free_scaled,
                                  const Problem& problem);

// One collocation term of the scaled coenergy loss:
// l = |Xi||X(xi)| [ w_bar(s) - J_bar * A_hat ], s = |grad A_hat|^2.
// The point is given in scaled coordinates inside the scaled rectangle.
double sample_loss(const NetworkParams& params, double x_bar, double y_bar,
                   const DesignContext& ctx, const Problem& problem,
                   ForwardRecord& rec);

// Same, also accumulating d(l)/d(theta) into grad.
double sample_loss_grad(const NetworkParams& params, double x_bar,
                        double y_bar, const DesignContext& ctx,
                        const Problem& problem, ForwardRecord& rec,
                        diff::GradientAccumulator& grad);

// Unbiased Monte Carlo estimate of the loss for a given batch:
// mean of sample_loss over n_xi designs x n_x points each.
struct Batch {
  std::vector<DesignContext> designs;
  std::vector<Point> points_scaled;  // designs.size() * n_x entries
  std::size_t n_x = 0;
};

Batch draw_batch(const Problem& problem, std::size_t n_xi, std::size_t n_x,
                 Rng& xi_rng, Rng& x_rng);

double loss_estimate(const NetworkParams& params, const Batch& batch,
                     const Problem& problem);

// ADAM with bias correction; holds the moment arrays aligned with theta.
class Optimizer {
 public:
  Optimizer(std::size_t n, const TrainConfig& cfg);

  // One update in place; eta_k is the current learning rate.
  void step(std::vector<double>& theta, const diff::GradientAccumulator& grad,
            double eta_k);

  std::size_t step_count() const { return step_; }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t step_ = 0;
  double beta_1_, beta_2_, eps_;
  bool use_adam_;
};

struct LossRecord {
  std::size_t iteration;
  double eta;
  double loss;
};

struct TrainResult {
  NetworkParams params;
  std::vector<LossRecord> history;
};

// Full training loop: Glorot init, fresh (xi, x) samples each iteration,
// batch-averaged gradient, ADAM update, exponential LR decay.  Writes
// loss CSV and periodic checkpoints when cfg.out_dir is set.  Aborts
// with TrainingDivergedError on NaN/Inf loss.
TrainResult train(const TrainConfig& cfg, const NetworkConfig& net,
                  const Problem& problem,
                  const std::function<void(const LossRecord&)>& on_log = {});

void write_loss_csv(const std::vector<LossRecord>& history,
                    const std::string& path);

}  // namespace magpinn
