// SPDX-License-Identifier: Apache-2.0
//
// magpinn command-line driver.
//
// Subcommands: train, fem, eval, fields, force.  Exit codes: 0 ok,
// 2 config error, 3 checkpoint error, 4 solver non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "magpinn/checkpoint.hpp"
#include "magpinn/config.hpp"
#include "magpinn/errors.hpp"
#include "magpinn/fem.hpp"
#include "magpinn/metrics.hpp"
#include "magpinn/training.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCheckpoint = 3;
constexpr int kExitNonConvergence = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool out_required) {
  cmd->add_option("--config", opts.config_path, "run configuration file")
      ->required();
  auto* out = cmd->add_option("--out", opts.out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--threads", opts.threads,
                  "override worker threads (1 = strict determinism)");
}

magpinn::RunConfig load_run_config(const CommonOpts& opts) {
  magpinn::RunConfig cfg = magpinn::parse_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.train.out_dir = opts.out_dir;
  if (opts.seed) cfg.train.seed = *opts.seed;
  if (opts.threads) cfg.train.threads = *opts.threads;
  if (!cfg.train.out_dir.empty()) {
    std::filesystem::create_directories(cfg.train.out_dir);
  }
  return cfg;
}

magpinn::Problem make_problem(const magpinn::RunConfig& cfg) {
  return {cfg.scaling, magpinn::ReluctivityModel(magpinn::default_bh_curve()),
          cfg.space};
}

int cmd_train(const CommonOpts& opts) {
  const magpinn::RunConfig cfg = load_run_config(opts);
  const magpinn::Problem problem = make_problem(cfg);
  std::printf("training: L=%zu d=%zu m=%zu d_xi=%zu, %zu iterations\n",
              cfg.net.L, cfg.net.d, cfg.net.m, cfg.net.d_xi, cfg.train.n_ite);
  magpinn::train(cfg.train, cfg.net, problem,
                 [](const magpinn::LossRecord& r) {
                   std::printf("iter %zu  eta %.6g  loss %.10g\n", r.iteration,
                               r.eta, r.loss);
                 });
  std::printf("done; checkpoint and loss log in %s\n",
              cfg.train.out_dir.c_str());
  return 0;
}

int cmd_fem(const CommonOpts& opts, std::optional<double> max_area,
            std::optional<double> tol) {
  magpinn::RunConfig cfg = load_run_config(opts);
  if (max_area) cfg.fem.max_area = *max_area;
  if (tol) cfg.fem.tol = *tol;
  const magpinn::DeviceParams xi = cfg.design();
  const magpinn::DeviceLayout layout = magpinn::build_layout(xi);
  const magpinn::Mesh mesh = magpinn::build_mesh(layout, cfg.fem.max_area);
  std::printf("mesh: %zu nodes, %zu triangles\n", mesh.n_nodes(),
              mesh.n_tris());
  const magpinn::ReluctivityModel materials(magpinn::default_bh_curve());
  const magpinn::FemSolution sol =
      magpinn::solve(mesh, magpinn::make_fem_problem(materials, xi), cfg.fem);
  std::printf("newton converged in %zu iterations, residual %.3g\n",
              sol.report.iterations, sol.report.residual);
  const std::string& out = cfg.train.out_dir;
  magpinn::write_mesh_csv(sol.mesh, out + "/nodes.csv", out + "/triangles.csv");
  magpinn::write_solution_csv(sol, out + "/solution.csv");
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& ckpt_path) {
  const magpinn::RunConfig cfg = load_run_config(opts);
  const magpinn::Checkpoint ck = magpinn::load_checkpoint(ckpt_path);
  magpinn::NetworkParams params(ck.net);
  params.theta = ck.theta;
  const magpinn::ReluctivityModel materials(magpinn::default_bh_curve());
  magpinn::SuiteSettings settings;
  settings.n_designs = cfg.n_designs;
  settings.seed = cfg.train.seed;
  settings.fem = cfg.fem;
  settings.mst_points = cfg.mst_points;
  const magpinn::ErrorReport report = magpinn::evaluate_suite(
      params, ck.scaling, ck.space, materials, settings);
  const std::string& out = cfg.train.out_dir;
  magpinn::write_report_csv(report, out + "/report.csv");
  magpinn::write_report_summary(report, out + "/summary.txt");
  std::printf("evaluated %zu designs (%zu FE failures)\n",
              report.designs.size(), report.n_failed);
  std::printf("mean e_A_rel %.6g, mean e_F_rel %.6g\n", report.mean_e_a_rel,
              report.mean_e_f_rel);
  return 0;
}

int cmd_fields(const CommonOpts& opts, const std::string& ckpt_path) {
  const magpinn::RunConfig cfg = load_run_config(opts);
  const magpinn::Checkpoint ck = magpinn::load_checkpoint(ckpt_path);
  magpinn::NetworkParams params(ck.net);
  params.theta = ck.theta;
  const magpinn::DeviceParams xi = cfg.design();
  const magpinn::DeviceLayout layout = magpinn::build_layout(xi);
  const std::vector<double> xi_free = ck.space.restrict(xi, ck.scaling);
  const magpinn::FieldEvaluator pinn =
      magpinn::make_pinn_evaluator(params, xi_free, layout, ck.scaling);

  const std::string& out = cfg.train.out_dir;
  {  // PINN fields on a uniform grid.
    std::ofstream grid(out + "/fields.csv");
    grid << "x,y,region,A,Bx,By,Bmag\n";
    static const char* names[] = {"core", "winding", "air"};
    char buf[200];
    for (std::size_t j = 0; j < cfg.grid_ny; ++j) {
      const double y = layout.L_y * (static_cast<double>(j) + 0.5) /
                       static_cast<double>(cfg.grid_ny);
      for (std::size_t i = 0; i < cfg.grid_nx; ++i) {
        const double x = layout.L_x * (static_cast<double>(i) + 0.5) /
                         static_cast<double>(cfg.grid_nx);
        const magpinn::FemEval e = pinn({x, y});
        std::snprintf(
            buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g\n", x, y,
            names[static_cast<int>(magpinn::classify(layout, {x, y}))], e.A,
            e.Bx, e.By, std::hypot(e.Bx, e.By));
        grid << buf;
      }
    }
  }

  const magpinn::ReluctivityModel materials(magpinn::default_bh_curve());
  const magpinn::Mesh mesh = magpinn::build_mesh(layout, cfg.fem.max_area);
  const magpinn::FemSolution sol =
      magpinn::solve(mesh, magpinn::make_fem_problem(materials, xi), cfg.fem);
  magpinn::absolute_error_fields(sol, pinn, layout, out + "/error_nodes.csv",
                                 out + "/error_midpoints.csv");
  std::printf("wrote fields.csv, error_nodes.csv, error_midpoints.csv to %s\n",
              out.c_str());
  return 0;
}

int cmd_force(const CommonOpts& opts, const std::string& ckpt_path) {
  const magpinn::RunConfig cfg = load_run_config(opts);
  const magpinn::DeviceParams xi = cfg.design();
  const magpinn::DeviceLayout layout = magpinn::build_layout(xi);
  const magpinn::MstPath path =
      magpinn::make_mst_path(layout, xi, cfg.mst_points);

  const magpinn::ReluctivityModel materials(magpinn::default_bh_curve());
  const magpinn::Mesh mesh = magpinn::build_mesh(layout, cfg.fem.max_area);
  const magpinn::FemSolution sol =
      magpinn::solve(mesh, magpinn::make_fem_problem(materials, xi), cfg.fem);
  const double f_fe =
      magpinn::mst_force(magpinn::make_fem_evaluator(sol), path);
  std::printf("F_y (FE)   = %.8g N/m\n", f_fe);

  if (!ckpt_path.empty()) {
    const magpinn::Checkpoint ck = magpinn::load_checkpoint(ckpt_path);
    magpinn::NetworkParams params(ck.net);
    params.theta = ck.theta;
    const std::vector<double> xi_free = ck.space.restrict(xi, ck.scaling);
    const double f_pinn = magpinn::mst_force(
        magpinn::make_pinn_evaluator(params, xi_free, layout, ck.scaling),
        path);
    std::printf("F_y (PINN) = %.8g N/m\n", f_pinn);
    std::printf("relative difference = %.4g\n",
                std::abs(f_fe - f_pinn) / std::abs(f_fe));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magpinn: parametric nonlinear magnetostatics via "
               "coenergy-minimizing networks, with a built-in FE oracle"};
  app.require_subcommand(1);
  app.footer(magpinn::config_key_help());

  CommonOpts train_o, fem_o, eval_o, fields_o, force_o;
  std::optional<double> fem_max_area, fem_tol;
  std::string eval_ckpt, fields_ckpt, force_ckpt;

  auto* train = app.add_subcommand("train", "train a model from a config");
  add_common(train, train_o, true);

  auto* fem = app.add_subcommand("fem", "solve one design with the FE oracle");
  add_common(fem, fem_o, true);
  fem->add_option("--max-area", fem_max_area, "element area bound [m^2]");
  fem->add_option("--tol", fem_tol, "relative residual tolerance");

  auto* eval = app.add_subcommand(
      "eval", "error/force report for a checkpoint over sampled designs");
  add_common(eval, eval_o, true);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();

  auto* fields = app.add_subcommand(
      "fields", "export model fields and FE error maps for a fixed design");
  add_common(fields, fields_o, true);
  fields->add_option("--checkpoint", fields_ckpt, "checkpoint file")
      ->required();

  auto* force = app.add_subcommand(
      "force", "Maxwell-stress force on the I-core for a fixed design");
  add_common(force, force_o, false);
  force->add_option("--checkpoint", force_ckpt,
                    "checkpoint file (optional; FE-only without it)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_o);
    if (fem->parsed()) return cmd_fem(fem_o, fem_max_area, fem_tol);
    if (eval->parsed()) return cmd_eval(eval_o, eval_ckpt);
    if (fields->parsed()) return cmd_fields(fields_o, fields_ckpt);
    if (force->parsed()) return cmd_force(force_o, force_ckpt);
  } catch (const magpinn::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const magpinn::CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return kExitCheckpoint;
  } catch (const magpinn::NonConvergenceError& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const magpinn::TrainingDivergedError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const magpinn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
