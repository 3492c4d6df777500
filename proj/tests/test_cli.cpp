// SPDX-License-Identifier: Apache-2.0
//
// Spawns the installed CLI binary and checks exit codes and outputs.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = MAGPINN_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(fs::path("/tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

void write_config(const fs::path& p, const std::string& extra) {
  std::ofstream out(p);
  out << "w_c = 2.0\nw_e = 1.0\nw_i = 1.0\nw_b = 1.0\nw_w = 1.5\n"
         "d_w = 5.0\nc_d = 2.0\nc_w = 2.0\ng = 3.0\nf_c = 4500\n"
      << extra;
}

}  // namespace

TEST_CASE("missing config file exits 2") {
  CHECK(run("train --config /tmp/definitely_missing.cfg --out /tmp/x") == 2);
  CHECK(run("fem --config /tmp/definitely_missing.cfg --out /tmp/x") == 2);
}

TEST_CASE("train smoke run produces checkpoint and loss log") {
  TmpDir dir("magpinn_cli_train");
  const fs::path cfg = dir.path / "run.cfg";
  write_config(cfg, "n_ite = 10\nn_x = 20\nlog_every = 1\n");
  REQUIRE(run("train --config " + cfg.string() + " --out " +
              (dir.path / "out").string()) == 0);
  CHECK(fs::exists(dir.path / "out/checkpoint_final.txt"));
  const std::string log = slurp(dir.path / "out/loss.csv");
  // Header plus ten rows.
  CHECK(std::count(log.begin(), log.end(), '\n') == 11);
}

TEST_CASE("identical seeds give byte-identical outputs") {
  TmpDir dir("magpinn_cli_repro");
  const fs::path cfg = dir.path / "run.cfg";
  write_config(cfg, "n_ite = 5\nn_x = 10\nseed = 33\n");
  REQUIRE(run("train --config " + cfg.string() + " --out " +
              (dir.path / "a").string()) == 0);
  REQUIRE(run("train --config " + cfg.string() + " --out " +
              (dir.path / "b").string()) == 0);
  CHECK(slurp(dir.path / "a/loss.csv") == slurp(dir.path / "b/loss.csv"));
  CHECK(slurp(dir.path / "a/checkpoint_final.txt") ==
        slurp(dir.path / "b/checkpoint_final.txt"));
}

TEST_CASE("fem subcommand writes mesh and solution CSVs") {
  TmpDir dir("magpinn_cli_fem");
  const fs::path cfg = dir.path / "run.cfg";
  write_config(cfg, "max_area = 2e-6\n");
  REQUIRE(run("fem --config " + cfg.string() + " --out " +
              (dir.path / "out").string()) == 0);
  CHECK(fs::exists(dir.path / "out/nodes.csv"));
  CHECK(fs::exists(dir.path / "out/triangles.csv"));
  CHECK(fs::exists(dir.path / "out/solution.csv"));
}

TEST_CASE("fem without a full design is a config error") {
  TmpDir dir("magpinn_cli_fem_bad");
  const fs::path cfg = dir.path / "run.cfg";
  std::ofstream(cfg) << "g = 3.0\n";  // nine components missing
  CHECK(run("fem --config " + cfg.string() + " --out " +
            (dir.path / "out").string()) == 2);
}

TEST_CASE("corrupted checkpoint exits 3") {
  TmpDir dir("magpinn_cli_ckpt");
  const fs::path cfg = dir.path / "run.cfg";
  write_config(cfg, "n_designs = 1\n");
  const fs::path bad = dir.path / "bad_ckpt.txt";
  std::ofstream(bad) << "garbage\n";
  CHECK(run("eval --config " + cfg.string() + " --checkpoint " + bad.string() +
            " --out " + (dir.path / "out").string()) == 3);
  CHECK(run("force --config " + cfg.string() + " --checkpoint " +
            bad.string() + " --out " + (dir.path / "out").string()) == 3);
}

TEST_CASE("fields export for a trained smoke checkpoint") {
  TmpDir dir("magpinn_cli_fields");
  const fs::path cfg = dir.path / "run.cfg";
  write_config(cfg,
               "n_ite = 5\nn_x = 10\nmax_area = 4e-6\n"
               "grid_nx = 8\ngrid_ny = 4\n");
  REQUIRE(run("train --config " + cfg.string() + " --out " +
              (dir.path / "out").string()) == 0);
  REQUIRE(run("fields --config " + cfg.string() + " --checkpoint " +
              (dir.path / "out/checkpoint_final.txt").string() + " --out " +
              (dir.path / "fields").string()) == 0);
  const std::string grid = slurp(dir.path / "fields/fields.csv");
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 8 * 4 + 1);
  CHECK(fs::exists(dir.path / "fields/error_nodes.csv"));
  CHECK(fs::exists(dir.path / "fields/error_midpoints.csv"));
}
