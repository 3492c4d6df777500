// SPDX-License-Identifier: Apache-2.0
#include "magpinn/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "magpinn/errors.hpp"

namespace magpinn {

namespace {

constexpr const char* kMagic = "magpinn-checkpoint";
constexpr int kVersion = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out << kMagic << " v" << kVersion << "\n";
  out << "L " << ck.net.L << "\n";
  out << "d " << ck.net.d << "\n";
  out << "m " << ck.net.m << "\n";
  out << "d_xi " << ck.net.d_xi << "\n";
  out << "x_star " << fmt(ck.scaling.x_star) << "\n";
  out << "A_star " << fmt(ck.scaling.A_star) << "\n";
  out << "J_star " << fmt(ck.scaling.J_star) << "\n";
  out << "xi_min";
  for (double v : ck.scaling.xi_min) out << ' ' << fmt(v);
  out << "\nxi_max";
  for (double v : ck.scaling.xi_max) out << ' ' << fmt(v);
  out << "\nfixed_mask";
  for (bool f : ck.space.is_fixed) out << ' ' << (f ? 1 : 0);
  out << "\nfixed_value";
  for (double v : ck.space.fixed_value) out << ' ' << fmt(v);
  out << "\nn_theta " << ck.theta.size() << "\n";
  for (double v : ck.theta) out << fmt(v) << "\n";
  if (!out) throw CheckpointError("write failure: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::string magic, ver;
  in >> magic >> ver;
  if (magic != kMagic || ver != "v1") {
    throw CheckpointError("unrecognized checkpoint format in " + path);
  }

  Checkpoint ck{};
  auto expect = [&](const char* key) {
    std::string k;
    in >> k;
    if (k != key) {
      throw CheckpointError("checkpoint " + path + ": expected key '" + key +
                            "', got '" + k + "'");
    }
  };
  expect("L");
  in >> ck.net.L;
  expect("d");
  in >> ck.net.d;
  expect("m");
  in >> ck.net.m;
  expect("d_xi");
  in >> ck.net.d_xi;
  expect("x_star");
  in >> ck.scaling.x_star;
  expect("A_star");
  in >> ck.scaling.A_star;
  expect("J_star");
  in >> ck.scaling.J_star;
  ck.scaling.nu_star =
      ck.scaling.x_star * ck.scaling.x_star * ck.scaling.J_star / ck.scaling.A_star;
  ck.scaling.B_star = ck.scaling.A_star / ck.scaling.x_star;
  expect("xi_min");
  for (double& v : ck.scaling.xi_min) in >> v;
  expect("xi_max");
  for (double& v : ck.scaling.xi_max) in >> v;
  expect("fixed_mask");
  for (std::size_t i = 0; i < kNumParams; ++i) {
    int f;
    in >> f;
    ck.space.is_fixed[i] = f != 0;
  }
  expect("fixed_value");
  for (double& v : ck.space.fixed_value) in >> v;
  expect("n_theta");
  std::size_t n;
  in >> n;
  if (!in) throw CheckpointError("truncated checkpoint header: " + path);
  if (ck.net.L < 1 || ck.net.d < 1 || ck.net.d_xi != ck.space.n_free()) {
    throw CheckpointError("inconsistent architecture in " + path);
  }
  if (n != ck.net.param_count()) {
    throw CheckpointError("checkpoint " + path + ": theta size " +
                          std::to_string(n) + " does not match architecture (" +
                          std::to_string(ck.net.param_count()) + ")");
  }
  ck.theta.resize(n);
  for (double& v : ck.theta) in >> v;
  if (!in) throw CheckpointError("truncated parameter data: " + path);
  return ck;
}

}  // namespace magpinn
