// SPDX-License-Identifier: Apache-2.0
#include "magpinn/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "magpinn/errors.hpp"

namespace magpinn {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad(const std::string& origin, std::size_t line,
                      const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& origin, std::size_t line,
                    const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    bad(origin, line, key + ": not a number: '" + v + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& origin, std::size_t line,
                        const std::string& key, const std::string& v) {
  const double x = parse_double(origin, line, key, v);
  if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x))) {
    bad(origin, line, key + ": not a non-negative integer: '" + v + "'");
  }
  return static_cast<std::size_t>(x);
}

// Table I units, SI conversion factors, canonical index.
struct DesignKey {
  const char* name;
  double to_si;
  std::size_t index;
};
constexpr DesignKey kDesignKeys[] = {
    {"w_c", 1e-2, 0}, {"w_e", 1e-2, 1}, {"w_i", 1e-2, 2}, {"w_b", 1e-2, 3},
    {"w_w", 1e-2, 4}, {"d_w", 1e-2, 5}, {"c_d", 1e-3, 6}, {"c_w", 1e-3, 7},
    {"g", 1e-3, 8},   {"f_c", 1.0, 9},
};

}  // namespace

DeviceParams RunConfig::design() const {
  if (!has_full_design()) {
    throw ConfigError("this run needs a full fixed design (all ten of "
                      "w_c w_e w_i w_b w_w d_w c_d c_w g f_c set)");
  }
  return DeviceParams::from_vector(space.fixed_value);
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bad(origin, lineno, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) bad(origin, lineno, "empty key");
    if (val.empty()) bad(origin, lineno, key + ": empty value");

    auto num = [&] { return parse_double(origin, lineno, key, val); };
    auto cnt = [&] { return parse_count(origin, lineno, key, val); };

    if (key == "n_ite") {
      cfg.train.n_ite = cnt();
    } else if (key == "n_xi") {
      cfg.train.n_xi = cnt();
    } else if (key == "n_x") {
      cfg.train.n_x = cnt();
    } else if (key == "eta_1") {
      cfg.train.eta_1 = num();
    } else if (key == "eta_final") {
      cfg.train.eta_final = num();
    } else if (key == "beta_1") {
      cfg.train.beta_1 = num();
    } else if (key == "beta_2") {
      cfg.train.beta_2 = num();
    } else if (key == "eps_adam") {
      cfg.train.eps_adam = num();
    } else if (key == "seed") {
      cfg.train.seed = static_cast<std::uint64_t>(cnt());
    } else if (key == "checkpoint_every") {
      cfg.train.checkpoint_every = cnt();
    } else if (key == "log_every") {
      cfg.train.log_every = cnt();
    } else if (key == "threads") {
      cfg.train.threads = cnt();
    } else if (key == "out_dir") {
      cfg.train.out_dir = val;
    } else if (key == "optimizer") {
      if (val == "adam") {
        cfg.train.use_adam = true;
      } else if (val == "sgd") {
        cfg.train.use_adam = false;
      } else {
        bad(origin, lineno, "optimizer: expected 'adam' or 'sgd'");
      }
    } else if (key == "l_hidden") {
      cfg.net.L = cnt();
    } else if (key == "d_hidden") {
      cfg.net.d = cnt();
    } else if (key == "m_harmonics") {
      cfg.net.m = cnt();
    } else if (key == "max_area") {
      cfg.fem.max_area = num();
    } else if (key == "fem_tol") {
      cfg.fem.tol = num();
    } else if (key == "max_newton") {
      cfg.fem.max_newton = cnt();
    } else if (key == "cg_tol") {
      cfg.fem.cg_tol = num();
    } else if (key == "n_designs") {
      cfg.n_designs = cnt();
    } else if (key == "mst_points") {
      cfg.mst_points = cnt();
    } else if (key == "grid_nx") {
      cfg.grid_nx = cnt();
    } else if (key == "grid_ny") {
      cfg.grid_ny = cnt();
    } else if (key == "x_star") {
      cfg.scaling.x_star = num();
    } else if (key == "A_star") {
      cfg.scaling.A_star = num();
    } else if (key == "J_star") {
      cfg.scaling.J_star = num();
    } else {
      bool matched = false;
      for (const DesignKey& dk : kDesignKeys) {
        if (key == dk.name) {
          const double si = num() * dk.to_si;
          cfg.space.is_fixed[dk.index] = true;
          cfg.space.fixed_value[dk.index] = si;
          matched = true;
          break;
        }
      }
      if (!matched) bad(origin, lineno, "unknown key '" + key + "'");
    }
  }

  // Derived scales follow any overrides of the base scales.
  cfg.scaling.nu_star = cfg.scaling.x_star * cfg.scaling.x_star *
                        cfg.scaling.J_star / cfg.scaling.A_star;
  cfg.scaling.B_star = cfg.scaling.A_star / cfg.scaling.x_star;
  cfg.net.d_xi = cfg.space.n_free();

  if (cfg.train.n_ite == 0) throw ConfigError(origin + ": n_ite must be >= 1");
  if (cfg.train.n_xi == 0) throw ConfigError(origin + ": n_xi must be >= 1");
  if (cfg.train.n_x == 0) throw ConfigError(origin + ": n_x must be >= 1");
  if (cfg.train.eta_1 <= 0 || cfg.train.eta_final <= 0) {
    throw ConfigError(origin + ": learning rates must be positive");
  }
  if (cfg.net.m > 15) throw ConfigError(origin + ": m_harmonics must be <= 15");
  if (cfg.fem.max_area <= 0) {
    throw ConfigError(origin + ": max_area must be positive");
  }
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (!cfg.space.is_fixed[i]) continue;
    const double v = cfg.space.fixed_value[i];
    if (v < cfg.scaling.xi_min[i] || v > cfg.scaling.xi_max[i]) {
      throw ConfigError(origin + ": " + std::string(param_name(i)) +
                        " outside the admissible box");
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_key_help() {
  return
      "Run configuration, flat key = value lines ('#' comments):\n"
      "  n_ite            iterations                       (default 1000)\n"
      "  n_xi             design samples per iteration     (default 1)\n"
      "  n_x              spatial samples per design       (default 100)\n"
      "  eta_1            initial learning rate            (default 0.3e-3)\n"
      "  eta_final        final learning rate              (default 0.3e-6)\n"
      "  beta_1, beta_2   ADAM moment decays               (0.9, 0.999)\n"
      "  eps_adam         ADAM epsilon                     (1e-8)\n"
      "  optimizer        adam | sgd                       (adam)\n"
      "  seed             RNG seed                         (0)\n"
      "  threads          worker threads, 1 = reproducible (1)\n"
      "  checkpoint_every periodic checkpoint interval     (0 = final only)\n"
      "  log_every        loss log interval                (1)\n"
      "  out_dir          output directory\n"
      "  l_hidden         hidden layers L                  (3)\n"
      "  d_hidden         hidden width d                   (64)\n"
      "  m_harmonics      Fourier harmonics per axis       (3)\n"
      "  max_area         FE element area bound [m^2]      (0.25e-6)\n"
      "  fem_tol          FE relative residual tolerance   (1e-8)\n"
      "  max_newton       FE Newton iteration cap          (50)\n"
      "  cg_tol           inner CG relative tolerance      (1e-10)\n"
      "  n_designs        evaluation suite size            (10)\n"
      "  mst_points       force-path points per segment    (200)\n"
      "  grid_nx, grid_ny field-export resolution          (200, 200)\n"
      "  x_star, A_star, J_star   scaling overrides [SI]\n"
      "  w_c w_e w_i w_b w_w d_w [cm], c_d c_w g [mm], f_c [At]\n"
      "                   freeze a design component at this value\n";
}

}  // namespace magpinn
