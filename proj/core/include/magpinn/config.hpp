// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "magpinn/fem.hpp"
#include "magpinn/network.hpp"
#include "magpinn/scaling.hpp"
#include "magpinn/training.hpp"

namespace magpinn {

// Parsed union of everything a run needs.  The config file is flat
// `key = value` UTF-8 text; '#' starts a comment, blank lines are
// ignored, unknown keys are a hard error.  Design keys carry Table I
// units (w_i..d_w in cm, c_w/c_d/g in mm, f_c in A-turns) and are
// converted to SI here; setting one freezes that component.
struct RunConfig {
  TrainConfig train;
  NetworkConfig net;  // d_xi is derived from the freeze mask
  FemSettings fem;
  ScalingConstants scaling = default_constants();
  ParamSpace space = ParamSpace::all_free();
  std::size_t n_designs = 10;   // evaluation suite size
  std::size_t mst_points = 200;
  std::size_t grid_nx = 200;    // field-export resolution
  std::size_t grid_ny = 200;

  bool has_full_design() const {
    for (bool f : space.is_fixed)
      if (!f) return false;
    return true;
  }
  // Requires has_full_design().
  DeviceParams design() const;
};

// Throws ConfigError (missing file, bad syntax, unknown key, bad value,
// design component outside the admissible box).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<string>");

// One line per key: name, unit, default.  Printed by --help.
std::string config_key_help();

}  // namespace magpinn
