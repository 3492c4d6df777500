// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "magpinn/network.hpp"
#include "magpinn/scaling.hpp"

namespace magpinn {

// Everything needed to re-evaluate a trained model: architecture, the
// nondimensionalization it was trained with, the design-space freeze
// mask, and theta.
struct Checkpoint {
  NetworkConfig net;
  ScalingConstants scaling;
  ParamSpace space;
  std::vector<double> theta;
};

// Versioned UTF-8 text format, full round-trip decimal precision.
void save_checkpoint(const Checkpoint& ck, const std::string& path);

// Rejects unknown versions and shape mismatches with CheckpointError.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace magpinn
