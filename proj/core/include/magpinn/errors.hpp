// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace magpinn {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A design parameter lies outside its admissible range.
struct OutOfBoxError : Error {
  using Error::Error;
};

// A spatial point lies outside the computational rectangle.
struct OutsideDomainError : Error {
  using Error::Error;
};

// B-H data whose derived reluctivity knots are not non-decreasing.
struct NonMonotoneDataError : Error {
  using Error::Error;
};

// Array shapes do not match the declared network architecture.
struct ShapeMismatchError : Error {
  using Error::Error;
};

// Newton iteration failed to reach the requested residual tolerance.
struct NonConvergenceError : Error {
  using Error::Error;
};

// Malformed configuration file or unknown key.
struct ConfigError : Error {
  using Error::Error;
};

// Checkpoint file cannot be loaded (version, shape, or corruption).
struct CheckpointError : Error {
  using Error::Error;
};

// Loss became NaN/Inf during training.
struct TrainingDivergedError : Error {
  using Error::Error;
};

}  // namespace magpinn
