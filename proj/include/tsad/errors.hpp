#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace tsad {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor/graph shape mismatches; the message names the primitive and shapes.
struct ShapeError : Error {
  using Error::Error;
};

// Malformed sequences, datasets, or files.
struct DataError : Error {
  using Error::Error;
};

// Bad run configuration (unknown keys, invalid values, missing presets).
struct ConfigError : Error {
  using Error::Error;
};

// Non-finite values, diverged training runs.
struct NumericError : Error {
  using Error::Error;
};

// Stream-concatenate arbitrary arguments into a message string.
template <class... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace tsad
