#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace transmission {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : Error {
  using Error::Error;
};

// Interface polyline finer than the mesh can resolve.
struct ResolutionError : GeometryError {
  using GeometryError::GeometryError;
};

struct ValidationError : Error {
  using Error::Error;
};

struct AssemblyError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

// Carries every violation found, not just the first.
struct ConfigError : Error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

}  // namespace transmission
