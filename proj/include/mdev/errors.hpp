#pragma once

#include <stdexcept>
#include <string>

namespace mdev {

// Thrown when an enumeration / per-path memory budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation is not defined for the given model
// (e.g. analytic tail requested for a model that has none).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdev
