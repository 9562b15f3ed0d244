#pragma once

#include <stdexcept>
#include <string>

namespace flowmcg {

/// Malformed or out-of-contract input (CLI exit code 1).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A bounded search (depth, radius, window) ran out before reaching an answer
/// (CLI exit code 2). Never a mathematical negative.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Two computations that must agree did not (CLI exit code 3).
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace flowmcg
