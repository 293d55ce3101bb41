#pragma once

#include <stdexcept>
#include <string>

namespace qpem {

/// Invalid user-facing parameters (dimension, r, skip, config files).
/// Maps to CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A response model rejected its input or produced a non-finite output.
/// Maps to CLI exit code 3.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// External-process line protocol failure (exit status, short or malformed
/// output, timeout). Maps to CLI exit code 4.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpem
