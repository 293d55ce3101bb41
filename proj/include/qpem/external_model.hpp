#pragma once

// Adapter for response models that live in external executables. Line
// protocol: one comma-separated decimal x vector per request line, one
// decimal output per response line, same order; the process reads until
// end-of-input and must flush per line or per batch.

#include "qpem/core.hpp"

#include <string>

namespace qpem {

struct ExternalModelOptions {
  std::string command;          // run through /bin/sh -c
  double timeout_seconds = 300; // per batch slice; <= 0 disables the timeout
  Index workers = 1;            // processes over disjoint contiguous slices
};

class ExternalModel {
 public:
  explicit ExternalModel(ExternalModelOptions options);

  /// One output per row of xs, order preserved. Throws ProtocolError on
  /// nonzero exit, malformed or missing output (naming the missing index
  /// range), or timeout.
  Vector evaluate(const Matrix& xs) const;

  const ExternalModelOptions& options() const { return options_; }

 private:
  Vector evaluate_slice(const Matrix& xs, Index begin, Index end) const;

  ExternalModelOptions options_;
};

}  // namespace qpem
