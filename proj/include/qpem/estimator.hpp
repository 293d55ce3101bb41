#pragma once

// Weighted output-moment estimation: turns index-aligned model evaluations
// and a weight table into mean, standard deviation, skewness and kurtosis.
// The order-specific weight vectors carry any central-point scaling, so the
// scaled and unscaled estimators share one code path.

#include "qpem/core.hpp"

#include <string>

namespace qpem {

/// ybar = sum w1_i Y_i; m_k = sum wk_i (Y_i - ybar)^k for k = 2, 3, 4;
/// std = sqrt(m2), skew = m3 / m2^{3/2}, kurt = m4 / m2^2 (non-excess).
/// Reductions run in fixed index order with compensated summation. Skew and
/// kurt stay unset when m2 is not positive (a bit-constant batch reports
/// std = 0 exactly). Throws ModelError on non-finite outputs, ParameterError
/// on length mismatch, and flags m2 below -1e-12 * sum|w2| * max|Y - ybar|^2
/// as a negative-weight inconsistency.
MomentSummary estimate_moments(const EvaluationBatch& batch, const WeightTable& weights);

/// Per-moment relative errors |est - ref| / |ref|; entries with a zero (or
/// undefined) reference are flagged as unset rather than NaN.
struct ErrorReport {
  std::optional<Scalar> mean_error;
  std::optional<Scalar> std_error;
  std::optional<Scalar> skew_error;
  std::optional<Scalar> kurt_error;
  std::string reference;  // provenance of the reference row
};

ErrorReport relative_errors(const MomentSummary& estimate, const MomentSummary& reference,
                            std::string reference_provenance = {});

}  // namespace qpem
