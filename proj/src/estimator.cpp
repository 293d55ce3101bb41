#include "qpem/estimator.hpp"

#include "qpem/errors.hpp"

#include <cmath>
#include <sstream>

namespace qpem {

MomentSummary estimate_moments(const EvaluationBatch& batch, const WeightTable& weights) {
  const Index N = batch.outputs.size();
  if (N == 0) throw ParameterError("empty evaluation batch");
  if (weights.count() != N) {
    std::ostringstream os;
    os << "batch length " << N << " does not match weight length " << weights.count();
    throw ParameterError(os.str());
  }
  for (Index i = 0; i < N; ++i) {
    if (!std::isfinite(batch.outputs[i])) {
      std::ostringstream os;
      os << "non-finite model output at point index " << i;
      if (!batch.provenance.empty()) os << " (" << batch.provenance << ")";
      throw ModelError(os.str());
    }
  }

  MomentSummary summary;
  summary.mean = weighted_sum(weights.w1, batch.outputs);

  // A bit-constant batch is exactly degenerate: weighted residuals are zero
  // by construction, not just small.
  if (batch.outputs.minCoeff() == batch.outputs.maxCoeff()) {
    summary.mean = batch.outputs[0];
    summary.std = 0;
    return summary;
  }

  const Vector deviations = batch.outputs.array() - summary.mean;
  summary.m2 = weighted_power_sum(weights.w2, deviations, 2);
  summary.m3 = weighted_power_sum(weights.w3, deviations, 3);
  summary.m4 = weighted_power_sum(weights.w4, deviations, 4);

  const Scalar dev_max = deviations.cwiseAbs().maxCoeff();
  const Scalar mass = weights.w2.cwiseAbs().sum();
  if (summary.m2 < -1e-12 * mass * dev_max * dev_max) {
    std::ostringstream os;
    os << "second central moment " << summary.m2
       << " is negative beyond the tolerance attributable to rounding of negative weights";
    throw ModelError(os.str());
  }

  const Scalar m2 = std::max<Scalar>(0, summary.m2);
  summary.std = std::sqrt(m2);
  if (m2 > 0) {
    summary.skew = summary.m3 / (m2 * std::sqrt(m2));
    summary.kurt = summary.m4 / (m2 * m2);
  }
  return summary;
}

namespace {

std::optional<Scalar> rel_error(Scalar est, Scalar ref) {
  if (ref == 0 || !std::isfinite(ref)) return std::nullopt;
  return std::abs(est - ref) / std::abs(ref);
}

std::optional<Scalar> rel_error(const std::optional<Scalar>& est, const std::optional<Scalar>& ref) {
  if (!est || !ref) return std::nullopt;
  return rel_error(*est, *ref);
}

}  // namespace

ErrorReport relative_errors(const MomentSummary& estimate, const MomentSummary& reference,
                            std::string reference_provenance) {
  ErrorReport report;
  report.mean_error = rel_error(estimate.mean, reference.mean);
  report.std_error = rel_error(estimate.std, reference.std);
  report.skew_error = rel_error(estimate.skew, reference.skew);
  report.kurt_error = rel_error(estimate.kurt, reference.kurt);
  report.reference = std::move(reference_provenance);
  return report;
}

}  // namespace qpem
