#pragma once

// Affine map between standardized z-space and correlated physical x-space:
// x = mu + L z with L L^T = P.

#include "qpem/core.hpp"

namespace qpem {

enum class FactorMethod { cholesky, eigen };

std::string_view to_string(FactorMethod method);
std::optional<FactorMethod> factor_method_from_string(std::string_view name);

/// Square-root factor of an input covariance: L L^T reconstructs the
/// covariance to 1e-10 relative in the max norm.
struct CovFactor {
  Matrix matrix;
  FactorMethod method = FactorMethod::cholesky;
};

/// cholesky: lower-triangular factor in the spec's variable order (fails on
/// indefinite input; callers may retry with eigen). eigen: V diag(sqrt(lambda))
/// with eigenvalues clipped to zero when above -1e-10 * lambda_max and
/// rejected below.
CovFactor factor_covariance(const GaussianSpec& spec, FactorMethod method);

/// Rows X_i = mu + L z_i.
Matrix to_x_space(const SigmaPointSet& points, const GaussianSpec& spec, const CovFactor& factor);

/// P_ij = corr_ij * std_i * std_j. Validates symmetry, unit diagonal and
/// entries within [-1, 1].
Matrix corr_to_cov(const Vector& stds, const Matrix& corr);

}  // namespace qpem
