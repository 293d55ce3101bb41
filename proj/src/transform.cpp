#include "qpem/transform.hpp"

#include "qpem/errors.hpp"

#include <cmath>
#include <sstream>

namespace qpem {

std::string_view to_string(FactorMethod method) {
  return method == FactorMethod::cholesky ? "cholesky" : "eigen";
}

std::optional<FactorMethod> factor_method_from_string(std::string_view name) {
  if (name == "cholesky") return FactorMethod::cholesky;
  if (name == "eigen") return FactorMethod::eigen;
  return std::nullopt;
}

CovFactor factor_covariance(const GaussianSpec& spec, FactorMethod method) {
  const auto violations = validate_spec(spec);
  if (!violations.empty()) {
    throw ParameterError("invalid Gaussian spec: " + violations.front());
  }

  CovFactor factor;
  factor.method = method;
  if (method == FactorMethod::cholesky) {
    Eigen::LLT<Matrix> llt(spec.covariance);
    if (llt.info() != Eigen::Success) {
      throw ParameterError(
          "Cholesky factorization failed (covariance not positive definite); retry with the "
          "eigen factorization");
    }
    factor.matrix = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spec.covariance);
    if (es.info() != Eigen::Success) throw ParameterError("eigen factorization failed");
    Vector lambda = es.eigenvalues();
    const Scalar lambda_max = std::max<Scalar>(0, lambda.maxCoeff());
    for (Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] < -1e-10 * lambda_max) {
        std::ostringstream os;
        os << "covariance eigenvalue " << lambda[i] << " is below the -1e-10*lambda_max "
           << "clipping tolerance";
        throw ParameterError(os.str());
      }
      lambda[i] = std::max<Scalar>(0, lambda[i]);
    }
    factor.matrix = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  }

  const Scalar scale = std::max<Scalar>(1e-300, spec.covariance.cwiseAbs().maxCoeff());
  const Scalar err =
      (factor.matrix * factor.matrix.transpose() - spec.covariance).cwiseAbs().maxCoeff();
  if (err > 1e-10 * scale) {
    std::ostringstream os;
    os << "factor reconstruction error " << err / scale << " exceeds 1e-10 relative";
    throw ParameterError(os.str());
  }
  return factor;
}

Matrix to_x_space(const SigmaPointSet& points, const GaussianSpec& spec, const CovFactor& factor) {
  if (points.dim() != spec.dim() || factor.matrix.rows() != spec.dim() ||
      factor.matrix.cols() != spec.dim()) {
    throw ParameterError("dimension mismatch between points, spec and factor");
  }
  Matrix x = points.points * factor.matrix.transpose();
  x.rowwise() += spec.mean.transpose();
  return x;
}

Matrix corr_to_cov(const Vector& stds, const Matrix& corr) {
  const Index n = stds.size();
  if (corr.rows() != n || corr.cols() != n) throw ParameterError("correlation matrix size mismatch");
  for (Index i = 0; i < n; ++i) {
    if (!(stds[i] >= 0)) throw ParameterError("standard deviations must be non-negative");
    if (std::abs(corr(i, i) - 1.0) > 1e-12) {
      throw ParameterError("correlation matrix must have a unit diagonal");
    }
    for (Index j = 0; j < n; ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-12) {
        throw ParameterError("correlation matrix must be symmetric");
      }
      if (corr(i, j) < -1.0 - 1e-12 || corr(i, j) > 1.0 + 1e-12) {
        throw ParameterError("correlation entries must lie in [-1, 1]");
      }
    }
  }
  return corr.cwiseProduct(stds * stds.transpose());
}

}  // namespace qpem
