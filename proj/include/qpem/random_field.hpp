#pragma once

// Truncated Karhunen-Loeve representation of a 1-D Gaussian random field,
// discretized by the Nystrom method with trapezoidal quadrature on a mesh.

#include "qpem/core.hpp"

namespace qpem {

/// Squared-exponential covariance kernel sigma^2 exp(-dx^2 / length^2).
struct Kernel {
  Scalar variance = 1.0;  // sigma^2
  Scalar length = 1.0;    // correlation length

  Scalar operator()(Scalar dx) const;
};

struct KLBasis {
  Vector eigenvalues;  // descending, clipped at zero
  Matrix modes;        // terms x mesh points, quadrature-orthonormal rows
  Vector mesh;
  Scalar mean = 0;     // field mean
  Scalar stdev = 0;    // sigma
  /// sum(eigenvalues) / (sigma^2 * domain length): fraction of the field
  /// variance captured by the truncation.
  Scalar captured_variance_ratio = 0;

  Index terms() const { return eigenvalues.size(); }
};

/// Solves the discrete Fredholm eigenproblem for C(x_i, x_j) =
/// kernel(x_i - x_j) with trapezoid weights on the given strictly increasing
/// mesh, and keeps the `terms` leading eigenpairs. Mode signs are pinned so
/// the entry of largest magnitude is positive.
KLBasis kl_decompose(const Vector& mesh, const Kernel& kernel, Index terms,
                     Scalar mean_value = 0.0);

/// field(x_i) = mean + sum_k sqrt(lambda_k) phi_k(x_i) eta_k.
Vector realize(const KLBasis& basis, const Vector& eta);

}  // namespace qpem
