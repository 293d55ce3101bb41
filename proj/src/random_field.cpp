#include "qpem/random_field.hpp"

#include "qpem/errors.hpp"

#include <cmath>
#include <sstream>

namespace qpem {

Scalar Kernel::operator()(Scalar dx) const {
  const Scalar t = dx / length;
  return variance * std::exp(-t * t);
}

KLBasis kl_decompose(const Vector& mesh, const Kernel& kernel, Index terms, Scalar mean_value) {
  const Index m = mesh.size();
  if (m < 2) throw ParameterError("KL mesh needs at least two points");
  if (terms < 1 || terms > m) {
    std::ostringstream os;
    os << "KL term count " << terms << " must lie in [1, mesh size " << m << "]";
    throw ParameterError(os.str());
  }
  if (!(kernel.variance > 0) || !(kernel.length > 0)) {
    throw ParameterError("kernel variance and correlation length must be positive");
  }
  for (Index i = 1; i < m; ++i) {
    if (!(mesh[i] > mesh[i - 1])) throw ParameterError("KL mesh must be strictly increasing");
  }

  // Trapezoid quadrature weights.
  Vector w(m);
  w[0] = 0.5 * (mesh[1] - mesh[0]);
  w[m - 1] = 0.5 * (mesh[m - 1] - mesh[m - 2]);
  for (Index i = 1; i + 1 < m; ++i) w[i] = 0.5 * (mesh[i + 1] - mesh[i - 1]);

  Matrix cov(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = kernel(mesh[i] - mesh[j]);
    }
  }

  // Symmetrized Nystrom problem: B = W^{1/2} C W^{1/2}.
  const Vector sw = w.cwiseSqrt();
  const Matrix b = sw.asDiagonal() * cov * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  if (es.info() != Eigen::Success) throw ParameterError("KL eigenproblem failed to converge");

  KLBasis basis;
  basis.mesh = mesh;
  basis.mean = mean_value;
  basis.stdev = std::sqrt(kernel.variance);
  basis.eigenvalues = Vector(terms);
  basis.modes = Matrix(terms, m);

  const Scalar lambda_max = es.eigenvalues().maxCoeff();
  for (Index k = 0; k < terms; ++k) {
    Scalar lambda = es.eigenvalues()[m - 1 - k];  // Eigen sorts ascending
    if (lambda < -1e-12 * lambda_max) {
      std::ostringstream os;
      os << "KL eigenvalue " << lambda << " below the clipping tolerance";
      throw ParameterError(os.str());
    }
    basis.eigenvalues[k] = std::max<Scalar>(0, lambda);
    Vector mode = es.eigenvectors().col(m - 1 - k).cwiseQuotient(sw);
    // Pin the arbitrary eigenvector sign: largest-magnitude entry positive.
    Index arg_max = 0;
    mode.cwiseAbs().maxCoeff(&arg_max);
    if (mode[arg_max] < 0) mode = -mode;
    basis.modes.row(k) = mode.transpose();
  }

  CompensatedSum trace;
  for (Index k = 0; k < terms; ++k) trace.add(basis.eigenvalues[k]);
  basis.captured_variance_ratio = trace.value() / (kernel.variance * w.sum());
  return basis;
}

Vector realize(const KLBasis& basis, const Vector& eta) {
  if (eta.size() != basis.terms()) {
    std::ostringstream os;
    os << "KL coefficient vector length " << eta.size() << " does not match term count "
       << basis.terms();
    throw ParameterError(os.str());
  }
  const Vector scaled = basis.eigenvalues.cwiseSqrt().cwiseProduct(eta);
  Vector field = basis.modes.transpose() * scaled;
  field.array() += basis.mean;
  return field;
}

}  // namespace qpem
