#include "qpem/hpem.hpp"

#include "qpem/errors.hpp"

#include <cmath>
#include <sstream>

namespace qpem {

std::pair<SigmaPointSet, WeightTable> build_hpem(Index n, const MarginalShape& shape) {
  if (n < 1) throw ParameterError("HPEM requires dimension >= 1");
  if (shape.dim() != n) throw ParameterError("marginal shape dimension mismatch");
  const auto violations = validate_shape(shape);
  if (!violations.empty()) throw ParameterError("invalid marginal shape: " + violations.front());

  const Index count = 2 * n + 1;
  SigmaPointSet set;
  set.points = Matrix::Zero(count, n);
  set.kind.assign(count, PointKind::axis);
  set.kind[0] = PointKind::central;

  Vector w = Vector::Zero(count);
  CompensatedSum w0;
  w0.add(1.0);
  for (Index i = 0; i < n; ++i) {
    const Scalar g = shape.skewness[i];
    const Scalar k = shape.kurtosis[i];
    const Scalar root = std::sqrt(k - 0.75 * g * g);
    const Scalar c1 = 0.5 * g + root;
    const Scalar c2 = 0.5 * g - root;
    set.points(1 + i, i) = c1;
    set.points(1 + n + i, i) = c2;
    w[1 + i] = 1.0 / (c1 * (c1 - c2));
    w[1 + n + i] = -1.0 / (c2 * (c1 - c2));
    w0.add(-1.0 / (k - g * g));
  }
  w[0] = w0.value();
  return {std::move(set), WeightTable::flat(std::move(w))};
}

}  // namespace qpem
