#include "qpem/core.hpp"

#include <cmath>
#include <sstream>

namespace qpem {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::central: return "central";
    case PointKind::axis: return "axis";
    case PointKind::diagonal: return "diagonal";
    case PointKind::grid: return "grid";
    case PointKind::sample: return "sample";
  }
  return "unknown";
}

std::optional<PointKind> point_kind_from_string(std::string_view name) {
  if (name == "central") return PointKind::central;
  if (name == "axis") return PointKind::axis;
  if (name == "diagonal") return PointKind::diagonal;
  if (name == "grid") return PointKind::grid;
  if (name == "sample") return PointKind::sample;
  return std::nullopt;
}

std::vector<std::string> validate_spec(const GaussianSpec& spec) {
  std::vector<std::string> violations;
  const Index n = spec.mean.size();
  if (spec.covariance.rows() != spec.covariance.cols()) {
    violations.push_back("covariance is not square");
    return violations;
  }
  if (spec.covariance.rows() != n) {
    std::ostringstream os;
    os << "mean length " << n << " does not match covariance dimension "
       << spec.covariance.rows();
    violations.push_back(os.str());
    return violations;
  }
  if (n == 0) {
    violations.push_back("empty specification");
    return violations;
  }

  const Scalar scale = std::max<Scalar>(1e-300, spec.covariance.cwiseAbs().maxCoeff());
  const Scalar asym = (spec.covariance - spec.covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "covariance asymmetry " << asym / scale << " exceeds 1e-12 relative tolerance";
    violations.push_back(os.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(
      Scalar(0.5) * (spec.covariance + spec.covariance.transpose()),
      Eigen::EigenvaluesOnly);
  const Scalar lambda_min = es.eigenvalues().minCoeff();
  const Scalar lambda_max = es.eigenvalues().maxCoeff();
  if (lambda_min < -1e-10 * std::max<Scalar>(0, lambda_max)) {
    std::ostringstream os;
    os << "covariance is not positive semi-definite (min eigenvalue " << lambda_min << ")";
    violations.push_back(os.str());
  }
  return violations;
}

MarginalShape standard_normal_shape(Index n) {
  MarginalShape shape;
  shape.skewness = Vector::Zero(n);
  shape.kurtosis = Vector::Constant(n, 3.0);
  return shape;
}

std::vector<std::string> validate_shape(const MarginalShape& shape) {
  std::vector<std::string> violations;
  if (shape.skewness.size() != shape.kurtosis.size()) {
    violations.push_back("skewness/kurtosis length mismatch");
    return violations;
  }
  for (Index i = 0; i < shape.dim(); ++i) {
    const Scalar g = shape.skewness[i];
    const Scalar k = shape.kurtosis[i];
    if (!(k - 0.75 * g * g > 0)) {
      std::ostringstream os;
      os << "dimension " << i << ": kurtosis - 3/4 skewness^2 = " << k - 0.75 * g * g
         << " is not positive";
      violations.push_back(os.str());
    }
    if (k - g * g == 0) {
      std::ostringstream os;
      os << "dimension " << i << ": kurtosis equals squared skewness (infinite central weight)";
      violations.push_back(os.str());
    }
  }
  return violations;
}

std::optional<Index> SigmaPointSet::central_index() const {
  for (Index i = 0; i < static_cast<Index>(kind.size()); ++i) {
    if (kind[i] == PointKind::central) return i;
  }
  return std::nullopt;
}

const Vector& WeightTable::order(int k) const {
  switch (k) {
    case 1: return w1;
    case 2: return w2;
    case 3: return w3;
    case 4: return w4;
    default: throw std::out_of_range("weight order must be in 1..4");
  }
}

WeightTable WeightTable::uniform(Index n_points) {
  return flat(Vector::Constant(n_points, 1.0 / static_cast<Scalar>(n_points)));
}

WeightTable WeightTable::flat(Vector w) {
  WeightTable t;
  t.w1 = w;
  t.w2 = w;
  t.w3 = w;
  t.w4 = std::move(w);
  return t;
}

Scalar weighted_sum(const Vector& w, const Vector& v) {
  CompensatedSum acc;
  for (Index i = 0; i < w.size(); ++i) acc.add(w[i] * v[i]);
  return acc.value();
}

Scalar weighted_power_sum(const Vector& w, const Vector& d, int k) {
  CompensatedSum acc;
  for (Index i = 0; i < w.size(); ++i) {
    Scalar t = d[i];
    Scalar p = t;
    for (int j = 1; j < k; ++j) p *= t;
    acc.add(w[i] * p);
  }
  return acc.value();
}

}  // namespace qpem
