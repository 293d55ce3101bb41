#pragma once

// Shared domain types and numeric conventions. Everything downstream works in
// terms of these: Gaussian input specifications, sigma-point sets in
// standardized z-space, per-moment-order weight tables, and scalar output
// moment summaries. All types are immutable value types after construction.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qpem {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class PointKind : std::uint8_t { central, axis, diagonal, grid, sample };

std::string_view to_string(PointKind kind);
std::optional<PointKind> point_kind_from_string(std::string_view name);

/// Mean vector and covariance of the physical input variables.
struct GaussianSpec {
  Vector mean;
  Matrix covariance;

  Index dim() const { return mean.size(); }
};

/// Returns the list of violated invariants, empty when the spec is usable:
/// matching sizes, symmetry to 1e-12 relative, positive semi-definiteness
/// (smallest eigenvalue >= -1e-10 * largest).
std::vector<std::string> validate_spec(const GaussianSpec& spec);

inline bool is_valid(const GaussianSpec& spec) { return validate_spec(spec).empty(); }

/// Per-dimension skewness and (non-excess) kurtosis of standardized
/// marginals. Normal inputs have skewness 0, kurtosis 3.
struct MarginalShape {
  Vector skewness;
  Vector kurtosis;

  Index dim() const { return skewness.size(); }
};

MarginalShape standard_normal_shape(Index n);
std::vector<std::string> validate_shape(const MarginalShape& shape);

/// Deterministic evaluation locations in standardized z-space, one row per
/// point, with a per-point structural tag.
struct SigmaPointSet {
  Matrix points;                 // N x n
  std::vector<PointKind> kind;   // length N

  Index count() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Index of the (single) central point, if the set has one.
  std::optional<Index> central_index() const;
};

/// Weight vectors used for estimating moment orders 1..4. The first- and
/// second-order vectors always coincide; the third/fourth differ from them
/// only at the central point when scaling parameters are in effect.
struct WeightTable {
  Vector w1, w2, w3, w4;

  Index count() const { return w1.size(); }
  const Vector& order(int k) const;

  static WeightTable uniform(Index n_points);
  /// All four orders equal to `w`.
  static WeightTable flat(Vector w);
};

/// First four moments of a scalar output. Skewness and kurtosis are left
/// unset when the second central moment vanishes (deliberately not NaN).
struct MomentSummary {
  Scalar mean = 0;
  Scalar std = 0;
  std::optional<Scalar> skew;
  std::optional<Scalar> kurt;
  Scalar m2 = 0, m3 = 0, m4 = 0;  // raw central moments
};

/// Model outputs aligned index-for-index with a SigmaPointSet.
struct EvaluationBatch {
  Vector outputs;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// Compensated summation. Every weighted reduction in the toolkit accumulates
// in fixed index order through this, so results are bit-reproducible across
// runs and worker counts.

class CompensatedSum {
 public:
  void add(Scalar v) {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0;
  Scalar comp_ = 0;
};

/// sum_i w[i] * v[i], ascending index order.
Scalar weighted_sum(const Vector& w, const Vector& v);

/// sum_i w[i] * d[i]^k, ascending index order.
Scalar weighted_power_sum(const Vector& w, const Vector& d, int k);

}  // namespace qpem
