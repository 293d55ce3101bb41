#pragma once

// Built-in response models, their input specifications, stored published
// reference values, analytic oracles, and the Monte Carlo reference runner.

#include "qpem/core.hpp"
#include "qpem/random_field.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qpem {

struct ReferenceRow {
  std::string method;      // e.g. "mc", "qpem-r3-scaled", "mc-ci-lower"
  MomentSummary moments;
  std::string provenance;  // identifies the published table the row came from
};

struct BenchmarkCase {
  std::string name;
  std::string description;
  Index dim = 0;
  GaussianSpec input;
  std::string units_note;
  std::function<Scalar(const Vector&)> model;
  std::vector<ReferenceRow> references;
  std::optional<MomentSummary> analytic;  // exact moments, when known

  const ReferenceRow* reference(std::string_view method) const;
};

const std::vector<std::string>& benchmark_case_names();

/// Builds a case by name ("polynomial" takes the dimension argument, the
/// structural cases have fixed dimensions). Throws ParameterError for unknown
/// names, listing the available cases.
BenchmarkCase make_benchmark_case(std::string_view name, std::optional<Index> dim = {});

// ---------------------------------------------------------------------------
// Models

/// y = sum_{i<=n} (sum_{j<=i} x_j)^2.
Scalar polynomial_model(const Vector& x);

/// Exact moments of the polynomial model for x ~ N(mean_value * 1, I),
/// from the quadratic-form cumulants
///   kappa_r = 2^{r-1} (r-1)! [tr(M^r) + r m^T M^r m],  M = L^T L,
/// with L the lower-triangular all-ones matrix.
MomentSummary quadform_moment_oracle(Index n, Scalar mean_value = 5.0);

/// Peak vertical deflection of the roof truss, in mm.
/// x = (q, l, A_s, A_c, E_s, E_c) in SI units.
Scalar rooftruss_model(const Vector& x);

/// Top horizontal displacement of the six-story frame, in mm.
/// x = (F_1..F_6 [kN], EI_1..EI_12 [kN m^2]), story height 4 m.
Scalar sixstory_model(const Vector& x);

/// Tip displacement of the 1-D elastic bar with random axial rigidity, in mm.
/// The 20 inputs are standard-normal KL coefficients; the rigidity field is
/// realized on the 101-node FEA mesh and each element uses the midpoint
/// (nodal-average) value.
class ElasticBarModel {
 public:
  ElasticBarModel();
  Scalar operator()(const Vector& eta) const;
  const KLBasis& basis() const { return basis_; }

  static constexpr Index kTerms = 20;
  static constexpr Index kElements = 100;

 private:
  KLBasis basis_;
};

// ---------------------------------------------------------------------------
// Evaluation plumbing

/// Evaluates the model on every row of xs, preserving index order. With
/// workers > 1 the rows are split into contiguous slices evaluated
/// concurrently; the output is identical for any worker count. Model
/// exceptions are rethrown as ModelError with the failing (lowest) row index.
EvaluationBatch evaluate_model(const std::function<Scalar(const Vector&)>& model, const Matrix& xs,
                               std::string provenance, Index workers = 1);

struct McReference {
  MomentSummary summary;
  Index count = 0;
  std::uint64_t seed = 0;
  std::string provenance;
};

/// Seeded Monte Carlo pipeline for a case: generate, transform (Cholesky),
/// evaluate, estimate with uniform weights. Bit-identical for a fixed
/// (N, seed) regardless of the worker count.
McReference mc_reference(const BenchmarkCase& bench, Index count, std::uint64_t seed,
                         Index workers = 1);

}  // namespace qpem
