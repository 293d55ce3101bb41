#include "qpem/core.hpp"
#include "qpem/estimator.hpp"
#include "qpem/quadratic.hpp"

#include <doctest.h>

#include <cmath>

using namespace qpem;

TEST_CASE("validate_spec accepts the identity case") {
  GaussianSpec spec;
  spec.mean = Vector::Zero(2);
  spec.covariance = Matrix::Identity(2, 2);
  CHECK(validate_spec(spec).empty());
}

TEST_CASE("validate_spec flags an indefinite covariance") {
  // [[1, 2], [2, 1]] has eigenvalues 3 and -1.
  GaussianSpec spec;
  spec.mean = Vector::Zero(2);
  spec.covariance = Matrix(2, 2);
  spec.covariance << 1, 2, 2, 1;
  const auto violations = validate_spec(spec);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("positive semi-definite") != std::string::npos);
}

TEST_CASE("validate_spec flags asymmetry") {
  GaussianSpec spec;
  spec.mean = Vector::Zero(2);
  spec.covariance = Matrix(2, 2);
  spec.covariance << 1, 0.2, 0.3, 1;
  const auto violations = validate_spec(spec);
  REQUIRE(!violations.empty());
  CHECK(violations[0].find("asymmetry") != std::string::npos);
}

TEST_CASE("validate_spec flags a size mismatch") {
  GaussianSpec spec;
  spec.mean = Vector::Zero(3);
  spec.covariance = Matrix::Identity(2, 2);
  CHECK(!validate_spec(spec).empty());
}

TEST_CASE("compensated summation survives cancellation") {
  CompensatedSum acc;
  acc.add(1e16);
  acc.add(1.0);
  acc.add(-1e16);
  CHECK(acc.value() == 1.0);
}

TEST_CASE("weight table invariants hold for generated QPEM tables") {
  for (Index n : {2, 3, 7, 20}) {
    for (Scalar r : {1.5, 3.0, 5.0}) {
      auto [set, weights] = build_qpem(QpemParams{n, r, -8.0, 60.0});
      CAPTURE(n);
      CAPTURE(r);
      CHECK(std::abs(weights.w1.sum() - 1.0) < 1e-12);
      CHECK((weights.w1.array() == weights.w2.array()).all());
      // w3/w4 differ from w1 only at the central index, by exactly zeta/xi.
      const Index c = *set.central_index();
      CHECK(weights.w3[c] - weights.w1[c] == -8.0);
      CHECK(weights.w4[c] - weights.w1[c] == 60.0);
      for (Index i = 0; i < weights.count(); ++i) {
        if (i == c) continue;
        CHECK(weights.w3[i] == weights.w1[i]);
        CHECK(weights.w4[i] == weights.w1[i]);
      }
    }
  }
}

TEST_CASE("antisymmetric models over symmetric sets have zero third moment") {
  // y(-z) = -y(z) makes the output distribution symmetric about zero, so m3
  // vanishes; the central point sits at y = 0, so the zeta scaling is inert.
  auto [set, weights] = build_qpem(QpemParams{3, 3.0, -8.0, 60.0});
  EvaluationBatch batch;
  batch.outputs = Vector(set.count());
  for (Index i = 0; i < set.count(); ++i) {
    const auto z = set.points.row(i);
    batch.outputs[i] = z[0] + 0.25 * z[0] * z[1] * z[2] + 0.1 * z[2] * z[2] * z[2];
  }
  const MomentSummary s = estimate_moments(batch, weights);
  CHECK(std::abs(s.m3) < 1e-12);
  CHECK(std::abs(s.mean) < 1e-12);
}
