#include "qpem/estimator.hpp"

#include "qpem/errors.hpp"
#include "qpem/quadratic.hpp"

#include <doctest.h>

#include <cmath>

using namespace qpem;

namespace {

EvaluationBatch batch_of(const SigmaPointSet& set, Scalar (*f)(const Vector&)) {
  EvaluationBatch batch;
  batch.outputs = Vector(set.count());
  for (Index i = 0; i < set.count(); ++i) batch.outputs[i] = f(set.points.row(i).transpose());
  return batch;
}

}  // namespace

TEST_CASE("constant model: mean c, std 0, shape undefined") {
  auto [set, weights] = build_qpem(QpemParams{2, 3.0, -8.0, 60.0});
  EvaluationBatch batch;
  batch.outputs = Vector::Constant(set.count(), 4.25);
  const MomentSummary s = estimate_moments(batch, weights);
  CHECK(s.mean == 4.25);
  CHECK(s.std == 0.0);
  CHECK(!s.skew.has_value());
  CHECK(!s.kurt.has_value());
}

TEST_CASE("linear output through QPEM is exactly standard normal through order 4") {
  auto [set, weights] = build_qpem(QpemParams{2, 3.0, -8.0, 60.0});
  const auto batch = batch_of(set, +[](const Vector& z) { return z[0]; });
  const MomentSummary s = estimate_moments(batch, weights);
  CHECK(std::abs(s.mean) < 1e-12);
  CHECK(s.std == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(*s.skew) < 1e-12);
  CHECK(*s.kurt == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("quadratic output: exact variance, biased sixth-moment-driven skewness") {
  // y = z1^2: mean 1, m2 = E[z^4] - 1 = 2 exactly; the unscaled m3 needs
  // E[z^6], which the rule misestimates, so skew != sqrt(8).
  auto [set, weights] = build_qpem(QpemParams{2, 3.0, 0.0, 0.0});
  const auto batch = batch_of(set, +[](const Vector& z) { return z[0] * z[0]; });
  const MomentSummary s = estimate_moments(batch, weights);
  CHECK(s.mean == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.m2 == doctest::Approx(2.0).epsilon(1e-13));
  // E_hat[z^6] = 18 + 9/7 -> m3 = E_hat[z^6] - 3 E[z^4] + 3 E[z^2] - 1.
  const Scalar m3_hat = (18.0 + 9.0 / 7.0) - 9.0 + 3.0 - 1.0;
  CHECK(s.m3 == doctest::Approx(m3_hat).epsilon(1e-12));
  CHECK(std::abs(*s.skew - std::sqrt(8.0)) > 0.5);  // deviates from chi-square(1)
}

TEST_CASE("affine scaling invariance of skewness and kurtosis") {
  auto [set, weights] = build_qpem(QpemParams{3, 3.0, -8.0, 60.0});
  const auto batch = batch_of(set, +[](const Vector& z) {
    return z[0] + 0.3 * z[1] * z[1] + 0.05 * z[2] * z[2] * z[2];
  });
  const MomentSummary base = estimate_moments(batch, weights);

  EvaluationBatch scaled;
  const Scalar a = 3.75, b = -11.0;
  scaled.outputs = a * batch.outputs.array() + b;
  const MomentSummary s = estimate_moments(scaled, weights);
  CHECK(s.mean == doctest::Approx(a * base.mean + b).epsilon(1e-12));
  CHECK(s.std == doctest::Approx(a * base.std).epsilon(1e-12));
  CHECK(*s.skew == doctest::Approx(*base.skew).epsilon(1e-12));
  CHECK(*s.kurt == doctest::Approx(*base.kurt).epsilon(1e-12));
}

TEST_CASE("zeta = xi = 0 reduces bit-for-bit to the unscaled estimator") {
  auto [set, scaled_w] = build_qpem(QpemParams{4, 2.0, 0.0, 0.0});
  auto [set2, plain_w] = build_qpem(QpemParams{4, 2.0, 0.0, 0.0});
  const auto batch = batch_of(set, +[](const Vector& z) {
    return std::exp(0.1 * z[0]) + z[1] * z[2];
  });
  const MomentSummary a = estimate_moments(batch, scaled_w);
  const MomentSummary b = estimate_moments(batch, plain_w);
  CHECK(a.mean == b.mean);
  CHECK(a.m2 == b.m2);
  CHECK(a.m3 == b.m3);
  CHECK(a.m4 == b.m4);
}

TEST_CASE("scaling substitutes the central weight rather than adding a term") {
  // The two algebraic forms coincide: sum with w0+zeta at the center equals
  // the unscaled sum plus zeta * (Y0 - ybar)^3.
  auto [set, weights] = build_qpem(QpemParams{3, 3.0, -8.0, 60.0});
  auto [set_u, weights_u] = build_qpem(QpemParams{3, 3.0, 0.0, 0.0});
  const auto batch = batch_of(set, +[](const Vector& z) {
    return z[0] * z[0] + 0.5 * z[1];
  });
  const MomentSummary scaled = estimate_moments(batch, weights);
  const MomentSummary unscaled = estimate_moments(batch, weights_u);
  const Scalar d0 = batch.outputs[0] - unscaled.mean;
  CHECK(scaled.m3 == doctest::Approx(unscaled.m3 + (-8.0) * d0 * d0 * d0).epsilon(1e-12));
  CHECK(scaled.m4 == doctest::Approx(unscaled.m4 + 60.0 * d0 * d0 * d0 * d0).epsilon(1e-12));
}

TEST_CASE("length mismatch and non-finite outputs are rejected") {
  auto [set, weights] = build_qpem(QpemParams{2, 3.0, -8.0, 60.0});
  EvaluationBatch short_batch;
  short_batch.outputs = Vector::Zero(3);
  CHECK_THROWS_AS(estimate_moments(short_batch, weights), ParameterError);

  EvaluationBatch bad;
  bad.outputs = Vector::Zero(set.count());
  bad.outputs[4] = std::nan("");
  CHECK_THROWS_WITH_AS(estimate_moments(bad, weights), doctest::Contains("index 4"), ModelError);
}

TEST_CASE("relative errors flag zero and undefined references") {
  MomentSummary est;
  est.mean = 1.0;
  est.std = 2.0;
  est.skew = 0.3432;
  est.kurt = 3.0;
  MomentSummary ref = est;
  const ErrorReport same = relative_errors(est, ref, "self");
  CHECK(*same.mean_error == 0.0);
  CHECK(*same.skew_error == 0.0);
  CHECK(same.reference == "self");

  ref.skew = 0.3550;
  const ErrorReport skewed = relative_errors(est, ref);
  CHECK(*skewed.skew_error == doctest::Approx(std::abs(0.3432 - 0.3550) / 0.3550).epsilon(1e-12));

  ref.mean = 0.0;
  ref.skew.reset();
  const ErrorReport flagged = relative_errors(est, ref);
  CHECK(!flagged.mean_error.has_value());
  CHECK(!flagged.skew_error.has_value());
  CHECK(flagged.std_error.has_value());
}
