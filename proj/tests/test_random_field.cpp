#include "qpem/random_field.hpp"

#include "qpem/errors.hpp"
#include "qpem/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace qpem;

namespace {

Vector unit_mesh(Index points) {
  Vector mesh(points);
  for (Index i = 0; i < points; ++i) mesh[i] = static_cast<Scalar>(i) / (points - 1);
  return mesh;
}

Vector trapezoid_weights(const Vector& mesh) {
  const Index m = mesh.size();
  Vector w(m);
  w[0] = 0.5 * (mesh[1] - mesh[0]);
  w[m - 1] = 0.5 * (mesh[m - 1] - mesh[m - 2]);
  for (Index i = 1; i + 1 < m; ++i) w[i] = 0.5 * (mesh[i + 1] - mesh[i - 1]);
  return w;
}

}  // namespace

TEST_CASE("perfectly correlated limit has a single dominant constant mode") {
  const Vector mesh = unit_mesh(51);
  Kernel kernel;
  kernel.variance = 4.0;
  kernel.length = 100.0;  // 100x the domain
  const KLBasis basis = kl_decompose(mesh, kernel, 5);
  CHECK(basis.eigenvalues[0] / basis.eigenvalues.sum() >= 0.999);
  // First mode keeps one sign everywhere.
  const Scalar min = basis.modes.row(0).minCoeff();
  const Scalar max = basis.modes.row(0).maxCoeff();
  CHECK(min * max > 0);
}

TEST_CASE("bar configuration: 20 terms capture nearly all the variance") {
  const Vector mesh = unit_mesh(201);
  Kernel kernel;
  kernel.variance = 100.0;
  kernel.length = 0.2;
  const KLBasis basis = kl_decompose(mesh, kernel, 20);
  CHECK(basis.captured_variance_ratio > 0.9999);
  CHECK(basis.captured_variance_ratio <= 1.0 + 1e-10);
  // Eigenvalues descend.
  for (Index k = 1; k < 20; ++k) CHECK(basis.eigenvalues[k] <= basis.eigenvalues[k - 1] + 1e-15);
}

TEST_CASE("complete basis reproduces the total variance") {
  const Vector mesh = unit_mesh(41);
  Kernel kernel;
  kernel.variance = 2.5;
  kernel.length = 0.3;
  const KLBasis basis = kl_decompose(mesh, kernel, 41);
  CHECK(basis.captured_variance_ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("modes are orthonormal under the quadrature weights") {
  const Vector mesh = unit_mesh(101);
  Kernel kernel;
  kernel.variance = 100.0;
  kernel.length = 0.2;
  const KLBasis basis = kl_decompose(mesh, kernel, 20);
  const Vector w = trapezoid_weights(mesh);
  for (Index a = 0; a < 20; ++a) {
    for (Index b = a; b < 20; ++b) {
      const Scalar dot = (basis.modes.row(a).transpose().array() *
                          basis.modes.row(b).transpose().array() * w.array())
                             .sum();
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("eigenproblem residual is small") {
  const Vector mesh = unit_mesh(101);
  Kernel kernel;
  kernel.variance = 100.0;
  kernel.length = 0.2;
  const KLBasis basis = kl_decompose(mesh, kernel, 20);
  const Vector w = trapezoid_weights(mesh);
  Matrix cov(101, 101);
  for (Index i = 0; i < 101; ++i) {
    for (Index j = 0; j < 101; ++j) cov(i, j) = kernel(mesh[i] - mesh[j]);
  }
  for (Index k = 0; k < 20; ++k) {
    const Vector phi = basis.modes.row(k).transpose();
    const Vector residual = cov * w.asDiagonal() * phi - basis.eigenvalues[k] * phi;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-8 * basis.eigenvalues[0]);
  }
}

TEST_CASE("pointwise truncated variance never exceeds the field variance") {
  const Vector mesh = unit_mesh(101);
  Kernel kernel;
  kernel.variance = 100.0;
  kernel.length = 0.2;
  const KLBasis basis = kl_decompose(mesh, kernel, 20);
  for (Index i = 0; i < 101; ++i) {
    Scalar var = 0;
    for (Index k = 0; k < 20; ++k) {
      var += basis.eigenvalues[k] * basis.modes(k, i) * basis.modes(k, i);
    }
    CHECK(var <= kernel.variance * (1 + 1e-6));
  }
}

TEST_CASE("realize: zero coefficients give the mean, unit vectors give scaled modes") {
  const Vector mesh = unit_mesh(31);
  Kernel kernel;
  kernel.variance = 9.0;
  kernel.length = 0.25;
  const KLBasis basis = kl_decompose(mesh, kernel, 6, /*mean_value=*/42.0);

  const Vector flat = realize(basis, Vector::Zero(6));
  CHECK((flat.array() - 42.0).abs().maxCoeff() == 0.0);

  Vector e1 = Vector::Zero(6);
  e1[0] = 1.0;
  const Vector mode_field = realize(basis, e1);
  const Vector expected = 42.0 + std::sqrt(basis.eigenvalues[0]) * basis.modes.row(0).array();
  CHECK((mode_field - expected).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(realize(basis, Vector::Zero(5)), ParameterError);
}

TEST_CASE("covariance replay from seeded realizations") {
  const Vector mesh = unit_mesh(21);
  Kernel kernel;
  kernel.variance = 4.0;
  kernel.length = 0.3;
  const Index terms = 21;
  const KLBasis basis = kl_decompose(mesh, kernel, terms);

  const Index draws = 100000;
  CounterRng rng(2718, kTagMc);
  Matrix sum = Matrix::Zero(3, 3);
  const Index probe[3] = {2, 10, 18};
  std::uint64_t counter = 0;
  for (Index s = 0; s < draws; ++s) {
    Vector eta(terms);
    for (Index k = 0; k < terms; ++k) eta[k] = inv_norm_cdf(rng.uniform01_at(counter++));
    const Vector field = realize(basis, eta);
    Vector probe_vals(3);
    for (int a = 0; a < 3; ++a) probe_vals[a] = field[probe[a]];
    sum += probe_vals * probe_vals.transpose();
  }
  const Matrix empirical = sum / static_cast<Scalar>(draws);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Scalar target = kernel(mesh[probe[a]] - mesh[probe[b]]);
      // 3 standard errors for a product-of-normals estimator.
      const Scalar se = 3.0 * std::sqrt((kernel.variance * kernel.variance +
                                         target * target) /
                                        static_cast<Scalar>(draws));
      CHECK(std::abs(empirical(a, b) - target) < se);
    }
  }
}

TEST_CASE("decomposition input validation") {
  const Vector mesh = unit_mesh(11);
  Kernel kernel;
  CHECK_THROWS_AS(kl_decompose(mesh, kernel, 12), ParameterError);
  CHECK_THROWS_AS(kl_decompose(mesh, kernel, 0), ParameterError);
  Vector bad = mesh;
  bad[5] = bad[4];
  CHECK_THROWS_AS(kl_decompose(bad, kernel, 3), ParameterError);
}
