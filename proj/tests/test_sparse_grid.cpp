#include "qpem/sparse_grid.hpp"

#include "qpem/errors.hpp"
#include "qpem/mce.hpp"
#include "qpem/quadratic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

using namespace qpem;

TEST_CASE("1-D Gauss-Hermite rules") {
  const Rule1D r1 = gauss_hermite_1d(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == 1.0);

  const Rule1D r3 = gauss_hermite_1d(3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r3.nodes[1] == 0.0);
  CHECK(r3.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(r3.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  // m=5 nodes are {0, +-sqrt(5 -+ sqrt(10))}.
  const Rule1D r5 = gauss_hermite_1d(5);
  CHECK(r5.nodes[2] == 0.0);
  CHECK(r5.nodes[3] == doctest::Approx(std::sqrt(5.0 - std::sqrt(10.0))).epsilon(1e-13));
  CHECK(r5.nodes[4] == doctest::Approx(std::sqrt(5.0 + std::sqrt(10.0))).epsilon(1e-13));
  CHECK(r5.nodes[0] == -r5.nodes[4]);

  CHECK_THROWS_AS(gauss_hermite_1d(0), ParameterError);
}

TEST_CASE("1-D rules integrate N(0,1) moments exactly through degree 2m-1") {
  for (int m : {2, 3, 5, 9}) {
    const Rule1D rule = gauss_hermite_1d(m);
    CHECK(std::abs(rule.weights.sum() - 1.0) < 1e-13);
    for (int degree = 1; degree <= 2 * m - 1; ++degree) {
      Scalar sum = 0;
      for (Index i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
      }
      Scalar target = 0;
      if (degree % 2 == 0) {
        target = 1;
        for (int k = degree - 1; k > 1; k -= 2) target *= k;
      }
      CAPTURE(m);
      CAPTURE(degree);
      CHECK(std::abs(sum - target) < 1e-9 * std::max<Scalar>(1.0, std::abs(target)));
    }
  }
}

TEST_CASE("Smolyak level-2 point counts match 2n^2+2n+1") {
  for (Index n : {5, 10, 15, 20, 30, 40, 50, 60, 70, 100}) {
    auto [set, weights] = smolyak_grid(n, 2);
    CAPTURE(n);
    CHECK(set.count() == 2 * n * n + 2 * n + 1);
    // The combination weights reach O(n^2) while summing to 1, so the unity
    // defect is bounded by rounding of the stored weights themselves.
    const Scalar cancellation = weights.w1.cwiseAbs().sum();
    const Scalar tol = std::max(1e-12, 8 * std::numeric_limits<Scalar>::epsilon() * cancellation);
    CHECK(std::abs(weights.w1.sum() - 1.0) < tol);
  }
  // Moderate dimensions keep full precision.
  auto [set10, w10] = smolyak_grid(10, 2);
  CHECK(set10.count() == 221);
  CHECK(std::abs(w10.w1.sum() - 1.0) < 1e-12);
}

TEST_CASE("Smolyak n=1 level=2 collapses to the finest 1-D rule") {
  auto [set, weights] = smolyak_grid(1, 2);
  const Rule1D r3 = gauss_hermite_1d(3);
  REQUIRE(set.count() == 3);
  std::vector<std::pair<Scalar, Scalar>> got;
  for (Index i = 0; i < 3; ++i) got.emplace_back(set.points(i, 0), weights.w1[i]);
  std::sort(got.begin(), got.end());
  for (Index i = 0; i < 3; ++i) {
    CHECK(got[static_cast<std::size_t>(i)].first == r3.nodes[i]);
    CHECK(got[static_cast<std::size_t>(i)].second == doctest::Approx(r3.weights[i]).epsilon(1e-14));
  }
}

TEST_CASE("Smolyak level-2 integrates total degree <= 5 exactly") {
  for (Index n : {2, 5, 10}) {
    auto [set, weights] = smolyak_grid(n, 2);
    const MceReport report = verify_mce(set, weights, 5);
    CAPTURE(n);
    CHECK(report.max_residual_up_to(5) <= 1e-9);
  }
}

TEST_CASE("Smolyak level-2 has negative weights for n >= 2") {
  auto [set, weights] = smolyak_grid(4, 2);
  CHECK(weights.w1.minCoeff() < 0);
  CHECK(stability_factor(weights) > 1.0);
}

TEST_CASE("Smolyak rejects unsupported levels") {
  CHECK_THROWS_AS(smolyak_grid(3, 3), ParameterError);
  CHECK_THROWS_AS(smolyak_grid(3, -1), ParameterError);
}

TEST_CASE("Smolyak level 0 and 1 sanity") {
  auto [set0, w0] = smolyak_grid(4, 0);
  CHECK(set0.count() == 1);
  CHECK(w0.w1[0] == 1.0);

  auto [set1, w1] = smolyak_grid(4, 1);
  CHECK(set1.count() == 2 * 4 + 1);
  CHECK(std::abs(w1.w1.sum() - 1.0) < 1e-13);
  const MceReport report = verify_mce(set1, w1, 3);
  CHECK(report.max_residual_up_to(3) <= 1e-12);
}
