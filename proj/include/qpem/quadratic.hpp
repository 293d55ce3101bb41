#pragma once

// Quadratic Point Estimate Method: 2n^2+1 fully symmetric sigma points that
// reproduce every standard-normal moment through order five, with optional
// central-weight scaling of the third/fourth-order estimators to pick up
// partial sixth/eighth-order information.

#include "qpem/core.hpp"

#include <utility>
#include <vector>

namespace qpem {

struct QpemParams {
  Index dim = 2;
  Scalar r = 3.0;      // axis-point radius, must exceed sqrt(2)
  Scalar zeta = -8.0;  // third-order central-weight offset (0 = unscaled)
  Scalar xi = 60.0;    // fourth-order central-weight offset (0 = unscaled)

  static QpemParams scaled(Index n, Scalar r = 3.0) { return {n, r, -8.0, 60.0}; }
  static QpemParams unscaled(Index n, Scalar r = 3.0) { return {n, r, 0.0, 0.0}; }
};

/// Builds the QPEM point set and weight table:
///   - one central point at the origin, weight w0 = 1 - 2n*w1 - 2n(n-1)*w2,
///   - 2n axis points at +-r e_i, weight w1 = (4-n)/(2 r^4),
///   - 2n(n-1) diagonal points at all sign/pair placements of (+-c2, +-c2)
///     with c2 = sqrt(r^2 (n-1) / (r^2 + n - 4)),
///     weight w2 = [(r^2+n-4) / (r^2 (n-1))]^2 / 4.
/// Diagonal enumeration is lexicographic over pairs i<j with sign order
/// (+,+), (-,+), (+,-), (-,-). Third/fourth-order central weights carry
/// w0+zeta and w0+xi.
/// Throws ParameterError for dim < 2 or r <= sqrt(2).
std::pair<SigmaPointSet, WeightTable> build_qpem(const QpemParams& params);

/// Squared error of the set's sixth-order marginal moment against the
/// standard-normal value 15:
///   e6^2(r, n) = {15 - r^2 (4-n) - (n-1) [r^2 (n-1) / (r^2+n-4)]}^2.
Scalar e6_squared(Scalar r, Index n);

struct R6Candidate {
  Scalar r = 0;
  Scalar value = 0;      // e6_squared at r
  Scalar bracket_lo = 0; // bracketing interval that produced the candidate
  Scalar bracket_hi = 0;
  bool from_scan = false; // false for the analytic stationary point sqrt(3)
};

struct R6Result {
  Scalar r = 0;
  Scalar value = 0;
  std::vector<R6Candidate> candidates;  // every bracketed minimum found
};

/// Minimizes e6_squared over r > sqrt(2) by a bracketed scan-and-refine.
/// All bracketing intervals found are reported; ties between equal-valued
/// minimizers resolve to the analytic stationary point sqrt(3), which is a
/// stationary point of e6 for every n (and the unique interior minimum for
/// n >= 5). For n in {2, 3} the zeros of e6 win with value 0.
R6Result argmin_r6_detailed(Index n);

/// The minimizing r from argmin_r6_detailed.
Scalar argmin_r6(Index n);

/// Sum of the absolute values of the first-order weights. 1 means an
/// all-positive rule; larger values amplify integration error.
Scalar stability_factor(const WeightTable& weights);

}  // namespace qpem
