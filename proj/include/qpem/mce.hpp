#pragma once

// Moment constraint equation (MCE) verification: residuals between weighted
// point-set moments and the standard-normal moments they are meant to
// reproduce. This is verification machinery, deliberately independent of the
// closed-form weight constructions it checks: it crunches the actual points.

#include "qpem/core.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace qpem {

/// Monomial z_{d1}^{k1} * ... * z_{ds}^{ks}; dims strictly increasing,
/// exponents >= 1. An empty factor list is the constant monomial 1.
struct Monomial {
  std::vector<std::pair<Index, int>> factors;

  int degree() const;
  std::string str() const;
};

/// E[z^k] under N(0, I): product of (k_i - 1)!! over even exponents, zero if
/// any exponent is odd (Isserlis).
Scalar standard_normal_moment(const Monomial& monomial);

/// sum_i w[i] * monomial(z_i), accumulated in ascending index order with
/// negation pairs folded together, so odd monomials over symmetric sets
/// cancel exactly.
Scalar monomial_weighted_sum(const SigmaPointSet& set, const Vector& w, const Monomial& monomial);

struct MceRecord {
  Monomial monomial;
  Scalar weighted = 0;
  Scalar target = 0;
  Scalar residual = 0;  // |weighted - target|
};

/// Monomials whose support exceeds every point's support have weighted sum
/// exactly zero (each term carries a zero factor); they are accounted for in
/// aggregate rather than materialized one by one.
struct ImplicitGroup {
  int degree = 0;
  int support_size = 0;
  double count = 0;
  Scalar max_residual = 0;  // largest |target| in the group
};

struct DegreeSummary {
  int degree = 0;
  Scalar max_residual = 0;
  std::size_t explicit_count = 0;
  double implicit_count = 0;
};

struct MceReport {
  std::vector<MceRecord> records;
  std::vector<ImplicitGroup> implicit_groups;
  std::vector<DegreeSummary> by_degree;  // indexed by total degree, 0..max_order

  Scalar max_residual(int degree) const;
  Scalar max_residual_up_to(int degree) const;
  Scalar max_odd_residual_up_to(int degree) const;
  const MceRecord* worst_record(int degree) const;
};

/// Residuals for every monomial of total degree <= max_order under the
/// first-order weights. Point sets whose points touch at most two coordinates
/// (PEM and level-2 sparse grids) are verified with sparse enumeration;
/// anything else falls back to dense enumeration, capped at `dense_cap`
/// monomials.
MceReport verify_mce(const SigmaPointSet& set, const WeightTable& weights, int max_order,
                     std::size_t dense_cap = 2'000'000);

}  // namespace qpem
