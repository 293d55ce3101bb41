#pragma once

// Hong's 2n+1 point estimate method: per-dimension three-point rules sharing
// one central point. Matches marginal moments through order four; carries no
// cross-moment information by construction.

#include "qpem/core.hpp"

#include <utility>

namespace qpem {

/// Builds the 2n+1 HPEM set for standardized marginals with the given
/// skewness/kurtosis. Per dimension i,
///   c_{i,1} = g/2 + sqrt(k - 3 g^2 / 4),   c_{i,2} = g/2 - sqrt(k - 3 g^2 / 4),
///   w_{i,1} = 1 / (c_{i,1} (c_{i,1} - c_{i,2})),
///   w_{i,2} = -1 / (c_{i,2} (c_{i,1} - c_{i,2})),
/// and the shared central point carries W0 = 1 - sum_i 1 / (k_i - g_i^2).
/// Point order: central, then the c_{i,1} block, then the c_{i,2} block.
/// All four weight orders coincide. Negative W0 is permitted (it shows up in
/// the stability factor, not as an error).
/// Throws ParameterError when a marginal violates k - 3g^2/4 > 0 or k = g^2.
std::pair<SigmaPointSet, WeightTable> build_hpem(Index n, const MarginalShape& shape);

}  // namespace qpem
