#pragma once

// Smolyak sparse Gauss-Hermite quadrature (the SGH3 baseline): combination
// technique over a linearly growing 1-D rule sequence, sizes (1, 2, 3) at
// levels (0, 1, 2). At level 2 the merged grid has 2n^2 + 2n + 1 points and
// integrates every N(0, I) monomial of total degree <= 5 exactly.

#include "qpem/core.hpp"

#include <utility>

namespace qpem {

/// One-dimensional quadrature rule in probabilists' normalization: nodes
/// symmetric about zero, weights positive and summing to one, exact for
/// N(0,1) moments through degree 2m-1.
struct Rule1D {
  Vector nodes;
  Vector weights;
};

/// m-node probabilists' Gauss-Hermite rule. Closed forms for m <= 3,
/// Golub-Welsch with symmetry restoration above.
Rule1D gauss_hermite_1d(int m);

/// Smolyak combination-technique grid for N(0, I_n) at the given level
/// (0, 1, or 2); coincident points across tensor grids are merged with
/// summed weights. All four weight orders coincide.
std::pair<SigmaPointSet, WeightTable> smolyak_grid(Index n, int level);

}  // namespace qpem
