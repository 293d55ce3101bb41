#include "qpem/sparse_grid.hpp"

#include "qpem/errors.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace qpem {
namespace {

const Scalar kSqrt3 = std::sqrt(3.0);

double binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  double v = 1;
  for (int i = 0; i < b; ++i) v = v * (a - i) / (i + 1);
  return v;
}

}  // namespace

Rule1D gauss_hermite_1d(int m) {
  if (m < 1) throw ParameterError("Gauss-Hermite rule needs at least one node");
  Rule1D rule;
  if (m == 1) {
    rule.nodes = Vector::Zero(1);
    rule.weights = Vector::Ones(1);
    return rule;
  }
  if (m == 2) {
    rule.nodes = Vector(2);
    rule.nodes << -1.0, 1.0;
    rule.weights = Vector::Constant(2, 0.5);
    return rule;
  }
  if (m == 3) {
    rule.nodes = Vector(3);
    rule.nodes << -kSqrt3, 0.0, kSqrt3;
    rule.weights = Vector(3);
    rule.weights << 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    return rule;
  }

  // Golub-Welsch on the probabilists' Hermite Jacobi matrix.
  Matrix jacobi = Matrix::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const Scalar b = std::sqrt(static_cast<Scalar>(k));
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).transpose().array().square();

  // Restore exact symmetry lost to the eigensolver.
  for (int i = 0; i < m / 2; ++i) {
    const int j = m - 1 - i;
    const Scalar a = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -a;
    rule.nodes[j] = a;
    const Scalar w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  rule.weights /= rule.weights.sum();
  return rule;
}

std::pair<SigmaPointSet, WeightTable> smolyak_grid(Index n, int level) {
  if (n < 1) throw ParameterError("smolyak_grid requires dimension >= 1");
  if (level < 0 || level > 2) {
    std::ostringstream os;
    os << "unsupported Smolyak level " << level << " (only levels 0..2 are built)";
    throw ParameterError(os.str());
  }

  // 1-D sequence, sizes m(l) = l + 1: {0}, {-1, +1}, {-sqrt3, 0, +sqrt3}.
  // Node codes are small integers so merging across tensor grids is exact.
  struct Node {
    int code;
    Scalar weight;
  };
  const std::vector<std::vector<Node>> rules = {
      {{0, 1.0}},
      {{-1, 0.5}, {1, 0.5}},
      {{-2, 1.0 / 6.0}, {0, 2.0 / 3.0}, {2, 1.0 / 6.0}},
  };
  auto decode = [](int code) -> Scalar {
    switch (code) {
      case -2: return -kSqrt3;
      case -1: return -1.0;
      case 1: return 1.0;
      case 2: return kSqrt3;
      default: return 0.0;
    }
  };

  // key: nonzero coordinates as (dim, code), ascending by dim. Combination
  // coefficients grow like n^2 while the merged weights sum to 1, so each
  // key accumulates with compensation.
  using Key = std::vector<std::pair<Index, int>>;
  std::map<Key, CompensatedSum> merged;

  auto tensor = [&](const std::vector<std::pair<Index, int>>& active, Scalar coeff) {
    // Dims not listed in `active` sit on the level-0 single node at zero.
    std::vector<std::size_t> idx(active.size(), 0);
    while (true) {
      Key key;
      Scalar w = coeff;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const auto& node = rules[static_cast<std::size_t>(active[a].second)][idx[a]];
        w *= node.weight;
        if (node.code != 0) key.emplace_back(active[a].first, node.code);
      }
      merged[key].add(w);
      std::size_t a = 0;
      for (; a < active.size(); ++a) {
        if (++idx[a] < rules[static_cast<std::size_t>(active[a].second)].size()) break;
        idx[a] = 0;
      }
      if (a == active.size()) break;
    }
  };

  for (int total = std::max(0, level - static_cast<int>(n) + 1); total <= level; ++total) {
    const Scalar coeff =
        ((level - total) % 2 == 0 ? 1.0 : -1.0) * binomial(static_cast<int>(n) - 1, level - total);
    if (coeff == 0) continue;
    if (total == 0) {
      tensor({}, coeff);
    } else if (total == 1) {
      for (Index k = 0; k < n; ++k) tensor({{k, 1}}, coeff);
    } else {  // total == 2
      for (Index k = 0; k < n; ++k) tensor({{k, 2}}, coeff);
      for (Index k = 0; k < n; ++k) {
        for (Index l = k + 1; l < n; ++l) tensor({{k, 1}, {l, 1}}, coeff);
      }
    }
  }

  const Index count = static_cast<Index>(merged.size());
  SigmaPointSet set;
  set.points = Matrix::Zero(count, n);
  set.kind.assign(static_cast<std::size_t>(count), PointKind::grid);
  Vector w(count);
  Index row = 0;
  for (const auto& [key, weight] : merged) {
    for (const auto& [dim, code] : key) set.points(row, dim) = decode(code);
    if (key.empty()) set.kind[static_cast<std::size_t>(row)] = PointKind::central;
    w[row] = weight.value();
    ++row;
  }
  return {std::move(set), WeightTable::flat(std::move(w))};
}

}  // namespace qpem
