#include "qpem/mce.hpp"

#include "qpem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <unordered_map>

namespace qpem {
namespace {

Scalar double_factorial(int k) {  // k!! for odd k >= -1
  Scalar v = 1;
  for (int i = k; i > 1; i -= 2) v *= i;
  return v;
}

// Hashable key over the raw coordinate bytes of one point.
struct RowKey {
  std::vector<unsigned char> bytes;
  bool operator==(const RowKey& o) const { return bytes == o.bytes; }
};

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (unsigned char b : k.bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

RowKey make_key(const Matrix& pts, Index row, bool negate) {
  RowKey key;
  key.bytes.resize(static_cast<std::size_t>(pts.cols()) * sizeof(Scalar));
  for (Index j = 0; j < pts.cols(); ++j) {
    Scalar v = pts(row, j);
    if (negate) v = -v;
    if (v == 0.0) v = 0.0;  // collapse -0
    std::memcpy(key.bytes.data() + static_cast<std::size_t>(j) * sizeof(Scalar), &v, sizeof(Scalar));
  }
  return key;
}

// partner[i] = index of the exact negation of point i, or i itself.
std::vector<Index> negation_partners(const Matrix& pts) {
  std::unordered_map<RowKey, Index, RowKeyHash> lookup;
  const Index n_pts = pts.rows();
  lookup.reserve(static_cast<std::size_t>(n_pts) * 2);
  for (Index i = 0; i < n_pts; ++i) lookup.emplace(make_key(pts, i, false), i);
  std::vector<Index> partner(n_pts);
  for (Index i = 0; i < n_pts; ++i) {
    auto it = lookup.find(make_key(pts, i, true));
    partner[i] = (it == lookup.end()) ? i : it->second;
  }
  return partner;
}

Scalar term_value(const Matrix& pts, Index row, const Monomial& mono) {
  Scalar t = 1;
  for (const auto& [dim, k] : mono.factors) {
    const Scalar z = pts(row, dim);
    for (int j = 0; j < k; ++j) t *= z;
  }
  return t;
}

// Shared state for one verification pass.
struct Workspace {
  const SigmaPointSet& set;
  const Vector& w;
  std::vector<Index> partner;
  // support index, valid when max_support <= 2
  int max_support = 0;
  std::vector<std::vector<Index>> by_dim;  // points whose support contains dim
  std::vector<Index> all;                  // 0..N-1

  explicit Workspace(const SigmaPointSet& s, const Vector& weights)
      : set(s), w(weights), partner(negation_partners(s.points)) {
    const Index n_pts = set.count();
    const Index n = set.dim();
    by_dim.assign(static_cast<std::size_t>(n), {});
    all.resize(n_pts);
    for (Index i = 0; i < n_pts; ++i) {
      all[i] = i;
      int support = 0;
      for (Index j = 0; j < n; ++j) {
        if (set.points(i, j) != 0.0) {
          ++support;
          if (support <= 2) by_dim[static_cast<std::size_t>(j)].push_back(i);
        }
      }
      max_support = std::max(max_support, support);
    }
  }

  // Points that can contribute a nonzero term: support(monomial) must be a
  // subset of the point's support. Skipped points contribute exact zeros.
  std::vector<Index> candidates(const Monomial& mono) const {
    if (mono.factors.empty() || max_support > 2) return all;
    if (mono.factors.size() == 1) return by_dim[static_cast<std::size_t>(mono.factors[0].first)];
    std::vector<Index> out;
    const auto& a = by_dim[static_cast<std::size_t>(mono.factors[0].first)];
    for (Index i : a) {
      bool ok = true;
      for (std::size_t f = 1; f < mono.factors.size(); ++f) {
        if (set.points(i, mono.factors[f].first) == 0.0) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(i);
    }
    return out;
  }

  Scalar sum(const Monomial& mono) const {
    const auto cand = candidates(mono);
    CompensatedSum acc;
    std::vector<bool> done;  // only needed when pairs exist
    done.assign(cand.size(), false);
    std::unordered_map<Index, std::size_t> pos;
    pos.reserve(cand.size() * 2);
    for (std::size_t k = 0; k < cand.size(); ++k) pos.emplace(cand[k], k);
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (done[k]) continue;
      const Index i = cand[k];
      const Index p = partner[i];
      Scalar contribution = w[i] * term_value(set.points, i, mono);
      if (p != i) {
        auto it = pos.find(p);
        if (it != pos.end() && !done[it->second]) {
          contribution += w[p] * term_value(set.points, p, mono);
          done[it->second] = true;
        }
      }
      done[k] = true;
      acc.add(contribution);
    }
    return acc.value();
  }
};

double binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  double v = 1;
  for (int i = 0; i < b; ++i) v = v * (a - i) / (i + 1);
  return std::round(v);
}

}  // namespace

int Monomial::degree() const {
  int d = 0;
  for (const auto& [dim, k] : factors) d += k;
  return d;
}

std::string Monomial::str() const {
  if (factors.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [dim, k] : factors) {
    if (!first) os << "*";
    os << "z" << (dim + 1);
    if (k > 1) os << "^" << k;
    first = false;
  }
  return os.str();
}

Scalar standard_normal_moment(const Monomial& monomial) {
  Scalar m = 1;
  for (const auto& [dim, k] : monomial.factors) {
    if (k % 2 != 0) return 0;
    m *= double_factorial(k - 1);
  }
  return m;
}

Scalar monomial_weighted_sum(const SigmaPointSet& set, const Vector& w, const Monomial& monomial) {
  if (w.size() != set.count()) throw ParameterError("weight/point count mismatch");
  for (const auto& [dim, k] : monomial.factors) {
    if (dim < 0 || dim >= set.dim()) throw ParameterError("monomial dimension out of range");
    if (k < 1) throw ParameterError("monomial exponents must be positive");
  }
  Workspace ws(set, w);
  return ws.sum(monomial);
}

Scalar MceReport::max_residual(int degree) const {
  if (degree < 0 || degree >= static_cast<int>(by_degree.size())) return 0;
  return by_degree[static_cast<std::size_t>(degree)].max_residual;
}

Scalar MceReport::max_residual_up_to(int degree) const {
  Scalar m = 0;
  for (int d = 0; d <= degree; ++d) m = std::max(m, max_residual(d));
  return m;
}

Scalar MceReport::max_odd_residual_up_to(int degree) const {
  Scalar m = 0;
  for (int d = 1; d <= degree; d += 2) m = std::max(m, max_residual(d));
  return m;
}

const MceRecord* MceReport::worst_record(int degree) const {
  const MceRecord* worst = nullptr;
  for (const auto& rec : records) {
    if (rec.monomial.degree() != degree) continue;
    if (!worst || rec.residual > worst->residual) worst = &rec;
  }
  return worst;
}

MceReport verify_mce(const SigmaPointSet& set, const WeightTable& weights, int max_order,
                     std::size_t dense_cap) {
  if (max_order < 0) throw ParameterError("max_order must be non-negative");
  if (weights.count() != set.count()) throw ParameterError("weight/point count mismatch");

  Workspace ws(set, weights.w1);
  const Index n = set.dim();

  MceReport report;
  report.by_degree.resize(static_cast<std::size_t>(max_order) + 1);
  for (int d = 0; d <= max_order; ++d) report.by_degree[static_cast<std::size_t>(d)].degree = d;

  auto record = [&](Monomial mono) {
    MceRecord rec;
    rec.weighted = ws.sum(mono);
    rec.target = standard_normal_moment(mono);
    rec.residual = std::abs(rec.weighted - rec.target);
    rec.monomial = std::move(mono);
    auto& deg = report.by_degree[static_cast<std::size_t>(rec.monomial.degree())];
    deg.max_residual = std::max(deg.max_residual, rec.residual);
    deg.explicit_count += 1;
    report.records.push_back(std::move(rec));
  };

  record(Monomial{});  // degree 0: sum of weights vs 1

  if (ws.max_support <= 2) {
    // Single-dimension monomials.
    for (Index i = 0; i < n; ++i) {
      for (int k = 1; k <= max_order; ++k) record(Monomial{{{i, k}}});
    }
    // Two-dimension monomials.
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        for (int d = 2; d <= max_order; ++d) {
          for (int ki = 1; ki < d; ++ki) record(Monomial{{{i, ki}, {j, d - ki}}});
        }
      }
    }
    // Monomials touching three or more dimensions: every point has a zero
    // factor, the weighted sum is exactly zero, and the residual is |target|.
    // Nonzero targets need all exponents even, so degree >= 2 * support.
    for (int d = 3; d <= max_order; ++d) {
      for (int s = 3; s <= std::min<int>(d, static_cast<int>(n)); ++s) {
        ImplicitGroup group;
        group.degree = d;
        group.support_size = s;
        group.count = binomial(static_cast<int>(n), s) * binomial(d - 1, s - 1);
        if (group.count == 0) continue;
        if (d % 2 == 0 && d >= 2 * s) {
          // Largest |target|: concentrate the degree, {d-2(s-1), 2, ..., 2}.
          group.max_residual = double_factorial(d - 2 * (s - 1) - 1);
        }
        auto& deg = report.by_degree[static_cast<std::size_t>(d)];
        deg.max_residual = std::max(deg.max_residual, group.max_residual);
        deg.implicit_count += group.count;
        report.implicit_groups.push_back(group);
      }
    }
    return report;
  }

  // Dense fallback: enumerate every monomial of total degree <= max_order.
  double total = 0;
  for (int d = 1; d <= max_order; ++d) total += binomial(static_cast<int>(n) + d - 1, d);
  if (total > static_cast<double>(dense_cap)) {
    std::ostringstream os;
    os << "dense MCE enumeration would visit " << total << " monomials (cap " << dense_cap
       << "); reduce max_order or dimension";
    throw ParameterError(os.str());
  }

  std::vector<std::pair<Index, int>> stack;
  auto recurse = [&](auto&& self, Index next_dim, int remaining) -> void {
    if (!stack.empty()) record(Monomial{stack});
    if (remaining == 0) return;
    for (Index i = next_dim; i < n; ++i) {
      for (int k = 1; k <= remaining; ++k) {
        stack.emplace_back(i, k);
        self(self, i + 1, remaining - k);
        stack.pop_back();
      }
    }
  };
  recurse(recurse, 0, max_order);
  return report;
}

}  // namespace qpem
