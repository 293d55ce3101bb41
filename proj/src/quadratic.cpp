#include "qpem/quadratic.hpp"

#include "qpem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpem {
namespace {

constexpr Scalar kSqrt2 = 1.4142135623730951;
constexpr Scalar kSqrt3 = 1.7320508075688772;

void check_params(Index n, Scalar r) {
  if (n < 2) {
    std::ostringstream os;
    os << "QPEM requires dimension >= 2 (diagonal-point formulas degenerate at n=1); got " << n;
    throw ParameterError(os.str());
  }
  if (!(r > kSqrt2)) {
    std::ostringstream os;
    os << "r must exceed sqrt(2) for QPEM stability; got r=" << r;
    throw ParameterError(os.str());
  }
}

}  // namespace

std::pair<SigmaPointSet, WeightTable> build_qpem(const QpemParams& params) {
  const Index n = params.dim;
  const Scalar r = params.r;
  check_params(n, r);

  const Scalar r2 = r * r;
  const Scalar nf = static_cast<Scalar>(n);
  const Scalar c1 = r;
  const Scalar c2 = std::sqrt(r2 * (nf - 1) / (r2 + nf - 4));
  const Scalar w1 = (4 - nf) / (2 * r2 * r2);
  const Scalar ratio = (r2 + nf - 4) / (r2 * (nf - 1));
  const Scalar w2 = 0.25 * ratio * ratio;
  const Scalar w0 = 1 - 2 * nf * w1 - 2 * nf * (nf - 1) * w2;

  const Index count = 2 * n * n + 1;
  SigmaPointSet set;
  set.points = Matrix::Zero(count, n);
  set.kind.assign(count, PointKind::axis);
  set.kind[0] = PointKind::central;

  Vector w = Vector::Zero(count);
  w[0] = w0;

  // Axis points: +c1 block first, then -c1 block, per dimension.
  for (Index i = 0; i < n; ++i) {
    set.points(1 + i, i) = c1;
    set.points(1 + n + i, i) = -c1;
    w[1 + i] = w1;
    w[1 + n + i] = w1;
  }

  // Diagonal points: pairs i<j lexicographic, signs (+,+), (-,+), (+,-), (-,-).
  Index row = 1 + 2 * n;
  static constexpr int kSigns[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      for (const auto& s : kSigns) {
        set.points(row, i) = s[0] * c2;
        set.points(row, j) = s[1] * c2;
        set.kind[row] = PointKind::diagonal;
        w[row] = w2;
        ++row;
      }
    }
  }

  WeightTable weights = WeightTable::flat(std::move(w));
  weights.w3[0] = w0 + params.zeta;
  weights.w4[0] = w0 + params.xi;
  return {std::move(set), std::move(weights)};
}

Scalar e6_squared(Scalar r, Index n) {
  check_params(n, r);
  const Scalar r2 = r * r;
  const Scalar nf = static_cast<Scalar>(n);
  const Scalar e = 15 - r2 * (4 - nf) - (nf - 1) * (r2 * (nf - 1) / (r2 + nf - 4));
  return e * e;
}

namespace {

Scalar e6_signed(Scalar r, Index n) {
  const Scalar r2 = r * r;
  const Scalar nf = static_cast<Scalar>(n);
  return 15 - r2 * (4 - nf) - (nf - 1) * (r2 * (nf - 1) / (r2 + nf - 4));
}

// Golden-section refinement of a bracketed minimum of e6_squared.
Scalar golden_refine(Index n, Scalar lo, Scalar hi) {
  constexpr Scalar kInvPhi = 0.6180339887498949;
  Scalar a = lo, b = hi;
  Scalar c = b - kInvPhi * (b - a);
  Scalar d = a + kInvPhi * (b - a);
  Scalar fc = e6_squared(c, n);
  Scalar fd = e6_squared(d, n);
  for (int it = 0; it < 220 && (b - a) > 1e-13 * (1 + b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = e6_squared(c, n);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = e6_squared(d, n);
    }
  }
  return 0.5 * (a + b);
}

// If e6 changes sign across the bracket the minimum is a zero of e6; polish
// it with bisection on the signed function so the squared value bottoms out
// near machine zero.
Scalar polish_root(Index n, Scalar lo, Scalar hi, Scalar guess) {
  Scalar a = lo, b = hi;
  Scalar fa = e6_signed(a, n);
  Scalar fb = e6_signed(b, n);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) return guess;
  for (int it = 0; it < 200; ++it) {
    const Scalar m = 0.5 * (a + b);
    const Scalar fm = e6_signed(m, n);
    if (fm == 0 || (b - a) < 1e-15 * b) return m;
    if (fa * fm < 0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

R6Result argmin_r6_detailed(Index n) {
  if (n < 2) throw ParameterError("argmin_r6 requires dimension >= 2");

  // e6^2 blows up as r -> sqrt(2)+ and (for n != 4) as r -> inf; scan a grid
  // over (sqrt(2), 12] for local-minimum brackets.
  const Scalar lo = kSqrt2 * (1 + 1e-9);
  const Scalar hi = 12.0;
  const int grid = 8192;
  std::vector<Scalar> rs(grid), fs(grid);
  for (int i = 0; i < grid; ++i) {
    rs[i] = lo + (hi - lo) * static_cast<Scalar>(i) / (grid - 1);
    fs[i] = e6_squared(rs[i], n);
  }

  R6Result result;
  for (int i = 1; i + 1 < grid; ++i) {
    if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1] && (fs[i] < fs[i - 1] || fs[i] < fs[i + 1])) {
      R6Candidate cand;
      cand.bracket_lo = rs[i - 1];
      cand.bracket_hi = rs[i + 1];
      cand.from_scan = true;
      Scalar r_star = golden_refine(n, rs[i - 1], rs[i + 1]);
      r_star = polish_root(n, rs[i - 1], rs[i + 1], r_star);
      cand.r = r_star;
      cand.value = e6_squared(r_star, n);
      result.candidates.push_back(cand);
    }
  }

  // The stationary point of e6 in r > sqrt(2) is r = sqrt(3) for every n
  // (for n = 4 the function is constant and any r minimizes). Always keep it
  // as a candidate so flat or noise-level landscapes resolve deterministically.
  {
    R6Candidate cand;
    cand.r = kSqrt3;
    cand.value = e6_squared(kSqrt3, n);
    cand.bracket_lo = cand.bracket_hi = kSqrt3;
    cand.from_scan = false;
    result.candidates.push_back(cand);
  }

  Scalar best = result.candidates.front().value;
  for (const auto& c : result.candidates) best = std::min(best, c.value);

  // Ties (within 1e-9 relative) prefer sqrt(3), then the smallest r.
  const Scalar tie = 1e-9 * (1 + best);
  const R6Candidate* pick = nullptr;
  for (const auto& c : result.candidates) {
    if (c.value > best + tie) continue;
    if (!pick) {
      pick = &c;
      continue;
    }
    const bool c_is_sqrt3 = !c.from_scan || std::abs(c.r - kSqrt3) < 1e-9;
    const bool p_is_sqrt3 = !pick->from_scan || std::abs(pick->r - kSqrt3) < 1e-9;
    if (c_is_sqrt3 && !p_is_sqrt3) {
      pick = &c;
    } else if (c_is_sqrt3 == p_is_sqrt3 && c.r < pick->r) {
      pick = &c;
    }
  }
  result.r = pick->r;
  result.value = pick->value;
  return result;
}

Scalar argmin_r6(Index n) { return argmin_r6_detailed(n).r; }

Scalar stability_factor(const WeightTable& weights) {
  CompensatedSum acc;
  for (Index i = 0; i < weights.w1.size(); ++i) acc.add(std::abs(weights.w1[i]));
  return acc.value();
}

}  // namespace qpem
