#include "qpem/sampling.hpp"

#include "qpem/errors.hpp"
#include "qpem/sobol_table.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace qpem {

Scalar inv_norm_cdf(Scalar p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    std::ostringstream os;
    os << "inv_norm_cdf requires p in (0,1); got " << p;
    throw ParameterError(os.str());
  }
  // Wichura (1988), algorithm AS 241, routine PPND16.
  const Scalar q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const Scalar r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  Scalar r = (q < 0) ? p : 1 - p;
  r = std::sqrt(-std::log(r));
  Scalar x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0) ? -x : x;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

Index SobolSequence::max_dimension() { return detail::kSobolMaxDimension; }

SobolSequence::SobolSequence(Index dim) : dim_(dim) {
  if (dim < 1) throw ParameterError("Sobol dimension must be >= 1");
  if (dim > max_dimension()) {
    std::ostringstream os;
    os << "Sobol dimension " << dim << " exceeds the embedded direction-number table limit of "
       << max_dimension() << " dimensions";
    throw ParameterError(os.str());
  }
  v_.assign(static_cast<std::size_t>(dim) * 32, 0);
  for (Index d = 0; d < dim; ++d) {
    std::uint32_t* v = v_.data() + static_cast<std::size_t>(d) * 32;
    if (d == 0) {
      for (int k = 0; k < 32; ++k) v[k] = 1u << (31 - k);
      continue;
    }
    const std::uint32_t poly = detail::kSobolPoly[d];
    const int s = 31 - std::countl_zero(poly);  // degree
    const std::uint32_t* m = detail::kSobolM + detail::kSobolMOffset[d];
    for (int k = 0; k < s && k < 32; ++k) v[k] = m[k] << (31 - k);
    for (int k = s; k < 32; ++k) {
      std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
      for (int i = 1; i < s; ++i) {
        if ((poly >> (s - i)) & 1u) value ^= v[k - i];
      }
      v[k] = value;
    }
  }
}

void SobolSequence::point(std::uint64_t index, std::span<Scalar> out) const {
  const std::uint64_t gray = index ^ (index >> 1);
  for (Index d = 0; d < dim_; ++d) {
    const std::uint32_t* v = v_.data() + static_cast<std::size_t>(d) * 32;
    std::uint32_t x = 0;
    std::uint64_t g = gray;
    int bit = 0;
    while (g != 0 && bit < 32) {
      if (g & 1ull) x ^= v[bit];
      g >>= 1;
      ++bit;
    }
    out[static_cast<std::size_t>(d)] = static_cast<Scalar>(x) * 0x1.0p-32;
  }
}

// ---------------------------------------------------------------------------

std::pair<SigmaPointSet, WeightTable> generate_samples(const SamplePlan& plan, Index n) {
  if (plan.count < 1) throw ParameterError("sample count must be >= 1");
  if (n < 1) throw ParameterError("dimension must be >= 1");
  const Index N = plan.count;

  SigmaPointSet set;
  set.points = Matrix::Zero(N, n);
  set.kind.assign(static_cast<std::size_t>(N), PointKind::sample);

  switch (plan.method) {
    case SamplePlan::Method::mc: {
      CounterRng rng(plan.seed, kTagMc);
      for (Index i = 0; i < N; ++i) {
        for (Index j = 0; j < n; ++j) {
          const std::uint64_t idx =
              static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
              static_cast<std::uint64_t>(j);
          set.points(i, j) = inv_norm_cdf(rng.uniform01_at(idx));
        }
      }
      break;
    }
    case SamplePlan::Method::lhs: {
      for (Index j = 0; j < n; ++j) {
        CounterRng perm_rng(plan.seed, kTagLhsPerm + static_cast<std::uint64_t>(j));
        CounterRng jitter_rng(plan.seed, kTagLhsJitter + static_cast<std::uint64_t>(j));
        std::vector<Index> perm(static_cast<std::size_t>(N));
        std::iota(perm.begin(), perm.end(), Index{0});
        for (Index i = N - 1; i > 0; --i) {
          const auto k = static_cast<Index>(perm_rng.bounded(static_cast<std::uint64_t>(i) + 1));
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
        }
        for (Index i = 0; i < N; ++i) {
          const Scalar u =
              (static_cast<Scalar>(perm[static_cast<std::size_t>(i)]) +
               jitter_rng.uniform01_at(static_cast<std::uint64_t>(i))) /
              static_cast<Scalar>(N);
          set.points(i, j) = inv_norm_cdf(u);
        }
      }
      break;
    }
    case SamplePlan::Method::sobol: {
      if (plan.skip < 1) {
        throw ParameterError(
            "sobol skip must be >= 1 when mapping to z-space: the index-0 point is the "
            "all-zeros origin and Phi^{-1}(0) is undefined");
      }
      SobolSequence seq(n);
      std::vector<Scalar> u(static_cast<std::size_t>(n));
      for (Index i = 0; i < N; ++i) {
        seq.point(plan.skip + static_cast<std::uint64_t>(i), u);
        for (Index j = 0; j < n; ++j) set.points(i, j) = inv_norm_cdf(u[static_cast<std::size_t>(j)]);
      }
      break;
    }
  }
  return {std::move(set), WeightTable::uniform(N)};
}

}  // namespace qpem
