#pragma once

// Monte Carlo, Latin hypercube, and Sobol quasi-Monte Carlo generation in
// standardized normal space. Everything is a pure function of (plan, n):
// draws are addressed by index through a counter-based generator, so streams
// are bit-reproducible and parallel generation partitions by index instead of
// racing a shared state.

#include "qpem/core.hpp"

#include <cstdint>
#include <span>
#include <utility>

namespace qpem {

struct SamplePlan {
  enum class Method { mc, lhs, sobol };
  Method method = Method::mc;
  Index count = 0;
  std::uint64_t seed = 0;  // consumed by mc and lhs
  std::uint64_t skip = 1;  // sobol burn-in; the index-0 point is the origin
};

/// Phi^{-1}(p) for p in (0,1), by the rational approximations of Wichura's
/// algorithm AS 241 (PPND16); absolute error well below 1e-9.
/// Throws ParameterError outside the open interval.
Scalar inv_norm_cdf(Scalar p);

// ---------------------------------------------------------------------------
// Counter-based uniform generator. Output i of stream (seed, tag) is
//   mix(mix(seed ^ tag) + (i + 1) * 0x9E3779B97F4A7C15)
// with mix the splitmix64 finalizer:
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31.
// Any index is addressable in O(1); uniform01 keeps draws strictly inside
// (0, 1) so they are always mappable through the inverse normal CDF.

std::uint64_t splitmix64_mix(std::uint64_t z);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t tag)
      : key_(splitmix64_mix(seed ^ tag)) {}

  std::uint64_t at(std::uint64_t index) const {
    return splitmix64_mix(key_ + (index + 1) * 0x9E3779B97F4A7C15ull);
  }
  Scalar uniform01_at(std::uint64_t index) const { return to_unit(at(index)); }

  std::uint64_t next() { return at(counter_++); }
  Scalar uniform01() { return to_unit(next()); }
  /// Unbiased-enough bounded draw via 128-bit multiply (Lemire reduction).
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Top 53 bits mapped to [2^-54, 1 - 2^-53]; never exactly 0 or 1.
  static Scalar to_unit(std::uint64_t x) {
    const Scalar u = static_cast<Scalar>(x >> 11) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-54 : u;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream tags (arbitrary fixed 64-bit constants, documented in the README).
inline constexpr std::uint64_t kTagMc = 0x6d632d64726177ull;        // "mc-draw"
inline constexpr std::uint64_t kTagLhsPerm = 0x6c68732d7065726dull; // "lhs-perm"
inline constexpr std::uint64_t kTagLhsJitter = 0x6c68732d6a6974ull; // "lhs-jit"

// ---------------------------------------------------------------------------
// Sobol low-discrepancy sequence, 32-bit, Gray-code construction over the
// first 100 dimensions of the Joe & Kuo (2008) direction-number table.
// point(0) is the sequence origin (all zeros).

class SobolSequence {
 public:
  explicit SobolSequence(Index dim);

  static Index max_dimension();

  /// Writes point `index` of the sequence into `out` (size dim), each
  /// coordinate in [0, 1).
  void point(std::uint64_t index, std::span<Scalar> out) const;

  Index dim() const { return dim_; }

 private:
  Index dim_;
  std::vector<std::uint32_t> v_;  // 32 direction numbers per dimension
};

/// Generates N z-space points for the plan:
///   mc:    z_{i,j} = Phi^{-1}(u(seed, i*n+j)), i.i.d. standard normal;
///   lhs:   one uniform draw per equiprobable stratum per dimension, strata
///          shuffled per dimension (McKay construction), mapped by Phi^{-1};
///   sobol: sequence points skip..skip+N-1 mapped by Phi^{-1} (skip >= 1,
///          because the origin point is not mappable).
/// Weights are uniform 1/N in all four orders.
std::pair<SigmaPointSet, WeightTable> generate_samples(const SamplePlan& plan, Index n);

}  // namespace qpem
