#pragma once

#include "astprove/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace astprove::dist {

struct DistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfiniteSupport : DistError {
  InfiniteSupport() : DistError("operation requires finite support but a two-sided geometric distribution is present") {}
};
struct GrowthUnbounded : DistError {
  GrowthUnbounded() : DistError("expectation over infinite support needs a declared linear growth constant") {}
};

// Deterministic 64-bit stream (SplitMix64). Sampling never goes through
// libstdc++ distributions, so draws are identical across platforms and the
// per-trial streams below make results independent of scheduling.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform on [0, n) by rejection; exact for any n >= 1.
  std::uint64_t below(std::uint64_t n);
  // Exact Bernoulli(num/den) for 0 <= num <= den, den < 2^63.
  bool bernoulli_exact(const Rat& p);
};

// Stream for one trial: results depend only on (seed, trial), never on the
// number of workers or the interleaving.
Rng trial_stream(std::uint64_t seed, std::uint64_t trial);

struct DiscreteDist {
  enum class Kind { FiniteSupport, TwoSidedGeometric, PointMass };
  Kind kind;
  // FiniteSupport: values with exact probabilities summing to 1.
  std::vector<std::pair<long long, Rat>> table;
  // TwoSidedGeometric(p): P(r=k) = (1-p)^{|k|-1} * p/2 for k != 0, P(r=0) = 0.
  Rat p;
  // PointMass:
  long long value = 0;

  static DiscreteDist finite(std::vector<std::pair<long long, Rat>> entries);
  static DiscreteDist uniform_range(long long lo, long long hi);
  static DiscreteDist two_sided_geometric(const Rat& p);
  static DiscreteDist point(long long v);

  bool is_finite() const { return kind != Kind::TwoSidedGeometric; }
  // |r| can exceed any fixed bound (false only for finite kinds).
  std::string describe() const;
};

struct Moments {
  Rat mean;
  Rat variance;
  bool finite = true; // both moments exist for every supported kind
};

// Exact for FiniteSupport/PointMass; closed form mu=0, sigma^2=(2-p)/p^2 for
// the two-sided geometric.
Moments moments(const DiscreteDist& d);

long long sample(const DiscreteDist& d, Rng& rng);

// Upsilon: one distribution per sampling variable, in declaration order.
struct SamplingFunction {
  std::vector<std::string> names;
  std::vector<DiscreteDist> dists;

  std::size_t size() const { return dists.size(); }
  bool all_finite() const;
  void sample_into(Rng& rng, std::span<long long> out) const;
};

// Product distribution over all sampling variables; probabilities sum to 1
// exactly. Throws InfiniteSupport unless every dist is finite.
std::vector<std::pair<std::vector<long long>, Rat>> joint_support(const SamplingFunction& sf);

// E[f(rv)] as a certified interval. Exact point interval when every dist is
// finite. Infinite supports are truncated at |k| <= K with K grown until the
// rational tail bound (from |f(rv)| <= growth * (1 + sum |rv_i|)) is at most
// tail_eps; the result has width <= 2*tail_eps. growth must be declared when
// any dist is infinite (GrowthUnbounded otherwise).
std::pair<Rat, Rat> expect(const SamplingFunction& sf,
                           const std::function<Rat(std::span<const long long>)>& f,
                           std::optional<Rat> growth,
                           const Rat& tail_eps);

} // namespace astprove::dist
