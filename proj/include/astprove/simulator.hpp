#pragma once

#include "astprove/semantics.hpp"

#include <functional>
#include <string>

namespace astprove::sim {

// Monte Carlo estimate of one tail probability with Wilson score intervals.
struct TailEstimate {
  long long k = 0;
  unsigned long long count = 0; // paths with termination time >= k
  unsigned long long trials = 0;
  std::uint64_t seed = 0;
  BigFloat estimate;
  BigFloat w95_lo, w95_hi;
  BigFloat w99_lo, w99_hi;
};

// Wilson score interval for `count` successes out of `trials`, at the given
// two-sided confidence (one of 0.95, 0.99, 0.999).
std::pair<BigFloat, BigFloat> wilson_interval(unsigned long long count,
                                              unsigned long long trials,
                                              double confidence);

// Abstract integer-time stochastic process X_0, X_1, ... with rational values
// and a possibly step-dependent increment law; the stopping time is the first
// n with X_n <= 0.
struct ProcessSpec {
  Rat x0;
  std::string name;
  // Draws X_n - X_{n-1} for step n >= 1.
  std::function<Rat(long long n, dist::Rng&)> increment;
  // Optional hook run once (serially) before sampling paths up to `horizon`
  // steps, e.g. to precompute per-step probability thresholds.
  std::function<void(long long horizon)> prepare;
};

// Estimates P(T >= k) for each k over `trials` independent paths of the loop,
// all ks measured on the same path set.  Results are a pure function of
// (loop, pv0, ks, trials, seed): trials use independent counter-derived RNG
// streams, so the parallel and serial versions agree bit for bit.
std::vector<TailEstimate> estimate_tail(const lang::SingleWhileLoop& loop,
                                        const std::vector<long long>& pv0,
                                        std::vector<long long> ks,
                                        unsigned long long trials, std::uint64_t seed);
std::vector<TailEstimate> estimate_tail_serial(const lang::SingleWhileLoop& loop,
                                               const std::vector<long long>& pv0,
                                               std::vector<long long> ks,
                                               unsigned long long trials,
                                               std::uint64_t seed);

// Same contract for an abstract process and its stopping time.
std::vector<TailEstimate> estimate_process_tail(const ProcessSpec& spec,
                                                std::vector<long long> ks,
                                                unsigned long long trials,
                                                std::uint64_t seed);
std::vector<TailEstimate> estimate_process_tail_serial(const ProcessSpec& spec,
                                                       std::vector<long long> ks,
                                                       unsigned long long trials,
                                                       std::uint64_t seed);

// The product prod_{j=1}^{n} e^{-1/j^2}: the exact probability that the
// divergent counterexample process takes its upward step n times in a row.
BigFloat exact_nonstop_product(long long n);

// The process with X_0 = 1/2 whose step-n increment is +1 with probability
// e^{-1/n^2} and -4n^2 otherwise.  It stops with probability 1 - e^{-pi^2/6}
// only: almost-sure termination fails even though every increment
// distribution is integrable.
ProcessSpec counterexample_process();

// A stationary process: increments drawn i.i.d. from one distribution.
ProcessSpec stationary_process(Rat x0, dist::DiscreteDist d, std::string name);

// CSV with header k,estimate,wilson95_lo,wilson95_hi,trials,seed.
std::string tail_csv(const std::vector<TailEstimate>& rows);

} // namespace astprove::sim
