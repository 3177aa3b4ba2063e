#pragma once

#include "astprove/normalize.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace astprove::sem {

// A state of the loop's Markov chain: program counter (inside / after the
// loop) plus the integer valuation of the program variables.
struct Configuration {
  bool in = true;
  std::vector<long long> val;
};

struct PathResult {
  bool terminated = false;
  long long steps = 0; // termination time when terminated, else the horizon
  std::vector<long long> final_val;
};

struct KernelSuccessor {
  Configuration cfg;
  Rat prob;
};
using KernelRow = std::vector<KernelSuccessor>;

class StateExplosion : public std::runtime_error {
public:
  unsigned long long cap, reached;
  StateExplosion(unsigned long long cap_, unsigned long long reached_)
      : std::runtime_error("state budget exceeded: " + std::to_string(reached_) +
                           " state-step pairs against a cap of " + std::to_string(cap_)),
        cap(cap_), reached(reached_) {}
};

// One transition: inside with the guard true, the body runs on the sample
// vector; inside with the guard false, control falls out; after the loop the
// state is absorbing.
Configuration step(const lang::SingleWhileLoop& loop, Configuration cfg,
                   std::span<const long long> rv);

// Executes one random path for at most `horizon` steps.  Deterministic in the
// seed.  `steps` is the chain step on which the loop was exited.
PathResult run(const lang::SingleWhileLoop& loop, std::vector<long long> pv0,
               std::uint64_t seed, long long horizon);

// All successors of a configuration with their exact probabilities.
KernelRow kernel_row(const lang::SingleWhileLoop& loop, const Configuration& cfg);

// Exact tail probabilities P(T >= k) for k = 1..k_max, by forward dynamic
// programming over the kernel with exact rational mass.  Requires every
// sampling distribution to have finite support.  The cap bounds the total
// number of (state, step) pairs processed.
std::vector<Rat> exact_tail(const lang::SingleWhileLoop& loop,
                            const std::vector<long long>& pv0, int k_max,
                            unsigned long long cap = 10'000'000ULL);

} // namespace astprove::sem
