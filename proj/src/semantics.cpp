#include "astprove/semantics.hpp"

#include <map>

namespace astprove::sem {

Configuration step(const lang::SingleWhileLoop& loop, Configuration cfg,
                   std::span<const long long> rv) {
  if (!cfg.in) return cfg;
  if (!loop.guard.eval(cfg.val)) {
    cfg.in = false;
    return cfg;
  }
  loop.run_body(cfg.val, rv);
  return cfg;
}

PathResult run(const lang::SingleWhileLoop& loop, std::vector<long long> pv0,
               std::uint64_t seed, long long horizon) {
  dist::Rng rng = dist::trial_stream(seed, 0);
  Configuration cfg{true, std::move(pv0)};
  std::vector<long long> rv(loop.sampling.size());
  for (long long n = 1; n <= horizon; ++n) {
    if (loop.guard.eval(cfg.val)) loop.sampling.sample_into(rng, rv);
    cfg = step(loop, std::move(cfg), rv);
    if (!cfg.in) return {true, n, std::move(cfg.val)};
  }
  return {false, horizon, std::move(cfg.val)};
}

KernelRow kernel_row(const lang::SingleWhileLoop& loop, const Configuration& cfg) {
  KernelRow row;
  if (!cfg.in) {
    row.push_back({cfg, Rat(1)});
    return row;
  }
  if (!loop.guard.eval(cfg.val)) {
    row.push_back({{false, cfg.val}, Rat(1)});
    return row;
  }
  std::map<std::vector<long long>, Rat> succ;
  for (const auto& [rv, p] : dist::joint_support(loop.sampling)) {
    std::vector<long long> pv = cfg.val;
    loop.run_body(pv, rv);
    succ[std::move(pv)] += p;
  }
  for (auto& [pv, p] : succ) row.push_back({{true, pv}, p});
  return row;
}

std::vector<Rat> exact_tail(const lang::SingleWhileLoop& loop,
                            const std::vector<long long>& pv0, int k_max,
                            unsigned long long cap) {
  // mass[pv] = probability of being inside the loop at valuation pv after n
  // steps; P(T >= n+1) is its total, since leaving happens exactly when the
  // chain is no longer inside.
  std::vector<Rat> tails;
  if (k_max < 1) return tails;
  const auto joint = dist::joint_support(loop.sampling); // throws on infinite support
  std::map<std::vector<long long>, Rat> mass;
  mass[pv0] = 1;
  Rat total = 1;
  unsigned long long work = 0;
  tails.push_back(total);
  for (int n = 1; n < k_max; ++n) {
    std::map<std::vector<long long>, Rat> next;
    Rat next_total = 0;
    for (const auto& [pv, p] : mass) {
      work += 1;
      if (work > cap) throw StateExplosion(cap, work);
      if (!loop.guard.eval(pv)) continue;
      next_total += p;
      for (const auto& [rv, q] : joint) {
        std::vector<long long> pv2 = pv;
        loop.run_body(pv2, rv);
        next[std::move(pv2)] += p * q;
      }
    }
    mass = std::move(next);
    total = next_total;
    tails.push_back(total);
    if (total == 0) {
      // Everything has left the loop; the remaining tail is identically zero.
      for (int m = n + 1; m < k_max; ++m) tails.push_back(Rat(0));
      break;
    }
  }
  return tails;
}

} // namespace astprove::sem
