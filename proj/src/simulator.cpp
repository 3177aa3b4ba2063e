#include "astprove/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace astprove::sim {

namespace {

BigFloat z_for(double confidence) {
  // Two-sided standard normal quantiles, precomputed to 34 digits.
  if (confidence == 0.95) return BigFloat("1.9599639845400542355245944305205515");
  if (confidence == 0.99) return BigFloat("2.5758293035489007609785767486038141");
  if (confidence == 0.999) return BigFloat("3.2905267314918947932216270353746492");
  throw std::invalid_argument("unsupported confidence level");
}

void finish_estimates(std::vector<TailEstimate>& out,
                      const std::vector<long long>& ks,
                      const std::vector<unsigned long long>& counts,
                      unsigned long long trials, std::uint64_t seed) {
  out.reserve(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    TailEstimate e;
    e.k = ks[i];
    e.count = counts[i];
    e.trials = trials;
    e.seed = seed;
    e.estimate = BigFloat(counts[i]) / BigFloat(trials);
    std::tie(e.w95_lo, e.w95_hi) = wilson_interval(counts[i], trials, 0.95);
    std::tie(e.w99_lo, e.w99_hi) = wilson_interval(counts[i], trials, 0.99);
    out.push_back(std::move(e));
  }
}

// Shared driver: `time_of_trial` maps a per-trial RNG stream to the
// (truncated) termination time; counting is exact integer work, so the
// parallel and serial paths produce identical counts by construction.
template <class TimeFn>
std::vector<unsigned long long> count_tails(const std::vector<long long>& ks,
                                            unsigned long long trials,
                                            std::uint64_t seed, bool parallel,
                                            TimeFn&& time_of_trial) {
  std::vector<unsigned long long> counts(ks.size(), 0);
#pragma omp parallel if (parallel)
  {
    std::vector<unsigned long long> local(ks.size(), 0);
#pragma omp for schedule(static) nowait
    for (long long t = 0; t < static_cast<long long>(trials); ++t) {
      dist::Rng rng = dist::trial_stream(seed, static_cast<std::uint64_t>(t));
      long long T = time_of_trial(rng);
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (T >= ks[i]) ++local[i];
    }
#pragma omp critical
    for (std::size_t i = 0; i < ks.size(); ++i) counts[i] += local[i];
  }
  return counts;
}

std::vector<TailEstimate> tail_impl(const lang::SingleWhileLoop& loop,
                                    const std::vector<long long>& pv0,
                                    std::vector<long long> ks,
                                    unsigned long long trials, std::uint64_t seed,
                                    bool parallel) {
  if (trials < 100) throw std::invalid_argument("need at least 100 trials");
  std::sort(ks.begin(), ks.end());
  const long long horizon = ks.empty() ? 0 : ks.back();
  auto counts = count_tails(ks, trials, seed, parallel, [&](dist::Rng& rng) {
    std::vector<long long> pv = pv0;
    std::vector<long long> rv(loop.sampling.size());
    for (long long n = 1; n <= horizon; ++n) {
      if (!loop.guard.eval(pv)) return n; // exits the loop on step n
      loop.sampling.sample_into(rng, rv);
      loop.run_body(pv, rv);
    }
    return horizon + 1; // still inside: T exceeds every measured k
  });
  std::vector<TailEstimate> out;
  finish_estimates(out, ks, counts, trials, seed);
  return out;
}

std::vector<TailEstimate> process_impl(const ProcessSpec& spec,
                                       std::vector<long long> ks,
                                       unsigned long long trials,
                                       std::uint64_t seed, bool parallel) {
  if (trials < 100) throw std::invalid_argument("need at least 100 trials");
  std::sort(ks.begin(), ks.end());
  const long long horizon = ks.empty() ? 0 : ks.back();
  if (spec.prepare) spec.prepare(horizon);
  auto counts = count_tails(ks, trials, seed, parallel, [&](dist::Rng& rng) {
    Rat x = spec.x0;
    if (x <= 0) return 0LL; // stopped before the first step
    for (long long n = 1; n < horizon; ++n) {
      x += spec.increment(n, rng);
      if (x <= 0) return n;
    }
    return horizon; // X_0..X_{horizon-1} all positive: Z >= every measured k
  });
  std::vector<TailEstimate> out;
  finish_estimates(out, ks, counts, trials, seed);
  return out;
}

} // namespace

std::pair<BigFloat, BigFloat> wilson_interval(unsigned long long count,
                                              unsigned long long trials,
                                              double confidence) {
  const BigFloat z = z_for(confidence);
  const BigFloat n(trials);
  const BigFloat phat = BigFloat(count) / n;
  const BigFloat z2 = z * z;
  const BigFloat denom = 1 + z2 / n;
  const BigFloat center = phat + z2 / (2 * n);
  const BigFloat halfwidth = z * sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
  return {(center - halfwidth) / denom, (center + halfwidth) / denom};
}

std::vector<TailEstimate> estimate_tail(const lang::SingleWhileLoop& loop,
                                        const std::vector<long long>& pv0,
                                        std::vector<long long> ks,
                                        unsigned long long trials, std::uint64_t seed) {
  return tail_impl(loop, pv0, std::move(ks), trials, seed, true);
}

std::vector<TailEstimate> estimate_tail_serial(const lang::SingleWhileLoop& loop,
                                               const std::vector<long long>& pv0,
                                               std::vector<long long> ks,
                                               unsigned long long trials,
                                               std::uint64_t seed) {
  return tail_impl(loop, pv0, std::move(ks), trials, seed, false);
}

std::vector<TailEstimate> estimate_process_tail(const ProcessSpec& spec,
                                                std::vector<long long> ks,
                                                unsigned long long trials,
                                                std::uint64_t seed) {
  return process_impl(spec, std::move(ks), trials, seed, true);
}

std::vector<TailEstimate> estimate_process_tail_serial(const ProcessSpec& spec,
                                                       std::vector<long long> ks,
                                                       unsigned long long trials,
                                                       std::uint64_t seed) {
  return process_impl(spec, std::move(ks), trials, seed, false);
}

BigFloat exact_nonstop_product(long long n) {
  Rat s = 0;
  for (long long j = 1; j <= n; ++j) s += Rat(1, j * j);
  return exp(-to_bigfloat(s));
}

ProcessSpec counterexample_process() {
  ProcessSpec spec;
  spec.x0 = Rat(1, 2);
  spec.name = "diverging-penalty walk";
  // Threshold for "u64 < floor(p * 2^64)" sampling of the step-n up move,
  // filled in by prepare() so the sampling loop itself is read-only.
  auto thresholds = std::make_shared<std::vector<std::uint64_t>>();
  spec.prepare = [thresholds](long long horizon) {
    auto& thr = *thresholds;
    if (static_cast<long long>(thr.size()) > horizon) return;
    thr.resize(static_cast<std::size_t>(horizon) + 1, 0);
    const BigFloat two64 = pow(BigFloat(2), 64);
    for (long long n = 1; n <= horizon; ++n) {
      BigFloat p = exp(BigFloat(-1) / (BigFloat(n) * BigFloat(n)));
      Int f(floor(p * two64));
      thr[static_cast<std::size_t>(n)] = f.convert_to<std::uint64_t>();
    }
  };
  spec.increment = [thresholds](long long n, dist::Rng& rng) {
    if (n <= 0 || n >= static_cast<long long>(thresholds->size()))
      throw std::logic_error("process step outside prepared range");
    if (rng.next() < (*thresholds)[static_cast<std::size_t>(n)]) return Rat(1);
    return Rat(-4 * n * n);
  };
  return spec;
}

ProcessSpec stationary_process(Rat x0, dist::DiscreteDist d, std::string name) {
  ProcessSpec spec;
  spec.x0 = std::move(x0);
  spec.name = std::move(name);
  spec.increment = [d = std::move(d)](long long, dist::Rng& rng) {
    return Rat(dist::sample(d, rng));
  };
  return spec;
}

std::string tail_csv(const std::vector<TailEstimate>& rows) {
  std::ostringstream out;
  out << "k,estimate,wilson95_lo,wilson95_hi,trials,seed\n";
  for (const TailEstimate& e : rows) {
    out << e.k << "," << bigfloat_str(e.estimate, 17) << ","
        << bigfloat_str(e.w95_lo, 17) << "," << bigfloat_str(e.w95_hi, 17) << ","
        << e.trials << "," << e.seed << "\n";
  }
  return out.str();
}

} // namespace astprove::sim
