#include "astprove/dist.hpp"

#include <algorithm>
#include <set>

namespace astprove::dist {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DistError("Rng::below(0)");
  if (n == 1) return 0;
  // Reject the bias range at the top of the 64-bit space.
  std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  for (;;) {
    std::uint64_t u = next();
    if (u < limit) return u % n;
  }
}

bool Rng::bernoulli_exact(const Rat& p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  Int num = numerator(p), den = denominator(p);
  if (den > Int(1) << 62) throw DistError("probability denominator too large for exact sampling");
  return below(den.convert_to<std::uint64_t>()) < num.convert_to<std::uint64_t>();
}

Rng trial_stream(std::uint64_t seed, std::uint64_t trial) {
  // Decorrelate (seed, trial) pairs with one extra SplitMix64 scramble.
  Rng mixer(seed ^ (0xD1B54A32D192ED03ULL * (trial + 1)));
  return Rng(mixer.next());
}

DiscreteDist DiscreteDist::finite(std::vector<std::pair<long long, Rat>> entries) {
  if (entries.empty()) throw DistError("finite distribution needs at least one entry");
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Rat total = 0;
  std::set<long long> seen;
  for (const auto& [v, pr] : entries) {
    if (!seen.insert(v).second) throw DistError("duplicate value in finite distribution");
    if (pr <= 0 || pr > 1) throw DistError("finite distribution probability outside (0,1]");
    total += pr;
  }
  if (total != 1) throw DistError("finite distribution probabilities must sum to exactly 1");
  DiscreteDist d;
  d.kind = Kind::FiniteSupport;
  d.table = std::move(entries);
  return d;
}

DiscreteDist DiscreteDist::uniform_range(long long lo, long long hi) {
  if (lo > hi) throw DistError("uniform(a..b) needs a <= b");
  std::vector<std::pair<long long, Rat>> t;
  Rat pr(1, hi - lo + 1);
  for (long long v = lo; v <= hi; ++v) t.emplace_back(v, pr);
  return finite(std::move(t));
}

DiscreteDist DiscreteDist::two_sided_geometric(const Rat& p) {
  if (p <= 0 || p >= 1) throw DistError("two_sided_geometric parameter must lie in (0,1)");
  DiscreteDist d;
  d.kind = Kind::TwoSidedGeometric;
  d.p = p;
  return d;
}

DiscreteDist DiscreteDist::point(long long v) {
  DiscreteDist d;
  d.kind = Kind::PointMass;
  d.value = v;
  return d;
}

std::string DiscreteDist::describe() const {
  switch (kind) {
    case Kind::PointMass: return "point(" + std::to_string(value) + ")";
    case Kind::TwoSidedGeometric: return "two_sided_geometric(" + rat_to_string(p) + ")";
    case Kind::FiniteSupport: {
      std::string s = "table{";
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(table[i].first) + ":" + rat_to_string(table[i].second);
      }
      return s + "}";
    }
  }
  return "?";
}

Moments moments(const DiscreteDist& d) {
  Moments m;
  switch (d.kind) {
    case DiscreteDist::Kind::PointMass:
      m.mean = d.value;
      m.variance = 0;
      break;
    case DiscreteDist::Kind::FiniteSupport: {
      Rat mu = 0, m2 = 0;
      for (const auto& [v, pr] : d.table) {
        mu += pr * v;
        m2 += pr * Rat(v) * v;
      }
      m.mean = mu;
      m.variance = m2 - mu * mu;
      break;
    }
    case DiscreteDist::Kind::TwoSidedGeometric:
      // Symmetric, so mu = 0; E r^2 = sum k^2 (1-p)^{k-1} p = (2-p)/p^2.
      m.mean = 0;
      m.variance = (2 - d.p) / (d.p * d.p);
      break;
  }
  return m;
}

long long sample(const DiscreteDist& d, Rng& rng) {
  switch (d.kind) {
    case DiscreteDist::Kind::PointMass:
      return d.value;
    case DiscreteDist::Kind::FiniteSupport: {
      // Draw an exact uniform over a common denominator and walk the table.
      Int den(1);
      for (const auto& e : d.table) den = lcm(den, denominator(e.second));
      if (den > Int(1) << 62) throw DistError("probability denominators too large for exact sampling");
      std::uint64_t D = den.convert_to<std::uint64_t>();
      std::uint64_t u = rng.below(D);
      Int acc = 0;
      for (const auto& [v, pr] : d.table) {
        acc += numerator(pr) * (den / denominator(pr));
        if (Int(u) < acc) return v;
      }
      return d.table.back().first; // unreachable: probabilities sum to 1
    }
    case DiscreteDist::Kind::TwoSidedGeometric: {
      bool negative = (rng.next() & 1u) != 0;
      long long mag = 1;
      while (!rng.bernoulli_exact(d.p)) ++mag;
      return negative ? -mag : mag;
    }
  }
  return 0;
}

bool SamplingFunction::all_finite() const {
  return std::all_of(dists.begin(), dists.end(), [](const DiscreteDist& d) { return d.is_finite(); });
}

void SamplingFunction::sample_into(Rng& rng, std::span<long long> out) const {
  for (std::size_t i = 0; i < dists.size(); ++i) out[i] = sample(dists[i], rng);
}

std::vector<std::pair<std::vector<long long>, Rat>> joint_support(const SamplingFunction& sf) {
  if (!sf.all_finite()) throw InfiniteSupport();
  std::vector<std::pair<std::vector<long long>, Rat>> acc;
  acc.emplace_back(std::vector<long long>{}, Rat(1));
  for (const auto& d : sf.dists) {
    std::vector<std::pair<long long, Rat>> entries;
    if (d.kind == DiscreteDist::Kind::PointMass)
      entries.emplace_back(d.value, Rat(1));
    else
      entries = d.table;
    std::vector<std::pair<std::vector<long long>, Rat>> next;
    next.reserve(acc.size() * entries.size());
    for (const auto& [vec, pr] : acc)
      for (const auto& [v, vp] : entries) {
        auto ext = vec;
        ext.push_back(v);
        next.emplace_back(std::move(ext), pr * vp);
      }
    acc = std::move(next);
  }
  return acc;
}

namespace {

// sum_{k>K} (1-p)^{k-1} p  and  sum_{k>K} k (1-p)^{k-1} p, exact.
Rat geo_tail_mass(const Rat& p, long long K) {
  Rat q = 1 - p;
  Rat qK = 1;
  for (long long i = 0; i < K; ++i) qK *= q;
  return qK;
}
Rat geo_tail_first_moment(const Rat& p, long long K) {
  Rat q = 1 - p;
  Rat qK = 1;
  for (long long i = 0; i < K; ++i) qK *= q;
  return qK * (K * p + 1) / p;
}

} // namespace

std::pair<Rat, Rat> expect(const SamplingFunction& sf,
                           const std::function<Rat(std::span<const long long>)>& f,
                           std::optional<Rat> growth,
                           const Rat& tail_eps) {
  std::vector<std::size_t> infinite;
  for (std::size_t i = 0; i < sf.dists.size(); ++i)
    if (!sf.dists[i].is_finite()) infinite.push_back(i);

  if (infinite.empty()) {
    Rat sum = 0;
    for (const auto& [rv, pr] : joint_support(sf)) sum += pr * f(rv);
    return {sum, sum};
  }
  if (!growth) throw GrowthUnbounded();
  if (tail_eps <= 0) throw DistError("tail_eps must be positive");

  // E|r_i| for every variable (1/p for geometric), used in the cross terms of
  // the tail bound below.
  std::vector<Rat> abs_mean(sf.dists.size());
  for (std::size_t i = 0; i < sf.dists.size(); ++i) {
    const auto& d = sf.dists[i];
    if (d.kind == DiscreteDist::Kind::PointMass)
      abs_mean[i] = rat_abs(Rat(d.value));
    else if (d.kind == DiscreteDist::Kind::FiniteSupport) {
      Rat s = 0;
      for (const auto& [v, pr] : d.table) s += pr * rat_abs(Rat(v));
      abs_mean[i] = s;
    } else
      abs_mean[i] = 1 / d.p;
  }

  // |f(rv)| <= G (1 + sum_j |rv_j|). Truncating every infinite variable at
  // |k| <= K, the discarded mass contributes at most
  //   G * sum_{i inf} ( P(|r_i|>K) * (1 + sum_{j!=i} E|r_j|) + E[|r_i| 1_{|r_i|>K}] ),
  // all terms exact rationals with closed geometric forms.
  const Rat& G = *growth;
  Rat sum_abs_all = 0;
  for (const auto& am : abs_mean) sum_abs_all += am;

  long long K = 16;
  Rat err;
  for (;; K *= 2) {
    err = 0;
    for (std::size_t i : infinite) {
      const Rat& p = sf.dists[i].p;
      Rat mass = geo_tail_mass(p, K);
      Rat first = geo_tail_first_moment(p, K);
      err += G * (mass * (1 + (sum_abs_all - abs_mean[i])) + first);
    }
    if (err <= tail_eps) break;
    if (K > (1LL << 40)) throw DistError("expectation truncation failed to converge");
  }

  // Enumerate the truncated product support.
  SamplingFunction trunc = sf;
  for (std::size_t i : infinite) {
    const Rat& p = sf.dists[i].p;
    std::vector<std::pair<long long, Rat>> t;
    Rat q = 1 - p, w = p / 2; // P(r = +-1)
    for (long long k = 1; k <= K; ++k) {
      t.emplace_back(k, w);
      t.emplace_back(-k, w);
      w *= q;
    }
    // Probabilities intentionally sum to < 1 here; the remainder is covered by
    // err. Bypass the sum-to-1 constructor check.
    DiscreteDist d;
    d.kind = DiscreteDist::Kind::FiniteSupport;
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    d.table = std::move(t);
    trunc.dists[i] = d;
  }
  Rat partial = 0;
  for (const auto& [rv, pr] : joint_support(trunc)) partial += pr * f(rv);
  return {partial - err, partial + err};
}

} // namespace astprove::dist
