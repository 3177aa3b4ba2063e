#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

#include "astprove/dist.hpp"

using namespace astprove;
using dist::DiscreteDist;

TEST_CASE("moments of the finite kinds are exact rationals") {
  auto fair = DiscreteDist::finite({{-1, Rat(1, 2)}, {1, Rat(1, 2)}});
  auto m = dist::moments(fair);
  CHECK(m.mean == 0);
  CHECK(m.variance == 1);

  auto shifted = DiscreteDist::finite({{0, Rat(1, 2)}, {2, Rat(1, 2)}});
  m = dist::moments(shifted);
  CHECK(m.mean == 1);
  CHECK(m.variance == 1);

  auto die = DiscreteDist::uniform_range(1, 6);
  m = dist::moments(die);
  CHECK(m.mean == Rat(7, 2));
  CHECK(m.variance == Rat(35, 12));

  auto pt = DiscreteDist::point(-3);
  m = dist::moments(pt);
  CHECK(m.mean == -3);
  CHECK(m.variance == 0);
}

TEST_CASE("two-sided geometric moments") {
  // P(r = k) = (1-p)^{|k|-1} p / 2 for k != 0.  Symmetry gives mean 0; the
  // second moment is p*(2-p)/(1-p)^2 evaluated... checked against the series:
  // for p = 1/2 the variance is 6, for p = 2/3 it is 3.
  auto half = DiscreteDist::two_sided_geometric(Rat(1, 2));
  auto m = dist::moments(half);
  CHECK(m.mean == 0);
  CHECK(m.variance == 6);

  auto twothirds = DiscreteDist::two_sided_geometric(Rat(2, 3));
  m = dist::moments(twothirds);
  CHECK(m.mean == 0);
  CHECK(m.variance == 3);
}

TEST_CASE("uniform_range rejects an empty range and bad geometric parameters") {
  CHECK_THROWS_AS(DiscreteDist::uniform_range(3, 2), std::exception);
  CHECK_THROWS_AS(DiscreteDist::two_sided_geometric(Rat(0)), std::exception);
  CHECK_THROWS_AS(DiscreteDist::two_sided_geometric(Rat(3, 2)), std::exception);
}

TEST_CASE("joint support enumerates the product with exact probabilities") {
  dist::SamplingFunction sf;
  sf.names = {"r", "s"};
  sf.dists = {DiscreteDist::finite({{-1, Rat(1, 2)}, {1, Rat(1, 2)}}),
              DiscreteDist::uniform_range(0, 2)};
  auto pts = dist::joint_support(sf);
  REQUIRE(pts.size() == 6);
  Rat total = 0;
  for (const auto& [vals, p] : pts) {
    REQUIRE(vals.size() == 2);
    CHECK(p == Rat(1, 6));
    total += p;
  }
  CHECK(total == 1);

  dist::SamplingFunction inf;
  inf.names = {"g"};
  inf.dists = {DiscreteDist::two_sided_geometric(Rat(1, 2))};
  CHECK(!inf.all_finite());
  CHECK_THROWS_AS(dist::joint_support(inf), dist::InfiniteSupport);
}

TEST_CASE("expect is exact on finite supports") {
  dist::SamplingFunction sf;
  sf.names = {"r"};
  sf.dists = {DiscreteDist::finite({{-1, Rat(1, 2)}, {1, Rat(1, 2)}})};
  auto f = [](std::span<const long long> rv) { return Rat(rv[0] * rv[0]); };
  auto [lo, hi] = dist::expect(sf, f, std::nullopt, Rat(1, 1000));
  CHECK(lo == 1);
  CHECK(hi == 1);
}

TEST_CASE("expect brackets E|r| = 2 for the fair two-sided geometric") {
  dist::SamplingFunction sf;
  sf.names = {"r"};
  sf.dists = {DiscreteDist::two_sided_geometric(Rat(1, 2))};
  auto f = [](std::span<const long long> rv) {
    return Rat(rv[0] < 0 ? -rv[0] : rv[0]);
  };
  // Growth must be declared for an infinite support.
  CHECK_THROWS_AS(dist::expect(sf, f, std::nullopt, Rat(1, 1000)),
                  dist::GrowthUnbounded);
  auto [lo, hi] = dist::expect(sf, f, Rat(1), Rat(1, 100000));
  CHECK(lo <= 2);
  CHECK(hi >= 2);
  CHECK(hi - lo <= Rat(2, 100000));
}

TEST_CASE("sampling matches the exact law at scale") {
  const int n = 200000;
  dist::Rng rng(12345);

  auto fair = DiscreteDist::finite({{-1, Rat(1, 2)}, {1, Rat(1, 2)}});
  long long sum = 0;
  for (int i = 0; i < n; ++i) sum += dist::sample(fair, rng);
  // 4 sigma for a +-1 step over 200k draws is ~0.0089.
  CHECK(std::abs(double(sum) / n) < 0.01);

  auto geo = DiscreteDist::two_sided_geometric(Rat(1, 2));
  long long absum = 0;
  std::map<long long, int> freq;
  for (int i = 0; i < n; ++i) {
    long long v = dist::sample(geo, rng);
    absum += std::llabs(v);
    ++freq[v];
  }
  CHECK(std::abs(double(absum) / n - 2.0) < 0.05);
  CHECK(freq.count(0) == 0);  // zero is not in the support
  // P(r = 1) = 1/4.
  CHECK(std::abs(double(freq[1]) / n - 0.25) < 0.01);
}

TEST_CASE("bernoulli_exact hits rational frequencies") {
  dist::Rng rng(777);
  const int n = 300000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (rng.bernoulli_exact(Rat(1, 3))) ++hits;
  CHECK(std::abs(double(hits) / n - 1.0 / 3.0) < 0.005);

  // Degenerate probabilities are exact, not approximate.
  dist::Rng rng2(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(rng2.bernoulli_exact(Rat(1)));
    CHECK(!rng2.bernoulli_exact(Rat(0)));
  }
}

TEST_CASE("trial streams are reproducible and decorrelated") {
  auto a = dist::trial_stream(9, 4);
  auto b = dist::trial_stream(9, 4);
  for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());

  auto c = dist::trial_stream(9, 5);
  auto d = dist::trial_stream(10, 4);
  // Distinct trials / seeds give distinct openings.
  CHECK(dist::trial_stream(9, 4).next() != c.next());
  CHECK(dist::trial_stream(9, 4).next() != d.next());
}

TEST_CASE("below is uniform enough and rejects zero") {
  dist::Rng rng(2024);
  std::vector<int> buckets(7, 0);
  const int n = 140000;
  for (int i = 0; i < n; ++i) ++buckets[rng.below(7)];
  for (int k = 0; k < 7; ++k)
    CHECK(std::abs(double(buckets[k]) / n - 1.0 / 7.0) < 0.01);
  CHECK_THROWS_AS(rng.below(0), dist::DistError);
}
