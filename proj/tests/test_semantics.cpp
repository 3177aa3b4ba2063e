#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "astprove/parser.hpp"
#include "astprove/semantics.hpp"

using namespace astprove;

static lang::NormalizedProgram load(const std::string& name) {
  return lang::normalize(lang::parse_file(std::string(PROGRAMS_DIR) + "/" + name));
}

static Int binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  Int num = 1, den = 1;
  for (long long i = 1; i <= k; ++i) {
    num *= Int(n - k + i);
    den *= Int(i);
  }
  return num / den;
}

// P(T >= k) for the fair +-1 walk started at 1, from the reflection/ballot
// closed form: for k >= 2 it equals 2^{-(k-2)} * C(k-2, ceil((k-2)/2)).
static Rat walk_tail(long long k) {
  if (k <= 1) return 1;
  long long m = k - 2;
  Int denom = Int(1) << static_cast<unsigned>(m);
  return Rat(binom(m, (m + 1) / 2), denom);
}

TEST_CASE("step moves through the three configuration phases") {
  auto np = load("ex1_walk.pwhile");
  const auto* loop = np.loops()[0];

  sem::Configuration cfg;
  cfg.val = {1};
  std::vector<long long> up{1};
  cfg = sem::step(*loop, cfg, up);
  CHECK(cfg.in);
  CHECK(cfg.val == std::vector<long long>{2});

  cfg.val = {0};
  cfg = sem::step(*loop, cfg, up);  // guard false: control falls out
  CHECK(!cfg.in);
  CHECK(cfg.val == std::vector<long long>{0});

  cfg = sem::step(*loop, cfg, up);  // absorbing afterwards
  CHECK(!cfg.in);
  CHECK(cfg.val == std::vector<long long>{0});
}

TEST_CASE("kernel rows are exact distributions") {
  auto np = load("ex1_walk.pwhile");
  const auto* loop = np.loops()[0];

  sem::Configuration cfg;
  cfg.val = {1};
  auto row = sem::kernel_row(*loop, cfg);
  REQUIRE(row.size() == 2);
  Rat mass = 0;
  for (const auto& s : row) {
    CHECK(s.cfg.in);
    CHECK(s.prob == Rat(1, 2));
    mass += s.prob;
  }
  CHECK(mass == 1);

  cfg.val = {0};
  row = sem::kernel_row(*loop, cfg);
  REQUIRE(row.size() == 1);
  CHECK(!row[0].cfg.in);
  CHECK(row[0].prob == 1);
}

TEST_CASE("exact_tail matches the ballot closed form for the fair walk") {
  auto np = load("ex1_walk.pwhile");
  const auto* loop = np.loops()[0];
  auto tail = sem::exact_tail(*loop, {1}, 40);
  REQUIRE(tail.size() == 40);
  for (int k = 1; k <= 40; ++k) {
    CAPTURE(k);
    CHECK(tail[static_cast<std::size_t>(k - 1)] == walk_tail(k));
  }
  // Spot values: P(T>=2)=1, P(T>=3)=1/2, P(T>=4)=1/2, P(T>=5)=3/8.
  CHECK(tail[1] == 1);
  CHECK(tail[2] == Rat(1, 2));
  CHECK(tail[3] == Rat(1, 2));
  CHECK(tail[4] == Rat(3, 8));
}

TEST_CASE("exact_tail is deterministic for the countdown") {
  auto np = load("countdown.pwhile");
  const auto* loop = np.loops()[0];
  auto tail = sem::exact_tail(*loop, {3}, 6);
  std::vector<Rat> want{1, 1, 1, 1, 0, 0};
  CHECK(tail == want);
}

TEST_CASE("exact_tail needs finite supports and a state budget") {
  auto geo = load("ex13_geometric.pwhile");
  CHECK_THROWS_AS(sem::exact_tail(*geo.loops()[0], {1}, 10), dist::InfiniteSupport);

  auto walk = load("ex1_walk.pwhile");
  CHECK_THROWS_AS(sem::exact_tail(*walk.loops()[0], {1}, 1000, 50),
                  sem::StateExplosion);
  try {
    sem::exact_tail(*walk.loops()[0], {1}, 1000, 50);
  } catch (const sem::StateExplosion& e) {
    CHECK(e.cap == 50);
    CHECK(e.reached > 50);
  }
}

TEST_CASE("run is seed-deterministic and reports stopping steps") {
  auto np = load("countdown.pwhile");
  const auto* loop = np.loops()[0];
  auto r = sem::run(*loop, {3}, 99, 100);
  CHECK(r.terminated);
  CHECK(r.steps == 4);  // three body steps, then the exit transition
  CHECK(r.final_val == std::vector<long long>{0});

  auto walk = load("ex1_walk.pwhile");
  auto a = sem::run(*walk.loops()[0], {1}, 7, 1000);
  auto b = sem::run(*walk.loops()[0], {1}, 7, 1000);
  CHECK(a.terminated == b.terminated);
  CHECK(a.steps == b.steps);
  CHECK(a.final_val == b.final_val);

  auto capped = sem::run(*np.loops()[0], {1000}, 1, 10);
  CHECK(!capped.terminated);
  CHECK(capped.steps == 10);
}

TEST_CASE("drift_positive never terminates within any finite horizon") {
  auto np = load("drift_positive.pwhile");
  const auto* loop = np.loops()[0];
  auto tail = sem::exact_tail(*loop, {1}, 25);
  for (const Rat& p : tail) CHECK(p == 1);
}
