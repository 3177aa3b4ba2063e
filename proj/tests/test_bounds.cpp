#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "astprove/bounds.hpp"

using namespace astprove;
using namespace astprove::bounds;

static BigFloat bf(const char* s) { return BigFloat(s); }

static void check_close(const BigFloat& got, const char* want, const char* rel) {
  BigFloat w = bf(want);
  BigFloat err = got - w;
  if (err < 0) err = -err;
  BigFloat scale = w < 0 ? -w : w;
  if (scale < 1) scale = 1;
  CHECK(err <= bf(rel) * scale);
}

static BoundInput walk_input() {
  BoundInput in;
  in.e_x0 = 2;
  in.delta = 1;
  in.c_diff = Rat(1);
  in.kind = Kind::DiffBounded;
  return in;
}

TEST_CASE("difference-bounded values match the high-precision references") {
  apply_float_precision();
  auto r = bound_diff(walk_input(), 100, BigFloat(bf("0.1")));
  check_close(r.bound, "0.8203853968772768741", "1e-14");

  // Denominator sub-value at k=100, t=0.1 pins the (1+q t^2)^{-k} branch:
  // 1 - bound-denominator equals 0.2209562086453552244.
  // (Checked through the public value: bound * den == num.)
  BigFloat num = 1 - exp(BigFloat(-2) * bf("0.1"));
  BigFloat den = bf("0.2209562086453552244");
  check_close(num / den, "0.8203853968772768741", "1e-14");

  auto d100 = bound_diff(walk_input(), 100);
  check_close(d100.bound, "0.8203853969", "1e-9");
  auto d1000 = bound_diff(walk_input(), 1000);
  check_close(d1000.bound, "0.2770977325", "1e-9");
  // Default evaluation point is 1/sqrt(k) here (below the admissible cap).
  check_close(d100.t, "0.1", "1e-12");
}

TEST_CASE("the admissible-t cap solves the remainder equation") {
  apply_float_precision();
  check_close(diff_t_max(Rat(1), Rat(1)), "1.1092315125749584", "1e-10");
  // Larger step bounds shrink the cap; smaller ones widen it.
  CHECK(diff_t_max(Rat(2), Rat(1)) < diff_t_max(Rat(1), Rat(1)));
  CHECK(diff_t_max(Rat(1), Rat(2)) > diff_t_max(Rat(1), Rat(1)));
}

TEST_CASE("explicit t beyond the cap is rejected, not absorbed") {
  CHECK_THROWS_AS(bound_diff(walk_input(), 100, BigFloat(2)), TViolatesSmallness);
  try {
    bound_diff(walk_input(), 100, BigFloat(2));
  } catch (const TViolatesSmallness& e) {
    std::string msg = e.what();
    CHECK(msg.find("too large") != std::string::npos);
  }
  CHECK_THROWS_AS(bound_diff(walk_input(), 100, BigFloat(0)), std::exception);

  BoundInput no_step = walk_input();
  no_step.c_diff.reset();
  CHECK_THROWS_AS(bound_diff(no_step, 100), std::exception);
}

TEST_CASE("bounds clamp to one for tiny k and shrink like 1/sqrt(k)") {
  auto r2 = bound_diff(walk_input(), 2);
  CHECK(r2.bound == 1);
  auto r4 = bound_diff(walk_input(), 10000);
  auto r6 = bound_diff(walk_input(), 1000000);
  // Scaled values stabilize: bound * sqrt(k) drifts by under 1 percent
  // between k = 1e4 and 1e6.
  BigFloat s4 = r4.bound * 100;
  BigFloat s6 = r6.bound * 1000;
  BigFloat ratio = s6 / s4;
  CHECK(ratio > bf("0.99"));
  CHECK(ratio < bf("1.02"));
}

TEST_CASE("general-bound constants match the references") {
  apply_float_precision();
  BoundInput in;
  in.e_x0 = 2;
  in.delta = 1;
  in.kind = Kind::General;
  auto r = bound_general(in, 1000000);
  check_close(r.c, "0.3433769409600179524", "1e-14");
  check_close(r.C, "99.03124796568399428", "1e-12");
  CHECK(r.N == 1);
  CHECK(r.valid);
  check_close(r.bound, "0.3846409480807687", "1e-12");

  check_close(bound_general(in, 1000000000).bound, "0.0934493604511370", "1e-12");
  check_close(bound_general(in, 1000000000000).bound, "0.0286600012594742", "1e-12");
}

TEST_CASE("the general bound knows its own validity threshold") {
  BoundInput in;
  in.e_x0 = 2;
  in.delta = 1;
  in.kind = Kind::General;
  // M = (c^2 k)^{1/6} must exceed E = 2, i.e. k > 64 / c^2 ~ 542.8.
  auto below = bound_general(in, 542);
  CHECK(!below.valid);
  CHECK(below.bound == 1);
  auto above = bound_general(in, 543);
  CHECK(above.valid);
  // Right at the threshold the formula value still exceeds one, so the
  // published bound stays clamped; it only becomes informative further out.
  CHECK(above.bound == 1);
  CHECK(bound_general(in, 1000000).bound < 1);
}

TEST_CASE("series evaluation enforces shape") {
  auto series = bound_series(walk_input(), {100, 1000, 10000});
  REQUIRE(series.size() == 3);
  CHECK(series[0].bound >= series[1].bound);
  CHECK(series[1].bound >= series[2].bound);
  CHECK_THROWS_AS(bound_series(walk_input(), {1000, 100}), std::invalid_argument);
  CHECK_THROWS_AS(bound_series(walk_input(), {100, 100}), std::invalid_argument);

  std::string csv = bounds_csv(series, Kind::DiffBounded);
  CHECK(csv.rfind("k,bound,method,t,valid\n", 0) == 0);
  CHECK(csv.find(",diff,") != std::string::npos);

  BoundInput gen;
  gen.e_x0 = 2;
  gen.delta = 1;
  gen.kind = Kind::General;
  auto gs = bound_series(gen, {542, 100000});
  std::string gcsv = bounds_csv(gs, Kind::General);
  CHECK(gcsv.find(",general,") != std::string::npos);
  CHECK(gcsv.find(",0\n") != std::string::npos);  // the invalid k=542 row
}

TEST_CASE("scaled general tails stay within ten percent across three decades") {
  BoundInput in;
  in.e_x0 = 2;
  in.delta = 1;
  in.kind = Kind::General;
  BigFloat g9 = bound_general(in, 1000000000).bound;
  BigFloat g12 = bound_general(in, 1000000000000).bound;
  // Normalize by the k^{-1/6} decay: (1e9)^{1/6} = 10^{1.5}, (1e12)^{1/6} = 100.
  BigFloat n9 = g9 * pow(BigFloat(10), BigFloat(3) / 2);
  BigFloat n12 = g12 * 100;
  BigFloat ratio = n9 / n12;
  check_close(ratio, "1.03109843658", "1e-9");
  CHECK(ratio < bf("1.1"));
  CHECK(ratio > bf("0.9"));
}

TEST_CASE("rounding never understates a bound") {
  // The published value is rounded upward in the 15th significant digit, so
  // it may sit on or slightly above a higher-precision recompute of the raw
  // quotient, but never below it.
  BigFloat base = bound_diff(walk_input(), 1000).bound;
  unsigned old_digits = float_digits();
  set_float_digits(60);
  apply_float_precision();
  BigFloat t = 1 / sqrt(BigFloat(1000));
  BigFloat raw =
      (1 - exp(-2 * t)) / (1 - exp(BigFloat(-1000) * log(1 + t * t / 4)));
  CHECK(base >= raw);
  CHECK(base - raw < bf("1e-13"));
  // Re-publishing at the higher precision lands on the same decimal.
  BigFloat fine = bound_diff(walk_input(), 1000).bound;
  BigFloat drift = fine > base ? fine - base : base - fine;
  CHECK(drift < bf("1e-20"));
  set_float_digits(old_digits);
  apply_float_precision();
}
