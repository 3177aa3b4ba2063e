#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

struct RunResult {
  int code = -1;
  std::string out, err;
};

static std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static RunResult run_cli(const std::string& args) {
  static int serial = 0;
  const std::string tag = std::to_string(++serial);
  const std::string so = "cli_stdout_" + tag + ".txt";
  const std::string se = "cli_stderr_" + tag + ".txt";
  const std::string cmd =
      std::string(ASTPROVE_BIN) + " " + args + " > " + so + " 2> " + se;
  int rc = std::system(cmd.c_str());
  RunResult r;
  if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  std::remove(so.c_str());
  std::remove(se.c_str());
  return r;
}

static std::string prog(const std::string& name) {
  return std::string(PROGRAMS_DIR) + "/" + name;
}
static std::string cert(const std::string& name) {
  return std::string(CERTS_DIR) + "/" + name;
}

static bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

TEST_CASE("analyze certifies the walk symbolically") {
  auto r = run_cli("analyze " + prog("ex1_walk.pwhile") + " --init x=1");
  CHECK(r.code == 0);
  CHECK(has(r.out, "\"smap_diff_bounded\""));
  CHECK(has(r.out, "\"AST_certified\""));
  CHECK(has(r.out, "\"symbolic\""));
  CHECK(has(r.out, "\"e_x0\": \"2\""));
  CHECK(has(r.out, "\"x + 1\""));
}

TEST_CASE("analyze reports are byte-reproducible") {
  const std::string args = "analyze " + prog("ex1_walk.pwhile") +
                           " --init x=1 --ks 100,1000 --trials 2000 --seed 42";
  auto a = run_cli(args + " --out rep_a.json");
  auto b = run_cli(args + " --out rep_b.json");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::string ja = slurp("rep_a.json"), jb = slurp("rep_b.json");
  CHECK(!ja.empty());
  CHECK(ja == jb);
  CHECK(has(ja, "\"empirical\""));
  CHECK(has(ja, "\"bounds\""));
  std::remove("rep_a.json");
  std::remove("rep_b.json");
}

TEST_CASE("analyze exit codes grade the outcome") {
  CHECK(run_cli("analyze " + prog("nested_error.pwhile")).code == 1);
  CHECK(run_cli("analyze " + prog("biased_up.pwhile")).code == 3);
  auto box = run_cli("analyze " + prog("ex14_parabola.pwhile") + " --box -50..50");
  CHECK(box.code == 2);
  CHECK(has(box.out, "\"clt_lpf\""));
  CHECK(has(box.out, "\"AST_certified_on_box\""));
}

TEST_CASE("analyze falls back to an offset template for isqrt updates") {
  auto r = run_cli("analyze " + prog("ex8_isqrt.pwhile") +
                   " --box 0..3000 --init x=1");
  CHECK(r.code == 2);
  CHECK(has(r.out, "\"smap_general\""));
  CHECK(has(r.out, "\"zeta\": null"));
  CHECK(has(r.out, "\"AST_certified_on_box\""));
}

TEST_CASE("analyze validates its flag grammar") {
  auto bad_init = run_cli("analyze " + prog("ex1_walk.pwhile") + " --init z=1");
  CHECK(bad_init.code == 1);
  CHECK(has(bad_init.err, "unknown variable"));
  auto bad_box = run_cli("analyze " + prog("ex1_walk.pwhile") + " --box 5..1");
  CHECK(bad_box.code == 1);
  auto missing = run_cli("analyze " + prog("no_such.pwhile"));
  CHECK(missing.code == 1);
  CHECK(has(missing.err, "error"));
}

TEST_CASE("check accepts good certificates and grades bad ones") {
  auto good = run_cli("check " + prog("ex1_walk.pwhile") + " --cert " + cert("ex6.json"));
  CHECK(good.code == 0);
  CHECK(has(good.out, "verdict: AST_certified (symbolic)"));

  auto cd = run_cli("check " + prog("countdown.pwhile") + " --cert " + cert("ex6.json"));
  CHECK(cd.code == 0);

  auto zero = run_cli("check " + prog("ex1_walk.pwhile") + " --cert " + cert("zero.json"));
  CHECK(zero.code == 4);
  CHECK(has(zero.out, "D2i"));
  CHECK(has(zero.out, "replay: confirmed"));

  auto boxed = run_cli("check " + prog("ex8_isqrt.pwhile") + " --cert " +
                       cert("ex8_general.json") + " --box 1..3000");
  CHECK(boxed.code == 0);
  CHECK(has(boxed.out, "verdict: AST_certified_on_box (box)"));

  auto lied = run_cli("check " + prog("ex8_isqrt.pwhile") + " --cert " +
                      cert("ex8_zeta1.json") + " --box 1..3000");
  CHECK(lied.code == 4);
  CHECK(has(lied.out, "D4"));
  CHECK(has(lied.out, "replay: confirmed"));

  auto dry = run_cli("check " + prog("ex8_isqrt.pwhile") + " --cert " +
                     cert("ex8_general.json"));
  CHECK(dry.code == 5);

  auto lpf = run_cli("check " + prog("ex14_parabola.pwhile") + " --cert " +
                     cert("ex14_lpf.json") + " --box -60..60");
  CHECK(lpf.code == 0);
}

TEST_CASE("check targets later loops by index") {
  auto r = run_cli("check " + prog("multi_component.pwhile") + " --cert " +
                   cert("y_cert.json") + " --loop 1");
  CHECK(r.code == 0);
  auto oob = run_cli("check " + prog("multi_component.pwhile") + " --cert " +
                     cert("y_cert.json") + " --loop 7");
  CHECK(oob.code == 1);
  auto nofile = run_cli("check " + prog("ex1_walk.pwhile") + " --cert missing_cert.json");
  CHECK(nofile.code == 1);
}

TEST_CASE("simulate prints tail estimates as CSV") {
  auto r = run_cli("simulate " + prog("ex1_walk.pwhile") +
                   " --init x=1 --ks 10,100 --trials 500");
  CHECK(r.code == 0);
  CHECK(has(r.out, "k,estimate,wilson95_lo,wilson95_hi,trials,seed"));
  CHECK(has(r.out, "\n10,"));
  CHECK(has(r.out, "\n100,"));

  auto behind = run_cli("simulate " + prog("multi_component.pwhile") +
                        " --loop 1 --ks 10 --trials 500");
  CHECK(behind.code == 1);
  CHECK(has(behind.err, "one at a time"));
}

TEST_CASE("bound evaluates both families from the command line") {
  auto diff = run_cli("bound --e-x0 2 --delta 1 --zeta 1 --ks 100,1000");
  CHECK(diff.code == 0);
  CHECK(has(diff.out, "k,bound,method,t,valid"));
  CHECK(has(diff.out, "0.820385396877277"));
  CHECK(has(diff.out, ",diff,"));

  auto gen = run_cli("bound --e-x0 2 --delta 1 --kind general --ks 542,100000");
  CHECK(gen.code == 0);
  CHECK(has(gen.out, ",general,"));
  CHECK(has(gen.out, "\n542,1,"));  // below the validity threshold: clamped

  auto toob = run_cli("bound --e-x0 2 --delta 1 --zeta 1 --ks 100 --t 2");
  CHECK(toob.code == 1);
  CHECK(has(toob.err, "too large"));

  auto nozeta = run_cli("bound --e-x0 2 --delta 1 --ks 100");
  CHECK(nozeta.code == 1);
}

TEST_CASE("parse round-trips source programs") {
  auto r = run_cli("parse " + prog("ex1_walk.pwhile"));
  CHECK(r.code == 0);
  CHECK(has(r.out, "while x - 1 >= 0 do"));
  CHECK(has(r.out, "x := x + r"));
  // Nesting errors are a normalization concern, not a parsing one.
  CHECK(run_cli("parse " + prog("nested_error.pwhile")).code == 0);
  CHECK(run_cli("parse " + prog("no_such.pwhile")).code == 1);
}

TEST_CASE("analyze writes merged CSV when asked") {
  auto r = run_cli("analyze " + prog("ex1_walk.pwhile") +
                   " --init x=1 --ks 100 --trials 500 --csv merged.csv");
  CHECK(r.code == 0);
  std::string csv = slurp("merged.csv");
  CHECK(has(csv, "loop,k,bound,method,t,valid,estimate,w95_lo,w95_hi"));
  CHECK(has(csv, "\n0,100,"));
  std::remove("merged.csv");
}

TEST_CASE("multi-loop programs get one analysis per loop") {
  auto r = run_cli("analyze " + prog("multi_component.pwhile") +
                   " --ks 50 --trials 500");
  CHECK(r.code == 0);
  CHECK(has(r.out, "\"loop_id\": 0"));
  CHECK(has(r.out, "\"loop_id\": 1"));
  // The second loop's entry state depends on the first loop's randomness, so
  // its empirical series is skipped with an explanatory note.
  CHECK(has(r.out, "entry state depends on earlier randomness"));
}
