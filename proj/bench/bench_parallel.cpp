// Times the OpenMP kernels against their serial reference implementations and
// verifies that both produce identical results: Monte Carlo tail estimation
// (counter-derived RNG streams, so scheduling cannot change the outcome) and
// the box-mode certificate scan (minimum-violation-index reduction).

#include "astprove/certificates.hpp"
#include "astprove/normalize.hpp"
#include "astprove/parser.hpp"
#include "astprove/simulator.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace astprove;

namespace {

double now() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
#endif
}

int threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

bool same_report(const cert::CheckReport& a, const cert::CheckReport& b) {
  if (a.verdict != b.verdict || a.conditions.size() != b.conditions.size())
    return false;
  for (std::size_t i = 0; i < a.conditions.size(); ++i)
    if (a.conditions[i].name != b.conditions[i].name ||
        a.conditions[i].holds != b.conditions[i].holds)
      return false;
  if (a.witness.has_value() != b.witness.has_value()) return false;
  if (a.witness && (a.witness->pv != b.witness->pv || a.witness->rv != b.witness->rv))
    return false;
  return true;
}

} // namespace

int main() {
  apply_float_precision();
  const int max_threads = threads();
  int failures = 0;

  {
    const char* src = R"(pvar x;
rvar r ~ table{-1: 1/2, 1: 1/2};

while x >= 1 do
  x := x + r
od
)";
    auto prog = lang::parse_program(src, "walk");
    auto np = lang::normalize(prog);
    const auto& loop = *np.loops().front();
    const std::vector<long long> ks{100, 400, 1600};
    const unsigned long long trials = 200000;

    double t0 = now();
    auto serial = sim::estimate_tail_serial(loop, {1}, ks, trials, 7);
    double t1 = now();
    auto parallel = sim::estimate_tail(loop, {1}, ks, trials, 7);
    double t2 = now();

    bool match = true;
    for (std::size_t i = 0; i < ks.size(); ++i)
      match = match && serial[i].count == parallel[i].count;
    if (!match) ++failures;
    std::printf("monte-carlo   %9llu trials  serial %7.3fs  parallel(%d) %7.3fs  "
                "speedup %5.2fx  %s\n",
                trials, t1 - t0, max_threads, t2 - t1,
                (t2 - t1) > 0 ? (t1 - t0) / (t2 - t1) : 0.0,
                match ? "identical" : "MISMATCH");
  }

  {
    const char* src = R"(pvar x;
pvar y;
rvar r1 ~ table{0: 1/2, 2: 1/2};
rvar r2 ~ table{0: 1/2, 2: 1/2};

while y >= x * x do
  x := x + r1 ;
  y := y + r2
od
)";
    auto prog = lang::parse_program(src, "ramp");
    auto np = lang::normalize(prog);
    const auto& loop = *np.loops().front();

    cert::SupermartingaleMap cand;
    cand.h = cert::parse_cert_expr("y - x + 3", prog.pvars);
    cand.delta = 1;
    cert::Box box;
    box.range.assign(2, {-1500, 1500}); // ~9M points

    set_threads(1);
    double t0 = now();
    auto serial = cert::check_smap(loop, cand, box);
    double t1 = now();
    set_threads(max_threads);
    auto parallel = cert::check_smap(loop, cand, box);
    double t2 = now();

    bool match = same_report(serial, parallel);
    if (!match) ++failures;
    std::printf("box-scan      %9s points  serial %7.3fs  parallel(%d) %7.3fs  "
                "speedup %5.2fx  %s\n",
                "9006001", t1 - t0, max_threads, t2 - t1,
                (t2 - t1) > 0 ? (t1 - t0) / (t2 - t1) : 0.0,
                match ? "identical" : "MISMATCH");
  }

  return failures == 0 ? 0 : 1;
}
