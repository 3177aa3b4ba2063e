#include "astprove/bounds.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace astprove::bounds {

namespace {

using boost::multiprecision::exp;
using boost::multiprecision::log;
using boost::multiprecision::sqrt;

// exp(c t) - 1 - c t - (c t)^2/2 - (delta^2/4) t^2: nonpositive exactly on
// the admissible t-range of the difference-bounded derivation.
BigFloat remainder_slack(const BigFloat& c, const BigFloat& quarter_d2,
                         const BigFloat& t) {
  BigFloat ct = c * t;
  return exp(ct) - 1 - ct - ct * ct / 2 - quarter_d2 * t * t;
}

BigFloat bisect_root(const std::function<BigFloat(const BigFloat&)>& f, BigFloat lo,
                     BigFloat hi) {
  // f(lo) <= 0 < f(hi); returns the sign change to ~1e-20 relative width.
  // Returning the lower endpoint keeps the result on the admissible side.
  for (int i = 0; i < 400; ++i) {
    BigFloat mid = (lo + hi) / 2;
    (f(mid) <= 0 ? lo : hi) = mid;
    if (hi - lo <= hi * BigFloat("1e-20")) break;
  }
  return lo;
}

struct GeneralConsts {
  BigFloat c;        // largest admissible exponent-remainder constant
  BigFloat C;        // leading coefficient
  BigFloat halfgap;  // (1 - exp(-delta^2/16)) / 2
  long long N = 1;   // burn-in index
};

GeneralConsts general_consts(const BoundInput& in) {
  GeneralConsts g;
  const BigFloat target = to_bigfloat(in.delta * in.delta / 16);
  const BigFloat E = to_bigfloat(in.e_x0);
  auto psi = [](const BigFloat& c) {
    return (exp(c) - 1 - c - c * c / 2) / (c * c);
  };
  if (psi(BigFloat(1)) <= target)
    g.c = 1;
  else
    g.c = bisect_root([&](const BigFloat& c) { return psi(c) - target; },
                      BigFloat("1e-30"), BigFloat(1));
  const BigFloat gap = 1 - exp(-target);
  g.halfgap = gap / 2;
  g.C = 3 * E / gap;

  // Smallest index from which both stabilization conditions hold, confirmed
  // over a window of consecutive indices.
  auto cond = [&](long long k) {
    BigFloat x = E / sqrt(BigFloat(k));
    if ((1 - exp(-x)) / x > BigFloat(3) / 2) return false;
    BigFloat pw = exp(-BigFloat(k) * log(1 + target / k));
    return 1 - pw >= g.halfgap;
  };
  long long cand = 1;
  while (!cond(cand)) {
    if (cand > (1LL << 40))
      throw std::runtime_error("burn-in index search exceeded its cap");
    cand *= 2;
  }
  long long lo = cand / 2, hi = cand; // cond(hi) true; cond(lo) false or lo==0
  while (hi - lo > 1) {
    long long mid = lo + (hi - lo) / 2;
    (cond(mid) ? hi : lo) = mid;
  }
  long long N = hi;
  for (long long run = 0; run < 64;) {
    if (cond(N + 1 + run)) {
      ++run;
    } else {
      N = N + 2 + run;
      run = 0;
    }
  }
  g.N = N;
  return g;
}

} // namespace

BigFloat diff_t_max(const Rat& c_diff, const Rat& delta) {
  apply_float_precision();
  const BigFloat c = to_bigfloat(c_diff);
  const BigFloat q = to_bigfloat(delta * delta / 4);
  auto slack = [&](const BigFloat& t) { return remainder_slack(c, q, t); };
  BigFloat lo = 0, hi = 1;
  while (slack(hi) <= 0) {
    lo = hi;
    hi *= 2;
    if (hi > BigFloat("1e30")) return lo; // effectively unconstrained
  }
  return bisect_root(slack, lo, hi);
}

BoundResult bound_diff(const BoundInput& in, long long k, std::optional<BigFloat> t) {
  apply_float_precision();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!in.c_diff)
    throw std::invalid_argument(
        "the difference-bounded tail bound needs a finite step bound");
  const BigFloat c = to_bigfloat(*in.c_diff);
  const BigFloat q = to_bigfloat(in.delta * in.delta / 4);
  BoundResult r;
  r.k = k;
  if (t) {
    if (*t <= 0) throw std::invalid_argument("t must be positive");
    if (remainder_slack(c, q, *t) > 0)
      throw TViolatesSmallness(
          "t = " + bigfloat_str(*t) +
          " is too large for step bound " + rat_to_string(*in.c_diff) +
          ": exp(c t) - 1 - c t - (c t)^2/2 exceeds (delta^2/4) t^2");
    r.t = *t;
  } else {
    BigFloat by_k = 1 / sqrt(BigFloat(k));
    BigFloat cap = diff_t_max(*in.c_diff, in.delta);
    r.t = by_k < cap ? by_k : cap;
  }
  const BigFloat E = to_bigfloat(in.e_x0);
  BigFloat num = 1 - exp(-r.t * E);
  BigFloat den = 1 - exp(-BigFloat(k) * log(1 + q * r.t * r.t));
  BigFloat b = num / den;
  if (b > 1) b = 1;
  r.bound = round_up_15(b);
  return r;
}

BoundResult bound_general(const BoundInput& in, long long k) {
  apply_float_precision();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const GeneralConsts g = general_consts(in);
  const BigFloat E = to_bigfloat(in.e_x0);
  BoundResult r;
  r.k = k;
  r.c = g.c;
  r.C = g.C;
  r.N = g.N;
  r.M = exp(log(g.c * g.c * BigFloat(k)) / 6);
  BigFloat floor_level = exp(log(BigFloat(g.N)) / 6);
  if (floor_level < E) floor_level = E;
  r.valid = r.M > floor_level;
  if (!r.valid) {
    r.bound = 1;
    return r;
  }
  BigFloat b = g.C / sqrt(BigFloat(k)) + E / r.M;
  if (b > 1) b = 1;
  r.bound = round_up_15(b);
  return r;
}

std::vector<BoundResult> bound_series(const BoundInput& in,
                                      const std::vector<long long>& ks) {
  std::vector<BoundResult> out;
  out.reserve(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i && ks[i] <= ks[i - 1])
      throw std::invalid_argument("k values must be strictly increasing");
    out.push_back(in.kind == Kind::DiffBounded ? bound_diff(in, ks[i])
                                               : bound_general(in, ks[i]));
    if (i && out[i].bound > out[i - 1].bound)
      throw std::logic_error("tail bounds must be nonincreasing in k");
  }
  return out;
}

std::string bounds_csv(const std::vector<BoundResult>& series, Kind kind) {
  std::ostringstream out;
  out << "k,bound,method,t,valid\n";
  const char* method = kind == Kind::DiffBounded ? "diff" : "general";
  for (const auto& r : series) {
    out << r.k << "," << bigfloat_str(r.bound) << "," << method << ",";
    if (kind == Kind::DiffBounded) out << bigfloat_str(r.t, 17);
    out << "," << (r.valid ? 1 : 0) << "\n";
  }
  return out.str();
}

} // namespace astprove::bounds
