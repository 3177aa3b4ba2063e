#include "astprove/synthesis.hpp"

#include "astprove/lincons.hpp"

#include <algorithm>

namespace astprove::synth {

namespace {

// Decision variables for both searches: slope a per program variable and the
// constant c, all free, plus nonnegative majorants driving the L1 objective
// |a_0| + ... + |a_{n-1}| + |c|.
struct SearchVars {
  lincons::LinSystem sys;
  std::vector<int> a;
  int c = -1;

  explicit SearchVars(const std::vector<std::string>& pvars) {
    for (const auto& name : pvars) a.push_back(sys.add_var("a." + name));
    c = sys.add_var("c");
    std::vector<int> maj;
    for (const auto& name : pvars) maj.push_back(sys.add_var("m." + name, true));
    const int mc = sys.add_var("m.c", true);
    const std::size_t nv = sys.vars.size();
    std::vector<Rat> obj(nv, Rat(0));
    auto majorize = [&](int var, int bound) {
      std::vector<Rat> row(nv, Rat(0));
      row[static_cast<std::size_t>(bound)] = 1;
      row[static_cast<std::size_t>(var)] = -1;
      sys.add(row, lincons::Rel::Ge, Rat(0));
      row[static_cast<std::size_t>(var)] = 1;
      sys.add(std::move(row), lincons::Rel::Ge, Rat(0));
      obj[static_cast<std::size_t>(bound)] = 1;
    };
    for (std::size_t i = 0; i < a.size(); ++i) majorize(a[i], maj[i]);
    majorize(c, mc);
    sys.set_objective(std::move(obj));
  }

  // Requires the implication  premise ==> a·pv >= cst + c_coeff*c + a_shift·a
  // to hold over the rationals, with a and c still unknown.
  void require_valid(const lincons::Polyhedron& premise, const Rat& cst,
                     const Rat& c_coeff, const std::vector<Rat>& a_shift,
                     const std::string& tag) {
    const std::size_t nv = sys.vars.size();
    std::vector<lincons::AffineForm> w(premise.arity);
    for (std::size_t j = 0; j < premise.arity; ++j) {
      w[j].lin.assign(nv, Rat(0));
      w[j].lin[static_cast<std::size_t>(a[j])] = 1;
    }
    lincons::AffineForm e;
    e.lin.assign(nv, Rat(0));
    e.lin[static_cast<std::size_t>(c)] = c_coeff;
    for (std::size_t j = 0; j < a_shift.size(); ++j)
      e.lin[static_cast<std::size_t>(a[j])] += a_shift[j];
    e.cst = cst;
    lincons::farkas_encode(sys, premise, w, e, tag);
  }

  // Adds  sum_i coeffs[i]*a_i  rel  rhs.
  void require_slope(const std::vector<Rat>& coeffs, lincons::Rel rel, Rat rhs) {
    std::vector<Rat> row(sys.vars.size(), Rat(0));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      row[static_cast<std::size_t>(a[i])] = coeffs[i];
    sys.add(std::move(row), rel, std::move(rhs));
  }

  std::pair<std::vector<Rat>, Rat> extract(const lincons::SolveResult& res) const {
    std::vector<Rat> av(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      av[i] = res.assignment[static_cast<std::size_t>(a[i])];
    return {std::move(av), res.assignment[static_cast<std::size_t>(c)]};
  }
};

// Column A·r of the update: the change of each program variable under sample
// vector r.
std::vector<Rat> update_shift(const lang::SingleWhileLoop& loop,
                              std::span<const long long> r) {
  std::vector<Rat> out(loop.pvars.size(), Rat(0));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j)
      out[i] += Rat(loop.A[i][j]) * Rat(r[j]);
  return out;
}

Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace

SmapResult synth_smap_linear(const lang::SingleWhileLoop& loop) {
  if (!loop.incremental) throw cert::NotIncremental();
  if (!loop.sampling.all_finite())
    return NotFound{"sampling support is unbounded, so the per-sample level "
                    "conditions cannot be enumerated"};
  const std::size_t n = loop.pvars.size();
  auto premises = cert::guard_polyhedra(loop.guard, n);
  if (!premises)
    return NotFound{"guard is not affine (or splits into too many cases)"};
  auto exits = cert::guard_polyhedra(loop.guard.negated(), n);
  if (!exits)
    return NotFound{"guard complement is not affine (or splits into too many cases)"};

  std::vector<const lincons::Polyhedron*> live;
  for (const auto& p : *premises)
    if (!p.empty()) live.push_back(&p);
  if (live.empty()) return NotFound{"guard region is empty; the loop never runs"};

  const auto joint = dist::joint_support(loop.sampling);
  if (joint.size() > SupportTooLarge::kMaxSupport) throw SupportTooLarge(joint.size());
  const std::size_t T = joint.size();

  // Mean update direction A·mu and per-point shifts A·r.
  std::vector<Rat> mu(loop.sampling.size());
  for (std::size_t j = 0; j < mu.size(); ++j)
    mu[j] = dist::moments(loop.sampling.dists[j]).mean;
  std::vector<Rat> Amu(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < mu.size(); ++j)
      Amu[i] += Rat(loop.A[i][j]) * mu[j];
  std::vector<std::vector<Rat>> Ar(T);
  for (std::size_t t = 0; t < T; ++t) Ar[t] = update_shift(loop, joint[t].first);

  // Constraints shared by every sign pattern: level conditions and drift.
  auto build_base = [&] {
    SearchVars v(loop.pvars);
    std::size_t d = 0;
    for (const auto* prem : live) {
      // On the guard region h >= 1, and still >= 1 after any single update.
      v.require_valid(*prem, Rat(1), Rat(-1), {}, "lvl" + std::to_string(d));
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<Rat> shift(n);
        for (std::size_t i = 0; i < n; ++i) shift[i] = -Ar[t][i];
        v.require_valid(*prem, Rat(1), Rat(-1), shift,
                        "stp" + std::to_string(d) + "." + std::to_string(t));
      }
      ++d;
    }
    v.require_slope(Amu, lincons::Rel::Le, Rat(0)); // mean change <= 0
    return v;
  };
  const SearchVars base = build_base();

  std::string stall;
  for (unsigned long long mask = 0; mask < (1ULL << T); ++mask) {
    SearchVars v = base;
    // Fix the sign of the one-step change at each support point and ask the
    // signed mean change to reach the level 1.
    std::vector<Rat> erow(n, Rat(0));
    for (std::size_t t = 0; t < T; ++t) {
      const Rat s = (mask >> t) & 1 ? Rat(-1) : Rat(1);
      std::vector<Rat> srow(n);
      for (std::size_t i = 0; i < n; ++i) {
        srow[i] = s * Ar[t][i];
        erow[i] += joint[t].second * s * Ar[t][i];
      }
      v.require_slope(srow, lincons::Rel::Ge, Rat(0));
    }
    v.require_slope(erow, lincons::Rel::Ge, Rat(1));

    auto res = lincons::solve(v.sys);
    if (res.status != lincons::Status::Feasible) continue;
    auto [av, cv] = v.extract(res);

    cert::SupermartingaleMap cand;
    cand.h = cert::CertExpr(n);
    cand.h.a = av;
    cand.h.c = cv;
    cand.delta = 1;

    // Step bound: largest in-loop change, joined with the largest value h can
    // land on when an update leaves the guard.  An unbounded exit value means
    // no finite step bound exists for this h.
    Rat zeta = 0;
    for (std::size_t t = 0; t < T; ++t)
      zeta = std::max(zeta, rat_abs(dot(av, Ar[t])));
    bool zeta_finite = true;
    for (const auto* prem : live) {
      for (const auto& exit_poly : *exits) {
        for (std::size_t t = 0; t < T && zeta_finite; ++t) {
          lincons::LinSystem lp;
          for (std::size_t i = 0; i < n; ++i) lp.add_var("x" + std::to_string(i));
          for (std::size_t r = 0; r < prem->rows.size(); ++r)
            lp.add(prem->rows[r], lincons::Rel::Ge, prem->rhs[r]);
          for (std::size_t r = 0; r < exit_poly.rows.size(); ++r)
            lp.add(exit_poly.rows[r], lincons::Rel::Ge,
                   exit_poly.rhs[r] - dot(exit_poly.rows[r], Ar[t]));
          std::vector<Rat> obj(n);
          for (std::size_t i = 0; i < n; ++i) obj[i] = -av[i];
          lp.set_objective(std::move(obj));
          auto mx = lincons::solve(lp);
          if (mx.status == lincons::Status::Unbounded)
            zeta_finite = false;
          else if (mx.status == lincons::Status::Feasible)
            zeta = std::max(zeta, -mx.objective_value + dot(av, Ar[t]) + cv);
        }
        if (!zeta_finite) break;
      }
      if (!zeta_finite) break;
    }
    if (zeta_finite) cand.zeta = zeta;

    auto rep = cert::check_smap(loop, cand, std::nullopt);
    if (rep.verdict == cert::Verdict::Certified) return cand;
    stall = "a candidate was found but failed re-checking (" + rep.reason + ")";
  }
  if (!stall.empty()) return NotFound{stall};
  return NotFound{"no slope satisfies the level, drift, and progress conditions "
                  "together"};
}

namespace {

LpfResult synth_lpf_impl(const lang::SingleWhileLoop& loop, bool with_positivity) {
  if (!loop.incremental) throw cert::NotIncremental();
  const std::size_t n = loop.pvars.size();

  std::vector<const lincons::Polyhedron*> live;
  std::optional<std::vector<lincons::Polyhedron>> premises;
  if (with_positivity) {
    premises = cert::guard_polyhedra(loop.guard, n);
    if (!premises)
      return NotFound{"guard is not affine; provide a candidate to the checker "
                      "with a box instead"};
    for (const auto& p : *premises)
      if (!p.empty()) live.push_back(&p);
    if (live.empty()) return NotFound{"guard region is empty; the loop never runs"};
  }

  std::vector<Rat> Amu(n, Rat(0));
  std::vector<Rat> variance(loop.sampling.size());
  for (std::size_t j = 0; j < loop.sampling.size(); ++j) {
    auto m = dist::moments(loop.sampling.dists[j]);
    variance[j] = m.variance;
    for (std::size_t i = 0; i < n; ++i) Amu[i] += Rat(loop.A[i][j]) * m.mean;
  }

  bool any_variance = false;
  for (std::size_t j = 0; j < loop.sampling.size(); ++j) {
    if (variance[j] <= 0) continue;
    any_variance = true;
    // Column A·e_j: how sample j moves the program variables.
    std::vector<Rat> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = Rat(loop.A[i][j]);
    for (int sign : {1, -1}) {
      SearchVars v(loop.pvars);
      std::size_t d = 0;
      if (with_positivity)
        for (const auto* prem : live)
          v.require_valid(*prem, Rat(1), Rat(-1), {}, "pos" + std::to_string(d++));
      v.require_slope(Amu, lincons::Rel::Le, Rat(0));
      std::vector<Rat> srow(n);
      for (std::size_t i = 0; i < n; ++i) srow[i] = Rat(sign) * col[i];
      v.require_slope(srow, lincons::Rel::Ge, Rat(1));
      if (!with_positivity) {
        // Pin c: positivity is the caller's problem, keep the form minimal.
        std::vector<Rat> crow(v.sys.vars.size(), Rat(0));
        crow[static_cast<std::size_t>(v.c)] = 1;
        v.sys.add(std::move(crow), lincons::Rel::Eq, Rat(0));
      }
      auto res = lincons::solve(v.sys);
      if (res.status != lincons::Status::Feasible) continue;
      auto [av, cv] = v.extract(res);
      cert::LinearProgressFunction f{std::move(av), std::move(cv)};
      if (!with_positivity) return f;
      auto rep = cert::check_lpf(loop, f, std::nullopt);
      if (rep.verdict == cert::Verdict::Certified) return f;
    }
  }
  if (!any_variance)
    return NotFound{"every sampling variable is deterministic, so no direction "
                    "carries one-step variance"};
  return NotFound{"no slope meets positivity, drift, and variance together"};
}

} // namespace

LpfResult synth_lpf(const lang::SingleWhileLoop& loop) {
  return synth_lpf_impl(loop, /*with_positivity=*/true);
}

LpfResult synth_lpf_drift_only(const lang::SingleWhileLoop& loop) {
  return synth_lpf_impl(loop, /*with_positivity=*/false);
}

} // namespace astprove::synth
