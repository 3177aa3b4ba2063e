#include "astprove/certificates.hpp"

#include "astprove/lincons.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace astprove::cert {

// ---------------------------------------------------------------------------
// CertExpr

Rat CertExpr::eval(std::span<const long long> pv) const {
  Rat v = c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) v += a[i] * Rat(pv[i]);
    if (s[i] != 0) v += s[i] * Rat(isqrt_floor(pv[i]));
  }
  return v;
}

bool CertExpr::affine() const {
  return std::all_of(s.begin(), s.end(), [](const Rat& q) { return q == 0; });
}

std::string CertExpr::to_string(const std::vector<std::string>& pvars) const {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const Rat& coeff, const std::string& var) {
    if (coeff == 0) return;
    Rat mag = rat_abs(coeff);
    if (first) {
      if (coeff < 0) out << "-";
      first = false;
    } else {
      out << (coeff < 0 ? " - " : " + ");
    }
    if (var.empty())
      out << rat_to_string(mag);
    else if (mag == 1)
      out << var;
    else
      out << rat_to_string(mag) << "*" << var;
  };
  for (std::size_t i = 0; i < a.size(); ++i) emit(a[i], pvars[i]);
  for (std::size_t i = 0; i < s.size(); ++i) emit(s[i], "isqrt(" + pvars[i] + ")");
  emit(c, "");
  if (first) out << "0";
  return out.str();
}

CertExpr parse_cert_expr(const std::string& text,
                         const std::vector<std::string>& pvars) {
  CertExpr e(pvars.size());
  std::size_t i = 0;
  auto skip = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("bad candidate expression '" + text + "': " + why);
  };
  auto read_int = [&]() -> Int {
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) fail("expected number");
    return Int(text.substr(start, i - start));
  };
  auto read_name = [&]() -> std::string {
    std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
      ++i;
    return text.substr(start, i - start);
  };
  skip();
  if (i == text.size()) fail("empty");
  bool first_term = true;
  while (true) {
    skip();
    if (i == text.size()) break;
    Rat sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      if (text[i] == '-') sign = -1;
      ++i;
      skip();
    } else if (!first_term) {
      fail("expected '+' or '-'");
    }
    first_term = false;
    Rat coeff = sign;
    bool saw_number = false;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      Int num = read_int();
      Int den = 1;
      if (i < text.size() && text[i] == '/') {
        ++i;
        den = read_int();
        if (den == 0) fail("zero denominator");
      }
      coeff *= Rat(num, den);
      saw_number = true;
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip();
      } else {
        e.c += coeff;
        continue;
      }
    }
    std::string name = read_name();
    if (name.empty()) {
      if (saw_number) fail("dangling '*'");
      fail("expected term");
    }
    bool is_isqrt = false;
    if (name == "isqrt") {
      is_isqrt = true;
      skip();
      if (i >= text.size() || text[i] != '(') fail("isqrt needs parentheses");
      ++i;
      skip();
      name = read_name();
      skip();
      if (i >= text.size() || text[i] != ')') fail("unclosed isqrt");
      ++i;
    }
    auto it = std::find(pvars.begin(), pvars.end(), name);
    if (it == pvars.end()) fail("unknown variable '" + name + "'");
    std::size_t idx = static_cast<std::size_t>(it - pvars.begin());
    (is_isqrt ? e.s[idx] : e.a[idx]) += coeff;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Guard regions as unions of polyhedra

std::optional<std::vector<lincons::Polyhedron>> guard_polyhedra(const lang::Guard& g,
                                                                std::size_t arity) {
  auto dnf = lang::guard_dnf(g);
  if (!dnf) return std::nullopt;
  std::vector<lincons::Polyhedron> out;
  for (const auto& conj : *dnf) {
    lincons::Polyhedron poly(arity);
    for (const lang::Poly& p : conj) {
      if (p.degree() > 1) return std::nullopt;
      std::vector<Rat> row(arity, Rat(0));
      Rat cst = 0;
      for (const auto& [key, coeff] : p.coef) {
        if (key.first < 0)
          cst = coeff;
        else
          row[static_cast<std::size_t>(key.first)] = coeff;
      }
      poly.add_ge(std::move(row), -cst);
    }
    out.push_back(std::move(poly));
  }
  return out;
}

namespace {

enum class Validity { Valid, Invalid, Vacuous };

// Is  w·x >= e  true at every rational point of the premise?
Validity affine_valid(const lincons::Polyhedron& premise, const std::vector<Rat>& w,
                      const Rat& e) {
  lincons::LinSystem sys;
  std::vector<lincons::AffineForm> wf(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) wf[j] = lincons::AffineForm(w[j]);
  try {
    lincons::farkas_encode(sys, premise, wf, lincons::AffineForm(e), "v");
  } catch (const lincons::EmptyPremise&) {
    return Validity::Vacuous;
  }
  return lincons::solve(sys).status == lincons::Status::Feasible ? Validity::Valid
                                                                 : Validity::Invalid;
}

// Same over a union of polyhedra: valid iff valid on every member.  Returns
// the index of the first member where the implication fails, if any.
std::pair<Validity, std::size_t> affine_valid_all(
    const std::vector<lincons::Polyhedron>& premises, const std::vector<Rat>& w,
    const Rat& e) {
  bool all_vacuous = true;
  for (std::size_t d = 0; d < premises.size(); ++d) {
    switch (affine_valid(premises[d], w, e)) {
      case Validity::Valid: all_vacuous = false; break;
      case Validity::Vacuous: break;
      case Validity::Invalid: return {Validity::Invalid, d};
    }
  }
  return {all_vacuous ? Validity::Vacuous : Validity::Valid, 0};
}

// Searches for a concrete integer point satisfying pred, guided by minimizing
// `direction` over the premise intersected with a large symmetric box.
std::optional<std::vector<long long>> find_integer_point(
    const lincons::Polyhedron& premise, const std::vector<Rat>& direction,
    const std::function<bool(std::span<const long long>)>& pred) {
  const std::size_t n = premise.arity;
  for (long long exp = 20; exp <= 60; exp += 20) {
    const Rat B = Rat(Int(1) << exp);
    lincons::LinSystem sys;
    for (std::size_t j = 0; j < n; ++j) sys.add_var("x" + std::to_string(j));
    for (std::size_t i = 0; i < premise.rows.size(); ++i)
      sys.add(premise.rows[i], lincons::Rel::Ge, premise.rhs[i]);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Rat> row(n, Rat(0));
      row[j] = 1;
      sys.add(row, lincons::Rel::Le, B);
      row[j] = 1;
      sys.add(std::move(row), lincons::Rel::Ge, -B);
    }
    if (!direction.empty()) sys.set_objective(direction);
    auto res = lincons::solve(sys);
    if (res.status != lincons::Status::Feasible) continue;
    // Round the rational vertex and probe nearby lattice points.
    std::vector<long long> center(n);
    for (std::size_t j = 0; j < n; ++j) {
      Rat q = res.assignment[j];
      Int fl = numerator(q) / denominator(q); // truncates toward zero
      if (q < 0 && fl * denominator(q) != numerator(q)) fl -= 1;
      center[j] = fl.convert_to<long long>();
    }
    const long long radius = 2;
    std::vector<long long> probe(n);
    std::vector<long long> off(n, -radius);
    if (n <= 4) {
      for (;;) {
        for (std::size_t j = 0; j < n; ++j) probe[j] = center[j] + off[j];
        if (pred(probe)) return probe;
        std::size_t j = 0;
        while (j < n && ++off[j] > radius) off[j++] = -radius;
        if (j == n) break;
      }
    } else {
      if (pred(center)) return center;
      for (std::size_t j = 0; j < n; ++j)
        for (long long d = -radius; d <= radius; ++d) {
          probe = center;
          probe[j] += d;
          if (pred(probe)) return probe;
        }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<long long>> find_integer_point_any(
    const std::vector<lincons::Polyhedron>& premises, std::size_t try_first,
    const std::vector<Rat>& direction,
    const std::function<bool(std::span<const long long>)>& pred) {
  if (try_first < premises.size())
    if (auto pt = find_integer_point(premises[try_first], direction, pred)) return pt;
  for (std::size_t d = 0; d < premises.size(); ++d) {
    if (d == try_first) continue;
    if (auto pt = find_integer_point(premises[d], direction, pred)) return pt;
  }
  return std::nullopt;
}

// Outcome of one condition check, carried until report assembly.
struct Cond {
  std::string name;
  bool holds = true;
  bool inconclusive = false;
  std::optional<Witness> wit;
  std::string note;
};

CheckReport assemble(CheckMode mode, std::vector<Cond> conds,
                     bool box_certified, std::string extra_reason = "") {
  CheckReport rep;
  rep.mode = mode;
  bool any_refuted = false, any_inconclusive = false;
  for (auto& c : conds) {
    rep.conditions.push_back({c.name, c.holds, c.note});
    if (!c.holds && c.wit && !any_refuted) {
      rep.witness = c.wit;
      any_refuted = true;
    }
    if ((c.inconclusive || (!c.holds && !c.wit)) && rep.reason.empty())
      rep.reason = c.name + ": " + (c.note.empty() ? "undecided" : c.note);
    any_inconclusive |= c.inconclusive || (!c.holds && !c.wit);
  }
  if (any_refuted)
    rep.verdict = Verdict::Refuted;
  else if (any_inconclusive)
    rep.verdict = Verdict::Inconclusive;
  else
    rep.verdict = box_certified ? Verdict::CertifiedOnBox : Verdict::Certified;
  if (!extra_reason.empty())
    rep.reason = rep.reason.empty() ? extra_reason : extra_reason + "; " + rep.reason;
  return rep;
}

std::string fmt_point(const std::vector<long long>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Symbolic supermartingale-map check (affine h, affine guard, increment body).
// The guard region and its complement are handled as unions of conjunctive
// polyhedra, so disjunctive guards work disjunct by disjunct.

struct SymbolicCtx {
  const lang::SingleWhileLoop& loop;
  const SupermartingaleMap& cand;
  std::vector<lincons::Polyhedron> premises; // guard region, one per disjunct
  std::vector<lincons::Polyhedron> exits;    // complement region
  std::vector<Rat> kappa;                    // per sampling variable: a^T A column
  std::vector<std::size_t> infinite_vars;    // sampling vars with unbounded support
};

std::vector<long long> apply_A(const lang::SingleWhileLoop& loop,
                               std::span<const long long> pv,
                               std::span<const long long> rv) {
  std::vector<long long> out(pv.begin(), pv.end());
  loop.run_body(out, rv);
  return out;
}

// A guard-true integer point used to anchor witnesses for conditions that
// fail at every state.
std::optional<std::vector<long long>> any_guard_point(const SymbolicCtx& ctx) {
  return find_integer_point_any(ctx.premises, 0, {},
                                [&](std::span<const long long> pv) {
                                  return ctx.loop.guard.eval(pv);
                                });
}

// Default sample-vector choice: first support point per finite variable, +1
// for unbounded ones.  Used as the base when constructing far-out witnesses.
std::vector<long long> base_rv(const lang::SingleWhileLoop& loop) {
  std::vector<long long> rv(loop.sampling.size(), 0);
  for (std::size_t j = 0; j < loop.sampling.size(); ++j) {
    const auto& d = loop.sampling.dists[j];
    switch (d.kind) {
      case dist::DiscreteDist::Kind::FiniteSupport: rv[j] = d.table.front().first; break;
      case dist::DiscreteDist::Kind::PointMass: rv[j] = d.value; break;
      case dist::DiscreteDist::Kind::TwoSidedGeometric: rv[j] = 1; break;
    }
  }
  return rv;
}

Cond check_d2i(const SymbolicCtx& ctx) {
  Cond c{"D2i", true, false, std::nullopt, ""};
  const auto& h = ctx.cand.h;
  auto [v, bad] = affine_valid_all(ctx.premises, h.a, ctx.cand.delta - h.c);
  if (v != Validity::Invalid) return c;
  c.holds = false;
  c.note = "h can drop below delta inside the loop";
  auto pt = find_integer_point_any(ctx.premises, bad, h.a,
                                   [&](std::span<const long long> pv) {
                                     return ctx.loop.guard.eval(pv) &&
                                            h.eval(pv) < ctx.cand.delta;
                                   });
  if (pt)
    c.wit = Witness{"D2i", *pt, {},
                    "h" + fmt_point(*pt) + " = " + rat_to_string(h.eval(*pt)) +
                        " < delta = " + rat_to_string(ctx.cand.delta)};
  else
    c.note += " (over rationals; no integer witness located)";
  return c;
}

Cond check_d2ii(const SymbolicCtx& ctx,
                const std::vector<std::pair<std::vector<long long>, Rat>>& finite_joint) {
  Cond c{"D2ii", true, false, std::nullopt, ""};
  const auto& h = ctx.cand.h;
  // Any unbounded sampling variable with nonzero weight lets h after one step
  // fall arbitrarily low.
  for (std::size_t j : ctx.infinite_vars) {
    if (ctx.kappa[j] == 0) continue;
    c.holds = false;
    c.note = "unbounded sampling variable '" + ctx.loop.sampling.names[j] +
             "' drives h after the update below any level";
    auto pv = any_guard_point(ctx);
    if (!pv) { c.note += " (no anchor state located)"; return c; }
    std::vector<long long> rv = base_rv(ctx.loop);
    Rat rest = h.eval(*pv);
    for (std::size_t i = 0; i < rv.size(); ++i)
      if (i != j) rest += ctx.kappa[i] * Rat(rv[i]);
    // Need rest + kappa_j * rv_j < delta.
    Rat need = (rest - ctx.cand.delta) / rat_abs(ctx.kappa[j]);
    Int steps = numerator(need) / denominator(need);
    long long K = steps.convert_to<long long>() + 2;
    if (K < 1) K = 1;
    rv[j] = ctx.kappa[j] > 0 ? -K : K;
    auto F = apply_A(ctx.loop, *pv, rv);
    c.wit = Witness{"D2ii", *pv, rv,
                    "h" + fmt_point(F) + " = " + rat_to_string(h.eval(F)) +
                        " < delta = " + rat_to_string(ctx.cand.delta)};
    return c;
  }
  for (const auto& [rv, p] : finite_joint) {
    Rat shift = 0;
    for (std::size_t j = 0; j < rv.size(); ++j) shift += ctx.kappa[j] * Rat(rv[j]);
    auto [v, bad] =
        affine_valid_all(ctx.premises, h.a, ctx.cand.delta - h.c - shift);
    if (v != Validity::Invalid) continue;
    c.holds = false;
    c.note = "h after the update can drop below delta";
    auto rv_copy = rv;
    auto pt = find_integer_point_any(
        ctx.premises, bad, h.a, [&](std::span<const long long> pv) {
          if (!ctx.loop.guard.eval(pv)) return false;
          return h.eval(apply_A(ctx.loop, pv, rv_copy)) < ctx.cand.delta;
        });
    if (pt) {
      auto F = apply_A(ctx.loop, *pt, rv);
      c.wit = Witness{"D2ii", *pt, rv,
                      "h" + fmt_point(F) + " = " + rat_to_string(h.eval(F)) +
                          " < delta = " + rat_to_string(ctx.cand.delta)};
    } else {
      c.note += " (over rationals; no integer witness located)";
    }
    return c;
  }
  return c;
}

Cond check_d31(const SymbolicCtx& ctx) {
  Cond c{"D3.1", true, false, std::nullopt, ""};
  Rat drift = 0;
  for (std::size_t j = 0; j < ctx.kappa.size(); ++j)
    drift += ctx.kappa[j] * dist::moments(ctx.loop.sampling.dists[j]).mean;
  if (drift <= 0) {
    c.note = "expected one-step change " + rat_to_string(drift);
    return c;
  }
  c.holds = false;
  c.note = "expected one-step change is positive";
  c.wit = Witness{"D3.1", {}, {}, "E[h(next) - h] = " + rat_to_string(drift) + " > 0"};
  return c;
}

Cond check_d32(const SymbolicCtx& ctx) {
  Cond c{"D3.2", true, false, std::nullopt, ""};
  const Rat& delta = ctx.cand.delta;
  auto f = [&](std::span<const long long> rv) {
    Rat g = 0;
    for (std::size_t j = 0; j < rv.size(); ++j) g += ctx.kappa[j] * Rat(rv[j]);
    return rat_abs(g);
  };
  Rat growth = 0;
  for (const Rat& k : ctx.kappa) growth = std::max(growth, rat_abs(k));
  auto [lo, hi] = dist::expect(ctx.loop.sampling, f, growth,
                               delta / Rat(1'000'000'000));
  if (lo >= delta) {
    c.note = "E|h-change| >= " + rat_to_string(lo);
    return c;
  }
  if (hi < delta) {
    c.holds = false;
    c.note = "mean absolute one-step change stays below delta";
    c.wit = Witness{"D3.2", {}, {},
                    "E|h(next) - h| <= " + rat_to_string(hi) + " < delta = " +
                        rat_to_string(delta)};
    return c;
  }
  c.holds = false;
  c.inconclusive = true;
  c.note = "certified interval [" + rat_to_string(lo) + ", " + rat_to_string(hi) +
           "] straddles delta";
  return c;
}

Cond check_d4(const SymbolicCtx& ctx,
              const std::vector<std::pair<std::vector<long long>, Rat>>& finite_joint) {
  Cond c{"D4", true, false, std::nullopt, ""};
  if (!ctx.cand.zeta) {
    c.note = "no step bound claimed";
    return c;
  }
  const Rat& zeta = *ctx.cand.zeta;
  const auto& h = ctx.cand.h;
  for (std::size_t j : ctx.infinite_vars) {
    if (ctx.kappa[j] == 0) continue;
    c.holds = false;
    c.note = "unbounded sampling variable '" + ctx.loop.sampling.names[j] +
             "' makes the one-step change unbounded";
    auto pv = any_guard_point(ctx);
    if (!pv) { c.note += " (no anchor state located)"; return c; }
    std::vector<long long> rv = base_rv(ctx.loop);
    Rat rest = 0;
    for (std::size_t i = 0; i < rv.size(); ++i)
      if (i != j) rest += rat_abs(ctx.kappa[i] * Rat(rv[i]));
    Rat need = (zeta + rest) / rat_abs(ctx.kappa[j]);
    Int steps = numerator(need) / denominator(need);
    long long K = steps.convert_to<long long>() + 2;
    if (K < 1) K = 1;
    rv[j] = ctx.kappa[j] > 0 ? K : -K;
    Rat g = 0;
    for (std::size_t i = 0; i < rv.size(); ++i) g += ctx.kappa[i] * Rat(rv[i]);
    c.wit = Witness{"D4", *pv, rv,
                    "|h(next) - h| = " + rat_to_string(rat_abs(g)) + " > zeta = " +
                        rat_to_string(zeta)};
    return c;
  }
  // Loop part: |a^T A rv| <= zeta at every support point (state-free).
  for (const auto& [rv, p] : finite_joint) {
    Rat g = 0;
    for (std::size_t j = 0; j < rv.size(); ++j) g += ctx.kappa[j] * Rat(rv[j]);
    if (rat_abs(g) <= zeta) continue;
    c.holds = false;
    c.note = "one-step change exceeds zeta";
    auto pv = any_guard_point(ctx);
    if (pv)
      c.wit = Witness{"D4", *pv, rv,
                      "|h(next) - h| = " + rat_to_string(rat_abs(g)) + " > zeta = " +
                          rat_to_string(zeta)};
    else
      c.note += " (no anchor state located)";
    return c;
  }
  // Exit part: wherever one update leaves the guard, the landing value of h
  // must not exceed zeta.  One premise per (guard disjunct, complement
  // disjunct, support point), with the complement rows shifted by A rv.
  const std::size_t n = ctx.loop.pvars.size();
  for (const auto& [rv, p] : finite_joint) {
    Rat shift = 0;
    for (std::size_t j = 0; j < rv.size(); ++j) shift += ctx.kappa[j] * Rat(rv[j]);
    std::vector<long long> Arv;
    {
      std::vector<long long> zero(n, 0);
      Arv = apply_A(ctx.loop, zero, rv); // A·rv, read off from the origin
    }
    for (const auto& loop_poly : ctx.premises) {
      for (const auto& exit_poly : ctx.exits) {
        lincons::Polyhedron prem = loop_poly;
        for (std::size_t r = 0; r < exit_poly.rows.size(); ++r) {
          Rat row_shift = 0;
          for (std::size_t i = 0; i < n; ++i)
            row_shift += exit_poly.rows[r][i] * Rat(Arv[i]);
          prem.add_ge(exit_poly.rows[r], exit_poly.rhs[r] - row_shift);
        }
        // Conclusion: -a^T pv >= a^T(A rv) + c - zeta, i.e. h(pv') <= zeta.
        std::vector<Rat> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = -h.a[i];
        if (affine_valid(prem, w, shift + h.c - zeta) != Validity::Invalid) continue;
        c.holds = false;
        c.note = "h can exit the loop above zeta";
        auto rv_copy = rv;
        auto pt = find_integer_point(prem, w, [&](std::span<const long long> pv) {
          if (!ctx.loop.guard.eval(pv)) return false;
          auto F = apply_A(ctx.loop, pv, rv_copy);
          return !ctx.loop.guard.eval(F) && h.eval(F) > zeta;
        });
        if (pt) {
          auto F = apply_A(ctx.loop, *pt, rv);
          c.wit = Witness{"D4", *pt, rv,
                          "exit lands at h" + fmt_point(F) + " = " +
                              rat_to_string(h.eval(F)) + " > zeta = " +
                              rat_to_string(zeta)};
        } else {
          c.note += " (over rationals; no integer witness located)";
        }
        return c;
      }
    }
  }
  return c;
}

CheckReport check_smap_symbolic(const lang::SingleWhileLoop& loop,
                                const SupermartingaleMap& cand,
                                std::vector<lincons::Polyhedron> premises,
                                std::vector<lincons::Polyhedron> exits) {
  SymbolicCtx ctx{loop, cand, std::move(premises), std::move(exits), {}, {}};
  const std::size_t nr = loop.sampling.size();
  ctx.kappa.assign(nr, Rat(0));
  for (std::size_t j = 0; j < nr; ++j)
    for (std::size_t i = 0; i < loop.pvars.size(); ++i)
      ctx.kappa[j] += cand.h.a[i] * Rat(loop.A[i][j]);
  for (std::size_t j = 0; j < nr; ++j)
    if (!loop.sampling.dists[j].is_finite()) ctx.infinite_vars.push_back(j);

  // Joint support over the finite portion only; conditions involving the
  // unbounded variables are resolved analytically above.  When every variable
  // is finite this is the full joint support.
  std::vector<std::pair<std::vector<long long>, Rat>> finite_joint;
  if (ctx.infinite_vars.empty()) {
    finite_joint = dist::joint_support(loop.sampling);
  } else {
    // Enumerate finite coordinates, pin unbounded ones at +1 (their weight is
    // zero in every condition that reaches this table, or the condition was
    // already decided).
    dist::SamplingFunction finite_part;
    std::vector<std::size_t> finite_idx;
    for (std::size_t j = 0; j < nr; ++j)
      if (loop.sampling.dists[j].is_finite()) {
        finite_part.names.push_back(loop.sampling.names[j]);
        finite_part.dists.push_back(loop.sampling.dists[j]);
        finite_idx.push_back(j);
      }
    for (const auto& [sub, p] : dist::joint_support(finite_part)) {
      std::vector<long long> full(nr, 1);
      for (std::size_t t = 0; t < finite_idx.size(); ++t) full[finite_idx[t]] = sub[t];
      finite_joint.emplace_back(std::move(full), p);
    }
  }

  std::vector<Cond> conds;
  conds.push_back({"D1", true, false, std::nullopt, "value outside the loop fixed at 0"});
  conds.push_back(check_d2i(ctx));
  conds.push_back(check_d2ii(ctx, finite_joint));
  conds.push_back(check_d31(ctx));
  conds.push_back(check_d32(ctx));
  conds.push_back(check_d4(ctx, finite_joint));
  return assemble(CheckMode::Symbolic, std::move(conds), /*box_certified=*/false);
}

// ---------------------------------------------------------------------------
// Box-mode checks

struct BoxIter {
  const Box& box;
  unsigned long long total = 1;
  explicit BoxIter(const Box& b) : box(b) {
    for (auto [lo, hi] : b.range)
      total *= static_cast<unsigned long long>(hi - lo + 1);
  }
  std::vector<long long> decode(unsigned long long idx) const {
    std::vector<long long> pv(box.range.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
      auto [lo, hi] = box.range[i];
      auto w = static_cast<unsigned long long>(hi - lo + 1);
      pv[i] = lo + static_cast<long long>(idx % w);
      idx /= w;
    }
    return pv;
  }
};

constexpr unsigned long long kBoxCap = 20'000'000ULL;

CheckReport check_smap_box(const lang::SingleWhileLoop& loop,
                           const SupermartingaleMap& cand, const Box& box,
                           const std::string& notice) {
  if (box.range.size() != loop.pvars.size())
    return {Verdict::Inconclusive, CheckMode::Box, {}, std::nullopt,
            "box arity does not match the program variables"};
  if (!loop.sampling.all_finite())
    return {Verdict::Inconclusive, CheckMode::Box, {}, std::nullopt,
            "box mode needs finite-support sampling distributions"};
  BoxIter it(box);
  if (it.total > kBoxCap)
    return {Verdict::Inconclusive, CheckMode::Box, {}, std::nullopt,
            "box has " + std::to_string(it.total) + " points; cap is " +
                std::to_string(kBoxCap)};
  const auto joint = dist::joint_support(loop.sampling);
  const auto& h = cand.h;
  const Rat& delta = cand.delta;

  // Per condition: smallest flat index of a violating state (max when none),
  // plus the violating sample index for pointwise conditions.
  constexpr std::size_t NC = 6; // D2i, D2ii, D3.1, D3.2, D4.loop, D4.exit
  constexpr unsigned long long NONE = ~0ULL;
  std::vector<unsigned long long> first(NC, NONE);
  std::vector<std::size_t> first_rv(NC, 0);

#pragma omp parallel
  {
    std::vector<unsigned long long> lfirst(NC, NONE);
    std::vector<std::size_t> lfirst_rv(NC, 0);
#pragma omp for schedule(static) nowait
    for (long long idx = 0; idx < static_cast<long long>(it.total); ++idx) {
      std::vector<long long> pv = it.decode(static_cast<unsigned long long>(idx));
      if (!loop.guard.eval(pv)) continue;
      auto flag = [&](std::size_t cond, std::size_t rvi) {
        if (static_cast<unsigned long long>(idx) < lfirst[cond]) {
          lfirst[cond] = static_cast<unsigned long long>(idx);
          lfirst_rv[cond] = rvi;
        }
      };
      Rat hpv = h.eval(pv);
      if (hpv < delta) flag(0, 0);
      Rat exp_h = 0, exp_abs = 0;
      for (std::size_t j = 0; j < joint.size(); ++j) {
        std::vector<long long> F = pv;
        loop.run_body(F, joint[j].first);
        Rat hF = h.eval(F);
        Rat g = hF - hpv;
        if (hF < delta) flag(1, j);
        exp_h += joint[j].second * hF;
        exp_abs += joint[j].second * rat_abs(g);
        if (cand.zeta) {
          if (rat_abs(g) > *cand.zeta) flag(4, j);
          if (!loop.guard.eval(F) && hF > *cand.zeta) flag(5, j);
        }
      }
      if (exp_h > hpv) flag(2, 0);
      if (exp_abs < delta) flag(3, 0);
    }
#pragma omp critical
    for (std::size_t cnd = 0; cnd < NC; ++cnd)
      if (lfirst[cnd] < first[cnd]) {
        first[cnd] = lfirst[cnd];
        first_rv[cnd] = lfirst_rv[cnd];
      }
  }

  auto witness_at = [&](std::size_t cond, const char* name, bool with_rv) {
    std::vector<long long> pv = it.decode(first[cond]);
    Witness w;
    w.condition = name;
    w.pv = pv;
    Rat hpv = h.eval(pv);
    if (with_rv) {
      w.rv = joint[first_rv[cond]].first;
      std::vector<long long> F = pv;
      loop.run_body(F, w.rv);
      w.detail = "h" + fmt_point(pv) + " = " + rat_to_string(hpv) + ", h" +
                 fmt_point(F) + " = " + rat_to_string(h.eval(F));
    } else {
      w.detail = "at pv = " + fmt_point(pv) + ", h = " + rat_to_string(hpv);
    }
    return w;
  };

  std::vector<Cond> conds;
  conds.push_back({"D1", true, false, std::nullopt, "value outside the loop fixed at 0"});
  const char* names[NC] = {"D2i", "D2ii", "D3.1", "D3.2", "D4", "D4"};
  const char* labels[NC] = {"h stays >= delta", "h after update stays >= delta",
                            "expected h does not increase",
                            "mean absolute change >= delta",
                            "absolute change <= zeta", "exit value <= zeta"};
  bool with_rv[NC] = {false, true, false, false, true, true};
  for (std::size_t cnd = 0; cnd < NC; ++cnd) {
    if ((cnd == 4 || cnd == 5) && !cand.zeta) continue;
    Cond c{names[cnd], true, false, std::nullopt, ""};
    if (first[cnd] == NONE) {
      c.note = std::string(labels[cnd]) + " on the whole box";
    } else {
      c.holds = false;
      c.note = std::string(labels[cnd]) + " violated";
      c.wit = witness_at(cnd, names[cnd], with_rv[cnd]);
    }
    // Merge the two D4 rows into one reported condition.
    if (cnd == 5 && !conds.empty() && conds.back().name == "D4") {
      if (!c.holds && conds.back().holds) conds.back() = std::move(c);
      continue;
    }
    conds.push_back(std::move(c));
  }
  if (!cand.zeta)
    conds.push_back({"D4", true, false, std::nullopt, "no step bound claimed"});
  return assemble(CheckMode::Box, std::move(conds), /*box_certified=*/true, notice);
}

} // namespace

CheckReport check_smap(const lang::SingleWhileLoop& loop,
                       const SupermartingaleMap& cand,
                       const std::optional<Box>& box) {
  if (cand.delta <= 0)
    return {Verdict::Inconclusive, CheckMode::Symbolic, {}, std::nullopt,
            "delta must be positive"};
  if (cand.zeta && *cand.zeta <= 0)
    return {Verdict::Inconclusive, CheckMode::Symbolic, {}, std::nullopt,
            "zeta must be positive"};
  std::string why_not_symbolic;
  if (!cand.h.affine()) {
    why_not_symbolic = "candidate uses isqrt";
  } else if (!loop.incremental) {
    why_not_symbolic = "loop body is not a pure increment update";
  } else {
    auto premises = guard_polyhedra(loop.guard, loop.pvars.size());
    auto exits = premises ? guard_polyhedra(loop.guard.negated(), loop.pvars.size())
                          : std::nullopt;
    if (premises && exits)
      return check_smap_symbolic(loop, cand, std::move(*premises), std::move(*exits));
    why_not_symbolic = "guard is not affine (or its split is too large)";
  }
  if (box)
    return check_smap_box(loop, cand, *box,
                          "symbolic scope exceeded (" + why_not_symbolic +
                              "); checked on the box instead");
  return {Verdict::Inconclusive, CheckMode::Symbolic, {}, std::nullopt,
          "symbolic scope exceeded (" + why_not_symbolic + ") and no box given"};
}

CheckReport check_lpf(const lang::SingleWhileLoop& loop,
                      const LinearProgressFunction& cand,
                      const std::optional<Box>& box) {
  if (!loop.incremental) throw NotIncremental();
  const std::size_t n = loop.pvars.size();
  if (cand.a.size() != n)
    return {Verdict::Inconclusive, CheckMode::Symbolic, {}, std::nullopt,
            "coefficient vector arity mismatch"};

  std::vector<Cond> conds;
  conds.push_back({"L1", true, false, std::nullopt, "affine by shape"});

  // Clear denominators: over integer states, a^T pv + c > 0 iff
  // abar^T pv + cbar >= 1 for the scaled integer form.
  Int L = 1;
  for (const Rat& q : cand.a) L = lcm(L, denominator(q));
  L = lcm(L, denominator(cand.c));
  std::vector<Rat> abar(n);
  for (std::size_t i = 0; i < n; ++i) abar[i] = cand.a[i] * Rat(L);
  Rat cbar = cand.c * Rat(L);

  auto eval_h = [&](std::span<const long long> pv) {
    Rat v = cand.c;
    for (std::size_t i = 0; i < n; ++i) v += cand.a[i] * Rat(pv[i]);
    return v;
  };

  Cond l2{"L2", true, false, std::nullopt, ""};
  bool l2_on_box = false;
  auto prem = guard_polyhedra(loop.guard, n);
  if (prem) {
    auto [v, bad] = affine_valid_all(*prem, abar, Rat(1) - cbar);
    switch (v) {
      case Validity::Valid:
      case Validity::Vacuous:
        l2.note = "positive on the whole guard region";
        break;
      case Validity::Invalid: {
        l2.holds = false;
        l2.note = "h can be nonpositive inside the loop";
        auto pt = find_integer_point_any(*prem, bad, abar,
                                         [&](std::span<const long long> pv) {
                                           return loop.guard.eval(pv) &&
                                                  eval_h(pv) <= 0;
                                         });
        if (pt)
          l2.wit = Witness{"L2", *pt, {},
                           "h" + fmt_point(*pt) + " = " + rat_to_string(eval_h(*pt)) +
                               " <= 0"};
        else
          l2.note += " (over rationals; no integer witness located)";
        break;
      }
    }
  } else if (box) {
    if (box->range.size() != n)
      return {Verdict::Inconclusive, CheckMode::Box, {}, std::nullopt,
              "box arity does not match the program variables"};
    BoxIter it(*box);
    if (it.total > kBoxCap)
      return {Verdict::Inconclusive, CheckMode::Box, {}, std::nullopt,
              "box has " + std::to_string(it.total) + " points; cap is " +
                  std::to_string(kBoxCap)};
    l2_on_box = true;
    constexpr unsigned long long NONE = ~0ULL;
    unsigned long long firstv = NONE;
#pragma omp parallel
    {
      unsigned long long local = NONE;
#pragma omp for schedule(static) nowait
      for (long long idx = 0; idx < static_cast<long long>(it.total); ++idx) {
        std::vector<long long> pv = it.decode(static_cast<unsigned long long>(idx));
        if (!loop.guard.eval(pv)) continue;
        if (eval_h(pv) <= 0 && static_cast<unsigned long long>(idx) < local)
          local = static_cast<unsigned long long>(idx);
      }
#pragma omp critical
      if (local < firstv) firstv = local;
    }
    if (firstv == NONE) {
      l2.note = "positive at every guard state of the box";
    } else {
      l2.holds = false;
      auto pv = it.decode(firstv);
      l2.note = "nonpositive inside the loop";
      l2.wit = Witness{"L2", pv, {},
                       "h" + fmt_point(pv) + " = " + rat_to_string(eval_h(pv)) + " <= 0"};
    }
  } else {
    l2.holds = false;
    l2.inconclusive = true;
    l2.note = "guard is not affine and no box given";
  }
  conds.push_back(std::move(l2));

  // L3: increment weights kappa = a^T A; mean combination must be <= 0 and
  // the variance combination strictly positive.
  Cond l3{"L3", true, false, std::nullopt, ""};
  std::vector<Rat> kappa(loop.sampling.size(), Rat(0));
  for (std::size_t j = 0; j < loop.sampling.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      kappa[j] += cand.a[i] * Rat(loop.A[i][j]);
  Rat drift = 0, var = 0;
  for (std::size_t j = 0; j < loop.sampling.size(); ++j) {
    auto m = dist::moments(loop.sampling.dists[j]);
    drift += kappa[j] * m.mean;
    var += kappa[j] * kappa[j] * m.variance;
  }
  if (drift > 0) {
    l3.holds = false;
    l3.note = "mean one-step change is positive";
    l3.wit = Witness{"L3", {}, {}, "drift = " + rat_to_string(drift) + " > 0"};
  } else if (var <= 0) {
    l3.holds = false;
    l3.note = "one-step change carries no variance";
    l3.wit = Witness{"L3", {}, {},
                     "drift = " + rat_to_string(drift) + ", variance = " +
                         rat_to_string(var)};
  } else {
    l3.note = "drift = " + rat_to_string(drift) + ", variance = " + rat_to_string(var);
  }
  conds.push_back(std::move(l3));

  return assemble(l2_on_box ? CheckMode::Box : CheckMode::Symbolic, std::move(conds),
                  l2_on_box);
}

SupermartingaleMap scale_certificate(const SupermartingaleMap& cand, const Rat& lambda) {
  if (lambda <= 0) throw std::invalid_argument("scale factor must be positive");
  SupermartingaleMap out = cand;
  for (Rat& q : out.h.a) q *= lambda;
  for (Rat& q : out.h.s) q *= lambda;
  out.h.c *= lambda;
  out.delta *= lambda;
  if (out.zeta) *out.zeta *= lambda;
  return out;
}

// ---------------------------------------------------------------------------
// Witness replay

bool replay_witness(const lang::SingleWhileLoop& loop, const SupermartingaleMap& cand,
                    const Witness& w) {
  const auto& h = cand.h;
  auto F_of = [&](const std::vector<long long>& pv, const std::vector<long long>& rv) {
    std::vector<long long> F = pv;
    loop.run_body(F, rv);
    return F;
  };
  if (w.condition == "D2i")
    return loop.guard.eval(w.pv) && h.eval(w.pv) < cand.delta;
  if (w.condition == "D2ii")
    return loop.guard.eval(w.pv) && h.eval(F_of(w.pv, w.rv)) < cand.delta;
  if (w.condition == "D3.1" || w.condition == "D3.2") {
    // Global moment conditions: recompute the offending expectation.  For a
    // box witness the state matters; for symbolic increment loops it cancels.
    std::vector<long long> pv = w.pv;
    if (pv.empty()) {
      if (!loop.incremental) return false;
      std::vector<Rat> kappa(loop.sampling.size(), Rat(0));
      for (std::size_t j = 0; j < loop.sampling.size(); ++j)
        for (std::size_t i = 0; i < loop.pvars.size(); ++i)
          kappa[j] += h.a[i] * Rat(loop.A[i][j]);
      Rat drift = 0;
      for (std::size_t j = 0; j < loop.sampling.size(); ++j)
        drift += kappa[j] * dist::moments(loop.sampling.dists[j]).mean;
      if (w.condition == "D3.1") return drift > 0;
      auto f = [&](std::span<const long long> rv) {
        Rat g = 0;
        for (std::size_t j = 0; j < rv.size(); ++j) g += kappa[j] * Rat(rv[j]);
        return rat_abs(g);
      };
      Rat growth = 0;
      for (const Rat& k : kappa) growth = std::max(growth, rat_abs(k));
      auto [eabs_lo, eabs_hi] =
          dist::expect(loop.sampling, f, growth, cand.delta / Rat(1'000'000'000));
      return eabs_hi < cand.delta;
    }
    if (!loop.guard.eval(pv) || !loop.sampling.all_finite()) return false;
    Rat hpv = h.eval(pv), exp_h = 0, exp_abs = 0;
    for (const auto& [rv, p] : dist::joint_support(loop.sampling)) {
      Rat hF = h.eval(F_of(pv, rv));
      exp_h += p * hF;
      exp_abs += p * rat_abs(hF - hpv);
    }
    return w.condition == "D3.1" ? exp_h > hpv : exp_abs < cand.delta;
  }
  if (w.condition == "D4") {
    if (!cand.zeta || !loop.guard.eval(w.pv)) return false;
    auto F = F_of(w.pv, w.rv);
    Rat g = h.eval(F) - h.eval(w.pv);
    if (rat_abs(g) > *cand.zeta) return true;
    return !loop.guard.eval(F) && h.eval(F) > *cand.zeta;
  }
  return false;
}

bool replay_witness(const lang::SingleWhileLoop& loop, const LinearProgressFunction& cand,
                    const Witness& w) {
  const std::size_t n = loop.pvars.size();
  auto eval_h = [&](std::span<const long long> pv) {
    Rat v = cand.c;
    for (std::size_t i = 0; i < n; ++i) v += cand.a[i] * Rat(pv[i]);
    return v;
  };
  if (w.condition == "L2") return loop.guard.eval(w.pv) && eval_h(w.pv) <= 0;
  if (w.condition == "L3") {
    if (!loop.incremental) return false;
    std::vector<Rat> kappa(loop.sampling.size(), Rat(0));
    for (std::size_t j = 0; j < loop.sampling.size(); ++j)
      for (std::size_t i = 0; i < n; ++i)
        kappa[j] += cand.a[i] * Rat(loop.A[i][j]);
    Rat drift = 0, var = 0;
    for (std::size_t j = 0; j < loop.sampling.size(); ++j) {
      auto m = dist::moments(loop.sampling.dists[j]);
      drift += kappa[j] * m.mean;
      var += kappa[j] * kappa[j] * m.variance;
    }
    return drift > 0 || var <= 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// JSON certificate files

Certificate load_certificate(const std::string& json_text,
                             const std::vector<std::string>& pvars) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  const std::string kind = j.at("kind").get<std::string>();
  auto rat_field = [&](const char* key, const Rat& dflt) {
    if (!j.contains(key) || j[key].is_null()) return dflt;
    if (j[key].is_number_integer()) return Rat(j[key].get<long long>());
    return parse_rat(j[key].get<std::string>());
  };
  if (kind == "smap") {
    SupermartingaleMap m;
    m.h = parse_cert_expr(j.at("h").get<std::string>(), pvars);
    m.delta = rat_field("delta", Rat(1));
    if (j.contains("zeta") && !j["zeta"].is_null())
      m.zeta = j["zeta"].is_number_integer() ? Rat(j["zeta"].get<long long>())
                                             : parse_rat(j["zeta"].get<std::string>());
    return m;
  }
  if (kind == "lpf") {
    LinearProgressFunction f;
    for (const auto& entry : j.at("a")) {
      f.a.push_back(entry.is_number_integer() ? Rat(entry.get<long long>())
                                              : parse_rat(entry.get<std::string>()));
    }
    if (f.a.size() != pvars.size())
      throw std::invalid_argument("certificate arity does not match the program");
    f.c = rat_field("c", Rat(0));
    return f;
  }
  throw std::invalid_argument("unknown certificate kind '" + kind + "'");
}

Certificate load_certificate_file(const std::string& path,
                                  const std::vector<std::string>& pvars) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_certificate(ss.str(), pvars);
}

std::string certificate_json(const Certificate& cert,
                             const std::vector<std::string>& pvars) {
  nlohmann::ordered_json j;
  if (const auto* m = std::get_if<SupermartingaleMap>(&cert)) {
    j["kind"] = "smap";
    j["h"] = m->h.to_string(pvars);
    j["delta"] = rat_to_string(m->delta);
    j["zeta"] = m->zeta ? nlohmann::ordered_json(rat_to_string(*m->zeta))
                        : nlohmann::ordered_json(nullptr);
  } else {
    const auto& f = std::get<LinearProgressFunction>(cert);
    j["kind"] = "lpf";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Rat& q : f.a) arr.push_back(rat_to_string(q));
    j["a"] = std::move(arr);
    j["c"] = rat_to_string(f.c);
    CertExpr h(pvars.size());
    h.a = f.a;
    h.c = f.c;
    j["h"] = h.to_string(pvars);
  }
  return j.dump(2);
}

} // namespace astprove::cert
