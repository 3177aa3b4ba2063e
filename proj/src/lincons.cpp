#include "astprove/lincons.hpp"

#include <cassert>

namespace astprove::lincons {

int LinSystem::add_var(std::string name, bool nonneg) {
  vars.push_back({std::move(name), nonneg});
  return static_cast<int>(vars.size()) - 1;
}

void LinSystem::add(std::vector<Rat> coeffs, Rel rel, Rat rhs) {
  cons.push_back({std::move(coeffs), rel, std::move(rhs)});
}

void LinSystem::set_objective(std::vector<Rat> obj) { objective = std::move(obj); }

namespace {

// Dense exact-rational tableau.  Rows 0..m-1 are constraints in the equality
// form Bx = b with b >= 0; two cost rows are carried through every pivot.
struct Tableau {
  std::size_t m, n;                 // constraints, columns (without rhs)
  std::vector<std::vector<Rat>> t;  // m rows of n+1 entries (last = rhs)
  std::vector<Rat> cost1, cost2;    // phase-1 / phase-2 reduced cost rows, n+1 wide
  std::vector<std::size_t> basis;   // basic column per row

  void pivot(std::size_t r, std::size_t c) {
    Rat piv = t[r][c];
    for (auto& x : t[r]) x /= piv;
    auto eliminate = [&](std::vector<Rat>& row) {
      Rat f = row[c];
      if (f == 0) return;
      for (std::size_t j = 0; j <= n; ++j) row[j] -= f * t[r][j];
    };
    for (std::size_t i = 0; i < m; ++i)
      if (i != r) eliminate(t[i]);
    eliminate(cost1);
    eliminate(cost2);
    basis[r] = c;
  }

  enum class Step { Optimal, Pivoted, Unbounded };

  // Bland's rule: entering = lowest-index column with a negative reduced
  // cost; leaving = among the minimum-ratio rows, the one whose basic column
  // index is lowest.  Guarantees termination without cycling.
  Step bland_step(std::vector<Rat>& cost, const std::vector<bool>& allowed) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (allowed[j] && cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == n) return Step::Optimal;
    std::size_t leave = m;
    Rat best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rat ratio = t[i][n] / t[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return Step::Unbounded;
    pivot(leave, enter);
    return Step::Pivoted;
  }

  Step run(std::vector<Rat>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      Step s = bland_step(cost, allowed);
      if (s != Step::Pivoted) return s;
    }
  }
};

} // namespace

SolveResult solve(const LinSystem& sys) {
  const std::size_t nv = sys.vars.size();
  // Free variables split as v = v+ - v-; col_pos/col_neg give the standard
  // columns of each declared variable.
  std::vector<std::size_t> col_pos(nv), col_neg(nv, SIZE_MAX);
  std::size_t n_std = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    col_pos[j] = n_std++;
    if (!sys.vars[j].nonneg) col_neg[j] = n_std++;
  }
  const std::size_t m = sys.cons.size();
  // Columns: standard vars, slack/surplus (one per inequality), artificials.
  std::size_t n_slack = 0;
  for (const auto& c : sys.cons)
    if (c.rel != Rel::Eq) ++n_slack;
  const std::size_t n = n_std + n_slack + m; // one artificial per row
  const std::size_t art0 = n_std + n_slack;

  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t.assign(m, std::vector<Rat>(n + 1, Rat(0)));
  tab.cost1.assign(n + 1, Rat(0));
  tab.cost2.assign(n + 1, Rat(0));
  tab.basis.assign(m, 0);

  std::size_t slack_at = n_std;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = sys.cons[i];
    auto& row = tab.t[i];
    for (std::size_t j = 0; j < nv && j < c.coeffs.size(); ++j) {
      row[col_pos[j]] += c.coeffs[j];
      if (col_neg[j] != SIZE_MAX) row[col_neg[j]] -= c.coeffs[j];
    }
    row[n] = c.rhs;
    if (c.rel == Rel::Le)
      row[slack_at++] = 1;
    else if (c.rel == Rel::Ge)
      row[slack_at++] = -1;
    if (row[n] < 0)
      for (auto& x : row) x = -x;
    row[art0 + i] = 1;
    tab.basis[i] = art0 + i;
  }

  // Phase 1: minimize the artificial sum.  The cost row is the phase-1
  // objective (unit cost on every artificial) reduced against the starting
  // artificial basis; artificial columns then carry reduced cost zero, and
  // they are barred from re-entering so the bookkeeping stays consistent.
  for (std::size_t i = 0; i < m; ++i) tab.cost1[art0 + i] = 1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n; ++j) tab.cost1[j] -= tab.t[i][j];
  std::vector<bool> allowed(n, true);
  for (std::size_t j = art0; j < n; ++j) allowed[j] = false;
  // Phase 1 cannot be unbounded (its objective is >= 0 on the region).
  tab.run(tab.cost1, allowed);
  if (tab.cost1[n] != 0) return {Status::Infeasible, {}, Rat(0)};

  // Drive leftover zero-level artificials out of the basis where possible;
  // rows that cannot pivot are redundant and harmless (the artificial stays
  // basic at value 0 and its column is barred from re-entering).
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < art0) continue;
    for (std::size_t j = 0; j < art0; ++j)
      if (tab.t[i][j] != 0) {
        tab.pivot(i, j);
        break;
      }
  }
  for (std::size_t j = art0; j < n; ++j) allowed[j] = false;

  // Phase 2: minimize the real objective over the standard columns.
  if (!sys.objective.empty()) {
    for (std::size_t j = 0; j < nv && j < sys.objective.size(); ++j) {
      tab.cost2[col_pos[j]] += sys.objective[j];
      if (col_neg[j] != SIZE_MAX) tab.cost2[col_neg[j]] -= sys.objective[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      Rat f = tab.cost2[tab.basis[i]];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n; ++j) tab.cost2[j] -= f * tab.t[i][j];
    }
    if (tab.run(tab.cost2, allowed) == Tableau::Step::Unbounded)
      return {Status::Unbounded, {}, Rat(0)};
  }

  SolveResult res;
  res.status = Status::Feasible;
  std::vector<Rat> std_val(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i) std_val[tab.basis[i]] = tab.t[i][n];
  res.assignment.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    res.assignment[j] = std_val[col_pos[j]];
    if (col_neg[j] != SIZE_MAX) res.assignment[j] -= std_val[col_neg[j]];
  }
  res.objective_value = 0;
  for (std::size_t j = 0; j < nv && j < sys.objective.size(); ++j)
    res.objective_value += sys.objective[j] * res.assignment[j];
  return res;
}

void Polyhedron::add_ge(std::vector<Rat> row, Rat b) {
  row.resize(arity, Rat(0));
  rows.push_back(std::move(row));
  rhs.push_back(std::move(b));
}

bool Polyhedron::empty() const {
  LinSystem sys;
  for (std::size_t j = 0; j < arity; ++j) sys.add_var("x" + std::to_string(j));
  for (std::size_t i = 0; i < rows.size(); ++i) sys.add(rows[i], Rel::Ge, rhs[i]);
  return solve(sys).status == Status::Infeasible;
}

void farkas_encode(LinSystem& sys, const Polyhedron& premise,
                   const std::vector<AffineForm>& w, const AffineForm& e,
                   const std::string& tag) {
  if (premise.empty()) throw EmptyPremise();
  assert(w.size() == premise.arity);
  const std::size_t base = sys.vars.size();
  std::vector<int> lambda;
  lambda.reserve(premise.rows.size());
  for (std::size_t r = 0; r < premise.rows.size(); ++r)
    lambda.push_back(sys.add_var(tag + ".l" + std::to_string(r), /*nonneg=*/true));

  auto widen = [&](const AffineForm& f, const Rat& sign) {
    // -sign * (f.lin · u) as a coefficient row over the enlarged system.
    std::vector<Rat> row(sys.vars.size(), Rat(0));
    for (std::size_t j = 0; j < f.lin.size() && j < base; ++j) row[j] = -sign * f.lin[j];
    return row;
  };

  // Column equalities:  sum_r lambda_r * P[r][j] - w_j(u)·lin = w_j.cst
  for (std::size_t j = 0; j < premise.arity; ++j) {
    std::vector<Rat> row = widen(w[j], Rat(1));
    for (std::size_t r = 0; r < premise.rows.size(); ++r)
      row[static_cast<std::size_t>(lambda[r])] = premise.rows[r][j];
    sys.add(std::move(row), Rel::Eq, w[j].cst);
  }
  // Constant side:  sum_r lambda_r * q_r - e(u)·lin >= e.cst
  std::vector<Rat> row = widen(e, Rat(1));
  for (std::size_t r = 0; r < premise.rows.size(); ++r)
    row[static_cast<std::size_t>(lambda[r])] = premise.rhs[r];
  sys.add(std::move(row), Rel::Ge, e.cst);
}

} // namespace astprove::lincons
