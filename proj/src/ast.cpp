#include "astprove/ast.hpp"

#include <algorithm>

namespace astprove::lang {

long long eval_expr(const Expr& e, std::span<const long long> pv, std::span<const long long> rv) {
  long long acc = 0;
  for (const Term& t : e.terms) {
    long long v = t.coeff;
    if (t.pvar >= 0) v *= pv[t.pvar];
    if (t.rvar >= 0) v *= rv[t.rvar];
    if (t.isqrt_pvar >= 0) v *= isqrt_floor(pv[t.isqrt_pvar]);
    acc += v;
  }
  return acc;
}

Poly Poly::constant(long long c) {
  Poly p;
  if (c != 0) p.coef[{-1, -1}] = c;
  return p;
}

Poly Poly::var(int i) {
  Poly p;
  p.coef[{i, -1}] = 1;
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [k, c] : o.coef) {
    auto it = r.coef.find(k);
    if (it == r.coef.end())
      r.coef[k] = c;
    else if ((it->second += c) == 0)
      r.coef.erase(it);
  }
  return r;
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [k, c] : coef) r.coef[k] = -c;
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [ka, ca] : coef)
    for (const auto& [kb, cb] : o.coef) {
      // Merge the variable multisets of the two monomials.
      std::vector<int> vars;
      for (int v : {ka.first, ka.second, kb.first, kb.second})
        if (v >= 0) vars.push_back(v);
      if (vars.size() > 2) throw std::domain_error("guard polynomial degree exceeds 2");
      std::sort(vars.begin(), vars.end());
      std::pair<int, int> key{-1, -1};
      if (vars.size() == 1) key = {vars[0], -1};
      if (vars.size() == 2) key = {vars[0], vars[1]};
      auto it = r.coef.find(key);
      if (it == r.coef.end()) {
        if (ca * cb != 0) r.coef[key] = ca * cb;
      } else if ((it->second += ca * cb) == 0)
        r.coef.erase(it);
    }
  return r;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [k, c] : coef) {
    int kd = (k.first >= 0) + (k.second >= 0);
    d = std::max(d, kd);
  }
  return d;
}

__int128 eval_poly(const Poly& p, std::span<const long long> pv) {
  __int128 acc = 0;
  for (const auto& [k, c] : p.coef) {
    __int128 v = c;
    if (k.first >= 0) v *= pv[k.first];
    if (k.second >= 0) v *= pv[k.second];
    acc += v;
  }
  return acc;
}

Guard Guard::literal(Poly p) {
  Guard g;
  g.kind = Kind::Lit;
  g.lit = std::move(p);
  return g;
}

Guard Guard::conj(std::vector<Guard> ks) {
  if (ks.size() == 1) return std::move(ks[0]);
  Guard g;
  g.kind = Kind::And;
  g.kids = std::move(ks);
  return g;
}

Guard Guard::disj(std::vector<Guard> ks) {
  if (ks.size() == 1) return std::move(ks[0]);
  Guard g;
  g.kind = Kind::Or;
  g.kids = std::move(ks);
  return g;
}

Guard Guard::negated() const {
  switch (kind) {
    case Kind::Lit:
      // Over the integers, not(p >= 0) iff p <= -1 iff -p-1 >= 0.
      return literal(-lit - Poly::constant(1));
    case Kind::And: {
      std::vector<Guard> ks;
      for (const auto& k : kids) ks.push_back(k.negated());
      return disj(std::move(ks));
    }
    case Kind::Or: {
      std::vector<Guard> ks;
      for (const auto& k : kids) ks.push_back(k.negated());
      return conj(std::move(ks));
    }
  }
  return *this;
}

bool Guard::eval(std::span<const long long> pv) const {
  switch (kind) {
    case Kind::Lit:
      return eval_poly(lit, pv) >= 0;
    case Kind::And:
      return std::all_of(kids.begin(), kids.end(), [&](const Guard& k) { return k.eval(pv); });
    case Kind::Or:
      return std::any_of(kids.begin(), kids.end(), [&](const Guard& k) { return k.eval(pv); });
  }
  return false;
}

bool Guard::affine() const {
  switch (kind) {
    case Kind::Lit:
      return lit.degree() <= 1;
    case Kind::And:
    case Kind::Or:
      return std::all_of(kids.begin(), kids.end(), [](const Guard& k) { return k.affine(); });
  }
  return true;
}

std::optional<std::vector<std::vector<Poly>>> guard_dnf(const Guard& g, std::size_t max_disjuncts) {
  using Conj = std::vector<Poly>;
  switch (g.kind) {
    case Guard::Kind::Lit:
      return std::vector<Conj>{{g.lit}};
    case Guard::Kind::Or: {
      std::vector<Conj> out;
      for (const auto& k : g.kids) {
        auto sub = guard_dnf(k, max_disjuncts);
        if (!sub) return std::nullopt;
        for (auto& c : *sub) {
          out.push_back(std::move(c));
          if (out.size() > max_disjuncts) return std::nullopt;
        }
      }
      return out;
    }
    case Guard::Kind::And: {
      std::vector<Conj> out{{}};
      for (const auto& k : g.kids) {
        auto sub = guard_dnf(k, max_disjuncts);
        if (!sub) return std::nullopt;
        std::vector<Conj> next;
        for (const auto& a : out)
          for (const auto& b : *sub) {
            Conj c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.push_back(std::move(c));
            if (next.size() > max_disjuncts) return std::nullopt;
          }
        out = std::move(next);
      }
      return out;
    }
  }
  return std::nullopt;
}

StmtPtr Stmt::skip(SourceLoc l) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Skip;
  s->loc = l;
  return s;
}

StmtPtr Stmt::assign(int target, Expr rhs, SourceLoc l) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Assign;
  s->target = target;
  s->rhs = std::move(rhs);
  s->loc = l;
  return s;
}

StmtPtr Stmt::seq(StmtPtr first, StmtPtr second) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Seq;
  s->loc = first->loc;
  s->a = std::move(first);
  s->b = std::move(second);
  return s;
}

StmtPtr Stmt::ifelse(Guard g, StmtPtr then_s, StmtPtr else_s, SourceLoc l) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::If;
  s->guard = std::move(g);
  s->a = std::move(then_s);
  s->b = std::move(else_s);
  s->loc = l;
  return s;
}

StmtPtr Stmt::loop(Guard g, StmtPtr body, SourceLoc l) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::While;
  s->guard = std::move(g);
  s->a = std::move(body);
  s->loc = l;
  return s;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->loc = loc;
  s->target = target;
  s->rhs = rhs;
  s->guard = guard;
  if (a) s->a = a->clone();
  if (b) s->b = b->clone();
  return s;
}

bool Stmt::contains_while() const {
  if (kind == Kind::While) return true;
  if (a && a->contains_while()) return true;
  if (b && b->contains_while()) return true;
  return false;
}

bool stmt_equal(const Stmt& x, const Stmt& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Stmt::Kind::Skip:
      return true;
    case Stmt::Kind::Assign:
      return x.target == y.target && x.rhs == y.rhs;
    case Stmt::Kind::Seq:
      return stmt_equal(*x.a, *y.a) && stmt_equal(*x.b, *y.b);
    case Stmt::Kind::If:
      return x.guard == y.guard && stmt_equal(*x.a, *y.a) && stmt_equal(*x.b, *y.b);
    case Stmt::Kind::While:
      return x.guard == y.guard && stmt_equal(*x.a, *y.a);
  }
  return false;
}

int Program::pvar_index(const std::string& name) const {
  auto it = std::find(pvars.begin(), pvars.end(), name);
  return it == pvars.end() ? -1 : static_cast<int>(it - pvars.begin());
}

int Program::rvar_index(const std::string& name) const {
  auto it = std::find(rvars.begin(), rvars.end(), name);
  return it == rvars.end() ? -1 : static_cast<int>(it - rvars.begin());
}

void exec_loop_free(const Stmt& s, std::vector<long long>& pv, std::span<const long long> rv) {
  switch (s.kind) {
    case Stmt::Kind::Skip:
      return;
    case Stmt::Kind::Assign:
      pv[s.target] = eval_expr(s.rhs, pv, rv);
      return;
    case Stmt::Kind::Seq:
      exec_loop_free(*s.a, pv, rv);
      exec_loop_free(*s.b, pv, rv);
      return;
    case Stmt::Kind::If:
      exec_loop_free(s.guard.eval(pv) ? *s.a : *s.b, pv, rv);
      return;
    case Stmt::Kind::While:
      throw std::logic_error("exec_loop_free reached a while statement");
  }
}

} // namespace astprove::lang
