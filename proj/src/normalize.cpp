#include "astprove/normalize.hpp"

namespace astprove::lang {

namespace {

// Location of the first `while` below s, if any.
const Stmt* find_while(const Stmt& s) {
  if (s.kind == Stmt::Kind::While) return &s;
  if (s.a)
    if (const Stmt* w = find_while(*s.a)) return w;
  if (s.b)
    if (const Stmt* w = find_while(*s.b)) return w;
  return nullptr;
}

void flatten_seq(StmtPtr s, std::vector<StmtPtr>& out) {
  if (s->kind == Stmt::Kind::Seq) {
    flatten_seq(std::move(s->a), out);
    flatten_seq(std::move(s->b), out);
  } else {
    out.push_back(std::move(s));
  }
}

StmtPtr fold_seq(std::vector<StmtPtr> stmts) {
  StmtPtr acc = std::move(stmts.front());
  for (std::size_t i = 1; i < stmts.size(); ++i)
    acc = Stmt::seq(std::move(acc), std::move(stmts[i]));
  return acc;
}

} // namespace

void SingleWhileLoop::run_body(std::vector<long long>& pv,
                               std::span<const long long> rv) const {
  exec_loop_free(*body, pv, rv);
}

std::vector<const SingleWhileLoop*> NormalizedProgram::loops() const {
  std::vector<const SingleWhileLoop*> out;
  for (const Component& c : components)
    if (const auto* l = std::get_if<SingleWhileLoop>(&c)) out.push_back(l);
  return out;
}

std::optional<std::vector<std::vector<long long>>> incremental_matrix(
    const Stmt& body, std::size_t n_pvars, std::size_t n_rvars) {
  std::vector<std::vector<long long>> A(n_pvars, std::vector<long long>(n_rvars, 0));
  // Walk the body as a flat statement list; anything other than skips and
  // self-increment assignments disqualifies it.
  bool ok = true;
  auto visit = [&](auto&& self, const Stmt& s) -> void {
    if (!ok) return;
    switch (s.kind) {
      case Stmt::Kind::Seq:
        self(self, *s.a);
        self(self, *s.b);
        return;
      case Stmt::Kind::Skip:
        return;
      case Stmt::Kind::Assign: {
        int self_terms = 0;
        for (const Term& t : s.rhs.terms) {
          if (t.pvar >= 0) {
            if (t.pvar != s.target || t.coeff != 1) { ok = false; return; }
            ++self_terms;
          } else if (t.rvar >= 0) {
            if (t.isqrt_pvar >= 0) { ok = false; return; }
            A[static_cast<std::size_t>(s.target)][static_cast<std::size_t>(t.rvar)] += t.coeff;
          } else {
            ok = false; // constant offset breaks the pure-increment shape
            return;
          }
        }
        if (self_terms != 1) ok = false;
        return;
      }
      default:
        ok = false; // conditionals make the update state-dependent
        return;
    }
  };
  visit(visit, body);
  if (!ok) return std::nullopt;
  return A;
}

NormalizedProgram normalize(const Program& prog) {
  NormalizedProgram np;
  np.program.pvars = prog.pvars;
  np.program.rvars = prog.rvars;
  np.program.sampling = prog.sampling;
  np.program.source_name = prog.source_name;
  np.program.body = prog.body->clone();

  std::vector<StmtPtr> leaves;
  flatten_seq(prog.body->clone(), leaves);

  std::vector<StmtPtr> pending; // loop-free statements awaiting a block
  auto flush = [&] {
    if (pending.empty()) return;
    np.components.emplace_back(LoopFreeBlock{fold_seq(std::move(pending))});
    pending.clear();
  };

  for (StmtPtr& leaf : leaves) {
    if (leaf->kind == Stmt::Kind::While) {
      if (const Stmt* inner = find_while(*leaf->a)) throw NestedLoop(inner->loc);
      flush();
      SingleWhileLoop loop;
      loop.guard = leaf->guard;
      loop.body = std::move(leaf->a);
      loop.pvars = prog.pvars;
      loop.rvars = prog.rvars;
      loop.sampling = prog.sampling;
      if (auto A = incremental_matrix(*loop.body, prog.pvars.size(), prog.rvars.size())) {
        loop.incremental = true;
        loop.A = std::move(*A);
      }
      np.components.emplace_back(std::move(loop));
    } else {
      if (const Stmt* inner = find_while(*leaf)) throw LoopInsideBranch(inner->loc);
      pending.push_back(std::move(leaf));
    }
  }
  flush();
  return np;
}

} // namespace astprove::lang
