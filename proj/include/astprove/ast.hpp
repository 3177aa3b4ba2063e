#pragma once

#include "astprove/dist.hpp"
#include "astprove/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace astprove::lang {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

struct LangError : std::runtime_error {
  SourceLoc loc;
  LangError(const SourceLoc& l, const std::string& msg)
      : std::runtime_error(std::to_string(l.line) + ":" + std::to_string(l.col) + ": " + msg), loc(l) {}
};
struct SyntaxError : LangError {
  SyntaxError(const SourceLoc& l, const std::string& expected)
      : LangError(l, "syntax error: " + expected) {}
};
struct UndeclaredVariable : LangError {
  std::string name;
  UndeclaredVariable(const SourceLoc& l, std::string n, const std::string& hint = "")
      : LangError(l, "undeclared variable '" + n + "'" + (hint.empty() ? "" : " (" + hint + ")")),
        name(std::move(n)) {}
};
struct NestedLoop : LangError {
  explicit NestedLoop(const SourceLoc& l)
      : LangError(l, "nested while loops are not supported") {}
};
struct LoopInsideBranch : LangError {
  explicit LoopInsideBranch(const SourceLoc& l)
      : LangError(l, "a while loop inside a conditional branch is not supported") {}
};

// One summand of an update expression. Exactly one of the shapes
//   coeff | coeff*pvar | coeff*rvar | coeff*rvar*isqrt(pvar)
// pvar/rvar/isqrt_pvar are indices into the program's variable lists, -1 if absent.
struct Term {
  long long coeff = 0;
  int pvar = -1;
  int rvar = -1;
  int isqrt_pvar = -1;
  bool operator==(const Term&) const = default;
};

struct Expr {
  std::vector<Term> terms;
  bool operator==(const Expr&) const = default;
};

long long eval_expr(const Expr& e, std::span<const long long> pv, std::span<const long long> rv);

// Integer polynomial of degree <= 2 over program variables. Key (i,j) with
// i <= j is the monomial v_i*v_j; (i,-1) is v_i; (-1,-1) the constant.
struct Poly {
  std::map<std::pair<int, int>, long long> coef;

  static Poly constant(long long c);
  static Poly var(int i);
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  // Throws std::domain_error if the product exceeds degree 2.
  Poly operator*(const Poly& o) const;
  int degree() const;
  bool operator==(const Poly&) const = default;
};

__int128 eval_poly(const Poly& p, std::span<const long long> pv);

// Guard in negation normal form; a Lit node asserts lit >= 0. Negation is
// resolved at construction over the integers: not(p >= 0) becomes -p-1 >= 0.
struct Guard {
  enum class Kind { Lit, And, Or };
  Kind kind = Kind::Lit;
  Poly lit;
  std::vector<Guard> kids;

  static Guard literal(Poly p);
  static Guard conj(std::vector<Guard> ks);
  static Guard disj(std::vector<Guard> ks);
  Guard negated() const;
  bool eval(std::span<const long long> pv) const;
  // True when every polynomial in the guard is affine.
  bool affine() const;
  bool operator==(const Guard&) const = default;
};

// Disjunctive normal form: a list of conjunctions, each a list of polys >= 0.
// Returns nullopt when the expansion exceeds max_disjuncts.
std::optional<std::vector<std::vector<Poly>>> guard_dnf(const Guard& g, std::size_t max_disjuncts = 64);

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Skip, Assign, Seq, If, While };
  Kind kind = Kind::Skip;
  SourceLoc loc;
  int target = -1; // Assign
  Expr rhs;        // Assign
  Guard guard;     // If / While
  StmtPtr a, b;    // Seq: first/second; If: then/else; While: body in a

  static StmtPtr skip(SourceLoc l = {});
  static StmtPtr assign(int target, Expr rhs, SourceLoc l = {});
  static StmtPtr seq(StmtPtr first, StmtPtr second);
  static StmtPtr ifelse(Guard g, StmtPtr then_s, StmtPtr else_s, SourceLoc l = {});
  static StmtPtr loop(Guard g, StmtPtr body, SourceLoc l = {});
  StmtPtr clone() const;
  bool contains_while() const;
};

bool stmt_equal(const Stmt& x, const Stmt& y);

struct Program {
  std::vector<std::string> pvars;
  std::vector<std::string> rvars;
  dist::SamplingFunction sampling; // parallel to rvars
  StmtPtr body;
  std::string source_name;

  int pvar_index(const std::string& name) const;
  int rvar_index(const std::string& name) const;
};

// Executes a loop-free statement in place; rv holds one sample per rvar.
void exec_loop_free(const Stmt& s, std::vector<long long>& pv, std::span<const long long> rv);

} // namespace astprove::lang
