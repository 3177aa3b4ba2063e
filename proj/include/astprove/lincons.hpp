#pragma once

#include "astprove/rational.hpp"

#include <string>
#include <vector>

namespace astprove::lincons {

enum class Rel { Le, Eq, Ge };

// A linear-constraint system over named rational variables, optionally with a
// linear objective to minimize.  Variables are free unless declared nonneg.
struct LinSystem {
  struct Var {
    std::string name;
    bool nonneg = false;
  };
  struct Con {
    std::vector<Rat> coeffs; // padded/truncated to vars.size() at solve time
    Rel rel = Rel::Ge;
    Rat rhs;
  };
  std::vector<Var> vars;
  std::vector<Con> cons;
  std::vector<Rat> objective; // minimize; empty = pure feasibility

  int add_var(std::string name, bool nonneg = false);
  void add(std::vector<Rat> coeffs, Rel rel, Rat rhs);
  void set_objective(std::vector<Rat> obj);
};

enum class Status { Feasible, Infeasible, Unbounded };

struct SolveResult {
  Status status = Status::Infeasible;
  std::vector<Rat> assignment; // one value per declared variable when feasible
  Rat objective_value;
};

// Exact two-phase dense simplex with Bland's anti-cycling rule.  Feasible
// results satisfy every constraint exactly; Infeasible is definitive.
SolveResult solve(const LinSystem& sys);

// Conjunction of affine inequalities rows[i]·x >= rhs[i] over x in Q^arity.
struct Polyhedron {
  std::size_t arity = 0;
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;

  explicit Polyhedron(std::size_t arity_ = 0) : arity(arity_) {}
  void add_ge(std::vector<Rat> row, Rat b);
  bool empty() const; // decided exactly via solve
};

class EmptyPremise : public std::runtime_error {
public:
  EmptyPremise() : std::runtime_error("premise polyhedron has no points; the implication is vacuous") {}
};

// An affine expression lin·u + cst over the unknowns u of a LinSystem.
struct AffineForm {
  std::vector<Rat> lin;
  Rat cst;

  AffineForm() = default;
  explicit AffineForm(Rat constant) : cst(std::move(constant)) {}
};

// Appends fresh nonnegative multiplier variables and linear constraints to
// `sys` that hold exactly when  w(u)ᵀx >= e(u)  is valid at every rational
// point x of the premise: one multiplier per premise row, column equalities
// tying multipliers to the conclusion coefficients, and the constant-side
// inequality.  Throws EmptyPremise when the premise has no points at all.
void farkas_encode(LinSystem& sys, const Polyhedron& premise,
                   const std::vector<AffineForm>& w, const AffineForm& e,
                   const std::string& tag);

} // namespace astprove::lincons
