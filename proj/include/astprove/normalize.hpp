#pragma once

#include "astprove/ast.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace astprove::lang {

// A maximal run of loop-free statements at the top level of a program.
struct LoopFreeBlock {
  StmtPtr stmt;
};

// One top-level `while guard do body od` with its body guaranteed loop-free.
// When the body is a plain sequence of assignments of the shape
// `x := x + c1*r1 + ... + cm*rm`, the whole update collapses to
// pv' = pv + A*rv for a constant integer matrix A; such loops are flagged
// `incremental` and carry A, which the drift-based analyses require.
struct SingleWhileLoop {
  Guard guard;
  StmtPtr body;
  std::vector<std::string> pvars;
  std::vector<std::string> rvars;
  dist::SamplingFunction sampling;
  bool incremental = false;
  std::vector<std::vector<long long>> A; // |pvars| x |rvars|, valid iff incremental

  // Runs the body once: pv <- F(pv, rv).
  void run_body(std::vector<long long>& pv, std::span<const long long> rv) const;
};

using Component = std::variant<LoopFreeBlock, SingleWhileLoop>;

struct NormalizedProgram {
  Program program;                    // retains the full source AST
  std::vector<Component> components;  // top-level split at while boundaries

  std::vector<const SingleWhileLoop*> loops() const;
};

// Splits the top level of a program into loop-free blocks and single while
// loops.  Rejects loops nested inside loops (NestedLoop) and loops nested
// inside conditional branches (LoopInsideBranch).
NormalizedProgram normalize(const Program& prog);

// Detects whether a loop-free body is a pure increment update and returns the
// coefficient matrix if so.  Exposed separately so tests can probe it.
std::optional<std::vector<std::vector<long long>>> incremental_matrix(
    const Stmt& body, std::size_t n_pvars, std::size_t n_rvars);

} // namespace astprove::lang
