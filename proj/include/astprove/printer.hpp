#pragma once

#include "astprove/ast.hpp"

#include <string>

namespace astprove::lang {

// Renders a program (or parts of one) as source text.  The output parses back
// to a structurally equal program, which the tests rely on.
std::string print_expr(const Expr& e, const Program& prog);
std::string print_poly(const Poly& p, const Program& prog);
std::string print_guard(const Guard& g, const Program& prog);
std::string print_stmt(const Stmt& s, const Program& prog, int indent = 0);
std::string print_program(const Program& prog);

} // namespace astprove::lang
