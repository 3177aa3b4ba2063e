#pragma once

#include "astprove/ast.hpp"

#include <string>

namespace astprove::lang {

// Parses a .pwhile module: header declarations (`pvar x;`, `rvar r ~ dist;`)
// followed by one statement. Throws SyntaxError / UndeclaredVariable.
Program parse_program(const std::string& text, const std::string& source_name = "<input>");

Program parse_file(const std::string& path);

} // namespace astprove::lang
