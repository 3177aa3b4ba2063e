#include "astprove/printer.hpp"

#include <sstream>

namespace astprove::lang {

namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

// Appends "sign magnitude*vars" for one term; `first` suppresses a leading '+'.
void append_signed(std::ostringstream& out, bool first, long long coeff,
                   const std::string& vars) {
  long long mag = coeff < 0 ? -coeff : coeff;
  if (first) {
    if (coeff < 0) out << "-";
  } else {
    out << (coeff < 0 ? " - " : " + ");
  }
  if (vars.empty()) {
    out << mag;
  } else if (mag == 1) {
    out << vars;
  } else {
    out << mag << "*" << vars;
  }
}

} // namespace

std::string print_expr(const Expr& e, const Program& prog) {
  std::ostringstream out;
  bool first = true;
  for (const Term& t : e.terms) {
    if (t.coeff == 0 && e.terms.size() > 1) continue;
    std::string vars;
    if (t.pvar >= 0) {
      vars = prog.pvars[static_cast<std::size_t>(t.pvar)];
    } else if (t.rvar >= 0) {
      vars = prog.rvars[static_cast<std::size_t>(t.rvar)];
      if (t.isqrt_pvar >= 0)
        vars += "*isqrt(" + prog.pvars[static_cast<std::size_t>(t.isqrt_pvar)] + ")";
    }
    append_signed(out, first, t.coeff, vars);
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

std::string print_poly(const Poly& p, const Program& prog) {
  std::ostringstream out;
  bool first = true;
  // Quadratic terms, then linear, then the constant; the map's key order
  // (pairs ascending, -1 sorting first) would put the constant up front, so
  // walk it in reverse to get the conventional ordering.
  for (auto it = p.coef.rbegin(); it != p.coef.rend(); ++it) {
    auto [key, c] = *it;
    if (c == 0 && p.coef.size() > 1) continue;
    std::string vars;
    if (key.first >= 0) {
      vars = prog.pvars[static_cast<std::size_t>(key.first)];
      if (key.second >= 0)
        vars += "*" + prog.pvars[static_cast<std::size_t>(key.second)];
    }
    append_signed(out, first, c, vars);
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

std::string print_guard(const Guard& g, const Program& prog) {
  switch (g.kind) {
    case Guard::Kind::Lit:
      return print_poly(g.lit, prog) + " >= 0";
    case Guard::Kind::And: {
      std::string s;
      for (std::size_t i = 0; i < g.kids.size(); ++i) {
        if (i) s += " and ";
        const Guard& k = g.kids[i];
        if (k.kind == Guard::Kind::Or)
          s += "(" + print_guard(k, prog) + ")";
        else
          s += print_guard(k, prog);
      }
      return s;
    }
    case Guard::Kind::Or: {
      std::string s;
      for (std::size_t i = 0; i < g.kids.size(); ++i) {
        if (i) s += " or ";
        s += print_guard(g.kids[i], prog);
      }
      return s;
    }
  }
  return "";
}

std::string print_stmt(const Stmt& s, const Program& prog, int indent) {
  std::ostringstream out;
  switch (s.kind) {
    case Stmt::Kind::Skip:
      out << pad(indent) << "skip";
      break;
    case Stmt::Kind::Assign:
      out << pad(indent) << prog.pvars[static_cast<std::size_t>(s.target)] << " := "
          << print_expr(s.rhs, prog);
      break;
    case Stmt::Kind::Seq:
      out << print_stmt(*s.a, prog, indent) << ";\n" << print_stmt(*s.b, prog, indent);
      break;
    case Stmt::Kind::If:
      out << pad(indent) << "if " << print_guard(s.guard, prog) << " then\n"
          << print_stmt(*s.a, prog, indent + 1) << "\n"
          << pad(indent) << "else\n"
          << print_stmt(*s.b, prog, indent + 1) << "\n"
          << pad(indent) << "fi";
      break;
    case Stmt::Kind::While:
      out << pad(indent) << "while " << print_guard(s.guard, prog) << " do\n"
          << print_stmt(*s.a, prog, indent + 1) << "\n"
          << pad(indent) << "od";
      break;
  }
  return out.str();
}

std::string print_program(const Program& prog) {
  std::ostringstream out;
  for (const std::string& v : prog.pvars) out << "pvar " << v << ";\n";
  for (std::size_t i = 0; i < prog.rvars.size(); ++i)
    out << "rvar " << prog.rvars[i] << " ~ " << prog.sampling.dists[i].describe() << ";\n";
  if (!prog.pvars.empty() || !prog.rvars.empty()) out << "\n";
  out << print_stmt(*prog.body, prog, 0) << "\n";
  return out.str();
}

} // namespace astprove::lang
