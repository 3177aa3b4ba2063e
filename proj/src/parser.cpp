#include "astprove/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace astprove::lang {

namespace {

enum class Tok {
  Ident, Int, Assign, Semi, Tilde, LParen, RParen, LBrace, RBrace,
  Colon, Comma, DotDot, Star, Plus, Minus, Slash, Le, Ge, Lt, Gt, End
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  SourceLoc loc;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  SourceLoc here() const { return {line, col}; }

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else
      ++col;
    ++pos;
  }

  void skip_ws() {
    for (;;) {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) advance();
      if (pos + 1 < src.size() && src[pos] == '/' && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') advance();
        continue;
      }
      break;
    }
  }

  Token next() {
    skip_ws();
    Token t;
    t.loc = here();
    if (pos >= src.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        id += src[pos];
        advance();
      }
      t.kind = Tok::Ident;
      t.text = std::move(id);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        num += src[pos];
        advance();
      }
      t.kind = Tok::Int;
      t.text = num;
      t.value = std::stoll(num);
      return t;
    }
    auto two = [&](char a, char b) {
      return c == a && pos + 1 < src.size() && src[pos + 1] == b;
    };
    if (two(':', '=')) { advance(); advance(); t.kind = Tok::Assign; return t; }
    if (two('<', '=')) { advance(); advance(); t.kind = Tok::Le; return t; }
    if (two('>', '=')) { advance(); advance(); t.kind = Tok::Ge; return t; }
    if (two('.', '.')) { advance(); advance(); t.kind = Tok::DotDot; return t; }
    advance();
    switch (c) {
      case ';': t.kind = Tok::Semi; return t;
      case '~': t.kind = Tok::Tilde; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case ':': t.kind = Tok::Colon; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '*': t.kind = Tok::Star; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '<': t.kind = Tok::Lt; return t;
      case '>': t.kind = Tok::Gt; return t;
      default:
        throw SyntaxError(t.loc, std::string("unexpected character '") + c + "'");
    }
  }
};

bool is_keyword(const std::string& s) {
  static const char* kws[] = {"pvar", "rvar",  "skip", "if",    "then", "else", "fi",
                              "while", "do",   "od",   "and",   "or",   "not",  "isqrt",
                              "uniform", "table", "point", "two_sided_geometric"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

struct Parser {
  Lexer lex;
  Token tok;
  Program prog;

  explicit Parser(const std::string& text) : lex(text) { tok = lex.next(); }

  void bump() { tok = lex.next(); }

  bool at_kw(const char* kw) const { return tok.kind == Tok::Ident && tok.text == kw; }

  void expect_kw(const char* kw) {
    if (!at_kw(kw)) throw SyntaxError(tok.loc, std::string("expected '") + kw + "'");
    bump();
  }

  void expect(Tok k, const char* what) {
    if (tok.kind != k) throw SyntaxError(tok.loc, std::string("expected ") + what);
    bump();
  }

  long long expect_signed_int() {
    bool neg = false;
    if (tok.kind == Tok::Minus) {
      neg = true;
      bump();
    }
    if (tok.kind != Tok::Int) throw SyntaxError(tok.loc, "expected integer");
    long long v = tok.value;
    bump();
    return neg ? -v : v;
  }

  Rat expect_rat() {
    long long num = expect_signed_int();
    if (tok.kind == Tok::Slash) {
      bump();
      long long den = expect_signed_int();
      if (den == 0) throw SyntaxError(tok.loc, "zero denominator");
      return Rat(num, den);
    }
    return Rat(num);
  }

  std::string expect_new_name() {
    if (tok.kind != Tok::Ident || is_keyword(tok.text))
      throw SyntaxError(tok.loc, "expected variable name");
    std::string n = tok.text;
    if (prog.pvar_index(n) >= 0 || prog.rvar_index(n) >= 0)
      throw SyntaxError(tok.loc, "variable '" + n + "' declared twice");
    bump();
    return n;
  }

  dist::DiscreteDist parse_dist() {
    if (at_kw("uniform")) {
      bump();
      expect(Tok::LParen, "'('");
      long long lo = expect_signed_int();
      expect(Tok::DotDot, "'..'");
      long long hi = expect_signed_int();
      expect(Tok::RParen, "')'");
      return dist::DiscreteDist::uniform_range(lo, hi);
    }
    if (at_kw("point")) {
      bump();
      expect(Tok::LParen, "'('");
      long long v = expect_signed_int();
      expect(Tok::RParen, "')'");
      return dist::DiscreteDist::point(v);
    }
    if (at_kw("two_sided_geometric")) {
      bump();
      expect(Tok::LParen, "'('");
      Rat p = expect_rat();
      expect(Tok::RParen, "')'");
      return dist::DiscreteDist::two_sided_geometric(p);
    }
    if (at_kw("table")) {
      bump();
      expect(Tok::LBrace, "'{'");
      std::vector<std::pair<long long, Rat>> entries;
      for (;;) {
        long long v = expect_signed_int();
        expect(Tok::Colon, "':'");
        entries.emplace_back(v, expect_rat());
        if (tok.kind == Tok::Comma) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::RBrace, "'}'");
      return dist::DiscreteDist::finite(std::move(entries));
    }
    throw SyntaxError(tok.loc, "expected distribution (uniform/table/point/two_sided_geometric)");
  }

  void parse_header() {
    for (;;) {
      if (at_kw("pvar")) {
        bump();
        prog.pvars.push_back(expect_new_name());
        expect(Tok::Semi, "';'");
      } else if (at_kw("rvar")) {
        bump();
        std::string n = expect_new_name();
        expect(Tok::Tilde, "'~'");
        dist::DiscreteDist d = parse_dist();
        expect(Tok::Semi, "';'");
        prog.rvars.push_back(n);
        prog.sampling.names.push_back(n);
        prog.sampling.dists.push_back(std::move(d));
      } else
        break;
    }
  }

  // ---- update expressions -------------------------------------------------

  // factor := INT | IDENT | isqrt '(' IDENT ')'
  // A term multiplies factors and must collapse to one of the legal shapes.
  Term parse_term(bool negate) {
    Term t;
    t.coeff = negate ? -1 : 1;
    bool any = false;
    for (;;) {
      SourceLoc at = tok.loc;
      if (tok.kind == Tok::Int) {
        t.coeff *= tok.value;
        bump();
      } else if (at_kw("isqrt")) {
        bump();
        expect(Tok::LParen, "'('");
        if (tok.kind != Tok::Ident) throw SyntaxError(tok.loc, "expected variable inside isqrt");
        int p = prog.pvar_index(tok.text);
        if (p < 0)
          throw UndeclaredVariable(tok.loc, tok.text, "isqrt takes a program variable");
        if (t.isqrt_pvar >= 0) throw SyntaxError(at, "at most one isqrt factor per term");
        t.isqrt_pvar = p;
        bump();
        expect(Tok::RParen, "')'");
      } else if (tok.kind == Tok::Ident && !is_keyword(tok.text)) {
        int p = prog.pvar_index(tok.text);
        int r = prog.rvar_index(tok.text);
        if (p < 0 && r < 0) throw UndeclaredVariable(tok.loc, tok.text);
        if (p >= 0) {
          if (t.pvar >= 0 || t.rvar >= 0 || t.isqrt_pvar >= 0)
            throw SyntaxError(at, "term may contain at most one program variable and no mixing with sampling factors");
          t.pvar = p;
        } else {
          if (t.rvar >= 0 || t.pvar >= 0)
            throw SyntaxError(at, "term may contain at most one sampling variable");
          t.rvar = r;
        }
        bump();
      } else
        throw SyntaxError(tok.loc, "expected term factor");
      any = true;
      if (tok.kind == Tok::Star) {
        bump();
        continue;
      }
      break;
    }
    if (!any) throw SyntaxError(tok.loc, "expected term");
    if (t.isqrt_pvar >= 0 && t.rvar < 0)
      throw SyntaxError(tok.loc, "isqrt factors are only allowed in sampling-variable terms");
    return t;
  }

  Expr parse_expr() {
    Expr e;
    bool neg = false;
    if (tok.kind == Tok::Minus) {
      neg = true;
      bump();
    }
    e.terms.push_back(parse_term(neg));
    while (tok.kind == Tok::Plus || tok.kind == Tok::Minus) {
      bool n = tok.kind == Tok::Minus;
      bump();
      e.terms.push_back(parse_term(n));
    }
    return e;
  }

  // ---- guard polynomials (program variables only, degree <= 2) ------------

  Poly parse_poly_factor() {
    if (tok.kind == Tok::Int) {
      Poly p = Poly::constant(tok.value);
      bump();
      return p;
    }
    if (tok.kind == Tok::Ident && !is_keyword(tok.text)) {
      int p = prog.pvar_index(tok.text);
      if (p < 0) {
        if (prog.rvar_index(tok.text) >= 0)
          throw UndeclaredVariable(tok.loc, tok.text, "sampling variables cannot appear in guards");
        throw UndeclaredVariable(tok.loc, tok.text);
      }
      bump();
      return Poly::var(p);
    }
    throw SyntaxError(tok.loc, "expected guard polynomial factor");
  }

  Poly parse_poly_term(bool negate) {
    SourceLoc at = tok.loc;
    Poly p = parse_poly_factor();
    while (tok.kind == Tok::Star) {
      bump();
      try {
        p = p * parse_poly_factor();
      } catch (const std::domain_error& e) {
        throw SyntaxError(at, e.what());
      }
    }
    return negate ? -p : p;
  }

  Poly parse_poly() {
    bool neg = false;
    if (tok.kind == Tok::Minus) {
      neg = true;
      bump();
    }
    Poly p = parse_poly_term(neg);
    while (tok.kind == Tok::Plus || tok.kind == Tok::Minus) {
      bool n = tok.kind == Tok::Minus;
      bump();
      p = p + parse_poly_term(n);
    }
    return p;
  }

  Guard parse_literal() {
    Poly lhs = parse_poly();
    Tok rel = tok.kind;
    if (rel != Tok::Le && rel != Tok::Ge && rel != Tok::Lt && rel != Tok::Gt)
      throw SyntaxError(tok.loc, "expected comparison (<=, >=, <, >)");
    bump();
    Poly rhs = parse_poly();
    // Normalize everything to p >= 0 over the integers; strict comparisons
    // tighten by one.
    switch (rel) {
      case Tok::Ge: return Guard::literal(lhs - rhs);
      case Tok::Le: return Guard::literal(rhs - lhs);
      case Tok::Gt: return Guard::literal(lhs - rhs - Poly::constant(1));
      default:      return Guard::literal(rhs - lhs - Poly::constant(1));
    }
  }

  Guard parse_guard_factor() {
    if (at_kw("not")) {
      bump();
      return parse_guard_factor().negated();
    }
    if (tok.kind == Tok::LParen) {
      bump();
      Guard g = parse_guard();
      expect(Tok::RParen, "')'");
      return g;
    }
    return parse_literal();
  }

  Guard parse_guard_conj() {
    std::vector<Guard> ks;
    ks.push_back(parse_guard_factor());
    while (at_kw("and")) {
      bump();
      ks.push_back(parse_guard_factor());
    }
    return Guard::conj(std::move(ks));
  }

  Guard parse_guard() {
    std::vector<Guard> ks;
    ks.push_back(parse_guard_conj());
    while (at_kw("or")) {
      bump();
      ks.push_back(parse_guard_conj());
    }
    return Guard::disj(std::move(ks));
  }

  // ---- statements ---------------------------------------------------------

  StmtPtr parse_base_stmt() {
    SourceLoc at = tok.loc;
    if (at_kw("skip")) {
      bump();
      return Stmt::skip(at);
    }
    if (at_kw("if")) {
      bump();
      Guard g = parse_guard();
      expect_kw("then");
      StmtPtr t = parse_stmt();
      expect_kw("else");
      StmtPtr e = parse_stmt();
      expect_kw("fi");
      return Stmt::ifelse(std::move(g), std::move(t), std::move(e), at);
    }
    if (at_kw("while")) {
      bump();
      Guard g = parse_guard();
      expect_kw("do");
      StmtPtr body = parse_stmt();
      expect_kw("od");
      return Stmt::loop(std::move(g), std::move(body), at);
    }
    if (tok.kind == Tok::Ident && !is_keyword(tok.text)) {
      int p = prog.pvar_index(tok.text);
      if (p < 0) {
        if (prog.rvar_index(tok.text) >= 0)
          throw UndeclaredVariable(tok.loc, tok.text, "sampling variables cannot be assigned");
        throw UndeclaredVariable(tok.loc, tok.text);
      }
      bump();
      expect(Tok::Assign, "':='");
      return Stmt::assign(p, parse_expr(), at);
    }
    throw SyntaxError(tok.loc, "expected statement");
  }

  StmtPtr parse_stmt() {
    StmtPtr s = parse_base_stmt();
    while (tok.kind == Tok::Semi) {
      bump();
      s = Stmt::seq(std::move(s), parse_base_stmt());
    }
    return s;
  }

  Program run(const std::string& source_name) {
    prog.source_name = source_name;
    parse_header();
    prog.body = parse_stmt();
    if (tok.kind != Tok::End) throw SyntaxError(tok.loc, "expected end of input");
    return std::move(prog);
  }
};

} // namespace

Program parse_program(const std::string& text, const std::string& source_name) {
  Parser p(text);
  return p.run(source_name);
}

Program parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), path);
}

} // namespace astprove::lang
