#include "fglchern/dsl.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "fglchern/chern.hpp"
#include "fglchern/fgl.hpp"
#include "fglchern/gysin.hpp"
#include "fglchern/rational.hpp"
#include "fglchern/ring.hpp"
#include "fglchern/rr.hpp"

namespace fglchern::dsl {

// ---------------------------------------------------------------------------
// Tree equality (source positions excluded, so a reparse of rendered text
// compares equal to the original tree)

bool Expr::operator==(const Expr& rhs) const {
  return kind == rhs.kind && num == rhs.num && den == rhs.den && name == rhs.name &&
         exponent == rhs.exponent && args == rhs.args;
}

bool GenDecl::operator==(const GenDecl& rhs) const {
  return name == rhs.name && degree == rhs.degree && nilpotency == rhs.nilpotency;
}

bool Stmt::operator==(const Stmt& rhs) const {
  return kind == rhs.kind && name == rhs.name && gens == rhs.gens && cap == rhs.cap &&
         sub == rhs.sub && plus_roots == rhs.plus_roots &&
         minus_roots == rhs.minus_roots && args == rhs.args && scalars == rhs.scalars;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident,
  Int,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Equals,
  Colon,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  End,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  long long value = 0;
  int line = 1, col = 1;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::Ident:
      return "identifier '" + t.text + "'";
    case Tok::Int:
      return "integer '" + t.text + "'";
    case Tok::End:
      return "end of input";
    default:
      return "'" + t.text + "'";
  }
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (ch == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    int l = line, c = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                src[i] == '_')) {
        word.push_back(src[i]);
        ++i;
        ++col;
      }
      out.push_back({Tok::Ident, std::move(word), 0, l, c});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string digits;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits.push_back(src[i]);
        ++i;
        ++col;
      }
      if (digits.size() > 18) throw ParseError(l, c, "integer literal too large");
      out.push_back({Tok::Int, digits, std::stoll(digits), l, c});
      continue;
    }
    Tok type;
    switch (ch) {
      case '[': type = Tok::LBracket; break;
      case ']': type = Tok::RBracket; break;
      case '(': type = Tok::LParen; break;
      case ')': type = Tok::RParen; break;
      case ',': type = Tok::Comma; break;
      case '=': type = Tok::Equals; break;
      case ':': type = Tok::Colon; break;
      case '+': type = Tok::Plus; break;
      case '-': type = Tok::Minus; break;
      case '*': type = Tok::Star; break;
      case '/': type = Tok::Slash; break;
      case '^': type = Tok::Caret; break;
      default:
        throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
    }
    out.push_back({type, std::string(1, ch), 0, l, c});
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", 0, line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Registries

const std::map<std::string, int>& call_registry() {
  static const std::map<std::string, int> reg = {
      {"c1tensor", 3}, {"nseries", 3}, {"euler", 1},  {"thom", 1}, {"todd", 2},
      {"push_p1", 2},  {"push_pn", 3}, {"fsum", 3},   {"finv", 2}};
  return reg;
}

const std::map<std::string, int>& check_registry() {
  static const std::map<std::string, int> reg = {
      {"fgl_axioms", 1}, {"eq", 2}, {"key_lemma", 2}};
  return reg;
}

bool reserved_word(const std::string& w) {
  static const std::set<std::string> words = {
      "ring",       "fgl",          "bundle",    "let",         "check",
      "morphism",   "cap",          "deg",       "nilp",        "additive",
      "multiplicative", "universal", "exponential", "identity", "conjugate",
      "series"};
  return words.count(w) > 0;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Script parse_script() {
    Script s;
    while (!at(Tok::End)) s.statements.push_back(parse_stmt());
    return s;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok t) const { return cur().type == t; }
  bool at_word(const char* w) const { return at(Tok::Ident) && cur().text == w; }
  Token take() { return toks_[pos_++]; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::vector<std::string>& expected) const {
    std::string msg = "unexpected " + describe(cur());
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t k = 0; k < expected.size(); ++k) {
        if (k > 0) msg += (k + 1 == expected.size()) ? " or " : ", ";
        msg += expected[k];
      }
    }
    throw ParseError(cur().line, cur().col, msg);
  }

  Token expect(Tok t, const std::string& what) {
    if (!at(t)) fail({what});
    return take();
  }

  Token expect_word(const char* w) {
    if (!at_word(w)) fail({std::string("'") + w + "'"});
    return take();
  }

  int parse_signed_int(const char* what, long long lo, long long hi) {
    bool negate = accept(Tok::Minus);
    Token t = expect(Tok::Int, "integer");
    long long v = negate ? -t.value : t.value;
    if (v < lo || v > hi)
      throw ParseError(t.line, t.col, std::string(what) + " out of range");
    return static_cast<int>(v);
  }

  Stmt parse_stmt() {
    static const std::vector<std::string> starters = {
        "'ring'", "'fgl'", "'bundle'", "'let'", "'check'", "'morphism'"};
    if (!at(Tok::Ident)) fail(starters);
    const std::string& kw = cur().text;
    if (kw == "ring") return parse_ring();
    if (kw == "fgl") return parse_fgl();
    if (kw == "bundle") return parse_bundle();
    if (kw == "let") return parse_let();
    if (kw == "check") return parse_check();
    if (kw == "morphism") return parse_morphism();
    fail(starters);
  }

  Stmt start_stmt(Stmt::Kind kind) {
    Token kw = take();
    Stmt s;
    s.kind = kind;
    s.line = kw.line;
    s.col = kw.col;
    s.name = expect(Tok::Ident, "identifier").text;
    return s;
  }

  Stmt parse_ring() {
    Stmt s = start_stmt(Stmt::Kind::Ring);
    expect(Tok::LBracket, "'['");
    for (;;) {
      GenDecl g;
      Token nameTok = expect(Tok::Ident, "identifier");
      g.name = nameTok.text;
      g.line = nameTok.line;
      g.col = nameTok.col;
      expect(Tok::Colon, "':'");
      expect_word("deg");
      g.degree = parse_signed_int("generator degree", -64, 64);
      if (g.degree == 0)
        throw ParseError(nameTok.line, nameTok.col, "generator degree must be nonzero");
      bool had_nilp = false;
      if (at_word("nilp")) {
        take();
        Token n = expect(Tok::Int, "integer");
        if (n.value < 2) throw ParseError(n.line, n.col, "nilpotency must be at least 2");
        if (n.value > 65535) throw ParseError(n.line, n.col, "nilpotency out of range");
        g.nilpotency = static_cast<int>(n.value);
        had_nilp = true;
      }
      s.gens.push_back(std::move(g));
      if (accept(Tok::Comma)) continue;
      if (accept(Tok::RBracket)) break;
      if (had_nilp)
        fail({"','", "']'"});
      else
        fail({"'nilp'", "','", "']'"});
    }
    expect_word("cap");
    Token capTok = expect(Tok::Int, "integer");
    if (capTok.value < 1 || capTok.value > 64)
      throw ParseError(capTok.line, capTok.col, "cap must be between 1 and 64");
    s.cap = static_cast<int>(capTok.value);
    return s;
  }

  Stmt parse_fgl() {
    Stmt s = start_stmt(Stmt::Kind::Fgl);
    expect(Tok::Equals, "'='");
    static const std::vector<std::string> forms = {"'additive'", "'multiplicative'",
                                                   "'universal'"};
    if (!at(Tok::Ident)) fail(forms);
    std::string w = cur().text;
    if (w == "additive" || w == "universal") {
      take();
      s.sub = w;
    } else if (w == "multiplicative") {
      take();
      s.sub = w;
      expect(Tok::LParen, "'('");
      s.args.push_back(parse_expr());
      expect(Tok::RParen, "')'");
    } else {
      fail(forms);
    }
    return s;
  }

  std::vector<Expr> parse_root_list() {
    expect(Tok::LBracket, "'['");
    std::vector<Expr> roots;
    if (accept(Tok::RBracket)) return roots;
    for (;;) {
      roots.push_back(parse_expr());
      if (accept(Tok::Comma)) continue;
      if (accept(Tok::RBracket)) break;
      fail({"','", "']'"});
    }
    return roots;
  }

  Stmt parse_bundle() {
    Stmt s = start_stmt(Stmt::Kind::Bundle);
    expect(Tok::Equals, "'='");
    s.plus_roots = parse_root_list();
    if (accept(Tok::Minus)) s.minus_roots = parse_root_list();
    return s;
  }

  Stmt parse_let() {
    Stmt s = start_stmt(Stmt::Kind::Let);
    expect(Tok::Equals, "'='");
    s.args.push_back(parse_expr());
    return s;
  }

  Stmt parse_check() {
    Stmt s = start_stmt(Stmt::Kind::Check);
    expect(Tok::LParen, "'('");
    if (accept(Tok::RParen)) return s;
    for (;;) {
      s.args.push_back(parse_expr());
      if (accept(Tok::Comma)) continue;
      if (accept(Tok::RParen)) break;
      fail({"','", "')'"});
    }
    return s;
  }

  Expr parse_name_ref() {
    Token t = expect(Tok::Ident, "identifier");
    Expr e;
    e.kind = Expr::Kind::Name;
    e.name = t.text;
    e.line = t.line;
    e.col = t.col;
    return e;
  }

  Expr parse_scalar() {
    bool negate = accept(Tok::Minus);
    Token t = expect(Tok::Int, "integer");
    Expr e;
    e.kind = Expr::Kind::Number;
    e.num = negate ? -t.value : t.value;
    e.line = t.line;
    e.col = t.col;
    if (accept(Tok::Slash)) {
      Token d = expect(Tok::Int, "integer");
      if (d.value == 0) throw ParseError(d.line, d.col, "zero denominator");
      e.den = d.value;
    }
    return e;
  }

  std::vector<Expr> parse_scalar_list() {
    expect(Tok::LBracket, "'['");
    std::vector<Expr> scalars;
    if (accept(Tok::RBracket)) return scalars;
    for (;;) {
      scalars.push_back(parse_scalar());
      if (accept(Tok::Comma)) continue;
      if (accept(Tok::RBracket)) break;
      fail({"','", "']'"});
    }
    return scalars;
  }

  Stmt parse_morphism() {
    Stmt s = start_stmt(Stmt::Kind::Morphism);
    expect(Tok::Equals, "'='");
    static const std::vector<std::string> forms = {"'exponential'", "'identity'",
                                                   "'conjugate'", "'series'"};
    if (!at(Tok::Ident)) fail(forms);
    std::string w = cur().text;
    if (w == "exponential") {
      take();
      s.sub = w;
    } else if (w == "identity") {
      take();
      s.sub = w;
      expect(Tok::LParen, "'('");
      s.args.push_back(parse_name_ref());
      expect(Tok::RParen, "')'");
    } else if (w == "conjugate") {
      take();
      s.sub = w;
      expect(Tok::LParen, "'('");
      s.args.push_back(parse_name_ref());
      expect(Tok::Comma, "','");
      s.scalars = parse_scalar_list();
      expect(Tok::RParen, "')'");
    } else if (w == "series") {
      take();
      s.sub = w;
      expect(Tok::LParen, "'('");
      s.args.push_back(parse_name_ref());
      expect(Tok::Comma, "','");
      s.args.push_back(parse_name_ref());
      expect(Tok::Comma, "','");
      s.scalars = parse_scalar_list();
      expect(Tok::RParen, "')'");
    } else {
      fail(forms);
    }
    return s;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Token op = take();
      Expr rhs = parse_term();
      Expr node;
      node.kind = op.type == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      node.line = op.line;
      node.col = op.col;
      node.args.push_back(std::move(lhs));
      node.args.push_back(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (at(Tok::Star)) {
      Token op = take();
      Expr rhs = parse_unary();
      Expr node;
      node.kind = Expr::Kind::Mul;
      node.line = op.line;
      node.col = op.col;
      node.args.push_back(std::move(lhs));
      node.args.push_back(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (at(Tok::Minus)) {
      Token m = take();
      Expr kid = parse_unary();
      if (kid.kind == Expr::Kind::Number) {  // fold "-3" into one literal
        kid.num = -kid.num;
        kid.line = m.line;
        kid.col = m.col;
        return kid;
      }
      Expr node;
      node.kind = Expr::Kind::Neg;
      node.line = m.line;
      node.col = m.col;
      node.args.push_back(std::move(kid));
      return node;
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr base = parse_atom();
    if (at(Tok::Caret)) {
      Token c = take();
      Token e = expect(Tok::Int, "integer");
      if (e.value > 10000) throw ParseError(e.line, e.col, "exponent out of range");
      Expr node;
      node.kind = Expr::Kind::Pow;
      node.exponent = static_cast<unsigned>(e.value);
      node.line = c.line;
      node.col = c.col;
      node.args.push_back(std::move(base));
      return node;
    }
    return base;
  }

  Expr parse_atom() {
    if (at(Tok::Int)) {
      Token t = take();
      Expr e;
      e.kind = Expr::Kind::Number;
      e.num = t.value;
      e.line = t.line;
      e.col = t.col;
      if (at(Tok::Slash)) {
        take();
        Token d = expect(Tok::Int, "integer");
        if (d.value == 0) throw ParseError(d.line, d.col, "zero denominator");
        e.den = d.value;
      }
      return e;
    }
    if (at(Tok::Ident)) {
      Token t = take();
      if (accept(Tok::LParen)) {
        Expr call;
        call.kind = Expr::Kind::Call;
        call.name = t.text;
        call.line = t.line;
        call.col = t.col;
        if (accept(Tok::RParen)) return call;
        for (;;) {
          call.args.push_back(parse_expr());
          if (accept(Tok::Comma)) continue;
          if (accept(Tok::RParen)) break;
          fail({"','", "')'"});
        }
        return call;
      }
      Expr e;
      e.kind = Expr::Kind::Name;
      e.name = t.text;
      e.line = t.line;
      e.col = t.col;
      return e;
    }
    if (at(Tok::LParen)) {
      take();
      Expr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail({"integer", "identifier", "'('"});
  }
};

// ---------------------------------------------------------------------------
// Binder: declared-before-use, single assignment, known calls and checks

class Binder {
 public:
  void bind(const Script& s) {
    for (const auto& st : s.statements) bind_stmt(st);
  }

 private:
  std::set<std::string> declared_;

  void declare(const std::string& name, int line, int col) {
    if (reserved_word(name))
      throw ParseError(line, col, "'" + name + "' is a reserved word");
    if (!declared_.insert(name).second)
      throw ParseError(line, col, "name '" + name + "' is already declared");
  }

  void visit(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Number:
        return;
      case Expr::Kind::Name:
        if (!declared_.count(e.name))
          throw ParseError(e.line, e.col, "name '" + e.name + "' is not declared");
        return;
      case Expr::Kind::Call: {
        auto it = call_registry().find(e.name);
        if (it == call_registry().end())
          throw ParseError(e.line, e.col, "unknown call '" + e.name + "'");
        if (static_cast<int>(e.args.size()) != it->second)
          throw ParseError(e.line, e.col,
                           "call '" + e.name + "' takes " +
                               std::to_string(it->second) + " argument(s)");
        for (const auto& a : e.args) visit(a);
        return;
      }
      default:
        for (const auto& a : e.args) visit(a);
        return;
    }
  }

  void bind_stmt(const Stmt& st) {
    switch (st.kind) {
      case Stmt::Kind::Ring:
        declare(st.name, st.line, st.col);
        for (const auto& g : st.gens) declare(g.name, g.line, g.col);
        return;
      case Stmt::Kind::Fgl:
        for (const auto& a : st.args) visit(a);
        declare(st.name, st.line, st.col);
        return;
      case Stmt::Kind::Bundle:
        for (const auto& r : st.plus_roots) visit(r);
        for (const auto& r : st.minus_roots) visit(r);
        declare(st.name, st.line, st.col);
        return;
      case Stmt::Kind::Let:
        visit(st.args[0]);
        declare(st.name, st.line, st.col);
        return;
      case Stmt::Kind::Check: {
        auto it = check_registry().find(st.name);
        if (it == check_registry().end())
          throw ParseError(st.line, st.col, "unknown check '" + st.name + "'");
        if (static_cast<int>(st.args.size()) != it->second)
          throw ParseError(st.line, st.col,
                           "check '" + st.name + "' takes " +
                               std::to_string(it->second) + " argument(s)");
        for (const auto& a : st.args) visit(a);
        return;
      }
      case Stmt::Kind::Morphism:
        for (const auto& a : st.args) visit(a);
        declare(st.name, st.line, st.col);
        return;
    }
  }
};

// ---------------------------------------------------------------------------
// Renderer

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Number:
      return e.num < 0 ? 3 : 5;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void render_expr_to(std::string& out, const Expr& e, int min_prec) {
  bool parens = precedence(e) < min_prec;
  if (parens) out += "(";
  switch (e.kind) {
    case Expr::Kind::Number:
      out += std::to_string(e.num);
      if (e.den != 1) out += "/" + std::to_string(e.den);
      break;
    case Expr::Kind::Name:
      out += e.name;
      break;
    case Expr::Kind::Call:
      out += e.name + "(";
      for (std::size_t k = 0; k < e.args.size(); ++k) {
        if (k > 0) out += ", ";
        render_expr_to(out, e.args[k], 1);
      }
      out += ")";
      break;
    case Expr::Kind::Add:
      render_expr_to(out, e.args[0], 1);
      out += " + ";
      render_expr_to(out, e.args[1], 2);
      break;
    case Expr::Kind::Sub:
      render_expr_to(out, e.args[0], 1);
      out += " - ";
      render_expr_to(out, e.args[1], 2);
      break;
    case Expr::Kind::Mul:
      render_expr_to(out, e.args[0], 2);
      out += "*";
      render_expr_to(out, e.args[1], 3);
      break;
    case Expr::Kind::Neg:
      out += "-";
      render_expr_to(out, e.args[0], 4);
      break;
    case Expr::Kind::Pow:
      render_expr_to(out, e.args[0], 5);
      out += "^" + std::to_string(e.exponent);
      break;
  }
  if (parens) out += ")";
}

std::string join_exprs(const std::vector<Expr>& list) {
  std::string out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (k > 0) out += ", ";
    render_expr_to(out, list[k], 1);
  }
  return out;
}

}  // namespace

std::string render(const Expr& expr) {
  std::string out;
  render_expr_to(out, expr, 0);
  return out;
}

std::string render(const Stmt& stmt) {
  switch (stmt.kind) {
    case Stmt::Kind::Ring: {
      std::string out = "ring " + stmt.name + "[";
      for (std::size_t k = 0; k < stmt.gens.size(); ++k) {
        const GenDecl& g = stmt.gens[k];
        if (k > 0) out += ", ";
        out += g.name + ": deg " + std::to_string(g.degree);
        if (g.nilpotency != 0) out += " nilp " + std::to_string(g.nilpotency);
      }
      return out + "] cap " + std::to_string(stmt.cap);
    }
    case Stmt::Kind::Fgl:
      if (stmt.sub == "multiplicative")
        return "fgl " + stmt.name + " = multiplicative(" + render(stmt.args[0]) + ")";
      return "fgl " + stmt.name + " = " + stmt.sub;
    case Stmt::Kind::Bundle: {
      std::string out = "bundle " + stmt.name + " = [" + join_exprs(stmt.plus_roots) + "]";
      if (!stmt.minus_roots.empty()) out += " - [" + join_exprs(stmt.minus_roots) + "]";
      return out;
    }
    case Stmt::Kind::Let:
      return "let " + stmt.name + " = " + render(stmt.args[0]);
    case Stmt::Kind::Check:
      return "check " + stmt.name + "(" + join_exprs(stmt.args) + ")";
    case Stmt::Kind::Morphism: {
      std::string out = "morphism " + stmt.name + " = " + stmt.sub;
      if (stmt.sub == "identity") {
        out += "(" + stmt.args[0].name + ")";
      } else if (stmt.sub == "conjugate") {
        out += "(" + stmt.args[0].name + ", [" + join_exprs(stmt.scalars) + "])";
      } else if (stmt.sub == "series") {
        out += "(" + stmt.args[0].name + ", " + stmt.args[1].name + ", [" +
               join_exprs(stmt.scalars) + "])";
      }
      return out;
    }
  }
  return "";
}

std::string render(const Script& script) {
  std::string out;
  for (const auto& st : script.statements) out += render(st) + "\n";
  return out;
}

Script parse(const std::string& source) {
  Parser parser(lex(source));
  Script script = parser.parse_script();
  Binder().bind(script);
  return script;
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

using Value = std::variant<Rational, RingElement, RingPtr, FormalGroupLaw,
                           VirtualBundle, OrientationMorphism>;

std::string kind_name(const Value& v) {
  switch (v.index()) {
    case 0:
      return "a scalar";
    case 1:
      return "a ring element";
    case 2:
      return "a ring";
    case 3:
      return "a formal group law";
    case 4:
      return "a bundle";
    default:
      return "a morphism";
  }
}

const FormalGroupLaw& as_law(const Value& v, const std::string& ctx) {
  if (const auto* p = std::get_if<FormalGroupLaw>(&v)) return *p;
  throw Error(ctx + " must be a formal group law, not " + kind_name(v));
}

const VirtualBundle& as_bundle(const Value& v, const std::string& ctx) {
  if (const auto* p = std::get_if<VirtualBundle>(&v)) return *p;
  throw Error(ctx + " must be a bundle, not " + kind_name(v));
}

const OrientationMorphism& as_morphism(const Value& v, const std::string& ctx) {
  if (const auto* p = std::get_if<OrientationMorphism>(&v)) return *p;
  throw Error(ctx + " must be a morphism, not " + kind_name(v));
}

const RingElement& as_element(const Value& v, const std::string& ctx) {
  if (const auto* p = std::get_if<RingElement>(&v)) return *p;
  throw Error(ctx + " must be a ring element, not " + kind_name(v));
}

long as_integer(const Value& v, const std::string& ctx) {
  if (const auto* q = std::get_if<Rational>(&v)) {
    if (is_integer(*q) && q->get_num().fits_slong_p()) return q->get_num().get_si();
  } else if (const auto* e = std::get_if<RingElement>(&v)) {
    Rational c = e->is_constant() ? e->constant_term() : Rational(0);
    if (e->is_constant() && is_integer(c) && c.get_num().fits_slong_p())
      return c.get_num().get_si();
  }
  throw Error(ctx + " must be an integer");
}

/// Lifts two elements into a common ring (one ring must structurally extend
/// the other with a cap at least as large).
std::pair<RingElement, RingElement> unify(const RingElement& a, const RingElement& b) {
  if (a.ring() == b.ring()) return {a, b};
  if (a.ring()->is_prefix_of(*b.ring()) &&
      b.ring()->degree_cap() >= a.ring()->degree_cap())
    return {a.lifted(b.ring()), b};
  if (b.ring()->is_prefix_of(*a.ring()) &&
      a.ring()->degree_cap() >= b.ring()->degree_cap())
    return {a, b.lifted(a.ring())};
  throw Error("the operands live in unrelated rings");
}

Value arith(char op, const Value& va, const Value& vb) {
  const auto* qa = std::get_if<Rational>(&va);
  const auto* qb = std::get_if<Rational>(&vb);
  if (qa && qb) {
    switch (op) {
      case '+':
        return Value(Rational(*qa + *qb));
      case '-':
        return Value(Rational(*qa - *qb));
      default:
        return Value(Rational(*qa * *qb));
    }
  }
  const auto* ea = std::get_if<RingElement>(&va);
  const auto* eb = std::get_if<RingElement>(&vb);
  RingElement a, b;
  if (ea && eb) {
    std::tie(a, b) = unify(*ea, *eb);
  } else if (ea && qb) {
    a = *ea;
    b = RingElement::constant(ea->ring(), *qb);
  } else if (qa && eb) {
    a = RingElement::constant(eb->ring(), *qa);
    b = *eb;
  } else {
    throw Error(std::string("'") + op + "' needs scalars or ring elements, got " +
                kind_name(ea || qa ? vb : va));
  }
  switch (op) {
    case '+':
      return Value(a + b);
    case '-':
      return Value(a - b);
    default:
      return Value(a * b);
  }
}

Rational rational_pow(const Rational& base, unsigned e) {
  Rational r(1);
  for (unsigned k = 0; k < e; ++k) r *= base;
  return r;
}

/// Re-bases a law over a generator-free coefficient ring to another degree
/// cap. Truncation downward is exact for every table; extension upward is
/// exact only for the complete additive and multiplicative tables.
FormalGroupLaw law_at_cap(const FormalGroupLaw& F, int cap) {
  if (F.coeff_ring->size() != 0 || cap == F.cap()) return F;
  if (cap > F.cap() && F.kind != "additive" && F.kind != "multiplicative")
    throw Error("the law is truncated at cap " + std::to_string(F.cap()) +
                ", below the working ring's cap " + std::to_string(cap));
  RingPtr nr = GradedRing::create(
      {}, {cap, F.coeff_ring->integer_only(), F.coeff_ring->strict_degree()});
  std::map<std::pair<int, int>, RingElement> table;
  for (const auto& [ij, entry] : F.table)
    if (ij.first + ij.second <= cap)
      table.emplace(ij, RingElement::constant(nr, entry.constant_term()));
  return fgl_custom(nr, std::move(table), F.kind);
}

/// Laws over generator-free coefficient rings re-base to the working cap;
/// a law whose coefficients involve ring generators (multiplicative over an
/// element, or the universal law) needs the working ring to extend its
/// coefficient ring so the table can be lifted.
FormalGroupLaw law_for(const FormalGroupLaw& F, const RingPtr& working) {
  if (F.coeff_ring->size() != 0 && F.coeff_ring != working &&
      !(F.coeff_ring->is_prefix_of(*working) &&
        working->degree_cap() >= F.coeff_ring->degree_cap()))
    throw Error("the law's coefficients do not embed in the element's ring");
  return law_at_cap(F, working->degree_cap());
}

/// Re-bases a morphism between laws over a generator-free coefficient ring
/// down to a smaller cap by truncating the tables and the series.
OrientationMorphism morphism_for(const OrientationMorphism& M, const RingPtr& working) {
  int cap = working->degree_cap();
  if (M.source.coeff_ring->size() != 0) {
    if (M.source.coeff_ring != working &&
        !(M.source.coeff_ring->is_prefix_of(*working) &&
          working->degree_cap() >= M.source.coeff_ring->degree_cap()))
      throw Error("the morphism's coefficients do not embed in the bundle's ring");
    return M;
  }
  if (cap == M.source.cap()) return M;
  if (cap > M.source.cap())
    throw Error("the morphism is truncated at cap " + std::to_string(M.source.cap()) +
                ", below the working ring's cap " + std::to_string(cap));
  RingPtr nr = GradedRing::create({}, {cap, M.source.coeff_ring->integer_only(),
                                       M.source.coeff_ring->strict_degree()});
  auto migrate = [&](const FormalGroupLaw& F) {
    std::map<std::pair<int, int>, RingElement> table;
    for (const auto& [ij, entry] : F.table)
      if (ij.first + ij.second <= cap)
        table.emplace(ij, RingElement::constant(nr, entry.constant_term()));
    return fgl_custom(nr, std::move(table), F.kind);
  };
  std::vector<RingElement> coeffs;
  for (int k = 0; k <= cap; ++k)
    coeffs.push_back(RingElement::constant(nr, M.psi[static_cast<std::size_t>(k)].constant_term()));
  return morphism_new(migrate(M.source), migrate(M.target),
                      PowerSeries::from_coeffs(nr, std::move(coeffs)));
}

struct EvalState {
  RunOptions opt;
  std::map<std::string, Value> env;
  std::map<std::pair<const GradedRing*, int>, ProjectiveBundle> spaces;
  std::map<std::string, ThomData> thoms;
  std::optional<FormalGroupLaw> universal;
};

std::string bundle_key(const VirtualBundle& v) {
  std::ostringstream os;
  os << v.ring.get();
  for (const auto& r : v.plus) os << "|+" << r.render();
  for (const auto& r : v.minus) os << "|-" << r.render();
  return os.str();
}

/// Rebuilds the trivial projective space a pushforward ran along: the
/// element's ring must end with a degree-1 generator of nilpotency n+1; the
/// prefix becomes the base. Memoized per (ring, n).
const ProjectiveBundle& space_over(EvalState& st, const RingPtr& ring, int n,
                                   const std::string& what) {
  auto key = std::make_pair(ring.get(), n);
  auto it = st.spaces.find(key);
  if (it != st.spaces.end()) return it->second;
  if (ring->size() == 0) throw Error(what + ": the element's ring has no generators");
  const Generator& last = ring->gen(ring->size() - 1);
  if (last.degree != 1 || last.nilpotency != n + 1)
    throw Error(what + ": the element's ring must end with a degree-1 generator of nilpotency " +
                std::to_string(n + 1));
  std::vector<Generator> base_gens(ring->gens().begin(), ring->gens().end() - 1);
  RingPtr base = GradedRing::create(
      std::move(base_gens),
      {ring->degree_cap(), ring->integer_only(), ring->strict_degree()},
      ring->quotient());
  ProjectiveBundle space = projective_space(base, n, last.name);
  if (space.total->size() != ring->size() || !ring->is_prefix_of(*space.total))
    throw Error(what + ": failed to rebuild the projective space");
  return st.spaces.emplace(key, std::move(space)).first->second;
}

Value eval_expr(EvalState& st, const Expr& e);

std::vector<Value> eval_args(EvalState& st, const std::vector<Expr>& args) {
  std::vector<Value> vals;
  vals.reserve(args.size());
  for (const auto& a : args) vals.push_back(eval_expr(st, a));
  return vals;
}

Value eval_call(EvalState& st, const Expr& e) {
  std::vector<Value> vals = eval_args(st, e.args);
  const std::string& f = e.name;
  if (f == "fsum") {
    const FormalGroupLaw& F = as_law(vals[0], "fsum: the first argument");
    auto [a, b] = unify(as_element(vals[1], "fsum: the second argument"),
                        as_element(vals[2], "fsum: the third argument"));
    return Value(formal_sum(law_for(F, a.ring()), a, b));
  }
  if (f == "finv") {
    const FormalGroupLaw& F = as_law(vals[0], "finv: the first argument");
    const RingElement& a = as_element(vals[1], "finv: the second argument");
    return Value(formal_inverse(law_for(F, a.ring()), a));
  }
  if (f == "nseries") {
    const FormalGroupLaw& F = as_law(vals[0], "nseries: the first argument");
    long n = as_integer(vals[1], "nseries: the second argument");
    const RingElement& a = as_element(vals[2], "nseries: the third argument");
    return Value(n_series(law_for(F, a.ring()), n, a));
  }
  if (f == "c1tensor") {
    const FormalGroupLaw& F = as_law(vals[0], "c1tensor: the first argument");
    auto [a, b] = unify(as_element(vals[1], "c1tensor: the second argument"),
                        as_element(vals[2], "c1tensor: the third argument"));
    return Value(c1_tensor(law_for(F, a.ring()), a, b));
  }
  if (f == "euler") {
    return Value(euler_class(as_bundle(vals[0], "euler: the argument")));
  }
  if (f == "thom") {
    const VirtualBundle& v = as_bundle(vals[0], "thom: the argument");
    std::string key = bundle_key(v);
    auto it = st.thoms.find(key);
    if (it == st.thoms.end())
      it = st.thoms.emplace(key, thom_class(v.ring, v)).first;
    return Value(it->second.cls);
  }
  if (f == "todd") {
    const OrientationMorphism& M = as_morphism(vals[0], "todd: the first argument");
    const VirtualBundle& v = as_bundle(vals[1], "todd: the second argument");
    return Value(todd_virtual(todd_new(morphism_for(M, v.ring)), v));
  }
  if (f == "push_p1") {
    const FormalGroupLaw& F = as_law(vals[0], "push_p1: the first argument");
    const RingElement& u = as_element(vals[1], "push_p1: the second argument");
    const ProjectiveBundle& space = space_over(st, u.ring(), 1, "push_p1");
    return Value(pushforward_p1(law_for(F, u.ring()), space, u.lifted(space.total)));
  }
  if (f == "push_pn") {
    const FormalGroupLaw& F = as_law(vals[0], "push_pn: the first argument");
    long n = as_integer(vals[1], "push_pn: the second argument");
    const RingElement& u = as_element(vals[2], "push_pn: the third argument");
    if (n < 1 || n > 3) throw Error("push_pn: n must be between 1 and 3");
    const ProjectiveBundle& space = space_over(st, u.ring(), static_cast<int>(n), "push_pn");
    return Value(pushforward_pn(law_for(F, u.ring()), space, u.lifted(space.total)));
  }
  throw Error("unknown call '" + f + "'");
}

Value eval_expr(EvalState& st, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return Value(rational(e.num, e.den));
    case Expr::Kind::Name:
      return st.env.at(e.name);
    case Expr::Kind::Call:
      return eval_call(st, e);
    case Expr::Kind::Add:
      return arith('+', eval_expr(st, e.args[0]), eval_expr(st, e.args[1]));
    case Expr::Kind::Sub:
      return arith('-', eval_expr(st, e.args[0]), eval_expr(st, e.args[1]));
    case Expr::Kind::Mul:
      return arith('*', eval_expr(st, e.args[0]), eval_expr(st, e.args[1]));
    case Expr::Kind::Neg: {
      Value v = eval_expr(st, e.args[0]);
      if (const auto* q = std::get_if<Rational>(&v)) return Value(Rational(-*q));
      if (const auto* el = std::get_if<RingElement>(&v)) return Value(-*el);
      throw Error("'-' needs a scalar or ring element, got " + kind_name(v));
    }
    case Expr::Kind::Pow: {
      Value v = eval_expr(st, e.args[0]);
      if (const auto* q = std::get_if<Rational>(&v))
        return Value(rational_pow(*q, e.exponent));
      if (const auto* el = std::get_if<RingElement>(&v))
        return Value(el->pow(e.exponent));
      throw Error("'^' needs a scalar or ring element, got " + kind_name(v));
    }
  }
  throw Error("malformed expression");
}

RingPtr common_root_ring(const std::vector<RingElement>& roots) {
  RingPtr target = roots[0].ring();
  for (const auto& el : roots) {
    if (el.ring() == target) continue;
    if (target->is_prefix_of(*el.ring()) &&
        el.ring()->degree_cap() >= target->degree_cap()) {
      target = el.ring();
      continue;
    }
    if (el.ring()->is_prefix_of(*target) &&
        target->degree_cap() >= el.ring()->degree_cap())
      continue;
    throw Error("bundle roots live in unrelated rings");
  }
  return target;
}

void eval_binding(EvalState& st, const Stmt& stmt) {
  switch (stmt.kind) {
    case Stmt::Kind::Ring: {
      std::vector<Generator> gens;
      for (const auto& g : stmt.gens) gens.push_back({g.name, g.degree, g.nilpotency});
      RingOptions opts;
      opts.degree_cap = stmt.cap;
      RingPtr r = GradedRing::create(std::move(gens), opts);
      st.env.emplace(stmt.name, Value(r));
      for (std::size_t i = 0; i < r->size(); ++i)
        st.env.emplace(r->gen(i).name, Value(RingElement::generator(r, i)));
      return;
    }
    case Stmt::Kind::Fgl: {
      if (stmt.sub == "additive") {
        st.env.emplace(stmt.name, Value(fgl_additive(st.opt.cap)));
      } else if (stmt.sub == "universal") {
        if (!st.universal) st.universal = fgl_universal(st.opt.cap);
        st.env.emplace(stmt.name, Value(*st.universal));
      } else {
        Value beta = eval_expr(st, stmt.args[0]);
        if (const auto* q = std::get_if<Rational>(&beta)) {
          RingOptions opts;
          opts.degree_cap = st.opt.cap;
          RingPtr r = GradedRing::create({}, opts);
          st.env.emplace(stmt.name, Value(fgl_multiplicative_over(
                                        r, RingElement::constant(r, *q))));
        } else if (const auto* el = std::get_if<RingElement>(&beta)) {
          st.env.emplace(stmt.name, Value(fgl_multiplicative_over(el->ring(), *el)));
        } else {
          throw Error("multiplicative: beta must be a scalar or a ring element, not " +
                      kind_name(beta));
        }
      }
      return;
    }
    case Stmt::Kind::Bundle: {
      std::vector<RingElement> plus, minus;
      for (const auto& r : stmt.plus_roots) {
        Value v = eval_expr(st, r);
        plus.push_back(as_element(v, "bundle roots"));
      }
      for (const auto& r : stmt.minus_roots) {
        Value v = eval_expr(st, r);
        minus.push_back(as_element(v, "bundle roots"));
      }
      std::vector<RingElement> all = plus;
      all.insert(all.end(), minus.begin(), minus.end());
      if (all.empty()) throw Error("a bundle needs at least one root to pin its ring");
      RingPtr target = common_root_ring(all);
      for (auto& r : plus) r = r.lifted(target);
      for (auto& r : minus) r = r.lifted(target);
      st.env.emplace(stmt.name,
                     Value(bundle_new(target, std::move(plus), std::move(minus))));
      return;
    }
    case Stmt::Kind::Let:
      st.env.emplace(stmt.name, eval_expr(st, stmt.args[0]));
      return;
    case Stmt::Kind::Morphism: {
      if (stmt.sub == "exponential") {
        st.env.emplace(stmt.name, Value(morphism_exponential(st.opt.cap)));
        return;
      }
      const FormalGroupLaw& F =
          as_law(st.env.at(stmt.args[0].name), "morphism: the first argument");
      if (stmt.sub == "identity") {
        st.env.emplace(stmt.name, Value(morphism_identity(F)));
        return;
      }
      std::vector<Rational> alphas;
      for (const auto& s : stmt.scalars) alphas.push_back(rational(s.num, s.den));
      if (stmt.sub == "conjugate") {
        st.env.emplace(stmt.name, Value(morphism_conjugate(F, alphas)));
        return;
      }
      // series(F, G, [alpha_2, ...]): psi = t + alpha_2 t^2 + ..., validated.
      const FormalGroupLaw& G =
          as_law(st.env.at(stmt.args[1].name), "morphism: the second argument");
      FormalGroupLaw SF = F, SG = G;
      if (F.coeff_ring != G.coeff_ring) {
        if (F.coeff_ring->size() != 0 || G.coeff_ring->size() != 0)
          throw Error("series: the two laws must share one coefficient ring");
        if (F.cap() != G.cap())
          throw Error("series: the two laws have different degree caps");
        RingPtr nr = GradedRing::create({}, {F.cap(), F.coeff_ring->integer_only(),
                                             F.coeff_ring->strict_degree()});
        auto migrate = [&](const FormalGroupLaw& L) {
          std::map<std::pair<int, int>, RingElement> table;
          for (const auto& [ij, entry] : L.table)
            table.emplace(ij, RingElement::constant(nr, entry.constant_term()));
          return fgl_custom(nr, std::move(table), L.kind);
        };
        SF = migrate(F);
        SG = migrate(G);
      }
      PowerSeries psi = PowerSeries::identity(SF.coeff_ring);
      for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (k + 2 < psi.length())
          psi.set(k + 2, RingElement::constant(SF.coeff_ring, alphas[k]));
      }
      st.env.emplace(stmt.name, Value(morphism_new(SF, SG, std::move(psi))));
      return;
    }
    case Stmt::Kind::Check:
      return;  // handled by the caller
  }
}

std::string stmt_label(const Stmt& stmt) {
  switch (stmt.kind) {
    case Stmt::Kind::Ring:
      return "ring " + stmt.name;
    case Stmt::Kind::Fgl:
      return "fgl " + stmt.name;
    case Stmt::Kind::Bundle:
      return "bundle " + stmt.name;
    case Stmt::Kind::Let:
      return "let " + stmt.name;
    case Stmt::Kind::Morphism:
      return "morphism " + stmt.name;
    case Stmt::Kind::Check:
      return "check " + stmt.name;
  }
  return stmt.name;
}

struct CheckOutcome {
  bool pass = false;
  std::string witness;
  int cap = 0;
};

CheckOutcome run_check(const std::string& name, const std::vector<Value>& vals,
                       int default_cap) {
  if (name == "fgl_axioms") {
    const FormalGroupLaw& F = as_law(vals[0], "fgl_axioms: the argument");
    AxiomReport rep = check_fgl_axioms(F);
    return {rep.ok(), rep.ok() ? std::string() : rep.witness, F.cap()};
  }
  if (name == "eq") {
    const auto* qa = std::get_if<Rational>(&vals[0]);
    const auto* qb = std::get_if<Rational>(&vals[1]);
    if (qa && qb) {
      bool pass = (*qa == *qb);
      return {pass, pass ? std::string() : to_string(Rational(*qa - *qb)), default_cap};
    }
    RingElement a, b;
    if (qa) {
      b = as_element(vals[1], "eq: the second argument");
      a = RingElement::constant(b.ring(), *qa);
    } else if (qb) {
      a = as_element(vals[0], "eq: the first argument");
      b = RingElement::constant(a.ring(), *qb);
    } else {
      std::tie(a, b) = unify(as_element(vals[0], "eq: the first argument"),
                             as_element(vals[1], "eq: the second argument"));
    }
    RingElement diff = a - b;
    bool pass = diff.is_zero();
    return {pass, pass ? std::string() : diff.render(), a.ring()->degree_cap()};
  }
  if (name == "key_lemma") {
    const FormalGroupLaw& F = as_law(vals[0], "key_lemma: the first argument");
    const VirtualBundle& v = as_bundle(vals[1], "key_lemma: the second argument");
    CheckResult res = key_lemma_check(law_for(F, v.ring), v);
    return {res.pass, res.witness, v.ring->degree_cap()};
  }
  throw Error("unknown check '" + name + "'");
}

}  // namespace

std::vector<Report> run_script(const Script& script, const RunOptions& options) {
  EvalState st;
  st.opt = options;
  std::vector<Report> reports;
  struct Pending {
    std::size_t slot;
    const Stmt* stmt;
    std::vector<Value> vals;
  };
  std::vector<Pending> pending;
  for (const Stmt& stmt : script.statements) {
    if (stmt.kind == Stmt::Kind::Check) {
      Report r;
      r.check = stmt.name;
      r.cap = options.cap;
      r.status = Report::Status::Fail;
      std::size_t slot = reports.size();
      try {
        std::vector<Value> vals = eval_args(st, stmt.args);
        reports.push_back(std::move(r));
        pending.push_back({slot, &stmt, std::move(vals)});
      } catch (const std::exception& ex) {
        r.witness = ex.what();
        reports.push_back(std::move(r));
      }
    } else {
      try {
        eval_binding(st, stmt);
      } catch (const std::exception& ex) {
        Report r;
        r.check = stmt_label(stmt);
        r.status = Report::Status::Fail;
        r.cap = options.cap;
        r.witness = ex.what();
        reports.push_back(std::move(r));
        return reports;  // later statements may depend on the failed binding
      }
    }
  }

  auto run_one = [&](Pending& p) {
    Report& r = reports[p.slot];
    auto t0 = std::chrono::steady_clock::now();
    try {
      CheckOutcome out = run_check(p.stmt->name, p.vals, options.cap);
      r.status = out.pass ? Report::Status::Pass : Report::Status::Fail;
      r.witness = out.witness;
      r.cap = out.cap;
    } catch (const std::exception& ex) {
      r.status = Report::Status::Fail;
      r.witness = ex.what();
    }
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  };

  std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  if (jobs <= 1 || pending.size() <= 1) {
    for (auto& p : pending) run_one(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::size_t n = std::min(jobs, pending.size());
    for (std::size_t t = 0; t < n; ++t) {
      workers.emplace_back([&] {
        for (;;) {
          std::size_t k = next.fetch_add(1);
          if (k >= pending.size()) return;
          run_one(pending[k]);
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  return reports;
}

}  // namespace fglchern::dsl
