#pragma once

#include <string>
#include <vector>

#include "fglchern/error.hpp"
#include "fglchern/report.hpp"

namespace fglchern::dsl {

/// Source-position error covering lexical, syntactic, and binding failures.
/// what() reads "line L, column C: <detail>".
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& detail)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(col) +
              ": " + detail),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Expression tree. Binary nodes keep their operands in args[0] and args[1];
/// Neg and Pow keep theirs in args[0]. Number holds num/den with den >= 1;
/// the parser folds a unary minus on a literal into the literal, so parsed
/// trees never contain Neg directly over Number.
struct Expr {
  enum class Kind { Number, Name, Call, Add, Sub, Mul, Neg, Pow };
  Kind kind = Kind::Number;
  long long num = 0;
  long long den = 1;
  std::string name;  // Name: the identifier; Call: the callee
  std::vector<Expr> args;
  unsigned exponent = 1;  // Pow
  int line = 1, col = 1;

  bool operator==(const Expr& rhs) const;
  bool operator!=(const Expr& rhs) const { return !(*this == rhs); }
};

struct GenDecl {
  std::string name;
  int degree = 1;
  int nilpotency = 0;  // 0 = unbounded
  int line = 1, col = 1;

  bool operator==(const GenDecl& rhs) const;
  bool operator!=(const GenDecl& rhs) const { return !(*this == rhs); }
};

/// One statement. Which fields are meaningful depends on `kind`:
///   Ring:     name, gens, cap
///   Fgl:      name, sub in {additive, multiplicative, universal};
///             args[0] = the multiplicative beta expression
///   Bundle:   name, plus_roots, minus_roots
///   Let:      name, args[0] = the value expression
///   Check:    name = the check's name, args
///   Morphism: name, sub in {exponential, identity, conjugate, series},
///             args = referenced law names (Name exprs), scalars = the
///             bracketed coefficient list (Number exprs)
struct Stmt {
  enum class Kind { Ring, Fgl, Bundle, Let, Check, Morphism };
  Kind kind = Kind::Let;
  std::string name;
  std::vector<GenDecl> gens;
  int cap = 0;
  std::string sub;
  std::vector<Expr> plus_roots;
  std::vector<Expr> minus_roots;
  std::vector<Expr> args;
  std::vector<Expr> scalars;
  int line = 1, col = 1;

  bool operator==(const Stmt& rhs) const;
  bool operator!=(const Stmt& rhs) const { return !(*this == rhs); }
};

struct Script {
  std::vector<Stmt> statements;

  bool operator==(const Script& rhs) const { return statements == rhs.statements; }
  bool operator!=(const Script& rhs) const { return !(*this == rhs); }
};

/// Tokenizes and parses a script, then binds it: every name must be declared
/// before use and assigned exactly once, reserved words cannot be declared,
/// and call/check names must be known with the right argument count. Throws
/// ParseError with the failing position.
Script parse(const std::string& source);

/// Canonical text. render(parse(s)) parses back to the same tree, and
/// rendering is idempotent on its own output.
std::string render(const Script& script);
std::string render(const Stmt& stmt);
std::string render(const Expr& expr);

struct RunOptions {
  int cap = 6;   // degree cap for laws and morphisms the script builds
  int jobs = 1;  // worker threads for the check phase
};

/// Evaluates statements in order and runs every check directive, producing
/// exactly one Report per check, in source order regardless of jobs. Laws
/// over generator-free coefficient rings re-base to the degree cap of the
/// elements they meet (exact for the complete additive and multiplicative
/// tables, and for any truncation downward). An error while evaluating a
/// binding statement emits one fail Report for that statement and stops; an
/// error inside a check fails only that check.
std::vector<Report> run_script(const Script& script, const RunOptions& options);

}  // namespace fglchern::dsl
