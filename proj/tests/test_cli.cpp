#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "fglchern/dsl.hpp"
#include "fglchern/error.hpp"
#include "fglchern/report.hpp"
#include "fglchern/suite.hpp"
#include "script_fuzzer.hpp"

using namespace fglchern;
using dsl::Expr;
using dsl::GenDecl;
using dsl::ParseError;
using dsl::Script;
using dsl::Stmt;

namespace {

std::vector<Report> run(const std::string& source, int cap = 6, int jobs = 1) {
  dsl::RunOptions opt;
  opt.cap = cap;
  opt.jobs = jobs;
  return dsl::run_script(dsl::parse(source), opt);
}

}  // namespace

TEST_CASE("parser recovers the ring statement shape") {
  Script s = dsl::parse("ring R[x: deg 1 nilp 2, y: deg 1] cap 5\n");
  REQUIRE(s.statements.size() == 1);
  const Stmt& st = s.statements[0];
  CHECK(st.kind == Stmt::Kind::Ring);
  CHECK(st.name == "R");
  CHECK(st.cap == 5);
  REQUIRE(st.gens.size() == 2);
  CHECK(st.gens[0].name == "x");
  CHECK(st.gens[0].degree == 1);
  CHECK(st.gens[0].nilpotency == 2);
  CHECK(st.gens[1].name == "y");
  CHECK(st.gens[1].degree == 1);
  CHECK(st.gens[1].nilpotency == 0);
}

TEST_CASE("parser recovers every statement kind") {
  Script s = dsl::parse(
      "ring R[x: deg 1 nilp 2] cap 5\n"
      "fgl M = multiplicative(1)\n"
      "fgl A = additive\n"
      "fgl U = universal\n"
      "bundle B = [x, x + x] - [x]\n"
      "let u = fsum(M, x, x)\n"
      "check eq(u, 2*x - x^2)\n"
      "check fgl_axioms(M)\n"
      "check key_lemma(M, B)\n"
      "morphism E = exponential\n"
      "morphism I = identity(U)\n"
      "morphism C = conjugate(U, [1/2, -3])\n"
      "morphism S = series(M, A, [-1/2, 1/6])\n");
  REQUIRE(s.statements.size() == 13);
  CHECK(s.statements[1].kind == Stmt::Kind::Fgl);
  CHECK(s.statements[1].sub == "multiplicative");
  REQUIRE(s.statements[1].args.size() == 1);
  CHECK(s.statements[1].args[0].kind == Expr::Kind::Number);
  CHECK(s.statements[2].sub == "additive");
  CHECK(s.statements[3].sub == "universal");
  const Stmt& b = s.statements[4];
  CHECK(b.kind == Stmt::Kind::Bundle);
  CHECK(b.plus_roots.size() == 2);
  CHECK(b.minus_roots.size() == 1);
  const Stmt& let = s.statements[5];
  CHECK(let.kind == Stmt::Kind::Let);
  CHECK(let.args[0].kind == Expr::Kind::Call);
  CHECK(let.args[0].name == "fsum");
  CHECK(s.statements[6].kind == Stmt::Kind::Check);
  CHECK(s.statements[6].name == "eq");
  const Stmt& conj = s.statements[11];
  CHECK(conj.kind == Stmt::Kind::Morphism);
  CHECK(conj.sub == "conjugate");
  REQUIRE(conj.scalars.size() == 2);
  CHECK(conj.scalars[0].num == 1);
  CHECK(conj.scalars[0].den == 2);
  CHECK(conj.scalars[1].num == -3);
  CHECK(conj.scalars[1].den == 1);
  const Stmt& ser = s.statements[12];
  CHECK(ser.sub == "series");
  REQUIRE(ser.args.size() == 2);
  CHECK(ser.args[0].name == "M");
  CHECK(ser.args[1].name == "A");
}

TEST_CASE("parser applies the usual precedence") {
  Script s = dsl::parse(
      "ring R[x: deg 1, y: deg 1, z: deg 1] cap 4\n"
      "let u = x + y*z^2\n"
      "let v = (x + y)*z\n"
      "let w = x - -2\n"
      "let n = -3/4\n");
  const Expr& u = s.statements[1].args[0];
  CHECK(u.kind == Expr::Kind::Add);
  CHECK(u.args[1].kind == Expr::Kind::Mul);
  CHECK(u.args[1].args[1].kind == Expr::Kind::Pow);
  CHECK(u.args[1].args[1].exponent == 2);
  const Expr& v = s.statements[2].args[0];
  CHECK(v.kind == Expr::Kind::Mul);
  CHECK(v.args[0].kind == Expr::Kind::Add);
  // A minus sign on a literal folds into the literal: no Neg node survives.
  const Expr& w = s.statements[3].args[0];
  CHECK(w.kind == Expr::Kind::Sub);
  CHECK(w.args[1].kind == Expr::Kind::Number);
  CHECK(w.args[1].num == -2);
  const Expr& n = s.statements[4].args[0];
  CHECK(n.kind == Expr::Kind::Number);
  CHECK(n.num == -3);
  CHECK(n.den == 4);
}

TEST_CASE("parse errors carry position, found token, and expectations") {
  struct Case {
    const char* source;
    int line, col;
    const char* detail;
  };
  const Case cases[] = {
      {"ring R[x deg 1] cap 5\n", 1, 10, "unexpected identifier 'deg', expected ':'"},
      {"ring R[x: deg 1]\n", 2, 1, "unexpected end of input, expected 'cap'"},
      {"ring R[x: deg 1 nilp 1] cap 5\n", 1, 22, "nilpotency must be at least 2"},
      {"ring R[x: deg 0] cap 5\n", 1, 8, "generator degree must be nonzero"},
      {"ring cap[x: deg 1] cap 2\n", 1, 1, "'cap' is a reserved word"},
      {"let u = 3\nlet u = 4\n", 2, 1, "name 'u' is already declared"},
      {"let u = 3\ncheck bogus(u)\n", 2, 1, "unknown check 'bogus'"},
      {"fgl M = additive\nlet u = 3\nlet v = fsum(M, u)\n", 3, 9,
       "call 'fsum' takes 3 argument(s)"},
      {"let u = fsum(M, 1, 2)\n", 1, 14, "name 'M' is not declared"},
      {"let u = 3 $ 4\n", 1, 11, "unexpected character '$'"},
      {"let u = 123456789012345678901\n", 1, 9, "integer literal too large"},
      {"let u = 1/0\n", 1, 11, "zero denominator"},
      {"fgl M = multiplicative(1\n", 2, 1, "unexpected end of input, expected ')'"},
      {"fgl M = multiplicative(1)\nmorphism T = conjugate(M)\n", 2, 25,
       "unexpected ')', expected ','"},
      {"ring R[x: deg 1 nilp 2] cap 5\nlet z = x^99999\n", 2, 11,
       "exponent out of range"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.source);
    try {
      dsl::parse(c.source);
      FAIL_CHECK("expected a parse error");
    } catch (const ParseError& ex) {
      CHECK(ex.line() == c.line);
      CHECK(ex.col() == c.col);
      CHECK(std::string(ex.what()) == "line " + std::to_string(c.line) + ", column " +
                                          std::to_string(c.col) + ": " + c.detail);
    }
  }
}

TEST_CASE("rendering is canonical and round-trips") {
  const char* corpus[] = {
      "# leading comment\nring  R [ x :deg 1 nilp 2 ,y: deg 1 ]cap 3\nlet u=x*  x # tail\n",
      "fgl M=multiplicative( 2/3 )\ncheck fgl_axioms( M )\n",
      "ring R[x: deg 1 nilp 2] cap 5\nfgl M = multiplicative(1)\n"
      "let u = fsum(M, x, x)\ncheck eq(u, 2*x - x^2)\n",
      "ring R[x: deg 1, y: deg -1] cap 4\nbundle B = [x, x + x] - [x]\n"
      "let v = ((x))\nlet w = x - (y - x) + 2*(x + y)^2\nlet n = -x*y + (-2)\n",
      "fgl U = universal\nmorphism C = conjugate(U, [1/2, -3, 0/2])\n"
      "morphism E = exponential\nmorphism I = identity(U)\n",
      "ring R[x: deg 1 nilp 3] cap 6\nfgl A = additive\nlet p = push_pn(A, 2, x^2)\n"
      "check eq(p, 1)\nlet q = push_p1(A, finv(A, x))\n",
  };
  for (const char* src : corpus) {
    CAPTURE(src);
    Script t1 = dsl::parse(src);
    std::string r1 = dsl::render(t1);
    Script t2 = dsl::parse(r1);
    CHECK(t2 == t1);
    CHECK(dsl::render(t2) == r1);
  }
}

TEST_CASE("fuzzed scripts round-trip through render and parse") {
  fglfuzz::ScriptFuzzer fuzz(20260818);
  for (int k = 0; k < 100; ++k) {
    Script t1 = fuzz.script();
    std::string r1 = dsl::render(t1);
    CAPTURE(r1);
    Script t2 = dsl::parse(r1);
    CHECK(t2 == t1);
    CHECK(dsl::render(t2) == r1);
  }
}

TEST_CASE("an empty script runs to an empty report list") {
  CHECK(dsl::parse("").statements.empty());
  CHECK(run("").empty());
  CHECK(run("# only a comment\n").empty());
  CHECK(!any_failed(run("")));
}

TEST_CASE("the multiplicative example evaluates to the expected values") {
  auto reports = run(
      "ring R[x: deg 1 nilp 2] cap 5\n"
      "fgl M = multiplicative(1)\n"
      "let u = fsum(M, x, x)\n"
      "check eq(u, 2*x - x^2)\n"
      "check fgl_axioms(M)\n"
      "let v = finv(M, x)\n"
      "check eq(fsum(M, x, v), 0)\n"
      "check eq(nseries(M, 3, x), 3*x - 3*x^2)\n");
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].check == "eq");
  CHECK(reports[0].status == Report::Status::Pass);
  CHECK(reports[0].cap == 5);  // the ring's cap, where the identity was checked
  CHECK(reports[1].check == "fgl_axioms");
  CHECK(reports[1].cap == 6);  // the law's cap
  for (const auto& r : reports) {
    CAPTURE(r.check);
    CHECK(r.status == Report::Status::Pass);
    CHECK(r.witness.empty());
  }
}

TEST_CASE("laws re-base to the cap of the ring they meet") {
  // Names must be declared before use, even in checks.
  CHECK_THROWS_AS(run("fgl M = multiplicative(1)\nring R[x: deg 1 nilp 2] cap 3\n"
                      "check key_lemma(M, B)\nbundle B = [x]\n"),
                  ParseError);

  // Downward: a cap-6 law re-bases against a cap-3 ring.
  auto ok = run(
      "fgl M = multiplicative(1)\nring R[x: deg 1 nilp 2] cap 3\n"
      "bundle B = [x]\ncheck key_lemma(M, B)\n");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].status == Report::Status::Pass);
  CHECK(ok[0].cap == 3);

  // Upward: complete tables extend to a cap-8 ring exactly.
  auto up = run(
      "fgl M = multiplicative(1)\nring R[x: deg 1] cap 8\n"
      "check eq(nseries(M, 2, x), 2*x - x^2)\n");
  REQUIRE(up.size() == 1);
  CHECK(up[0].status == Report::Status::Pass);
  CHECK(up[0].cap == 8);
}

TEST_CASE("laws with coefficient generators need an extension of their ring") {
  auto reports = run(
      "fgl U = universal\nring R[x: deg 1 nilp 3] cap 6\nlet u = fsum(U, x, x)\n");
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].check == "let u");
  CHECK(reports[0].status == Report::Status::Fail);
  CHECK(reports[0].witness ==
        "the law's coefficients do not embed in the element's ring");

  // Over its own coefficient ring the law is fine.
  auto own = run(
      "ring R[b: deg -1, x: deg 1 nilp 2] cap 4\nfgl M = multiplicative(b)\n"
      "check eq(fsum(M, x, x), 2*x - b*x^2)\n");
  REQUIRE(own.size() == 1);
  CHECK(own[0].status == Report::Status::Pass);
}

TEST_CASE("a failing check reports the residue and later checks still run") {
  auto reports = run(
      "ring R[x: deg 1 nilp 2] cap 5\nfgl A = additive\n"
      "check eq(fsum(A, x, x), x)\ncheck eq(x, x)\n");
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].status == Report::Status::Fail);
  CHECK(reports[0].witness == "x");
  CHECK(reports[1].status == Report::Status::Pass);
}

TEST_CASE("operands from unrelated rings fail only that check") {
  auto reports = run(
      "ring R[x: deg 1] cap 4\nring S[z: deg 1] cap 4\n"
      "check eq(x, z)\ncheck eq(x, x)\n");
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].status == Report::Status::Fail);
  CHECK(reports[0].witness == "the operands live in unrelated rings");
  CHECK(reports[1].status == Report::Status::Pass);
}

TEST_CASE("a failing binding statement emits one report and stops") {
  auto reports = run(
      "ring R[x: deg 1] cap 4\nbundle B = [x + x*x]\ncheck eq(x, x)\n");
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].check == "bundle B");
  CHECK(reports[0].status == Report::Status::Fail);
  CHECK(reports[0].witness.find("bundle root must be homogeneous of degree 1") !=
        std::string::npos);
}

TEST_CASE("pushforwards rebuild the projective space from the ring shape") {
  auto good = run(
      "ring R[t: deg 1, x: deg 1 nilp 2] cap 6\nfgl A = additive\n"
      "check eq(push_p1(A, x*t), t)\ncheck eq(push_p1(A, t), 0)\n");
  REQUIRE(good.size() == 2);
  CHECK(good[0].status == Report::Status::Pass);
  CHECK(good[1].status == Report::Status::Pass);

  auto bad = run(
      "ring R[x: deg 1 nilp 4] cap 6\nfgl A = additive\nlet p = push_p1(A, x)\n");
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].status == Report::Status::Fail);
  CHECK(bad[0].witness ==
        "push_p1: the element's ring must end with a degree-1 generator of "
        "nilpotency 2");

  auto pn = run(
      "ring R[x: deg 1 nilp 3] cap 6\nfgl A = additive\n"
      "check eq(push_pn(A, 2, x^2), 1)\ncheck eq(push_pn(A, 2, x), 0)\n");
  REQUIRE(pn.size() == 2);
  CHECK(pn[0].status == Report::Status::Pass);
  CHECK(pn[1].status == Report::Status::Pass);
}

TEST_CASE("morphism statements build and validate orientation changes") {
  auto reports = run(
      "fgl M = multiplicative(1)\nfgl A = additive\n"
      "morphism E = exponential\n"
      "morphism S = series(M, A, [-1/2, 1/6, -1/24, 1/120, -1/720])\n"
      "ring R[x: deg 1 nilp 4] cap 5\nbundle L = [x]\n"
      "check eq(todd(E, L), todd(S, L))\n");
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].status == Report::Status::Pass);

  auto invalid = run(
      "fgl M = multiplicative(1)\nmorphism S = series(M, M, [2, 1])\n");
  REQUIRE(invalid.size() == 1);
  CHECK(invalid[0].check == "morphism S");
  CHECK(invalid[0].status == Report::Status::Fail);
  CHECK(invalid[0].witness.find("incompatible orientation series") !=
        std::string::npos);
}

TEST_CASE("script runs are deterministic and independent of the job count") {
  const char* src =
      "ring R[x: deg 1 nilp 2, y: deg 1 nilp 2] cap 5\n"
      "fgl M = multiplicative(1)\nfgl A = additive\n"
      "bundle B = [x]\n"
      "check eq(fsum(M, x, y), x + y - x*y)\n"
      "check fgl_axioms(M)\n"
      "check key_lemma(A, B)\n"
      "check eq(c1tensor(A, x, y), x + y)\n"
      "check eq(x, y)\n";
  auto a = run(src, 6, 1);
  auto b = run(src, 6, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].check == b[i].check);
    CHECK(a[i].status == b[i].status);
    CHECK(a[i].witness == b[i].witness);
    CHECK(a[i].cap == b[i].cap);
  }
  CHECK(a[4].status == Report::Status::Fail);  // x != y, reported in source order
}

TEST_CASE("text and JSON reports format exactly") {
  std::vector<Report> reports;
  reports.push_back({"alpha", Report::Status::Pass, 6, "", 3});
  reports.push_back({"beta", Report::Status::Fail, 5, "x - y", 0});
  reports.push_back({"gamma", Report::Status::Skipped, 6, "oracle failed: w", 0});
  CHECK(emit_text(reports) ==
        "PASS alpha (cap 6)\n"
        "FAIL beta (cap 5) [x - y]\n"
        "SKIP gamma (cap 6) [oracle failed: w]\n");
  CHECK(emit_json(reports, 6) ==
        "{\"version\":\"1\",\"cap_default\":6,\"reports\":["
        "{\"check\":\"alpha\",\"status\":\"pass\",\"cap\":6,\"witness\":null,"
        "\"elapsed_ms\":3},"
        "{\"check\":\"beta\",\"status\":\"fail\",\"cap\":5,\"witness\":\"x - y\","
        "\"elapsed_ms\":0},"
        "{\"check\":\"gamma\",\"status\":\"skipped\",\"cap\":6,"
        "\"witness\":\"oracle failed: w\",\"elapsed_ms\":0}]}\n");
  CHECK(emit_json({}, 6) == "{\"version\":\"1\",\"cap_default\":6,\"reports\":[]}\n");
  CHECK(any_failed(reports));
  CHECK(!any_failed({{"a", Report::Status::Pass, 6, "", 0}}));
  CHECK(any_failed({{"a", Report::Status::Skipped, 6, "", 0}}));
}

TEST_CASE("the suite skips residue-rule checks when an oracle fails") {
  std::vector<SuiteCheck> checks;
  checks.push_back({"plain", false, false,
                    [](SuiteContext&) { return CheckResult{true, ""}; }});
  checks.push_back({"oracle_bad", true, false,
                    [](SuiteContext&) { return CheckResult{false, "broke"}; }});
  checks.push_back({"gated_one", false, true,
                    [](SuiteContext&) { return CheckResult{true, ""}; }});
  checks.push_back({"thrower", false, false, [](SuiteContext&) -> CheckResult {
                      throw Error("boom", "detail");
                    }});
  SuiteOptions opt;
  opt.cap = 4;
  opt.jobs = 2;
  auto reports = run_suite(checks, opt);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].check == "plain");
  CHECK(reports[0].status == Report::Status::Pass);
  CHECK(reports[1].status == Report::Status::Fail);
  CHECK(reports[1].witness == "broke");
  CHECK(reports[2].status == Report::Status::Skipped);
  CHECK(reports[2].witness == "oracle failed: oracle_bad");
  CHECK(reports[3].status == Report::Status::Fail);
  CHECK(reports[3].witness == "boom [detail]");

  // With the oracle passing, the gated check runs.
  checks[1].fn = [](SuiteContext&) { return CheckResult{true, ""}; };
  checks[3].fn = [](SuiteContext&) { return CheckResult{true, ""}; };
  auto ok = run_suite(checks, opt);
  CHECK(ok[2].status == Report::Status::Pass);
  CHECK(ok[2].witness.empty());
}

TEST_CASE("suite randomness is a pure function of seed and check name") {
  SuiteOptions opt;
  SuiteContext a(opt), b(opt);
  auto ra1 = a.rng_for("chern_whitney_sum");
  auto ra2 = b.rng_for("chern_whitney_sum");
  CHECK(ra1() == ra2());
  CHECK(ra1() == ra2());
  auto other = a.rng_for("chern_nilpotence");
  auto first = a.rng_for("chern_whitney_sum");
  CHECK(first() != other());
  SuiteOptions seeded;
  seeded.seed = 7;
  SuiteContext c(seeded);
  CHECK(c.rng_for("chern_whitney_sum")() != SuiteContext(opt).rng_for("chern_whitney_sum")());
}

TEST_CASE("the built-in suite declares the expected checks and gates") {
  auto checks = builtin_suite();
  CHECK(checks.size() == 33);
  std::vector<std::string> oracles, gated, names;
  for (const auto& c : checks) {
    names.push_back(c.name);
    if (c.oracle) oracles.push_back(c.name);
    if (c.gated) gated.push_back(c.name);
    CHECK(bool(c.fn));
    CHECK(!(c.oracle && c.gated));
  }
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  CHECK(oracles == std::vector<std::string>{"gysin_p1_rule_agreement",
                                            "gysin_additive_chow_degrees"});
  CHECK(gated == std::vector<std::string>{"gysin_completion_vs_residue",
                                          "gysin_projection_formula"});
}
