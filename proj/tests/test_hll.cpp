#include "doctest.h"
#include "support.hpp"
#include "tagc/hll.hpp"

using namespace tagc;
using tagc::testing::ruleNames;
using tagc::testing::runSource;

namespace {
const HllPolicy& ifc() { return policyByName("ifc"); }
const VTag P{0}, S{1};
const PTag pP{0}, pS{1};
}  // namespace

TEST_SUITE("hll") {

TEST_CASE("parses a one-function program with a tagged literal") {
  HllProgram prog = parseProgram(
      "fun main() tag P { var x; x = 1@S; return(x) }", ifc());
  CHECK(prog.functions.size() == 1);
  const FunDef& main = prog.mainFn();
  CHECK(main.locals == std::vector<std::string>{"x"});
  const auto& seq = std::get<SeqStmt>(main.body->node);
  const auto& assign = std::get<AssignStmt>(seq.first->node);
  const auto& lit = std::get<LitExpr>(assign.value->node);
  CHECK(lit.atom == Atom{1, S});
}

TEST_CASE("rejects undeclared variables") {
  CHECK_THROWS_AS(parseProgram("fun main() tag P { var x; y = 1@P }", ifc()),
                  WellFormednessError);
}

TEST_CASE("minimal program body is skip") {
  HllProgram prog = parseProgram("fun main() tag P { skip }", ifc());
  CHECK(std::holds_alternative<SkipStmt>(prog.mainFn().body->node));
}

TEST_CASE("parse errors carry positions") {
  try {
    parseProgram("fun main() tag P {\n  x := 1 }", ifc());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos.line == 2);
  }
  CHECK_THROWS_AS(parseProgram("fun main() tag Q { skip }", ifc()), ParseError);
  CHECK_THROWS_AS(parseProgram("fun main() tag P { var x; x = 1@X }", ifc()),
                  ParseError);
}

TEST_CASE("well-formedness rejections") {
  CHECK_THROWS_AS(parseProgram("fun f() tag P { skip }", ifc()), WellFormednessError);
  CHECK_THROWS_AS(parseProgram("fun main(a) tag P { skip }", ifc()),
                  WellFormednessError);
  CHECK_THROWS_AS(
      parseProgram("fun main() tag P { var x, x; skip }", ifc()),
      WellFormednessError);
  CHECK_THROWS_AS(
      parseProgram("fun main() tag P { var x; x = g() }", ifc()),
      WellFormednessError);
  CHECK_THROWS_AS(
      parseProgram(
          "fun f(a, b) tag P { return(a) } fun main() tag P { var x; x = f(1@P) }",
          ifc()),
      WellFormednessError);
}

TEST_CASE("printing is a fixpoint under reparsing") {
  const char* sources[] = {
      "fun main() tag P { var x; x = 1@S; return(x) }",
      "fun main() tag P { skip }",
      "fun helper(a) tag S { return(a + 1@P) }\n"
      "fun main() tag P { var x, y; x = helper(2@P); if (x == 1@P + 2@P) { y = x }"
      " else { skip }; while (y < 5@P) { y = y + 1@P }; return(y - x) }",
  };
  for (const char* src : sources) {
    HllProgram p1 = parseProgram(src, ifc());
    std::string text1 = printProgram(p1, ifc());
    HllProgram p2 = parseProgram(text1, ifc());
    CHECK(programEq(p1, p2));
    CHECK(printProgram(p2, ifc()) == text1);
  }
}

TEST_CASE("expression evaluation fires the expected rules") {
  TraceSink sink;
  RuleTrace trace;
  sink.collect = &trace;
  std::uint64_t fuel = 1000;
  Env env;

  // literal with secret tag keeps it (ifc const is the identity)
  ExprPtr lit = makeLit(Atom{5, S});
  EvalOutcome r = evalExpr(env, pP, *lit, ifc(), sink, fuel);
  REQUIRE(r.kind == EvalOutcome::Kind::Ok);
  CHECK(r.atom == Atom{5, S});

  // x + 1@P with x secret evaluates to a secret sum
  env["x"] = Atom{3, S};
  ExprPtr sum = makeBin(BinOp::Add, makeVar("x"), makeLit(Atom{1, P}));
  r = evalExpr(env, pP, *sum, ifc(), sink, fuel);
  REQUIRE(r.kind == EvalOutcome::Kind::Ok);
  CHECK(r.atom == Atom{4, S});
}

TEST_CASE("nested expressions evaluate left subtree before the right") {
  // ((1 + 2) + x): the reference order is a post-order walk.
  HllProgram prog = parseProgram(
      "fun main() tag P { var x, y; y = (1@P + 2@P) + x; return(y) }", ifc());
  RunResult rr = runHll(prog, ifc(), 1000);
  std::vector<HllRule> expected = {
      HllRule::Call,  HllRule::Const, HllRule::Const, HllRule::Binop,
      HllRule::Var,   HllRule::Binop, HllRule::Assign, HllRule::Var,
      HllRule::Ret,
  };
  CHECK(ruleNames(rr.trace) == expected);
}

TEST_CASE("a skip under a join continuation fires the join rule") {
  HllProgram prog = parseProgram("fun main() tag P { skip }", ifc());
  TraceSink sink;
  std::uint64_t fuel = 100;

  HllState st;
  st.st = HllRegular{&prog.mainFn(), makeSkip(), pS,
                     contJoin(JoinKind::IfJoin, pP, contEmp()), Env{}};
  REQUIRE(stepHll(st, prog, ifc(), sink, fuel) == StepStatus::Continue);
  const auto& reg = std::get<HllRegular>(st.st);
  CHECK(reg.pc == pP);  // restored to the split-point tag
  CHECK(std::holds_alternative<SkipStmt>(reg.stmt->node));
  CHECK(std::holds_alternative<LocalCont::Emp>(reg.cont->node));
}

TEST_CASE("sequencing pushes the rest onto the continuation") {
  HllProgram prog = parseProgram("fun main() tag P { skip; skip }", ifc());
  TraceSink sink;
  std::uint64_t fuel = 100;
  HllState st;
  st.st = HllRegular{&prog.mainFn(), prog.mainFn().body, pP, contEmp(), Env{}};
  REQUIRE(stepHll(st, prog, ifc(), sink, fuel) == StepStatus::Continue);
  const auto& reg = std::get<HllRegular>(st.st);
  CHECK(std::holds_alternative<SkipStmt>(reg.stmt->node));
  CHECK(std::holds_alternative<LocalCont::SeqK>(reg.cont->node));
}

TEST_CASE("golden run: public arithmetic terminates with the sum") {
  RunResult r = runSource("fun main() tag P { var x; x = 1@P + 2@P; return(x) }", ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{3, P});
}

TEST_CASE("golden run: explicit secret write to a public variable fail-stops") {
  RunResult r = runSource("fun main() tag P { var x; x = 1@S; return(x) }", ifc());
  REQUIRE(std::holds_alternative<FailStopped>(r.behavior));
  CHECK(std::get<FailStopped>(r.behavior).err.token == "IfcWriteViolation");
}

TEST_CASE("golden run: implicit flow through a secret branch fail-stops") {
  RunResult r = runSource(
      "fun main() tag P { var x; if (1@S == 1@P) { x = 1@P } else { x = 2@P };"
      " return(x) }",
      ifc());
  REQUIRE(std::holds_alternative<FailStopped>(r.behavior));
  CHECK(std::get<FailStopped>(r.behavior).err.token == "IfcWriteViolation");
}

TEST_CASE("golden run: an evident infinite loop times out") {
  RunResult r = runSource("fun main() tag P { while (0@P == 0@P) { skip } }", ifc(),
                          5000);
  CHECK(std::holds_alternative<TimedOut>(r.behavior));
}

TEST_CASE("rule trace of a skip-only main is call then ret") {
  RunResult r = runSource("fun main() tag P { skip }", ifc());
  CHECK(ruleNames(r.trace) == std::vector<HllRule>{HllRule::Call, HllRule::Ret});
}

TEST_CASE("rule trace of a single assignment") {
  RunResult r = runSource("fun main() tag P { var x; x = 1@P }", ifc());
  CHECK(ruleNames(r.trace) == std::vector<HllRule>{HllRule::Call, HllRule::Const,
                                                   HllRule::Assign, HllRule::Ret});
}

TEST_CASE("split precedes branch rules and join follows them") {
  RunResult r = runSource(
      "fun main() tag P { var x; if (1@P == 1@P) { x = 2@P } else { skip };"
      " return(x) }",
      ifc());
  auto names = ruleNames(r.trace);
  std::vector<HllRule> expected = {
      HllRule::Call,  HllRule::Const,  HllRule::Const, HllRule::IfSplit,
      HllRule::Const, HllRule::Assign, HllRule::IfJoin, HllRule::Var,
      HllRule::Ret,
  };
  CHECK(names == expected);
}

TEST_CASE("label creep resets after the join") {
  // After an if on a secret completes, a public assignment succeeds again.
  RunResult r = runSource(
      "fun main() tag P { var x; if (1@S == 1@S) { skip } else { skip };"
      " x = 7@P; return(x) }",
      ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{7, P});
}

TEST_CASE("left operand errors win over right operand errors") {
  const HllPolicy& mix = testing::mixPolicy();
  // Both operand subtrees would fail the mixed-tag operator rule; only the
  // left one may fire.
  RunResult r = runSource(
      "fun main() tag A { var x; x = (1@A + 2@B) + (3@A + 4@B); return(x) }", mix);
  REQUIRE(std::holds_alternative<FailStopped>(r.behavior));
  CHECK(std::get<FailStopped>(r.behavior).err.token == "MixedOperands");
  auto names = ruleNames(r.trace);
  std::vector<HllRule> expected = {HllRule::Call, HllRule::Const, HllRule::Const,
                                   HllRule::Binop};
  CHECK(names == expected);  // right subtree rules never fire
}

TEST_CASE("fall-through returns the default atom") {
  RunResult r = runSource("fun main() tag P { var x; x = 5@P }", ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{0, P});
}

TEST_CASE("calls bind parameters, locals get defaults, ret restores context") {
  RunResult r = runSource(
      "fun add(a, b) tag P { var t; t = a + b; return(t) }\n"
      "fun main() tag P { var x; x = add(2@P, 3@P); return(x + 1@P) }",
      ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{6, P});
}

TEST_CASE("secrets survive in parameters and call results") {
  // Parameters keep their argument tags, and a call result lands in the
  // destination through the ret rule, not through an assignment rule.
  RunResult r = runSource(
      "fun id(a) tag P { return(a) }\n"
      "fun main() tag P { var x; x = id(1@S); return(x) }",
      ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{1, S});

  // An explicit assignment of secret data inside the callee does fail-stop.
  RunResult bad = runSource(
      "fun pass(a) tag P { var t; t = a - a; return(t) }\n"
      "fun main() tag P { var x; x = pass(1@S); return(x) }",
      ifc());
  REQUIRE(std::holds_alternative<FailStopped>(bad.behavior));
}

TEST_CASE("while loops join back to the test context per iteration") {
  RunResult r = runSource(
      "fun main() tag P { var i, s; i = 0@P; s = 0@P;"
      " while (i < 3@P) { s = s + i; i = i + 1@P }; return(s) }",
      ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{3, P});
  // Each iteration fires whileSplit then later exactly one whileExit.
  int splits = 0, exits = 0;
  for (const RuleEvent& ev : r.trace.events) {
    if (ev.rule == HllRule::WhileSplit) splits++;
    if (ev.rule == HllRule::WhileExit) exits++;
  }
  CHECK(splits == 4);  // 3 true tests + 1 false test
  CHECK(exits == splits);
}

TEST_CASE("return abandons pending joins") {
  RunResult r = runSource(
      "fun main() tag P { var x; if (1@P == 1@P) { return(9@P) } else { skip };"
      " return(0@P) }",
      ifc());
  REQUIRE(std::holds_alternative<Terminated>(r.behavior));
  CHECK(std::get<Terminated>(r.behavior).result == Atom{9, P});
  for (const RuleEvent& ev : r.trace.events) {
    CHECK(ev.rule != HllRule::IfJoin);  // the join never fires
  }
}

}  // TEST_SUITE
