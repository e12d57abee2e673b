#include "doctest.h"
#include "support.hpp"
#include "tagc/harness.hpp"
#include "tagc/policy.hpp"

using namespace tagc;

namespace {
const VTag P{0}, S{1};
const PTag pP{0}, pS{1};
}  // namespace

TEST_SUITE("policies") {

TEST_CASE("ifc operator rule joins operand and PC tags") {
  const HllPolicy& ifc = policyByName("ifc");
  auto r1 = ifc.binopRule(BinOp::Add, pP, S, P);
  REQUIRE(r1.ok());
  CHECK(r1.outs() == S);

  auto r2 = ifc.binopRule(BinOp::Add, pP, P, P);
  REQUIRE(r2.ok());
  CHECK(r2.outs() == P);

  auto r3 = ifc.binopRule(BinOp::Sub, pS, P, P);
  REQUIRE(r3.ok());
  CHECK(r3.outs() == S);  // PC disjunct
}

TEST_CASE("ifc assignment gates writes by the old tag") {
  const HllPolicy& ifc = policyByName("ifc");
  auto bad = ifc.assignRule(pP, P, S);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.err().token == "IfcWriteViolation");

  auto ok = ifc.assignRule(pP, S, S);
  REQUIRE(ok.ok());
  CHECK(ok.outs().pc == pP);
  CHECK(ok.outs().tag == S);

  auto ctx = ifc.assignRule(pS, P, P);  // secret context, public target
  CHECK_FALSE(ctx.ok());
}

TEST_CASE("ifc split raises and join restores the PC tag") {
  const HllPolicy& ifc = policyByName("ifc");
  auto split = ifc.ifSplitRule(pP, RelOp::Eq, S, P);
  REQUIRE(split.ok());
  CHECK(split.outs() == pS);

  auto join = ifc.ifJoinRule(pS, pP);  // label-creep reset
  REQUIRE(join.ok());
  CHECK(join.outs() == pP);

  auto idj = ifc.ifJoinRule(pP, pP);
  REQUIRE(idj.ok());
  CHECK(idj.outs() == pP);
}

TEST_CASE("taint joins value tags and ignores the PC") {
  const HllPolicy& taint = policyByName("taint");
  auto r = taint.binopRule(BinOp::Add, pP, VTag{1}, VTag{0});
  REQUIRE(r.ok());
  CHECK(r.outs() == VTag{1});

  auto j = taint.ifJoinRule(pS, pP);
  REQUIRE(j.ok());
  CHECK(j.outs() == pS);  // keeps the current PC, not the split PC
}

TEST_CASE("unit policy accepts everything on its one-point domain") {
  const HllPolicy& unit = policyByName("unit");
  auto a = unit.assignRule(PTag{0}, VTag{0}, VTag{0});
  REQUIRE(a.ok());
  CHECK(a.outs().pc == PTag{0});
  CHECK(a.outs().tag == VTag{0});
  for (HllRule r : allHllRules()) {
    CHECK(unit.flags().at(r).dfs == Tri::Holds);
    CHECK(unit.flags().at(r).spci == Tri::Holds);
  }
}

TEST_CASE("tag text round-trips for every policy") {
  for (const std::string& name : policyNames()) {
    const HllPolicy& pol = policyByName(name);
    for (VTag t : pol.vtagUniverse()) {
      auto back = pol.parseVTag(pol.printVTag(t));
      REQUIRE(back.has_value());
      CHECK(*back == t);
    }
    for (PTag p : pol.ptagUniverse()) {
      auto back = pol.parsePTag(pol.printPTag(p));
      REQUIRE(back.has_value());
      CHECK(*back == p);
    }
  }
}

TEST_CASE("declared flags are well-formed and honest") {
  for (const std::string& name : policyNames()) {
    const HllPolicy& pol = policyByName(name);
    CHECK(flagsWf(pol.flags()));
    ValidateReport report = validateFlags(pol);
    CHECK(report.findings.empty());
    CHECK(report.checksRun > 0);
  }
  CHECK(flagsWf(testing::mixPolicy().flags()));
  CHECK(validateFlags(testing::mixPolicy()).findings.empty());
}

TEST_CASE("declared ifc flags match the rule formulas") {
  const FlagSet& f = policyByName("ifc").flags();
  for (HllRule r : {HllRule::Const, HllRule::Var, HllRule::Binop}) {
    CHECK(f.at(r).dfs == Tri::Holds);
    CHECK(f.at(r).pcp == Tri::Holds);
    CHECK(f.at(r).wpci == Tri::DoesNotHold);
  }
  CHECK(f.at(HllRule::Assign).dfs == Tri::DoesNotHold);
  for (HllRule r : {HllRule::IfSplit, HllRule::WhileSplit, HllRule::IfJoin,
                    HllRule::WhileExit}) {
    CHECK(f.at(r).pcp == Tri::DoesNotHold);
  }
  for (HllRule r : {HllRule::IfJoin, HllRule::WhileExit}) {
    CHECK(f.at(r).dfs == Tri::Holds);
  }
}

TEST_CASE("mis-declared flags are caught by sampling") {
  const HllPolicy& ifc = policyByName("ifc");
  FlagSet mutated = ifc.flags();
  mutated.at(HllRule::Assign).dfs = Tri::Holds;  // assign can fail-stop
  REQUIRE(flagsWf(mutated));
  ValidateReport report = validateFlags(ifc, mutated, 10000, 0);
  REQUIRE_FALSE(report.findings.empty());
  CHECK(report.findings.front().rule == "assign");
  CHECK(report.findings.front().property == 'D');
}

TEST_CASE("rules are pure: same inputs give same outputs") {
  for (const std::string& name : policyNames()) {
    const HllPolicy& pol = policyByName(name);
    for (PTag p : pol.ptagUniverse()) {
      for (VTag t1 : pol.vtagUniverse()) {
        for (VTag t2 : pol.vtagUniverse()) {
          auto a = pol.binopRule(BinOp::Add, p, t1, t2);
          auto b = pol.binopRule(BinOp::Add, p, t1, t2);
          REQUIRE(a.ok() == b.ok());
          if (a.ok()) CHECK(a.outs() == b.outs());
          auto x = pol.assignRule(p, t1, t2);
          auto y = pol.assignRule(p, t1, t2);
          REQUIRE(x.ok() == y.ok());
          if (x.ok()) CHECK(x.outs() == y.outs());
        }
      }
    }
  }
}

}  // TEST_SUITE
