#include "doctest.h"
#include "support.hpp"
#include "tagc/opt.hpp"

using namespace tagc;
using namespace tagc::testing;

namespace {

const VTag P{0}, S{1};

// Reference solver: full sweeps until stable, no worklist.
std::map<Node, std::set<Reg>> naiveLiveness(const RtlFunction& fn) {
  std::map<Node, std::set<Reg>> liveIn;
  for (const auto& [n, instr] : fn.graph) liveIn[n] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [n, instr] : fn.graph) {
      std::set<Reg> live;
      for (Node s : instr.successors()) {
        live.insert(liveIn[s].begin(), liveIn[s].end());
      }
      if (auto d = instr.def()) live.erase(*d);
      for (Reg u : instr.uses()) live.insert(u);
      if (live != liveIn[n]) {
        liveIn[n] = std::move(live);
        changed = true;
      }
    }
  }
  return liveIn;
}

// The discrimination function: a dead constant load, a dead assignment mov,
// then the exit protocol. Node 5 writes r9 which nothing reads; node 4 moves
// r3 into r4 which nothing reads either.
RtlFunction discriminationFunction() {
  RtlFunction fn;
  fn.name = "main";
  fn.retReg = 1;
  fn.nRet = 1;
  fn.nDef = 2;
  fn.graph.emplace(1, Instr::ret(fn.retReg));
  fn.graph.emplace(2, Instr::movi(Atom{0, P}, fn.retReg, 1, ITag::dc()));
  fn.graph.emplace(4, Instr::mov(3, 4, 2, ITag::assign()));
  fn.graph.emplace(5, Instr::movi(Atom{7, P}, 9, 4, ITag::constLit()));
  fn.entry = 5;
  return fn;
}

}  // namespace

TEST_SUITE("deadcode") {

TEST_CASE("liveness: unused destinations are dead after their definition") {
  RtlFunction fn = discriminationFunction();
  LivenessResult live = liveness(fn);
  CHECK_FALSE(live.liveAfter(fn, 5).count(9));   // r9 never used
  CHECK(live.liveAfter(fn, 5).count(3));         // r3 feeds the assign mov
  CHECK(live.liveAfter(fn, 5).count(4));         // old tag of r4 feeds it too
  CHECK(live.liveAfter(fn, 2).count(fn.retReg)); // ret uses the return register
}

TEST_CASE("liveness: a register feeding a cond stays live") {
  RtlFunction fn;
  fn.name = "main";
  fn.retReg = 1;
  fn.nRet = 1;
  fn.nDef = 2;
  fn.graph.emplace(1, Instr::ret(1));
  fn.graph.emplace(2, Instr::movi(Atom{0, P}, 1, 1, ITag::dc()));
  fn.graph.emplace(3, Instr::cond(RelOp::Eq, 7, 8, 2, 2, ITag::ifSplit()));
  fn.graph.emplace(4, Instr::binop(BinOp::Add, 5, 6, 7, 3, ITag::opTag(BinOp::Add)));
  fn.entry = 4;
  LivenessResult live = liveness(fn);
  CHECK(live.liveAfter(fn, 4).count(7));
  CHECK(live.liveIn.at(3).count(8));
}

TEST_CASE("liveness: loop-carried registers stay live around the back edge") {
  const HllPolicy& ifc = policyByName("ifc");
  HllProgram prog = parseProgram(
      "fun main() tag P { var i, s; while (i < 9@P) { s = s + i; i = i + 1@P };"
      " return(s) }",
      ifc);
  RtlFunction fn = translateFunction(prog.mainFn(), ifc);
  LivenessResult fast = liveness(fn);
  CHECK(fast.liveIn == naiveLiveness(fn));
  // i's home register is live at the loop header (reached by the back edge)
  auto saves = nodesWithITag(fn, ITKind::SavePc);
  REQUIRE(saves.size() == 1);
  auto vars = nodesWithITag(fn, ITKind::Var);
  REQUIRE_FALSE(vars.empty());
  Reg iHome = fn.at(vars[0]).rs1;
  CHECK(fast.liveIn.at(saves[0]).count(iHome));
}

TEST_CASE("worklist solution matches the naive fixpoint on random programs") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    const HllPolicy& pol = policyByName("ifc");
    HllProgram prog = genProgram(cfg, pol);
    RtlProgram compiled = compileProgram(prog, pol);
    for (const auto& [name, fn] : compiled.functions) {
      CHECK(liveness(fn).liveIn == naiveLiveness(fn));
    }
  }
}

TEST_CASE("only never-failing PC-pure rules may be skipped") {
  const HllPolicy& ifc = policyByName("ifc");
  LoweredFlags ifcFlags = lowerFlags(ifc.flags());
  RtlFunction fn = discriminationFunction();

  DeadcodeReport report;
  RtlFunction out = deadcode(fn, ifcFlags, &report);
  CHECK(report.removed == 1);
  CHECK(out.at(5).kind == Opcode::Nop);           // dead const load removed
  CHECK(out.at(5).itag == ITag::dc());
  CHECK(out.at(4).kind == Opcode::Mov);           // dead assign kept: can fail-stop
  CHECK(out.at(4).itag.kind == ITKind::Assign);
  CHECK(wfCheck(out).empty());

  // Under the permissive policy both are removable.
  LoweredFlags unitFlags = lowerFlags(policyByName("unit").flags());
  DeadcodeReport r2;
  RtlFunction out2 = deadcode(fn, unitFlags, &r2);
  CHECK(r2.removed == 2);
  CHECK(out2.at(5).kind == Opcode::Nop);
  CHECK(out2.at(4).kind == Opcode::Nop);
}

TEST_CASE("all-unknown flags make the pass the identity") {
  RtlFunction fn = discriminationFunction();
  LoweredFlags unknown;  // empty table: everything Unknown
  DeadcodeReport report;
  RtlFunction out = deadcode(fn, unknown, &report);
  CHECK(report.removed == 0);
  CHECK(out.at(5).kind == Opcode::Movi);
  CHECK(out.at(4).kind == Opcode::Mov);
}

TEST_CASE("dead ops under the unit policy disappear") {
  const HllPolicy& unit = policyByName("unit");
  HllProgram prog = parseProgram(
      "fun main() tag U { var x, y; x = 1@U + 2@U; y = 3@U; return(y) }", unit);
  RtlFunction fn = translateFunction(prog.mainFn(), unit);
  DeadcodeReport report;
  RtlFunction out = deadcode(fn, lowerFlags(unit.flags()), &report);
  // x's op chain (two movis + op + assign mov) is dead; y's chain is live.
  CHECK(report.removed >= 4);
  CHECK(countKind(out, Opcode::Op) == 0);
}

TEST_CASE("preservation and monotone size over the corpus") {
  std::vector<PassSpec> pipeline = {{PassKind::Deadcode, false}};
  for (const std::string& polName : policyNames()) {
    const HllPolicy& pol = policyByName(polName);
    for (std::uint64_t seed = 200; seed < 320; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      HllProgram prog = genProgram(cfg, pol);

      RtlProgram compiled = compileProgram(prog, pol);
      LoweredFlags flags = lowerFlags(pol.flags());
      for (const auto& [name, fn] : compiled.functions) {
        RtlFunction opt = deadcode(fn, flags);
        CHECK(wfCheck(opt).empty());
        CHECK(countKind(opt, Opcode::Nop) >= countKind(fn, Opcode::Nop));
        CHECK(opt.graph.size() == fn.graph.size());
      }

      Verdict v = diffRun(prog, pol, 3000, pipeline);
      CHECK(v.kind != Verdict::Kind::Mismatch);
    }
  }
}

TEST_CASE("nop compaction rethreads successors and drops dead nodes") {
  const HllPolicy& unit = policyByName("unit");
  HllProgram prog = parseProgram(
      "fun main() tag U { var x, y; x = 1@U + 2@U; y = 3@U; return(y) }", unit);
  RtlProgram compiled = compileProgram(prog, unit);
  LoweredPolicy lowered(unit);
  LoweredFlags flags = lowerFlags(unit.flags());

  RtlProgram optimized;
  for (const auto& [name, fn] : compiled.functions) {
    optimized.functions.emplace(name, compactNops(deadcode(fn, flags)));
  }
  const RtlFunction& fn = optimized.fn("main");
  CHECK(countKind(fn, Opcode::Nop) == 0);
  CHECK(fn.graph.size() < compiled.fn("main").graph.size());
  CHECK(wfCheck(optimized).empty());

  RunResult src = runHll(prog, unit, 10000);
  RunResult tgt = runRtl(optimized, lowered, 100000);
  CHECK(behaviorEq(src.behavior, tgt.behavior));
}

}  // TEST_SUITE
