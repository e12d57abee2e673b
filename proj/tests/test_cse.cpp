#include "doctest.h"
#include "support.hpp"
#include "tagc/opt.hpp"
#include "tagc/rtl_run.hpp"

using namespace tagc;
using namespace tagc::testing;

namespace {

// The classic five-line block: of the three syntactically identical adds,
// only the second repeats the first's computation; the third is killed by
// the redefinition of x.
std::string lvnBlock(const char* tag) {
  std::string t = std::string("@") + tag;
  return "fun main() tag " + std::string(tag) +
         " { var z, c, w, x, v, a, b, y;"
         " x = 1" + t + "; y = 2" + t + "; a = 3" + t + "; b = 4" + t + ";"
         " z = x + y;"
         " c = a + b;"
         " w = x + y;"
         " x = 5" + t + ";"
         " v = x + y;"
         " return(v) }";
}

struct CseRun {
  RtlFunction pre;
  RtlFunction post;
  CseReport report;
  std::vector<Node> addNodes;  // IT+ nodes of the pre function, execution order
};

CseRun runCse(const std::string& src, const HllPolicy& pol,
              CseOptions opts = {}) {
  HllProgram prog = parseProgram(src, pol);
  CseRun out{translateFunction(prog.mainFn(), pol), {}, {}, {}};
  out.addNodes = nodesWithITag(out.pre, ITKind::Op);
  out.post = cse(out.pre, lowerFlags(pol.flags()), &out.report, opts);
  return out;
}

}  // namespace

TEST_SUITE("cse") {

TEST_CASE("extended basic blocks: straight-line code is one block") {
  const HllPolicy& ifc = policyByName("ifc");
  // No explicit return: control falls through nDef to nRet, so every node
  // is reachable and single-predecessor.
  HllProgram prog =
      parseProgram("fun main() tag P { var x; x = 1@P + 2@P }", ifc);
  RtlFunction fn = translateFunction(prog.mainFn(), ifc);
  auto ebbs = ebbPartition(fn);
  REQUIRE(ebbs.size() == 1);
  CHECK(ebbs[0].root == fn.entry);
  CHECK(ebbs[0].nodes.size() == fn.graph.size());
}

TEST_CASE("extended basic blocks: the diamond join starts a new block") {
  const HllPolicy& ifc = policyByName("ifc");
  HllProgram prog = parseProgram(
      "fun main() tag P { var x; if (x == 1@P) { x = 2@P } else { x = 3@P };"
      " return(x) }",
      ifc);
  RtlFunction fn = translateFunction(prog.mainFn(), ifc);
  auto ebbs = ebbPartition(fn);
  REQUIRE(ebbs.size() == 2);
  auto joins = nodesWithITag(fn, ITKind::IfJoin);
  REQUIRE(joins.size() == 1);
  CHECK(ebbs[1].root == joins[0]);
  // both branch bodies live in the first (entry) block tree
  auto assigns = nodesWithITag(fn, ITKind::Assign);
  std::set<Node> entryNodes(ebbs[0].nodes.begin(), ebbs[0].nodes.end());
  for (Node a : assigns) CHECK(entryNodes.count(a));
}

TEST_CASE("extended basic blocks: loop headers are roots") {
  const HllPolicy& ifc = policyByName("ifc");
  HllProgram prog = parseProgram(
      "fun main() tag P { var i; while (i < 3@P) { i = i + 1@P }; return(i) }", ifc);
  RtlFunction fn = translateFunction(prog.mainFn(), ifc);
  auto saves = nodesWithITag(fn, ITKind::SavePc);
  REQUIRE(saves.size() == 1);
  bool headerIsRoot = false;
  for (const Ebb& ebb : ebbPartition(fn)) {
    if (ebb.root == saves[0]) headerIsRoot = true;
  }
  CHECK(headerIsRoot);
}

TEST_CASE("the five-line block under taint replaces exactly the second add") {
  CseRun run = runCse(lvnBlock("F"), policyByName("taint"));
  REQUIRE(run.addNodes.size() == 4);  // z, c, w, v adds
  CHECK(run.report.replaced == 1);
  CHECK(run.post.at(run.addNodes[0]).kind == Opcode::Op);
  CHECK(run.post.at(run.addNodes[1]).kind == Opcode::Op);
  const Instr& w = run.post.at(run.addNodes[2]);
  CHECK(w.kind == Opcode::Mov);
  CHECK(w.itag == ITag::copy());
  // the copy reads the first add's destination, which still holds the atom
  CHECK(w.rs1 == run.pre.at(run.addNodes[0]).rd);
  CHECK(run.post.at(run.addNodes[3]).kind == Opcode::Op);
  CHECK(wfCheck(run.post).empty());
}

TEST_CASE("under ifc the rewrite still happens through the equal-PC chain") {
  CseRun run = runCse(lvnBlock("P"), policyByName("ifc"));
  REQUIRE(run.addNodes.size() == 4);
  CHECK(run.report.replaced == 1);
  CHECK(run.post.at(run.addNodes[2]).itag == ITag::copy());
  REQUIRE(run.report.sites.size() == 1);
  CHECK_FALSE(run.report.sites[0].viaWpci);  // ifc ops are PC-sensitive
}

TEST_CASE("an interposed PC-moving split suppresses the rewrite") {
  std::string src =
      "fun main() tag P { var z, w, x, y;"
      " x = 1@P; y = 2@P;"
      " z = x + y;"
      " if (x == x) { skip } else { skip };"
      " w = x + y;"
      " return(w) }";
  CseRun run = runCse(src, policyByName("ifc"));
  CHECK(run.report.replaced == 0);
  for (Node n : run.addNodes) CHECK(run.post.at(n).kind == Opcode::Op);
}

TEST_CASE("a repeat inside a branch: allowed under taint, blocked under ifc") {
  std::string src =
      "fun main() tag %T% { var z, w, x, y;"
      " x = 1@%L%; y = 2@%L%;"
      " z = x + y;"
      " if (x == x) { w = x + y } else { skip };"
      " return(w) }";
  auto instantiate = [&](const char* top, const char* lit) {
    std::string s = src;
    while (s.find("%T%") != std::string::npos) s.replace(s.find("%T%"), 3, top);
    while (s.find("%L%") != std::string::npos) s.replace(s.find("%L%"), 3, lit);
    return s;
  };
  // taint: the operator rule ignores the PC, so the pre-split number is usable
  CseRun taintRun = runCse(instantiate("F", "F"), policyByName("taint"));
  CHECK(taintRun.report.replaced == 1);
  REQUIRE(taintRun.report.sites.size() == 1);
  CHECK(taintRun.report.sites[0].viaWpci);
  // ifc: the split moved the PC, the op rule is PC-sensitive: no rewrite
  CseRun ifcRun = runCse(instantiate("P", "P"), policyByName("ifc"));
  CHECK(ifcRun.report.replaced == 0);
}

TEST_CASE("calls end the equal-PC window") {
  std::string src =
      "fun id(a) tag P { return(a) }\n"
      "fun main() tag P { var z, w, x, y;"
      " x = 1@P; y = 2@P;"
      " z = x + y;"
      " z = id(z);"
      " w = x + y;"
      " return(w) }";
  CseRun run = runCse(src, policyByName("ifc"));
  CHECK(run.report.replaced == 0);
}

TEST_CASE("with all flags unknown the pass is the identity") {
  HllProgram prog = parseProgram(lvnBlock("P"), policyByName("ifc"));
  RtlFunction fn = translateFunction(prog.mainFn(), policyByName("ifc"));
  CseReport report;
  RtlFunction out = cse(fn, LoweredFlags{}, &report);
  CHECK(report.replaced == 0);
  for (const auto& [n, instr] : fn.graph) {
    CHECK(out.at(n).kind == instr.kind);
  }
}

TEST_CASE("replacement soundness witness: equal inputs at every replaced site") {
  struct OpFiring {
    Node node;
    PTag pc;
    Atom a1, a2;
  };

  for (const std::string& polName : policyNames()) {
    const HllPolicy& pol = policyByName(polName);
    for (std::uint64_t seed = 400; seed < 480; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      HllProgram prog = genProgram(cfg, pol);
      RtlProgram compiled = compileProgram(prog, pol);
      LoweredPolicy lowered(pol);
      LoweredFlags flags = lowerFlags(pol.flags());

      // Collect replacement sites per function.
      std::map<std::string, CseReport> reports;
      for (const auto& [name, fn] : compiled.functions) {
        cse(fn, flags, &reports[name]);
      }

      // Instrumented run of the pre-pass code.
      std::map<std::string, std::vector<OpFiring>> firings;
      NodeHook hook = [&](const RtlFunction& fn, Node n, const Instr& instr,
                          const RegBank& bank, PTag pc) {
        if (instr.kind != Opcode::Op) return;
        firings[fn.name].push_back(
            OpFiring{n, pc, bank.get(instr.rs1), bank.get(instr.rs2)});
      };
      runRtl(compiled, lowered, 200000, nullptr, &hook);

      for (const auto& [name, report] : reports) {
        const auto& seq = firings[name];
        for (const CseReport::Site& site : report.sites) {
          // Every firing of the replaced op pairs with the most recent
          // firing of its defining occurrence.
          for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i].node != site.replaced) continue;
            std::optional<std::size_t> def;
            for (std::size_t j = i; j-- > 0;) {
              if (seq[j].node == site.defining) {
                def = j;
                break;
              }
            }
            REQUIRE(def.has_value());
            CHECK(seq[*def].a1 == seq[i].a1);
            CHECK(seq[*def].a2 == seq[i].a2);
            if (!site.viaWpci) CHECK(seq[*def].pc == seq[i].pc);
          }
        }
      }
    }
  }
}

TEST_CASE("preservation over the corpus") {
  std::vector<PassSpec> pipeline = {{PassKind::Cse, false}};
  for (const std::string& polName : policyNames()) {
    const HllPolicy& pol = policyByName(polName);
    for (std::uint64_t seed = 500; seed < 620; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      HllProgram prog = genProgram(cfg, pol);
      Verdict v = diffRun(prog, pol, 3000, pipeline);
      CHECK(v.kind != Verdict::Kind::Mismatch);
    }
  }
}

}  // TEST_SUITE
