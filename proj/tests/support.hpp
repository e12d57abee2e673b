#pragma once

#include <string>
#include <vector>

#include "tagc/harness.hpp"
#include "tagc/hll.hpp"
#include "tagc/lower.hpp"
#include "tagc/opt.hpp"
#include "tagc/policy.hpp"
#include "tagc/rtl_run.hpp"
#include "tagc/rtlgen.hpp"

namespace tagc::testing {

// Two-tag policy whose operator rule fail-stops on mixed operand tags while
// ignoring the PC entirely. Exercises erroring expression rules and
// compile-time rule evaluation declining a fold.
class MixPolicy final : public HllPolicy {
 public:
  MixPolicy() {
    // Rules with a PC output echo the input PC, so they are PC-pure and
    // weakly insensitive but not strongly. Expression rules have no PC
    // output and are strongly insensitive; the operator rule can fail-stop.
    for (HllRule r : allHllRules()) {
      flags_.at(r) = {Tri::Holds, Tri::Holds, Tri::Holds, Tri::DoesNotHold};
    }
    for (HllRule r : {HllRule::Const, HllRule::Var}) {
      flags_.at(r) = {Tri::Holds, Tri::Holds, Tri::Holds, Tri::Holds};
    }
    flags_.at(HllRule::Binop) = {Tri::DoesNotHold, Tri::Holds, Tri::Holds, Tri::Holds};
  }

  std::string_view name() const override { return "mix"; }
  PTag initPc() const override { return PTag{0}; }
  VTag defTag() const override { return VTag{0}; }
  const FlagSet& flags() const override { return flags_; }

  RuleResult<VTag> constRule(PTag, VTag t) const override { return t; }
  RuleResult<VTag> varRule(PTag, VTag t) const override { return t; }
  RuleResult<VTag> binopRule(BinOp, PTag, VTag t1, VTag t2) const override {
    if (t1 == t2) return t1;
    return TagErr{"MixedOperands"};
  }
  RuleResult<PcTagOuts> assignRule(PTag p, VTag, VTag tExpr) const override {
    return PcTagOuts{p, tExpr};
  }
  RuleResult<PTag> ifSplitRule(PTag p, RelOp, VTag, VTag) const override { return p; }
  RuleResult<PTag> ifJoinRule(PTag p, PTag) const override { return p; }
  RuleResult<PTag> whileSplitRule(PTag p, RelOp, VTag, VTag) const override { return p; }
  RuleResult<PTag> whileExitRule(PTag p, PTag) const override { return p; }
  RuleResult<CallOuts> callRule(PTag p, PTag, const std::vector<VTag>& ts) const override {
    return CallOuts{p, ts};
  }
  RuleResult<PcTagOuts> retRule(PTag p, PTag, VTag t) const override {
    return PcTagOuts{p, t};
  }

  std::optional<VTag> parseVTag(std::string_view s) const override {
    if (s == "A") return VTag{0};
    if (s == "B") return VTag{1};
    return std::nullopt;
  }
  std::optional<PTag> parsePTag(std::string_view s) const override {
    auto v = parseVTag(s);
    if (!v) return std::nullopt;
    return PTag{v->id};
  }
  std::string printVTag(VTag t) const override { return t.id ? "B" : "A"; }
  std::string printPTag(PTag p) const override { return p.id ? "B" : "A"; }
  std::vector<VTag> vtagUniverse() const override { return {VTag{0}, VTag{1}}; }
  std::vector<PTag> ptagUniverse() const override { return {PTag{0}, PTag{1}}; }

 private:
  FlagSet flags_;
};

inline const MixPolicy& mixPolicy() {
  static const MixPolicy pol;
  return pol;
}

inline RunResult runSource(const std::string& text, const HllPolicy& pol,
                           std::uint64_t fuel = 100000) {
  return runHll(parseProgram(text, pol), pol, fuel);
}

inline std::vector<HllRule> ruleNames(const RuleTrace& trace) {
  std::vector<HllRule> names;
  names.reserve(trace.events.size());
  for (const RuleEvent& ev : trace.events) names.push_back(ev.rule);
  return names;
}

// Compiles and runs under the lowered policy, optionally through passes.
inline RunResult runCompiled(const HllProgram& prog, const HllPolicy& pol,
                             std::uint64_t fuel = 100000,
                             std::span<const PassSpec> passes = {}) {
  RtlProgram compiled = compileProgram(prog, pol);
  LoweredPolicy lowered(pol);
  LoweredFlags flags = lowerFlags(pol.flags());
  RtlProgram optimized = runPasses(compiled, lowered, flags, passes);
  return runRtl(optimized, lowered, kFuelScale * fuel + kFuelSlack);
}

// Nodes carrying a given I-tag kind, in execution-ish order (labels are
// allocated in reverse execution order, so descending).
inline std::vector<Node> nodesWithITag(const RtlFunction& fn, ITKind kind) {
  std::vector<Node> out;
  for (auto it = fn.graph.rbegin(); it != fn.graph.rend(); ++it) {
    if (it->second.itag.kind == kind) out.push_back(it->first);
  }
  return out;
}

inline int countKind(const RtlFunction& fn, Opcode op) {
  int n = 0;
  for (const auto& [node, instr] : fn.graph) {
    if (instr.kind == op) n++;
  }
  return n;
}

// Expression intervals must not write variable homes or live save registers,
// and their destinations are fresh (pairwise distinct).
inline std::vector<std::string> scanInterference(const RtlFunction& fn,
                                                 const GenAudit& audit) {
  std::vector<std::string> defects;
  std::set<Reg> varRegs(audit.varRegs.begin(), audit.varRegs.end());
  std::set<Reg> seenDests;
  for (const auto& [n, info] : audit.nodes) {
    if (!info.exprInterval) continue;
    auto it = fn.graph.find(n);
    if (it == fn.graph.end()) continue;
    auto dest = it->second.def();
    if (!dest) continue;
    if (varRegs.count(*dest)) {
      defects.push_back("expr interval writes variable register r" +
                        std::to_string(*dest));
    }
    for (Reg save : info.liveSaves) {
      if (*dest == save) {
        defects.push_back("expr interval writes live save register r" +
                          std::to_string(save));
      }
    }
    if (!seenDests.insert(*dest).second) {
      defects.push_back("expr interval reuses destination r" + std::to_string(*dest));
    }
  }
  return defects;
}

// Save registers are pairwise distinct and disjoint from variable homes.
inline std::vector<std::string> scanSaveStack(const GenAudit& audit) {
  std::vector<std::string> defects;
  std::set<Reg> saves;
  for (Reg r : audit.saveRegs) {
    if (!saves.insert(r).second) {
      defects.push_back("save register r" + std::to_string(r) + " reused");
    }
  }
  for (Reg v : audit.varRegs) {
    if (saves.count(v)) {
      defects.push_back("save register r" + std::to_string(v) + " aliases a variable");
    }
  }
  return defects;
}

inline std::optional<std::size_t> traceDivergence(const RuleTrace& a,
                                                  const RuleTrace& b) {
  std::size_t n = std::min(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a.events[i] == b.events[i])) return i;
  }
  if (a.events.size() != b.events.size()) return n;
  return std::nullopt;
}

}  // namespace tagc::testing
