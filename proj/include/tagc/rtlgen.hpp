#pragma once

#include "tagc/hll.hpp"
#include "tagc/rtl.hpp"

namespace tagc {

// Generation metadata kept alongside the output for structural checks:
// which nodes belong to expression intervals, which save registers were live
// when each node was emitted, and the register classes in play.
struct GenAudit {
  struct NodeInfo {
    bool exprInterval = false;
    std::vector<Reg> liveSaves;
  };
  std::map<Node, NodeInfo> nodes;
  std::vector<Reg> varRegs;
  std::vector<Reg> saveRegs;
};

RtlFunction translateFunction(const FunDef& fn, const HllPolicy& pol,
                              GenAudit* audit = nullptr);

RtlProgram compileProgram(const HllProgram& prog, const HllPolicy& pol,
                          std::map<std::string, GenAudit>* audits = nullptr);

}  // namespace tagc
