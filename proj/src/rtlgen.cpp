#include "tagc/rtlgen.hpp"

namespace tagc {

namespace {

// Graphs are built in reverse execution order: every instruction names its
// successor, so the last instruction of a construct is emitted first and
// entry labels come out numerically largest.
class GenState {
 public:
  GenState(const FunDef& fn, const HllPolicy& pol, GenAudit* audit)
      : fn_(fn), pol_(pol), audit_(audit) {
    for (const std::string& p : fn.params) {
      Reg r = freshReg();
      varMap_[p] = r;
      out_.paramRegs.push_back(r);
    }
    for (const std::string& l : fn.locals) varMap_[l] = freshReg();
    out_.retReg = freshReg();
    if (audit_) {
      for (const auto& [name, r] : varMap_) audit_->varRegs.push_back(r);
    }
  }

  RtlFunction translate() {
    out_.name = fn_.name;
    out_.fnTag = fn_.fnTag;
    out_.nRet = emit(Instr::ret(out_.retReg));
    out_.nDef = emit(Instr::movi(pol_.defaultAtom(), out_.retReg, out_.nRet, ITag::dc()));
    Node bodyEntry = stmt(*fn_.body, out_.nDef);
    // Local-variable initialization fires no observable rule; emit the chain
    // in reverse so execution order follows declaration order.
    Node entry = bodyEntry;
    for (auto it = fn_.locals.rbegin(); it != fn_.locals.rend(); ++it) {
      entry = emit(Instr::movi(pol_.defaultAtom(), varMap_.at(*it), entry,
                               ITag::localInit()));
    }
    out_.entry = entry;
    return std::move(out_);
  }

 private:
  Reg freshReg() { return nextReg_++; }

  Node emit(Instr instr) {
    Node n = nextNode_++;
    if (audit_) {
      audit_->nodes[n] = GenAudit::NodeInfo{inExpr_, saveStack_};
    }
    out_.graph.emplace(n, std::move(instr));
    return n;
  }

  Node reserveNode() { return nextNode_++; }

  void place(Node n, Instr instr) {
    if (audit_) {
      audit_->nodes[n] = GenAudit::NodeInfo{inExpr_, saveStack_};
    }
    out_.graph.emplace(n, std::move(instr));
  }

  // Expression intervals are linear chains writing only fresh registers.
  Node exprInto(const Expr& e, Reg rd, Node nSucc) {
    bool saved = inExpr_;
    inExpr_ = true;
    Node nEntry = 0;
    if (const auto* lit = std::get_if<LitExpr>(&e.node)) {
      nEntry = emit(Instr::movi(lit->atom, rd, nSucc, ITag::constLit()));
    } else if (const auto* var = std::get_if<VarExpr>(&e.node)) {
      nEntry = emit(Instr::mov(varMap_.at(var->name), rd, nSucc, ITag::var()));
    } else {
      const auto& bin = std::get<BinExpr>(e.node);
      Reg r1 = freshReg();
      Reg r2 = freshReg();
      Node nOp = emit(Instr::binop(bin.op, r1, r2, rd, nSucc, ITag::opTag(bin.op)));
      Node n2 = exprInto(*bin.rhs, r2, nOp);
      nEntry = exprInto(*bin.lhs, r1, n2);
    }
    inExpr_ = saved;
    return nEntry;
  }

  std::pair<Node, Reg> expr(const Expr& e, Node nSucc) {
    Reg rd = freshReg();
    return {exprInto(e, rd, nSucc), rd};
  }

  Node stmt(const Stmt& s, Node nSucc) {
    if (std::holds_alternative<SkipStmt>(s.node)) {
      return nSucc;  // empty interval
    }

    if (const auto* seq = std::get_if<SeqStmt>(&s.node)) {
      Node n1 = stmt(*seq->second, nSucc);
      return stmt(*seq->first, n1);
    }

    if (const auto* assign = std::get_if<AssignStmt>(&s.node)) {
      Reg r = freshReg();
      Node nMov = emit(Instr::mov(r, varMap_.at(assign->target), nSucc, ITag::assign()));
      return exprInto(*assign->value, r, nMov);
    }

    if (const auto* ifs = std::get_if<IfStmt>(&s.node)) {
      Reg rPc = freshReg();
      saveStack_.push_back(rPc);
      if (audit_) audit_->saveRegs.push_back(rPc);
      Node nJoin = emit(Instr::mov(rPc, rPc, nSucc, ITag::ifJoin()));
      Node nThen = stmt(*ifs->thenBody, nJoin);
      Node nElse = stmt(*ifs->elseBody, nJoin);
      Reg r1 = freshReg();
      Reg r2 = freshReg();
      Node nCond = emit(Instr::cond(ifs->cmp, r1, r2, nThen, nElse, ITag::ifSplit()));
      Node n2 = exprInto(*ifs->rhs, r2, nCond);
      Node n1 = exprInto(*ifs->lhs, r1, n2);
      Node nSave = emit(Instr::mov(rPc, rPc, n1, ITag::savePc()));
      saveStack_.pop_back();
      return nSave;
    }

    if (const auto* wh = std::get_if<WhileStmt>(&s.node)) {
      Reg rPc = freshReg();
      saveStack_.push_back(rPc);
      if (audit_) audit_->saveRegs.push_back(rPc);
      // Two join nodes: the loop exit and the back edge, both fed the
      // split-point PC tag from the save register.
      Node nExit = emit(Instr::mov(rPc, rPc, nSucc, ITag::whileJoin()));
      Node nSave = reserveNode();
      Node nBack = emit(Instr::mov(rPc, rPc, nSave, ITag::whileJoin()));
      Node nBody = stmt(*wh->body, nBack);
      Reg r1 = freshReg();
      Reg r2 = freshReg();
      Node nCond = emit(Instr::cond(wh->cmp, r1, r2, nBody, nExit, ITag::whileSplit()));
      Node n2 = exprInto(*wh->rhs, r2, nCond);
      Node n1 = exprInto(*wh->lhs, r1, n2);
      place(nSave, Instr::mov(rPc, rPc, n1, ITag::savePc()));
      saveStack_.pop_back();
      return nSave;
    }

    if (const auto* call = std::get_if<CallStmt>(&s.node)) {
      std::vector<Reg> argRegs;
      argRegs.reserve(call->args.size());
      for (std::size_t i = 0; i < call->args.size(); ++i) argRegs.push_back(freshReg());
      Node nCall = emit(Instr::call(call->callee, argRegs, varMap_.at(call->target),
                                    nSucc, ITag::call()));
      Node n = nCall;
      for (std::size_t i = call->args.size(); i-- > 0;) {
        n = exprInto(*call->args[i], argRegs[i], n);
      }
      return n;
    }

    const auto& ret = std::get<ReturnStmt>(s.node);
    // Jumps straight to the predefined exit; the successor is unused.
    Reg r = freshReg();
    Node nMov = emit(Instr::mov(r, out_.retReg, out_.nRet, ITag::dc()));
    return exprInto(*ret.value, r, nMov);
  }

  const FunDef& fn_;
  const HllPolicy& pol_;
  GenAudit* audit_;
  RtlFunction out_;
  std::map<std::string, Reg> varMap_;
  std::vector<Reg> saveStack_;
  Reg nextReg_ = 1;
  Node nextNode_ = 1;
  bool inExpr_ = false;
};

}  // namespace

RtlFunction translateFunction(const FunDef& fn, const HllPolicy& pol, GenAudit* audit) {
  GenState gen(fn, pol, audit);
  return gen.translate();
}

RtlProgram compileProgram(const HllProgram& prog, const HllPolicy& pol,
                          std::map<std::string, GenAudit>* audits) {
  RtlProgram out;
  for (const auto& [name, fn] : prog.functions) {
    GenAudit* audit = nullptr;
    if (audits) audit = &(*audits)[name];
    out.functions.emplace(name, translateFunction(fn, pol, audit));
  }
  return out;
}

}  // namespace tagc
