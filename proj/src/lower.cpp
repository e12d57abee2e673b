#include <sstream>

#include "tagc/lower.hpp"

namespace tagc {

std::string_view provenanceName(Provenance p) {
  switch (p) {
    case Provenance::HllConst:
      return "const";
    case Provenance::HllVar:
      return "var";
    case Provenance::HllBinop:
      return "binop";
    case Provenance::HllAssign:
      return "assign";
    case Provenance::HllIfSplit:
      return "ifSplit";
    case Provenance::HllIfJoin:
      return "ifJoin";
    case Provenance::HllWhileSplit:
      return "whileSplit";
    case Provenance::HllWhileExit:
      return "whileExit";
    case Provenance::HllCall:
      return "call";
    case Provenance::HllRet:
      return "ret";
    case Provenance::Administrative:
      return "administrative";
  }
  return "?";
}

const std::map<LoweredKey, Provenance>& dispatchTable() {
  static const std::map<LoweredKey, Provenance> table = {
      {{Opcode::Movi, ITKind::Const}, Provenance::HllConst},
      {{Opcode::Mov, ITKind::Var}, Provenance::HllVar},
      {{Opcode::Op, ITKind::Op}, Provenance::HllBinop},
      {{Opcode::Mov, ITKind::Assign}, Provenance::HllAssign},
      {{Opcode::Mov, ITKind::SavePc}, Provenance::Administrative},
      {{Opcode::Cond, ITKind::IfSplit}, Provenance::HllIfSplit},
      {{Opcode::Mov, ITKind::IfJoin}, Provenance::HllIfJoin},
      {{Opcode::Cond, ITKind::WhileSplit}, Provenance::HllWhileSplit},
      {{Opcode::Mov, ITKind::WhileJoin}, Provenance::HllWhileExit},
      {{Opcode::Call, ITKind::Call}, Provenance::HllCall},
      {{Opcode::Ret, ITKind::Ret}, Provenance::HllRet},
      {{Opcode::Movi, ITKind::LocalInit}, Provenance::Administrative},
      {{Opcode::Mov, ITKind::Copy}, Provenance::Administrative},
      {{Opcode::Mov, ITKind::Dc}, Provenance::Administrative},
      {{Opcode::Nop, ITKind::Dc}, Provenance::Administrative},
      {{Opcode::Movi, ITKind::Dc}, Provenance::Administrative},
      {{Opcode::Movi, ITKind::Param}, Provenance::HllBinop},
  };
  return table;
}

std::string dumpDispatch() {
  std::ostringstream os;
  for (const auto& [key, prov] : dispatchTable()) {
    os << opcodeName(key.opcode) << " " << itKindName(key.itag) << " -> "
       << provenanceName(prov) << "\n";
  }
  return os.str();
}

RuleFlags LoweredFlags::get(Opcode op, const ITag& itag) const {
  auto it = entries.find(LoweredKey{op, itag.kind});
  if (it == entries.end()) return RuleFlags{};  // all Unknown
  return it->second;
}

LoweredFlags lowerFlags(const FlagSet& f) {
  LoweredFlags lf;
  auto inherit = [&](Opcode op, ITKind it, HllRule rule) {
    lf.entries[LoweredKey{op, it}] = f.at(rule);
  };
  inherit(Opcode::Movi, ITKind::Const, HllRule::Const);
  inherit(Opcode::Mov, ITKind::Var, HllRule::Var);
  inherit(Opcode::Op, ITKind::Op, HllRule::Binop);
  inherit(Opcode::Mov, ITKind::Assign, HllRule::Assign);
  inherit(Opcode::Cond, ITKind::IfSplit, HllRule::IfSplit);
  inherit(Opcode::Mov, ITKind::IfJoin, HllRule::IfJoin);
  inherit(Opcode::Cond, ITKind::WhileSplit, HllRule::WhileSplit);
  inherit(Opcode::Mov, ITKind::WhileJoin, HllRule::WhileExit);
  inherit(Opcode::Call, ITKind::Call, HllRule::Call);
  inherit(Opcode::Ret, ITKind::Ret, HllRule::Ret);
  inherit(Opcode::Movi, ITKind::Param, HllRule::Binop);

  // Administrative identity rules.
  const RuleFlags identity{Tri::Holds, Tri::Holds, Tri::Holds, Tri::Holds};
  lf.entries[LoweredKey{Opcode::Nop, ITKind::Dc}] = identity;
  lf.entries[LoweredKey{Opcode::Movi, ITKind::Dc}] = identity;
  lf.entries[LoweredKey{Opcode::Mov, ITKind::Dc}] = identity;
  lf.entries[LoweredKey{Opcode::Movi, ITKind::LocalInit}] = identity;
  lf.entries[LoweredKey{Opcode::Mov, ITKind::Copy}] = identity;
  // The PC save never fails and keeps the PC, but its value-tag output IS the
  // PC, so it is not PC-insensitive.
  lf.entries[LoweredKey{Opcode::Mov, ITKind::SavePc}] = {Tri::Holds, Tri::Holds,
                                                         Tri::DoesNotHold,
                                                         Tri::DoesNotHold};
  return lf;
}

TagErr dispatchError(Opcode op, const ITag& itag) {
  return TagErr{"DispatchError(" + std::string(opcodeName(op)) + "," +
                std::string(itKindName(itag.kind)) + ")"};
}

bool isDispatchError(const TagErr& err) {
  return err.token.rfind("DispatchError(", 0) == 0;
}

RuleResult<PTag> LoweredPolicy::nopRule(const ITag& it, PTag p, TraceSink& sink) const {
  if (it.kind == ITKind::Dc) {
    sink.emitAdmin(it);
    return p;
  }
  return dispatchError(Opcode::Nop, it);
}

RuleResult<PcTagOuts> LoweredPolicy::movRule(const ITag& it, PTag p, VTag ts, VTag td,
                                             TraceSink& sink) const {
  const HllPolicy& pol = *base_;
  switch (it.kind) {
    case ITKind::Var: {
      auto r = fireVar(pol, p, ts, sink);
      if (!r.ok()) return r.err();
      return PcTagOuts{p, r.outs()};
    }
    case ITKind::Assign: {
      // Note the argument swap: the rule sees (old destination, source).
      auto r = fireAssign(pol, p, td, ts, sink);
      if (!r.ok()) return r.err();
      return r.outs();
    }
    case ITKind::SavePc:
      sink.emitAdmin(it);
      return PcTagOuts{p, pol.vtagOfPtag(p)};
    case ITKind::IfJoin: {
      auto r = fireJoin(pol, HllRule::IfJoin, p, pol.ptagOfVtag(ts), sink);
      if (!r.ok()) return r.err();
      return PcTagOuts{r.outs(), ts};  // the saved tag stays on the register
    }
    case ITKind::WhileJoin: {
      auto r = fireJoin(pol, HllRule::WhileExit, p, pol.ptagOfVtag(ts), sink);
      if (!r.ok()) return r.err();
      return PcTagOuts{r.outs(), ts};
    }
    case ITKind::Copy:
    case ITKind::Dc:
      sink.emitAdmin(it);
      return PcTagOuts{p, ts};
    default:
      return dispatchError(Opcode::Mov, it);
  }
}

RuleResult<PcTagOuts> LoweredPolicy::moviRule(const ITag& it, PTag p, VTag tLit,
                                              TraceSink& sink) const {
  const HllPolicy& pol = *base_;
  switch (it.kind) {
    case ITKind::Const: {
      auto r = fireConst(pol, p, tLit, sink);
      if (!r.ok()) return r.err();
      return PcTagOuts{p, r.outs()};
    }
    case ITKind::LocalInit:
    case ITKind::Dc:
      sink.emitAdmin(it);
      return PcTagOuts{p, tLit};
    case ITKind::Param: {
      // Folded operation: re-fire the source operator rule on the recorded
      // operand tags; the literal's own tag is ignored.
      auto r = fireBinop(pol, it.op, p, it.t1, it.t2, sink);
      if (!r.ok()) return r.err();
      return PcTagOuts{p, r.outs()};
    }
    default:
      return dispatchError(Opcode::Movi, it);
  }
}

RuleResult<PcTagOuts> LoweredPolicy::opRule(BinOp op, const ITag& it, PTag p, VTag t1,
                                            VTag t2, TraceSink& sink) const {
  if (it.kind == ITKind::Op && it.op == op) {
    auto r = fireBinop(*base_, op, p, t1, t2, sink);
    if (!r.ok()) return r.err();
    return PcTagOuts{p, r.outs()};
  }
  return dispatchError(Opcode::Op, it);
}

RuleResult<PTag> LoweredPolicy::condRule(RelOp cmp, const ITag& it, PTag p, VTag t1,
                                         VTag t2, TraceSink& sink) const {
  if (it.kind == ITKind::IfSplit) {
    return fireSplit(*base_, HllRule::IfSplit, p, cmp, t1, t2, sink);
  }
  if (it.kind == ITKind::WhileSplit) {
    return fireSplit(*base_, HllRule::WhileSplit, p, cmp, t1, t2, sink);
  }
  return dispatchError(Opcode::Cond, it);
}

RuleResult<CallOuts> LoweredPolicy::callRule(const ITag& it, PTag p, PTag fnTag,
                                             const std::vector<VTag>& argTags,
                                             TraceSink& sink) const {
  if (it.kind == ITKind::Call) {
    return fireCall(*base_, p, fnTag, argTags, sink);
  }
  return dispatchError(Opcode::Call, it);
}

RuleResult<PcTagOuts> LoweredPolicy::retRule(const ITag& it, PTag p, PTag pSaved,
                                             VTag tRet, TraceSink& sink) const {
  if (it.kind == ITKind::Ret) {
    return fireRet(*base_, p, pSaved, tRet, sink);
  }
  return dispatchError(Opcode::Ret, it);
}

}  // namespace tagc
