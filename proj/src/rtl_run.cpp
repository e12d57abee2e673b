#include "tagc/rtl_run.hpp"

namespace tagc {

RtlState initialRtlState(const RtlProgram& prog, const LoweredPolicy& pol) {
  RtlState st;
  st.st = RtlState::Calling{&prog.fn("main"), {}, pol.initPc(), ITag::call()};
  return st;
}

namespace {

std::vector<VTag> tagsOf(const std::vector<Atom>& atoms) {
  std::vector<VTag> tags;
  tags.reserve(atoms.size());
  for (const Atom& a : atoms) tags.push_back(a.tag);
  return tags;
}

}  // namespace

StepStatus stepRtl(RtlState& st, const RtlProgram& prog, const LoweredPolicy& pol,
                   TraceSink& sink, std::uint64_t& fuel, const NodeHook* hook) {
  if (fuel == 0) return StepStatus::OutOfFuel;
  fuel--;

  if (auto* calling = std::get_if<RtlState::Calling>(&st.st)) {
    const RtlFunction* fn = calling->callee;
    auto r = pol.callRule(calling->itag, calling->pc, fn->fnTag, tagsOf(calling->args),
                          sink);
    if (!r.ok()) {
      st.st = RtlState::Errored{r.err()};
      return StepStatus::Failed;
    }
    const auto& outs = r.outs();
    if (outs.argTags.size() != calling->args.size()) {
      throw StuckError("call rule changed argument count");
    }
    RegBank bank(pol.defaultAtom());
    for (std::size_t i = 0; i < fn->paramRegs.size(); ++i) {
      bank.set(fn->paramRegs[i], Atom{calling->args[i].value, outs.argTags[i]});
    }
    st.st = RtlState::Regular{fn, fn->entry, outs.pc, std::move(bank)};
    return StepStatus::Continue;
  }

  if (auto* returning = std::get_if<RtlState::Returning>(&st.st)) {
    PTag pSaved = st.stack.empty() ? pol.initPc() : st.stack.back().pSaved;
    auto r = pol.retRule(returning->itag, returning->pc, pSaved, returning->atom.tag,
                         sink);
    if (!r.ok()) {
      st.st = RtlState::Errored{r.err()};
      return StepStatus::Failed;
    }
    Atom result{returning->atom.value, r.outs().tag};
    if (st.stack.empty()) {
      returning->atom = result;
      return StepStatus::Done;
    }
    RtlFrame frame = std::move(st.stack.back());
    st.stack.pop_back();
    frame.bank.set(frame.destReg, result);
    st.st = RtlState::Regular{frame.caller, frame.retNode, r.outs().pc,
                              std::move(frame.bank)};
    return StepStatus::Continue;
  }

  if (std::holds_alternative<RtlState::Errored>(st.st)) {
    throw StuckError("no transitions out of fail-stop states");
  }

  auto& reg = std::get<RtlState::Regular>(st.st);
  const RtlFunction& fn = *reg.fn;
  auto instrIt = fn.graph.find(reg.node);
  if (instrIt == fn.graph.end()) {
    throw StuckError("node n" + std::to_string(reg.node) + " unmapped in " + fn.name);
  }
  const Instr& instr = instrIt->second;
  if (hook && *hook) (*hook)(fn, reg.node, instr, reg.bank, reg.pc);

  auto fail = [&](TagErr err) {
    st.st = RtlState::Errored{std::move(err)};
    return StepStatus::Failed;
  };

  switch (instr.kind) {
    case Opcode::Nop: {
      auto r = pol.nopRule(instr.itag, reg.pc, sink);
      if (!r.ok()) return fail(r.err());
      reg.pc = r.outs();
      reg.node = instr.succ;
      return StepStatus::Continue;
    }
    case Opcode::Mov: {
      Atom src = reg.bank.get(instr.rs1);
      Atom dst = reg.bank.get(instr.rd);
      auto r = pol.movRule(instr.itag, reg.pc, src.tag, dst.tag, sink);
      if (!r.ok()) return fail(r.err());
      reg.bank.set(instr.rd, Atom{src.value, r.outs().tag});
      reg.pc = r.outs().pc;
      reg.node = instr.succ;
      return StepStatus::Continue;
    }
    case Opcode::Movi: {
      auto r = pol.moviRule(instr.itag, reg.pc, instr.imm.tag, sink);
      if (!r.ok()) return fail(r.err());
      reg.bank.set(instr.rd, Atom{instr.imm.value, r.outs().tag});
      reg.pc = r.outs().pc;
      reg.node = instr.succ;
      return StepStatus::Continue;
    }
    case Opcode::Op: {
      Atom a1 = reg.bank.get(instr.rs1);
      Atom a2 = reg.bank.get(instr.rs2);
      auto r = pol.opRule(instr.op, instr.itag, reg.pc, a1.tag, a2.tag, sink);
      if (!r.ok()) return fail(r.err());
      reg.bank.set(instr.rd, Atom{applyBinOp(instr.op, a1.value, a2.value), r.outs().tag});
      reg.pc = r.outs().pc;
      reg.node = instr.succ;
      return StepStatus::Continue;
    }
    case Opcode::Cond: {
      Atom a1 = reg.bank.get(instr.rs1);
      Atom a2 = reg.bank.get(instr.rs2);
      auto r = pol.condRule(instr.cmp, instr.itag, reg.pc, a1.tag, a2.tag, sink);
      if (!r.ok()) return fail(r.err());
      reg.pc = r.outs();
      reg.node = applyRelOp(instr.cmp, a1.value, a2.value) ? instr.succ : instr.succFalse;
      return StepStatus::Continue;
    }
    case Opcode::Call: {
      const RtlFunction* callee = &prog.fn(instr.callee);
      std::vector<Atom> args;
      args.reserve(instr.argRegs.size());
      for (Reg r : instr.argRegs) args.push_back(reg.bank.get(r));
      st.stack.push_back(
          RtlFrame{reg.fn, instr.rd, instr.succ, std::move(reg.bank), reg.pc});
      st.st = RtlState::Calling{callee, std::move(args), reg.pc, instr.itag};
      return StepStatus::Continue;
    }
    case Opcode::Ret: {
      Atom a = reg.bank.get(instr.rs1);
      st.st = RtlState::Returning{a, reg.pc, instr.itag};
      return StepStatus::Continue;
    }
  }
  throw StuckError("unknown opcode");
}

RunResult runRtl(const RtlProgram& prog, const LoweredPolicy& pol, std::uint64_t fuel,
                 TraceSink* external, const NodeHook* hook) {
  RunResult result{TimedOut{fuel}, {}};
  TraceSink sink;
  sink.collect = &result.trace;
  if (external && external->onEvent) sink.onEvent = external->onEvent;

  RtlState st = initialRtlState(prog, pol);
  std::uint64_t remaining = fuel;
  while (true) {
    StepStatus status = stepRtl(st, prog, pol, sink, remaining, hook);
    switch (status) {
      case StepStatus::Continue:
        break;
      case StepStatus::Done:
        result.behavior = Terminated{std::get<RtlState::Returning>(st.st).atom};
        return result;
      case StepStatus::Failed:
        result.behavior = FailStopped{std::get<RtlState::Errored>(st.st).err};
        return result;
      case StepStatus::OutOfFuel:
        result.behavior = TimedOut{fuel};
        return result;
    }
  }
}

}  // namespace tagc
