#include "tagc/hll.hpp"

namespace tagc {

ContPtr contEmp() {
  static const ContPtr emp = std::make_shared<LocalCont>(LocalCont{LocalCont::Emp{}});
  return emp;
}
ContPtr contSeq(StmtPtr s, ContPtr next) {
  return std::make_shared<LocalCont>(LocalCont{LocalCont::SeqK{std::move(s), std::move(next)}});
}
ContPtr contJoin(JoinKind kind, PTag pSplit, ContPtr next) {
  return std::make_shared<LocalCont>(LocalCont{LocalCont::JoinK{kind, pSplit, std::move(next)}});
}

EvalOutcome evalExpr(const Env& env, PTag pc, const Expr& e, const HllPolicy& pol,
                     TraceSink& sink, std::uint64_t& fuel) {
  if (fuel == 0) return {EvalOutcome::Kind::OutOfFuel, {}, {}};
  fuel--;

  if (const auto* lit = std::get_if<LitExpr>(&e.node)) {
    auto r = fireConst(pol, pc, lit->atom.tag, sink);
    if (!r.ok()) return {EvalOutcome::Kind::RuleError, {}, r.err()};
    return {EvalOutcome::Kind::Ok, Atom{lit->atom.value, r.outs()}, {}};
  }

  if (const auto* var = std::get_if<VarExpr>(&e.node)) {
    auto it = env.find(var->name);
    if (it == env.end()) throw StuckError("unbound variable " + var->name);
    auto r = fireVar(pol, pc, it->second.tag, sink);
    if (!r.ok()) return {EvalOutcome::Kind::RuleError, {}, r.err()};
    return {EvalOutcome::Kind::Ok, Atom{it->second.value, r.outs()}, {}};
  }

  const auto& bin = std::get<BinExpr>(e.node);
  EvalOutcome lhs = evalExpr(env, pc, *bin.lhs, pol, sink, fuel);
  if (lhs.kind != EvalOutcome::Kind::Ok) return lhs;  // left error wins
  EvalOutcome rhs = evalExpr(env, pc, *bin.rhs, pol, sink, fuel);
  if (rhs.kind != EvalOutcome::Kind::Ok) return rhs;
  auto r = fireBinop(pol, bin.op, pc, lhs.atom.tag, rhs.atom.tag, sink);
  if (!r.ok()) return {EvalOutcome::Kind::RuleError, {}, r.err()};
  return {EvalOutcome::Kind::Ok,
          Atom{applyBinOp(bin.op, lhs.atom.value, rhs.atom.value), r.outs()}, {}};
}

HllState initialState(const HllProgram& prog, const HllPolicy& pol) {
  HllState st;
  st.st = HllState::Calling{&prog.mainFn(), {}, pol.initPc()};
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

StepStatus stepHll(HllState& st, const HllProgram& prog, const HllPolicy& pol,
                   TraceSink& sink, std::uint64_t& fuel) {
  if (fuel == 0) return StepStatus::OutOfFuel;
  fuel--;

  if (auto* calling = std::get_if<HllState::Calling>(&st.st)) {
    const FunDef* fn = calling->callee;
    auto r = fireCall(pol, calling->pc, fn->fnTag, tagsOf(calling->args), sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    const auto& outs = r.outs();
    if (outs.argTags.size() != calling->args.size()) {
      throw StuckError("call rule changed argument count");
    }
    Env env;
    for (std::size_t i = 0; i < fn->params.size(); ++i) {
      env[fn->params[i]] = Atom{calling->args[i].value, outs.argTags[i]};
    }
    for (const std::string& l : fn->locals) env[l] = pol.defaultAtom();
    st.st = HllState::Regular{fn, fn->body, outs.pc, contEmp(), std::move(env)};
    return StepStatus::Continue;
  }

  if (auto* returning = std::get_if<HllState::Returning>(&st.st)) {
    // main is treated as called from a virtual context whose saved PC tag is
    // the initial one.
    PTag pSaved = st.stack.empty() ? pol.initPc() : st.stack.back().pSaved;
    auto r = fireRet(pol, returning->pc, pSaved, returning->atom.tag, sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    Atom result{returning->atom.value, r.outs().tag};
    if (st.stack.empty()) {
      returning->atom = result;
      return StepStatus::Done;
    }
    HllFrame frame = std::move(st.stack.back());
    st.stack.pop_back();
    frame.env[frame.destVar] = result;
    st.st = HllState::Regular{frame.caller, makeSkip(), r.outs().pc,
                              std::move(frame.cont), std::move(frame.env)};
    return StepStatus::Continue;
  }

  if (std::holds_alternative<HllState::Errored>(st.st)) {
    throw StuckError("no transitions out of fail-stop states");
  }

  auto& reg = std::get<HllState::Regular>(st.st);
  const Stmt& s = *reg.stmt;

  auto evalOrStop = [&](const Expr& e, Atom& out) -> std::optional<StepStatus> {
    EvalOutcome o = evalExpr(reg.env, reg.pc, e, pol, sink, fuel);
    if (o.kind == EvalOutcome::Kind::OutOfFuel) return StepStatus::OutOfFuel;
    if (o.kind == EvalOutcome::Kind::RuleError) {
      st.st = HllState::Errored{o.err};
      return StepStatus::Failed;
    }
    out = o.atom;
    return std::nullopt;
  };

  if (std::holds_alternative<SkipStmt>(s.node)) {
    const LocalCont& k = *reg.cont;
    if (std::holds_alternative<LocalCont::Emp>(k.node)) {
      // Fall through: the function returns the default atom.
      st.st = HllState::Returning{pol.defaultAtom(), reg.pc};
      return StepStatus::Continue;
    }
    if (const auto* seqk = std::get_if<LocalCont::SeqK>(&k.node)) {
      reg.stmt = seqk->stmt;
      reg.cont = seqk->next;
      return StepStatus::Continue;
    }
    const auto& joink = std::get<LocalCont::JoinK>(k.node);
    auto r = fireJoin(pol,
                      joink.kind == JoinKind::IfJoin ? HllRule::IfJoin : HllRule::WhileExit,
                      reg.pc, joink.pSplit, sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    reg.pc = r.outs();
    reg.cont = joink.next;
    return StepStatus::Continue;
  }

  if (const auto* seq = std::get_if<SeqStmt>(&s.node)) {
    reg.cont = contSeq(seq->second, reg.cont);
    reg.stmt = seq->first;
    return StepStatus::Continue;
  }

  if (const auto* assign = std::get_if<AssignStmt>(&s.node)) {
    Atom value;
    if (auto stop = evalOrStop(*assign->value, value)) return *stop;
    auto it = reg.env.find(assign->target);
    if (it == reg.env.end()) throw StuckError("unbound variable " + assign->target);
    auto r = fireAssign(pol, reg.pc, it->second.tag, value.tag, sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    it->second = Atom{value.value, r.outs().tag};
    reg.pc = r.outs().pc;
    reg.stmt = makeSkip();
    return StepStatus::Continue;
  }

  if (const auto* ifs = std::get_if<IfStmt>(&s.node)) {
    Atom lhs, rhs;
    if (auto stop = evalOrStop(*ifs->lhs, lhs)) return *stop;
    if (auto stop = evalOrStop(*ifs->rhs, rhs)) return *stop;
    auto r = fireSplit(pol, HllRule::IfSplit, reg.pc, ifs->cmp, lhs.tag, rhs.tag, sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    reg.cont = contJoin(JoinKind::IfJoin, reg.pc, reg.cont);
    reg.stmt = applyRelOp(ifs->cmp, lhs.value, rhs.value) ? ifs->thenBody : ifs->elseBody;
    reg.pc = r.outs();
    return StepStatus::Continue;
  }

  if (const auto* wh = std::get_if<WhileStmt>(&s.node)) {
    Atom lhs, rhs;
    if (auto stop = evalOrStop(*wh->lhs, lhs)) return *stop;
    if (auto stop = evalOrStop(*wh->rhs, rhs)) return *stop;
    auto r = fireSplit(pol, HllRule::WhileSplit, reg.pc, wh->cmp, lhs.tag, rhs.tag, sink);
    if (!r.ok()) {
      st.st = HllState::Errored{r.err()};
      return StepStatus::Failed;
    }
    // Each test is a split; every path out of a test reaches exactly one
    // WhileExit join that receives this test's input PC tag.
    if (applyRelOp(wh->cmp, lhs.value, rhs.value)) {
      reg.cont = contJoin(JoinKind::WhileExit, reg.pc, contSeq(reg.stmt, reg.cont));
      reg.stmt = wh->body;
    } else {
      reg.cont = contJoin(JoinKind::WhileExit, reg.pc, reg.cont);
      reg.stmt = makeSkip();
    }
    reg.pc = r.outs();
    return StepStatus::Continue;
  }

  if (const auto* call = std::get_if<CallStmt>(&s.node)) {
    std::vector<Atom> args;
    args.reserve(call->args.size());
    for (const ExprPtr& argExpr : call->args) {
      Atom a;
      if (auto stop = evalOrStop(*argExpr, a)) return *stop;
      args.push_back(a);
    }
    const FunDef* callee = &prog.fn(call->callee);
    st.stack.push_back(HllFrame{reg.fn, call->target, reg.cont, std::move(reg.env), reg.pc});
    st.st = HllState::Calling{callee, std::move(args), reg.pc};
    return StepStatus::Continue;
  }

  const auto& ret = std::get<ReturnStmt>(s.node);
  Atom value;
  if (auto stop = evalOrStop(*ret.value, value)) return *stop;
  st.st = HllState::Returning{value, reg.pc};
  return StepStatus::Continue;
}

RunResult runHll(const HllProgram& prog, const HllPolicy& pol, std::uint64_t fuel,
                 TraceSink* external) {
  RunResult result{TimedOut{fuel}, {}};
  TraceSink sink;
  sink.collect = &result.trace;
  if (external && external->onEvent) sink.onEvent = external->onEvent;

  HllState st = initialState(prog, pol);
  std::uint64_t remaining = fuel;
  while (true) {
    StepStatus status = stepHll(st, prog, pol, sink, remaining);
    switch (status) {
      case StepStatus::Continue:
        break;
      case StepStatus::Done:
        result.behavior = Terminated{std::get<HllState::Returning>(st.st).atom};
        return result;
      case StepStatus::Failed:
        result.behavior = FailStopped{std::get<HllState::Errored>(st.st).err};
        return result;
      case StepStatus::OutOfFuel:
        result.behavior = TimedOut{fuel};
        return result;
    }
  }
}

}  // namespace tagc
