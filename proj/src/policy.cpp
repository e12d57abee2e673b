#include "tagc/policy.hpp"

#include <sstream>
#include <stdexcept>

namespace tagc {

namespace {

// ---------------------------------------------------------------------------
// IFC secrecy: boolean tags on values and the PC, true = secret. Writes of
// secret data (or writes under a secret PC) to a public-tagged location
// fail-stop; join points restore the split-point PC tag.

constexpr std::uint32_t kPublic = 0;
constexpr std::uint32_t kSecret = 1;

const TagErr kIfcWriteViolation{"IfcWriteViolation"};

VTag vjoin(VTag a, VTag b) { return VTag{a.id | b.id}; }

class IfcPolicy final : public HllPolicy {
 public:
  IfcPolicy() {
    auto& f = flags_;
    for (HllRule r : {HllRule::Const, HllRule::Var, HllRule::Binop}) {
      f.at(r) = {Tri::Holds, Tri::Holds, Tri::DoesNotHold, Tri::DoesNotHold};
    }
    // assign can fail-stop (its error depends on the PC input) but keeps the
    // PC tag unchanged.
    f.at(HllRule::Assign) = {Tri::DoesNotHold, Tri::Holds, Tri::DoesNotHold,
                             Tri::DoesNotHold};
    for (HllRule r : {HllRule::IfSplit, HllRule::WhileSplit}) {
      f.at(r) = {Tri::Holds, Tri::DoesNotHold, Tri::DoesNotHold, Tri::DoesNotHold};
    }
    for (HllRule r : {HllRule::IfJoin, HllRule::WhileExit}) {
      f.at(r) = {Tri::Holds, Tri::DoesNotHold, Tri::DoesNotHold, Tri::DoesNotHold};
    }
    f.at(HllRule::Call) = {Tri::Holds, Tri::Holds, Tri::DoesNotHold, Tri::DoesNotHold};
    f.at(HllRule::Ret) = {Tri::Holds, Tri::DoesNotHold, Tri::DoesNotHold,
                          Tri::DoesNotHold};
  }

  std::string_view name() const override { return "ifc"; }
  PTag initPc() const override { return PTag{kPublic}; }
  VTag defTag() const override { return VTag{kPublic}; }
  const FlagSet& flags() const override { return flags_; }

  RuleResult<VTag> constRule(PTag, VTag t) const override { return t; }
  RuleResult<VTag> varRule(PTag, VTag t) const override { return t; }

  RuleResult<VTag> binopRule(BinOp, PTag p, VTag t1, VTag t2) const override {
    return VTag{t1.id | t2.id | p.id};
  }

  RuleResult<PcTagOuts> assignRule(PTag p, VTag tOld, VTag tExpr) const override {
    // (tExpr or p) must imply tOld
    std::uint32_t lhs = tExpr.id | p.id;
    if ((lhs & ~tOld.id) != 0) return kIfcWriteViolation;
    return PcTagOuts{p, tOld};
  }

  RuleResult<PTag> ifSplitRule(PTag p, RelOp, VTag t1, VTag t2) const override {
    return PTag{t1.id | t2.id | p.id};
  }
  RuleResult<PTag> ifJoinRule(PTag, PTag pSplit) const override { return pSplit; }
  RuleResult<PTag> whileSplitRule(PTag p, RelOp cmp, VTag t1, VTag t2) const override {
    return ifSplitRule(p, cmp, t1, t2);
  }
  RuleResult<PTag> whileExitRule(PTag, PTag pSplit) const override { return pSplit; }

  RuleResult<CallOuts> callRule(PTag p, PTag, const std::vector<VTag>& argTags) const override {
    return CallOuts{p, argTags};
  }
  RuleResult<PcTagOuts> retRule(PTag, PTag pSaved, VTag tRet) const override {
    // The caller's context level is restored at return, like a join point.
    return PcTagOuts{pSaved, tRet};
  }

  std::optional<VTag> parseVTag(std::string_view s) const override {
    if (s == "P") return VTag{kPublic};
    if (s == "S") return VTag{kSecret};
    return std::nullopt;
  }
  std::optional<PTag> parsePTag(std::string_view s) const override {
    auto v = parseVTag(s);
    if (!v) return std::nullopt;
    return PTag{v->id};
  }
  std::string printVTag(VTag t) const override { return t.id ? "S" : "P"; }
  std::string printPTag(PTag p) const override { return p.id ? "S" : "P"; }

  std::vector<VTag> vtagUniverse() const override {
    return {VTag{kPublic}, VTag{kSecret}};
  }
  std::vector<PTag> ptagUniverse() const override {
    return {PTag{kPublic}, PTag{kSecret}};
  }

 private:
  FlagSet flags_;
};

// ---------------------------------------------------------------------------
// Taint propagation: boolean value tags (true = tainted), the PC tag is
// carried but ignored. Every rule joins its value-tag inputs and never
// errors.

class TaintPolicy final : public HllPolicy {
 public:
  TaintPolicy() {
    for (HllRule r : allHllRules()) {
      flags_.at(r) = {Tri::Holds, Tri::Holds, Tri::Unknown, Tri::Unknown};
    }
    flags_.at(HllRule::Binop) = {Tri::Holds, Tri::Holds, Tri::Holds, Tri::Holds};
  }

  std::string_view name() const override { return "taint"; }
  PTag initPc() const override { return PTag{0}; }
  VTag defTag() const override { return VTag{0}; }
  const FlagSet& flags() const override { return flags_; }

  RuleResult<VTag> constRule(PTag, VTag t) const override { return t; }
  RuleResult<VTag> varRule(PTag, VTag t) const override { return t; }
  RuleResult<VTag> binopRule(BinOp, PTag, VTag t1, VTag t2) const override {
    return vjoin(t1, t2);
  }
  RuleResult<PcTagOuts> assignRule(PTag p, VTag tOld, VTag tExpr) const override {
    return PcTagOuts{p, vjoin(tOld, tExpr)};
  }
  RuleResult<PTag> ifSplitRule(PTag p, RelOp, VTag, VTag) const override { return p; }
  RuleResult<PTag> ifJoinRule(PTag p, PTag) const override { return p; }
  RuleResult<PTag> whileSplitRule(PTag p, RelOp, VTag, VTag) const override {
    return p;
  }
  RuleResult<PTag> whileExitRule(PTag p, PTag) const override { return p; }
  RuleResult<CallOuts> callRule(PTag p, PTag, const std::vector<VTag>& argTags) const override {
    return CallOuts{p, argTags};
  }
  RuleResult<PcTagOuts> retRule(PTag p, PTag, VTag tRet) const override {
    return PcTagOuts{p, tRet};
  }

  std::optional<VTag> parseVTag(std::string_view s) const override {
    if (s == "F") return VTag{0};
    if (s == "T") return VTag{1};
    return std::nullopt;
  }
  std::optional<PTag> parsePTag(std::string_view s) const override {
    auto v = parseVTag(s);
    if (!v) return std::nullopt;
    return PTag{v->id};
  }
  std::string printVTag(VTag t) const override { return t.id ? "T" : "F"; }
  std::string printPTag(PTag p) const override { return p.id ? "T" : "F"; }
  std::vector<VTag> vtagUniverse() const override { return {VTag{0}, VTag{1}}; }
  std::vector<PTag> ptagUniverse() const override { return {PTag{0}, PTag{1}}; }

 private:
  FlagSet flags_;
};

// ---------------------------------------------------------------------------
// Unit: a one-point tag domain; every rule succeeds and every property holds.

class UnitPolicy final : public HllPolicy {
 public:
  UnitPolicy() {
    for (HllRule r : allHllRules()) {
      flags_.at(r) = {Tri::Holds, Tri::Holds, Tri::Holds, Tri::Holds};
    }
  }

  std::string_view name() const override { return "unit"; }
  PTag initPc() const override { return PTag{0}; }
  VTag defTag() const override { return VTag{0}; }
  const FlagSet& flags() const override { return flags_; }

  RuleResult<VTag> constRule(PTag, VTag) const override { return VTag{0}; }
  RuleResult<VTag> varRule(PTag, VTag) const override { return VTag{0}; }
  RuleResult<VTag> binopRule(BinOp, PTag, VTag, VTag) const override {
    return VTag{0};
  }
  RuleResult<PcTagOuts> assignRule(PTag, VTag, VTag) const override {
    return PcTagOuts{PTag{0}, VTag{0}};
  }
  RuleResult<PTag> ifSplitRule(PTag, RelOp, VTag, VTag) const override {
    return PTag{0};
  }
  RuleResult<PTag> ifJoinRule(PTag, PTag) const override { return PTag{0}; }
  RuleResult<PTag> whileSplitRule(PTag, RelOp, VTag, VTag) const override {
    return PTag{0};
  }
  RuleResult<PTag> whileExitRule(PTag, PTag) const override { return PTag{0}; }
  RuleResult<CallOuts> callRule(PTag, PTag, const std::vector<VTag>& argTags) const override {
    return CallOuts{PTag{0}, std::vector<VTag>(argTags.size(), VTag{0})};
  }
  RuleResult<PcTagOuts> retRule(PTag, PTag, VTag) const override {
    return PcTagOuts{PTag{0}, VTag{0}};
  }

  std::optional<VTag> parseVTag(std::string_view s) const override {
    if (s == "U") return VTag{0};
    return std::nullopt;
  }
  std::optional<PTag> parsePTag(std::string_view s) const override {
    if (s == "U") return PTag{0};
    return std::nullopt;
  }
  std::string printVTag(VTag) const override { return "U"; }
  std::string printPTag(PTag) const override { return "U"; }
  std::vector<VTag> vtagUniverse() const override { return {VTag{0}}; }
  std::vector<PTag> ptagUniverse() const override { return {PTag{0}}; }

 private:
  FlagSet flags_;
};

}  // namespace

const HllPolicy& policyByName(std::string_view name) {
  static const IfcPolicy ifc;
  static const TaintPolicy taint;
  static const UnitPolicy unit;
  if (name == "ifc") return ifc;
  if (name == "taint") return taint;
  if (name == "unit") return unit;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

std::vector<std::string> policyNames() { return {"ifc", "taint", "unit"}; }

// ---------------------------------------------------------------------------
// Rule firing with event recording

namespace {

template <typename Outs>
void finishEvent(RuleEvent& ev, const RuleResult<Outs>& r, TraceSink& sink,
                 std::optional<PTag> pcOut, std::vector<VTag> tagOuts) {
  if (r.ok()) {
    ev.ok = true;
    ev.pcOut = pcOut;
    ev.tagOuts = std::move(tagOuts);
  } else {
    ev.ok = false;
    ev.err = r.err();
  }
  sink.emit(std::move(ev));
}

}  // namespace

RuleResult<VTag> fireConst(const HllPolicy& pol, PTag p, VTag t, TraceSink& sink) {
  auto r = pol.constRule(p, t);
  RuleEvent ev;
  ev.rule = HllRule::Const;
  ev.pc = p;
  ev.tagArgs = {t};
  finishEvent(ev, r, sink, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  return r;
}

RuleResult<VTag> fireVar(const HllPolicy& pol, PTag p, VTag t, TraceSink& sink) {
  auto r = pol.varRule(p, t);
  RuleEvent ev;
  ev.rule = HllRule::Var;
  ev.pc = p;
  ev.tagArgs = {t};
  finishEvent(ev, r, sink, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  return r;
}

RuleResult<VTag> fireBinop(const HllPolicy& pol, BinOp op, PTag p, VTag t1, VTag t2,
                           TraceSink& sink) {
  auto r = pol.binopRule(op, p, t1, t2);
  RuleEvent ev;
  ev.rule = HllRule::Binop;
  ev.op = op;
  ev.pc = p;
  ev.tagArgs = {t1, t2};
  finishEvent(ev, r, sink, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  return r;
}

RuleResult<PcTagOuts> fireAssign(const HllPolicy& pol, PTag p, VTag tOld, VTag tExpr,
                                 TraceSink& sink) {
  auto r = pol.assignRule(p, tOld, tExpr);
  RuleEvent ev;
  ev.rule = HllRule::Assign;
  ev.pc = p;
  ev.tagArgs = {tOld, tExpr};
  finishEvent(ev, r, sink, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
              r.ok() ? std::vector<VTag>{r.outs().tag} : std::vector<VTag>{});
  return r;
}

RuleResult<PTag> fireSplit(const HllPolicy& pol, HllRule which, PTag p, RelOp cmp,
                           VTag t1, VTag t2, TraceSink& sink) {
  auto r = which == HllRule::IfSplit ? pol.ifSplitRule(p, cmp, t1, t2)
                                     : pol.whileSplitRule(p, cmp, t1, t2);
  RuleEvent ev;
  ev.rule = which;
  ev.cmp = cmp;
  ev.pc = p;
  ev.tagArgs = {t1, t2};
  finishEvent(ev, r, sink, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  return r;
}

RuleResult<PTag> fireJoin(const HllPolicy& pol, HllRule which, PTag p, PTag pSplit,
                          TraceSink& sink) {
  auto r = which == HllRule::IfJoin ? pol.ifJoinRule(p, pSplit)
                                    : pol.whileExitRule(p, pSplit);
  RuleEvent ev;
  ev.rule = which;
  ev.pc = p;
  ev.pAux = pSplit;
  finishEvent(ev, r, sink, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  return r;
}

RuleResult<CallOuts> fireCall(const HllPolicy& pol, PTag p, PTag fnTag,
                              const std::vector<VTag>& argTags, TraceSink& sink) {
  auto r = pol.callRule(p, fnTag, argTags);
  RuleEvent ev;
  ev.rule = HllRule::Call;
  ev.pc = p;
  ev.pAux = fnTag;
  ev.tagArgs = argTags;
  finishEvent(ev, r, sink, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
              r.ok() ? r.outs().argTags : std::vector<VTag>{});
  return r;
}

RuleResult<PcTagOuts> fireRet(const HllPolicy& pol, PTag p, PTag pSaved, VTag tRet,
                              TraceSink& sink) {
  auto r = pol.retRule(p, pSaved, tRet);
  RuleEvent ev;
  ev.rule = HllRule::Ret;
  ev.pc = p;
  ev.pAux = pSaved;
  ev.tagArgs = {tRet};
  finishEvent(ev, r, sink, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
              r.ok() ? std::vector<VTag>{r.outs().tag} : std::vector<VTag>{});
  return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string printAtom(const HllPolicy& pol, const Atom& a) {
  return std::to_string(a.value) + "@" + pol.printVTag(a.tag);
}

std::string printBehavior(const HllPolicy& pol, const Behavior& b) {
  if (const auto* t = std::get_if<Terminated>(&b)) {
    return "Terminate(" + printAtom(pol, t->result) + ")";
  }
  if (const auto* f = std::get_if<FailStopped>(&b)) {
    return "FailStop(" + f->err.token + ")";
  }
  return "Timeout";
}

std::string printEvent(const HllPolicy& pol, const RuleEvent& ev) {
  std::ostringstream os;
  os << hllRuleName(ev.rule);
  if (ev.op) os << ' ' << binOpName(*ev.op);
  if (ev.cmp) os << ' ' << relOpName(*ev.cmp);
  os << ' ' << pol.printPTag(ev.pc);
  if (ev.pAux) os << ' ' << pol.printPTag(*ev.pAux);
  for (VTag t : ev.tagArgs) os << ' ' << pol.printVTag(t);
  os << " -> ";
  if (ev.ok) {
    os << "OK(";
    bool first = true;
    if (ev.pcOut) {
      os << pol.printPTag(*ev.pcOut);
      first = false;
    }
    for (VTag t : ev.tagOuts) {
      if (!first) os << ',';
      os << pol.printVTag(t);
      first = false;
    }
    os << ')';
  } else {
    os << "ERR(" << (ev.err ? ev.err->token : "?") << ')';
  }
  return os.str();
}

std::string printITag(const HllPolicy& pol, const ITag& it) {
  std::string s(itKindName(it.kind));
  if (it.kind == ITKind::Op) s += std::string(binOpName(it.op));
  if (it.kind == ITKind::Param) {
    s += "(" + std::string(binOpName(it.op)) + "," + pol.printVTag(it.t1) + "," +
         pol.printVTag(it.t2) + ")";
  }
  return s;
}

}  // namespace tagc
