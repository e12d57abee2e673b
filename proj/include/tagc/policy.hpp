#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tagc/core.hpp"

namespace tagc {

struct PcTagOuts {
  PTag pc;
  VTag tag;
  friend bool operator==(const PcTagOuts&, const PcTagOuts&) = default;
};

struct CallOuts {
  PTag pc;
  std::vector<VTag> argTags;
  friend bool operator==(const CallOuts&, const CallOuts&) = default;
};

// A source-level rule policy: one pure deterministic function per control
// point, the start-of-program PC tag, the default value tag, declared
// property flags, and textual tag syntax. Policies are immutable and safe to
// share across threads.
class HllPolicy {
 public:
  virtual ~HllPolicy() = default;

  virtual std::string_view name() const = 0;
  virtual PTag initPc() const = 0;
  virtual VTag defTag() const = 0;
  Atom defaultAtom() const { return Atom{0, defTag()}; }
  virtual const FlagSet& flags() const = 0;

  // Expression rules return no PC tag; expression evaluation never changes
  // the PC tag.
  virtual RuleResult<VTag> constRule(PTag p, VTag t) const = 0;
  virtual RuleResult<VTag> varRule(PTag p, VTag t) const = 0;
  virtual RuleResult<VTag> binopRule(BinOp op, PTag p, VTag t1, VTag t2) const = 0;

  virtual RuleResult<PcTagOuts> assignRule(PTag p, VTag tOld, VTag tExpr) const = 0;
  virtual RuleResult<PTag> ifSplitRule(PTag p, RelOp cmp, VTag t1, VTag t2) const = 0;
  virtual RuleResult<PTag> ifJoinRule(PTag p, PTag pSplit) const = 0;
  virtual RuleResult<PTag> whileSplitRule(PTag p, RelOp cmp, VTag t1, VTag t2) const = 0;
  virtual RuleResult<PTag> whileExitRule(PTag p, PTag pSplit) const = 0;
  virtual RuleResult<CallOuts> callRule(PTag p, PTag fnTag,
                                        const std::vector<VTag>& argTags) const = 0;
  virtual RuleResult<PcTagOuts> retRule(PTag p, PTag pSaved, VTag tRet) const = 0;

  virtual std::optional<VTag> parseVTag(std::string_view text) const = 0;
  virtual std::optional<PTag> parsePTag(std::string_view text) const = 0;
  virtual std::string printVTag(VTag t) const = 0;
  virtual std::string printPTag(PTag p) const = 0;

  // Finite tag universes, used for exhaustive flag validation.
  virtual std::vector<VTag> vtagUniverse() const = 0;
  virtual std::vector<PTag> ptagUniverse() const = 0;

  // Save registers transport a PC tag inside a value-tag slot; built-in
  // policies use one tag universe for both.
  virtual VTag vtagOfPtag(PTag p) const { return VTag{p.id}; }
  virtual PTag ptagOfVtag(VTag t) const { return PTag{t.id}; }
};

const HllPolicy& policyByName(std::string_view name);  // throws on unknown
std::vector<std::string> policyNames();

// Rule invocation wrappers: both interpreters fire rules through these so the
// recorded events are identical by construction.
RuleResult<VTag> fireConst(const HllPolicy& pol, PTag p, VTag t, TraceSink& sink);
RuleResult<VTag> fireVar(const HllPolicy& pol, PTag p, VTag t, TraceSink& sink);
RuleResult<VTag> fireBinop(const HllPolicy& pol, BinOp op, PTag p, VTag t1, VTag t2,
                           TraceSink& sink);
RuleResult<PcTagOuts> fireAssign(const HllPolicy& pol, PTag p, VTag tOld, VTag tExpr,
                                 TraceSink& sink);
RuleResult<PTag> fireSplit(const HllPolicy& pol, HllRule which, PTag p, RelOp cmp,
                           VTag t1, VTag t2, TraceSink& sink);
RuleResult<PTag> fireJoin(const HllPolicy& pol, HllRule which, PTag p, PTag pSplit,
                          TraceSink& sink);
RuleResult<CallOuts> fireCall(const HllPolicy& pol, PTag p, PTag fnTag,
                              const std::vector<VTag>& argTags, TraceSink& sink);
RuleResult<PcTagOuts> fireRet(const HllPolicy& pol, PTag p, PTag pSaved, VTag tRet,
                              TraceSink& sink);

std::string printAtom(const HllPolicy& pol, const Atom& a);
std::string printBehavior(const HllPolicy& pol, const Behavior& b);
std::string printEvent(const HllPolicy& pol, const RuleEvent& ev);
std::string printITag(const HllPolicy& pol, const ITag& it);

}  // namespace tagc
