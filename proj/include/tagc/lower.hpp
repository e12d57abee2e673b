#pragma once

#include "tagc/core.hpp"
#include "tagc/policy.hpp"
#include "tagc/rtl.hpp"

namespace tagc {

// Where a lowered (opcode, I-tag) pair gets its behavior from.
enum class Provenance : std::uint8_t {
  HllConst,
  HllVar,
  HllBinop,
  HllAssign,
  HllIfSplit,
  HllIfJoin,
  HllWhileSplit,
  HllWhileExit,
  HllCall,
  HllRet,
  Administrative,
};
std::string_view provenanceName(Provenance p);

struct LoweredKey {
  Opcode opcode;
  ITKind itag;
  friend auto operator<=>(const LoweredKey&, const LoweredKey&) = default;
};

// The dispatch table (opcode, I-tag kind) -> provenance, for auditing and
// flag lowering. Parameterized I-tags appear once per kind.
const std::map<LoweredKey, Provenance>& dispatchTable();
std::string dumpDispatch();

// Instruction-level flags: dispatched pairs inherit their source rule's
// flags; administrative pairs never fail-stop, keep the PC tag, and (except
// for the PC save, whose value output is the PC itself) ignore it.
struct LoweredFlags {
  std::map<LoweredKey, RuleFlags> entries;
  RuleFlags get(Opcode op, const ITag& itag) const;
};

LoweredFlags lowerFlags(const FlagSet& f);

// The instruction-level policy I(P): per-opcode rules that dispatch on the
// instruction's I-tag, mostly into the source policy's rules. Unknown
// (opcode, I-tag) pairs are compiler bugs and yield a distinguished error.
class LoweredPolicy {
 public:
  explicit LoweredPolicy(const HllPolicy& base) : base_(&base) {}

  const HllPolicy& base() const { return *base_; }
  PTag initPc() const { return base_->initPc(); }
  Atom defaultAtom() const { return base_->defaultAtom(); }

  RuleResult<PTag> nopRule(const ITag& it, PTag p, TraceSink& sink) const;
  RuleResult<PcTagOuts> movRule(const ITag& it, PTag p, VTag ts, VTag td,
                                TraceSink& sink) const;
  RuleResult<PcTagOuts> moviRule(const ITag& it, PTag p, VTag tLit,
                                 TraceSink& sink) const;
  RuleResult<PcTagOuts> opRule(BinOp op, const ITag& it, PTag p, VTag t1, VTag t2,
                               TraceSink& sink) const;
  RuleResult<PTag> condRule(RelOp cmp, const ITag& it, PTag p, VTag t1, VTag t2,
                            TraceSink& sink) const;
  RuleResult<CallOuts> callRule(const ITag& it, PTag p, PTag fnTag,
                                const std::vector<VTag>& argTags, TraceSink& sink) const;
  RuleResult<PcTagOuts> retRule(const ITag& it, PTag p, PTag pSaved, VTag tRet,
                                TraceSink& sink) const;

 private:
  const HllPolicy* base_;
};

TagErr dispatchError(Opcode op, const ITag& itag);
bool isDispatchError(const TagErr& err);

}  // namespace tagc
