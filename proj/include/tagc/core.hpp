#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tagc {

// Machine values are 64-bit unsigned; + and - wrap mod 2^64, relational
// operators compare unsigned.
using Value = std::uint64_t;

enum class BinOp : std::uint8_t { Add, Sub };
enum class RelOp : std::uint8_t { Eq, Ne, Le, Lt, Ge, Gt };

Value applyBinOp(BinOp op, Value a, Value b);
bool applyRelOp(RelOp op, Value a, Value b);
std::string_view binOpName(BinOp op);
std::string_view relOpName(RelOp op);
std::optional<BinOp> binOpFromName(std::string_view s);
std::optional<RelOp> relOpFromName(std::string_view s);

// Value and PC tags are opaque handles into a policy-defined finite domain.
// The policy owns parsing, printing and enumeration; the core only needs
// structural equality.
struct VTag {
  std::uint32_t id = 0;
  friend auto operator<=>(const VTag&, const VTag&) = default;
};

struct PTag {
  std::uint32_t id = 0;
  friend auto operator<=>(const PTag&, const PTag&) = default;
};

// Error tokens are policy-scoped named constants; equality on the token makes
// fail-stop comparison meaningful across source and target runs.
struct TagErr {
  std::string token;
  friend bool operator==(const TagErr&, const TagErr&) = default;
};

struct Atom {
  Value value = 0;
  VTag tag;
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Rule outcome: either the rule-specific output tuple or a tag error.
template <typename Outs>
class RuleResult {
 public:
  RuleResult(Outs outs) : rep_(std::move(outs)) {}
  RuleResult(TagErr err) : rep_(std::move(err)) {}

  bool ok() const { return rep_.index() == 0; }
  const Outs& outs() const { return std::get<0>(rep_); }
  const TagErr& err() const { return std::get<1>(rep_); }

 private:
  std::variant<Outs, TagErr> rep_;
};

struct Terminated {
  Atom result;
  friend bool operator==(const Terminated&, const Terminated&) = default;
};
struct FailStopped {
  TagErr err;
  friend bool operator==(const FailStopped&, const FailStopped&) = default;
};
struct TimedOut {
  std::uint64_t stepsUsed = 0;
};

using Behavior = std::variant<Terminated, FailStopped, TimedOut>;

// Timeout compares equal only to Timeout; step counts are ignored.
bool behaviorEq(const Behavior& a, const Behavior& b);

// Instruction provenance tags. Param carries its operator and two concrete
// value tags as part of the tag itself.
enum class ITKind : std::uint8_t {
  Const,
  Var,
  Op,
  Assign,
  SavePc,
  IfSplit,
  IfJoin,
  WhileSplit,
  WhileJoin,
  Call,
  Ret,
  LocalInit,
  Copy,
  Dc,
  Param,
};

struct ITag {
  ITKind kind = ITKind::Dc;
  BinOp op = BinOp::Add;  // meaningful for Op and Param
  VTag t1, t2;            // meaningful for Param
  friend bool operator==(const ITag&, const ITag&) = default;

  static ITag make(ITKind k, BinOp o = BinOp::Add, VTag a = {}, VTag b = {}) {
    ITag t;
    t.kind = k;
    t.op = o;
    t.t1 = a;
    t.t2 = b;
    return t;
  }
  static ITag constLit() { return make(ITKind::Const); }
  static ITag var() { return make(ITKind::Var); }
  static ITag opTag(BinOp o) { return make(ITKind::Op, o); }
  static ITag assign() { return make(ITKind::Assign); }
  static ITag savePc() { return make(ITKind::SavePc); }
  static ITag ifSplit() { return make(ITKind::IfSplit); }
  static ITag ifJoin() { return make(ITKind::IfJoin); }
  static ITag whileSplit() { return make(ITKind::WhileSplit); }
  static ITag whileJoin() { return make(ITKind::WhileJoin); }
  static ITag call() { return make(ITKind::Call); }
  static ITag ret() { return make(ITKind::Ret); }
  static ITag localInit() { return make(ITKind::LocalInit); }
  static ITag copy() { return make(ITKind::Copy); }
  static ITag dc() { return make(ITKind::Dc); }
  static ITag param(BinOp o, VTag a, VTag b) { return make(ITKind::Param, o, a, b); }
};

std::string_view itKindName(ITKind k);

// The named source-level rules a policy provides.
enum class HllRule : std::uint8_t {
  Const,
  Var,
  Binop,
  Assign,
  IfSplit,
  IfJoin,
  WhileSplit,
  WhileExit,
  Call,
  Ret,
};
inline constexpr int kHllRuleCount = 10;
std::string_view hllRuleName(HllRule r);

const std::array<HllRule, kHllRuleCount>& allHllRules();

// Tri-state property declarations. Optimizations treat Unknown the same as
// DoesNotHold.
enum class Tri : std::uint8_t { Unknown, Holds, DoesNotHold };

struct RuleFlags {
  Tri dfs = Tri::Unknown;
  Tri pcp = Tri::Unknown;
  Tri wpci = Tri::Unknown;
  Tri spci = Tri::Unknown;
  friend bool operator==(const RuleFlags&, const RuleFlags&) = default;

  // SPCI implies WPCI implies PCP: declaring a stronger property Holds
  // requires the weaker one to be declared Holds as well.
  bool chainOk() const {
    if (spci == Tri::Holds && wpci != Tri::Holds) return false;
    if (wpci == Tri::Holds && pcp != Tri::Holds) return false;
    return true;
  }
};

struct FlagSet {
  std::array<RuleFlags, kHllRuleCount> rules;

  RuleFlags& at(HllRule r) { return rules[static_cast<std::size_t>(r)]; }
  const RuleFlags& at(HllRule r) const {
    return rules[static_cast<std::size_t>(r)];
  }
  friend bool operator==(const FlagSet&, const FlagSet&) = default;
};

bool flagsWf(const FlagSet& f);

// One source-rule firing with its arguments and result. Source and compiled
// runs must produce identical event sequences.
struct RuleEvent {
  HllRule rule = HllRule::Const;
  std::optional<BinOp> op;      // Binop
  std::optional<RelOp> cmp;     // IfSplit / WhileSplit
  PTag pc;                      // PC tag input
  std::optional<PTag> pAux;     // join p_s, call p_F, ret p_saved
  std::vector<VTag> tagArgs;    // value-tag inputs
  bool ok = true;
  std::optional<PTag> pcOut;
  std::vector<VTag> tagOuts;
  std::optional<TagErr> err;
  friend bool operator==(const RuleEvent&, const RuleEvent&) = default;
};

// Administrative target-only firings (save/restore plumbing, don't-care
// rules); kept out of trace equivalence.
struct AdminEvent {
  ITag itag;
};

struct RuleTrace {
  std::vector<RuleEvent> events;
  std::vector<AdminEvent> admin;
};

// Recording/streaming hook threaded through both interpreters.
struct TraceSink {
  RuleTrace* collect = nullptr;
  std::function<void(const RuleEvent&)> onEvent;

  void emit(RuleEvent ev) {
    if (onEvent) onEvent(ev);
    if (collect) collect->events.push_back(std::move(ev));
  }
  void emitAdmin(const ITag& itag) {
    if (collect) collect->admin.push_back(AdminEvent{itag});
  }
};

}  // namespace tagc
