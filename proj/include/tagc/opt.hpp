#pragma once

#include <span>

#include "tagc/lower.hpp"
#include "tagc/rtl.hpp"

namespace tagc {

// ---------------------------------------------------------------------------
// Dead code elimination

struct LivenessResult {
  std::map<Node, std::set<Reg>> liveIn;  // registers live before each node

  std::set<Reg> liveAfter(const RtlFunction& fn, Node n) const;
};

// Backward fixpoint of live_in(n) = use(n) ∪ (⋃_{s∈succ(n)} live_in(s) \ def(n)).
LivenessResult liveness(const RtlFunction& fn);

struct DeadcodeOptions {
  // Test-only mutation: drop the rule-property guard (unsound in general).
  bool ignoreRuleGuard = false;
};

struct DeadcodeReport {
  int removed = 0;
};

// Replaces a register-writing instruction with nop@ITdc when its destination
// is dead after it and its rule is declared never-fail-stop and PC-pure.
// Conds, calls, rets, PC saves and joins are never touched.
RtlFunction deadcode(const RtlFunction& fn, const LoweredFlags& flags,
                     DeadcodeReport* report = nullptr, DeadcodeOptions opts = {});

// Optional follow-up: rethread successors past nop@ITdc nodes and drop the
// unreachable ones.
RtlFunction compactNops(const RtlFunction& fn);

// ---------------------------------------------------------------------------
// Common subexpression elimination (local value numbering)

struct Ebb {
  Node root = 0;
  std::vector<Node> nodes;  // DFS preorder within the block tree
};

// Maximal trees of single-predecessor nodes; analysis state resets at roots.
std::vector<Ebb> ebbPartition(const RtlFunction& fn);

struct CseOptions {
  // Test-only mutation: ignore the PC-sensitivity conditions (unsound).
  bool ignorePcConditions = false;
};

struct CseReport {
  int replaced = 0;
  struct Site {
    Node replaced;
    Node defining;
    bool viaWpci;  // justified by PC-insensitivity rather than the equal-PC chain
  };
  std::vector<Site> sites;
};

RtlFunction cse(const RtlFunction& fn, const LoweredFlags& flags,
                CseReport* report = nullptr, CseOptions opts = {});

// ---------------------------------------------------------------------------
// Constant propagation

struct AbsAtom {
  std::optional<Value> val;  // nullopt = Top
  std::optional<VTag> tag;   // nullopt = Top
  friend bool operator==(const AbsAtom&, const AbsAtom&) = default;
};

AbsAtom absJoin(const AbsAtom& a, const AbsAtom& b);

// Register environment before each reachable node; registers absent from an
// environment are Top.
using AbsEnv = std::map<Reg, AbsAtom>;
std::map<Node, AbsEnv> analyze(const RtlFunction& fn, const LoweredPolicy& pol,
                               const LoweredFlags& flags);

struct ConstpropOptions {
  // Test-only mutation: plain untagged folding; drops the tag recomputation
  // and the fail-stop check (unsound).
  bool plainFold = false;
};

struct ConstpropReport {
  int foldsParam = 0;   // parameterized I-tag folds
  int foldsStatic = 0;  // compile-time-evaluated folds
};

RtlFunction constprop(const RtlFunction& fn, const LoweredPolicy& pol,
                      const LoweredFlags& flags, ConstpropReport* report = nullptr,
                      ConstpropOptions opts = {});

// ---------------------------------------------------------------------------
// Pass pipelines

enum class PassKind : std::uint8_t { Deadcode, Cse, Constprop };

struct PassSpec {
  PassKind kind;
  bool unsafeVariant = false;
};

std::optional<PassKind> passByName(std::string_view name);
std::string_view passName(PassKind kind);

struct PassReports {
  DeadcodeReport deadcode;
  CseReport cse;
  ConstpropReport constprop;
};

RtlProgram runPasses(const RtlProgram& prog, const LoweredPolicy& pol,
                     const LoweredFlags& flags, std::span<const PassSpec> passes,
                     PassReports* reports = nullptr);

}  // namespace tagc
