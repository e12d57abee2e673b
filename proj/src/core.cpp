#include "tagc/core.hpp"

namespace tagc {

Value applyBinOp(BinOp op, Value a, Value b) {
  switch (op) {
    case BinOp::Add:
      return a + b;
    case BinOp::Sub:
      return a - b;
  }
  return 0;
}

bool applyRelOp(RelOp op, Value a, Value b) {
  switch (op) {
    case RelOp::Eq:
      return a == b;
    case RelOp::Ne:
      return a != b;
    case RelOp::Le:
      return a <= b;
    case RelOp::Lt:
      return a < b;
    case RelOp::Ge:
      return a >= b;
    case RelOp::Gt:
      return a > b;
  }
  return false;
}

std::string_view binOpName(BinOp op) {
  return op == BinOp::Add ? "+" : "-";
}

std::string_view relOpName(RelOp op) {
  switch (op) {
    case RelOp::Eq:
      return "==";
    case RelOp::Ne:
      return "!=";
    case RelOp::Le:
      return "<=";
    case RelOp::Lt:
      return "<";
    case RelOp::Ge:
      return ">=";
    case RelOp::Gt:
      return ">";
  }
  return "?";
}

std::optional<BinOp> binOpFromName(std::string_view s) {
  if (s == "+") return BinOp::Add;
  if (s == "-") return BinOp::Sub;
  return std::nullopt;
}

std::optional<RelOp> relOpFromName(std::string_view s) {
  if (s == "==") return RelOp::Eq;
  if (s == "!=") return RelOp::Ne;
  if (s == "<=") return RelOp::Le;
  if (s == "<") return RelOp::Lt;
  if (s == ">=") return RelOp::Ge;
  if (s == ">") return RelOp::Gt;
  return std::nullopt;
}

bool behaviorEq(const Behavior& a, const Behavior& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ta = std::get_if<Terminated>(&a)) {
    return *ta == std::get<Terminated>(b);
  }
  if (const auto* fa = std::get_if<FailStopped>(&a)) {
    return *fa == std::get<FailStopped>(b);
  }
  return true;  // Timeout vs Timeout, step counts ignored
}

std::string_view itKindName(ITKind k) {
  switch (k) {
    case ITKind::Const:
      return "ITconst";
    case ITKind::Var:
      return "ITvar";
    case ITKind::Op:
      return "ITop";
    case ITKind::Assign:
      return "ITassign";
    case ITKind::SavePc:
      return "ITsavePC";
    case ITKind::IfSplit:
      return "ITifSplit";
    case ITKind::IfJoin:
      return "ITifJoin";
    case ITKind::WhileSplit:
      return "ITwhileSplit";
    case ITKind::WhileJoin:
      return "ITwhileJoin";
    case ITKind::Call:
      return "ITcall";
    case ITKind::Ret:
      return "ITret";
    case ITKind::LocalInit:
      return "ITlocalInit";
    case ITKind::Copy:
      return "ITcopy";
    case ITKind::Dc:
      return "ITdc";
    case ITKind::Param:
      return "ITp";
  }
  return "?";
}

std::string_view hllRuleName(HllRule r) {
  switch (r) {
    case HllRule::Const:
      return "const";
    case HllRule::Var:
      return "var";
    case HllRule::Binop:
      return "binop";
    case HllRule::Assign:
      return "assign";
    case HllRule::IfSplit:
      return "ifSplit";
    case HllRule::IfJoin:
      return "ifJoin";
    case HllRule::WhileSplit:
      return "whileSplit";
    case HllRule::WhileExit:
      return "whileExit";
    case HllRule::Call:
      return "call";
    case HllRule::Ret:
      return "ret";
  }
  return "?";
}

const std::array<HllRule, kHllRuleCount>& allHllRules() {
  static const std::array<HllRule, kHllRuleCount> all = {
      HllRule::Const,    HllRule::Var,       HllRule::Binop,
      HllRule::Assign,   HllRule::IfSplit,   HllRule::IfJoin,
      HllRule::WhileSplit, HllRule::WhileExit, HllRule::Call,
      HllRule::Ret,
  };
  return all;
}

bool flagsWf(const FlagSet& f) {
  for (const RuleFlags& rf : f.rules) {
    if (!rf.chainOk()) return false;
  }
  return true;
}

}  // namespace tagc
