#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tagc/core.hpp"
#include "tagc/policy.hpp"

namespace tagc {

// ---------------------------------------------------------------------------
// AST. Nodes are immutable and shared; the interpreter keeps statement
// pointers alive inside continuations.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LitExpr {
  Atom atom;
};
struct VarExpr {
  std::string name;
};
struct BinExpr {
  BinOp op;
  ExprPtr lhs, rhs;
};

struct Expr {
  std::variant<LitExpr, VarExpr, BinExpr> node;
};

ExprPtr makeLit(Atom a);
ExprPtr makeVar(std::string name);
ExprPtr makeBin(BinOp op, ExprPtr lhs, ExprPtr rhs);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct SkipStmt {};
struct SeqStmt {
  StmtPtr first, second;
};
struct AssignStmt {
  std::string target;
  ExprPtr value;
};
struct IfStmt {
  ExprPtr lhs;
  RelOp cmp;
  ExprPtr rhs;
  StmtPtr thenBody, elseBody;
};
struct WhileStmt {
  ExprPtr lhs;
  RelOp cmp;
  ExprPtr rhs;
  StmtPtr body;
};
struct CallStmt {
  std::string target;
  std::string callee;
  std::vector<ExprPtr> args;
};
struct ReturnStmt {
  ExprPtr value;
};

struct Stmt {
  std::variant<SkipStmt, SeqStmt, AssignStmt, IfStmt, WhileStmt, CallStmt,
               ReturnStmt>
      node;
};

StmtPtr makeSkip();
StmtPtr makeSeq(StmtPtr a, StmtPtr b);
StmtPtr makeAssign(std::string target, ExprPtr value);
StmtPtr makeIf(ExprPtr lhs, RelOp cmp, ExprPtr rhs, StmtPtr thenB, StmtPtr elseB);
StmtPtr makeWhile(ExprPtr lhs, RelOp cmp, ExprPtr rhs, StmtPtr body);
StmtPtr makeCall(std::string target, std::string callee, std::vector<ExprPtr> args);
StmtPtr makeReturn(ExprPtr value);

// Fold a list of statements into right-nested sequencing; empty -> skip.
StmtPtr seqOf(std::vector<StmtPtr> stmts);

bool exprEq(const Expr& a, const Expr& b);
bool stmtEq(const Stmt& a, const Stmt& b);

struct FunDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> locals;
  StmtPtr body;
  PTag fnTag;
};

struct HllProgram {
  std::map<std::string, FunDef> functions;

  const FunDef& fn(const std::string& name) const;
  const FunDef& mainFn() const { return fn("main"); }
};

bool programEq(const HllProgram& a, const HllProgram& b);

// ---------------------------------------------------------------------------
// Concrete syntax

struct SourcePos {
  int line = 0;
  int col = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(pos.line) + ":" +
                           std::to_string(pos.col) + ": " + msg),
        pos(pos) {}
  SourcePos pos;
};

class WellFormednessError : public std::runtime_error {
 public:
  explicit WellFormednessError(const std::string& msg)
      : std::runtime_error("ill-formed program: " + msg) {}
};

// Parses and checks well-formedness: declared variables, known callees with
// matching arity, duplicate-free declarations, zero-parameter main.
HllProgram parseProgram(std::string_view text, const HllPolicy& pol);
std::string printProgram(const HllProgram& prog, const HllPolicy& pol);
std::string printStmt(const StmtPtr& s, const HllPolicy& pol, int indent = 0);
std::string printExpr(const ExprPtr& e, const HllPolicy& pol);

void checkWellFormed(const HllProgram& prog);

// ---------------------------------------------------------------------------
// Small-step semantics

using Env = std::unordered_map<std::string, Atom>;

enum class JoinKind : std::uint8_t { IfJoin, WhileExit };

struct LocalCont;
using ContPtr = std::shared_ptr<const LocalCont>;

struct LocalCont {
  struct Emp {};
  struct SeqK {
    StmtPtr stmt;
    ContPtr next;
  };
  struct JoinK {
    JoinKind kind;
    PTag pSplit;  // PC tag current when the matching split fired
    ContPtr next;
  };
  std::variant<Emp, SeqK, JoinK> node;
};

ContPtr contEmp();
ContPtr contSeq(StmtPtr s, ContPtr next);
ContPtr contJoin(JoinKind kind, PTag pSplit, ContPtr next);

struct HllFrame {
  const FunDef* caller = nullptr;
  std::string destVar;
  ContPtr cont;
  Env env;
  PTag pSaved;  // caller PC at the call, fed to the ret rule
};

struct HllRegular {
  const FunDef* fn = nullptr;
  StmtPtr stmt;
  PTag pc;
  ContPtr cont;
  Env env;
};
struct HllCalling {
  const FunDef* callee = nullptr;
  std::vector<Atom> args;
  PTag pc;
};
struct HllReturning {
  Atom atom;
  PTag pc;
};
struct HllErrored {
  TagErr err;
};

struct HllState {
  using Regular = HllRegular;
  using Calling = HllCalling;
  using Returning = HllReturning;
  using Errored = HllErrored;

  std::variant<Calling, Regular, Returning, Errored> st;
  std::vector<HllFrame> stack;
};

// Raised when no transition applies; impossible for well-formed programs.
class StuckError : public std::logic_error {
 public:
  explicit StuckError(const std::string& msg)
      : std::logic_error("interpreter stuck: " + msg) {}
};

struct EvalOutcome {
  enum class Kind { Ok, RuleError, OutOfFuel } kind;
  Atom atom;    // Ok
  TagErr err;   // RuleError
};

// Big-step expression evaluation; each rule firing costs one fuel unit.
// Left operand evaluated before right; a left error wins.
EvalOutcome evalExpr(const Env& env, PTag pc, const Expr& e, const HllPolicy& pol,
                     TraceSink& sink, std::uint64_t& fuel);

HllState initialState(const HllProgram& prog, const HllPolicy& pol);

enum class StepStatus { Continue, Done, Failed, OutOfFuel };

// One statement-level transition (plus any embedded expression evaluation).
StepStatus stepHll(HllState& st, const HllProgram& prog, const HllPolicy& pol,
                   TraceSink& sink, std::uint64_t& fuel);

struct RunResult {
  Behavior behavior;
  RuleTrace trace;
};

RunResult runHll(const HllProgram& prog, const HllPolicy& pol, std::uint64_t fuel,
                 TraceSink* external = nullptr);

}  // namespace tagc
