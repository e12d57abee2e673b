#include <random>
#include <set>

#include "tagc/harness.hpp"

namespace tagc {

namespace {

class ProgramGen {
 public:
  ProgramGen(const GenConfig& cfg, const HllPolicy& pol)
      : cfg_(cfg), pol_(pol), rng_(cfg.seed) {}

  HllProgram generate() {
    int extra = pick(cfg_.maxFunctions);  // helpers beyond main
    // Functions may only call previously generated ones, so the call graph
    // is acyclic by construction.
    std::vector<std::string> order;
    for (int i = extra; i >= 1; --i) order.push_back("f" + std::to_string(i));
    order.push_back("main");

    HllProgram prog;
    for (const std::string& name : order) {
      FunDef fn = genFunction(name, prog);
      prog.functions.emplace(name, std::move(fn));
    }
    return prog;
  }

 private:
  std::uint64_t next() { return rng_(); }
  int pick(int n) { return n <= 0 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  bool chance(double p) { return static_cast<double>(next() % 10000) < p * 10000.0; }

  VTag randVTag() {
    const auto universe = pol_.vtagUniverse();
    double prob = inCond_ ? cfg_.condTagProb : cfg_.valueTagProb;
    if (universe.size() > 1 && chance(prob)) {
      return universe[static_cast<std::size_t>(pick(static_cast<int>(universe.size())))];
    }
    return pol_.defTag();
  }

  PTag randFnTag() {
    const auto universe = pol_.ptagUniverse();
    if (universe.size() > 1 && chance(0.2)) {
      return universe[static_cast<std::size_t>(pick(static_cast<int>(universe.size())))];
    }
    return pol_.initPc();
  }

  ExprPtr genExpr(int depth) {
    // Re-emitting a recent expression keeps repeated computations common
    // enough for value numbering to have something to find.
    if (!exprPool_.empty() && chance(0.2)) {
      return exprPool_[static_cast<std::size_t>(
          pick(static_cast<int>(exprPool_.size())))];
    }
    if (depth > 0 && chance(0.45)) {
      BinOp op = chance(0.7) ? BinOp::Add : BinOp::Sub;
      ExprPtr e = makeBin(op, genExpr(depth - 1), genExpr(depth - 1));
      if (exprPool_.size() < 8) {
        exprPool_.push_back(e);
      } else {
        exprPool_[static_cast<std::size_t>(pick(8))] = e;
      }
      return e;
    }
    if (!vars_.empty() && chance(0.5)) {
      return makeVar(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]);
    }
    return makeLit(Atom{static_cast<Value>(pick(10)), randVTag()});
  }

  RelOp genRelOp() {
    static const RelOp all[] = {RelOp::Eq, RelOp::Ne, RelOp::Le,
                                RelOp::Lt, RelOp::Ge, RelOp::Gt};
    return all[pick(6)];
  }

  std::string pickAssignable() {
    std::vector<std::string> candidates;
    for (const std::string& v : vars_) {
      if (!protected_.count(v)) candidates.push_back(v);
    }
    if (candidates.empty()) return vars_.front();
    return candidates[static_cast<std::size_t>(pick(static_cast<int>(candidates.size())))];
  }

  // Statements append to a flat list so sequencing stays in the right-nested
  // shape the parser produces; round-trips are then exact.
  void genStmt(int depth, std::vector<StmtPtr>& out) {
    int roll = pick(12);
    if (roll < 4) {  // assign
      out.push_back(makeAssign(pickAssignable(), genExpr(cfg_.maxExprDepth)));
      return;
    }
    if (roll < 6 && depth > 0) {  // if
      ExprPtr lhs = genCondExpr();
      RelOp cmp = genRelOp();
      ExprPtr rhs = genCondExpr();
      out.push_back(makeIf(std::move(lhs), cmp, std::move(rhs), genBlock(depth - 1),
                           genBlock(depth - 1)));
      return;
    }
    if (roll < 8 && depth > 0) {
      genLoop(depth, out);
      return;
    }
    if (roll < 9 && !callees_.empty()) {
      out.push_back(genCall());
      return;
    }
    if (roll < 10) {
      // Returning a previously computed expression is the main way a
      // recomputed value's tag reaches an observable point.
      if (!exprPool_.empty() && chance(0.5)) {
        out.push_back(makeReturn(exprPool_[static_cast<std::size_t>(
            pick(static_cast<int>(exprPool_.size())))]));
      } else {
        out.push_back(makeReturn(genExpr(cfg_.maxExprDepth)));
      }
      return;
    }
    if (roll < 11) {
      out.push_back(makeAssign(pickAssignable(), genExpr(cfg_.maxExprDepth)));
      return;
    }
    out.push_back(makeSkip());
  }

  void genLoop(int depth, std::vector<StmtPtr>& out) {
    if (chance(cfg_.countedLoopBias)) {
      // Counted loop over a dedicated counter the body never assigns;
      // terminates regardless of the body.
      std::string counter = pickAssignable();
      protected_.insert(counter);
      Value bound = static_cast<Value>(1 + pick(4));
      std::vector<StmtPtr> body;
      genStmts(depth - 1, body);
      body.push_back(makeAssign(counter, makeBin(BinOp::Add, makeVar(counter),
                                                 makeLit(Atom{1, pol_.defTag()}))));
      protected_.erase(counter);
      out.push_back(makeAssign(counter, makeLit(Atom{0, pol_.defTag()})));
      out.push_back(makeWhile(makeVar(counter), RelOp::Lt,
                              makeLit(Atom{bound, pol_.defTag()}),
                              seqOf(std::move(body))));
      return;
    }
    // Unconstrained loop; may diverge, the runner's fuel handles it.
    ExprPtr lhs = genCondExpr(1);
    RelOp cmp = genRelOp();
    ExprPtr rhs = genCondExpr(1);
    out.push_back(
        makeWhile(std::move(lhs), cmp, std::move(rhs), genBlock(depth - 1)));
  }

  ExprPtr genCondExpr(int depth = -1) {
    inCond_ = true;
    ExprPtr e = genExpr(depth < 0 ? cfg_.maxExprDepth - 1 : depth);
    inCond_ = false;
    return e;
  }

  StmtPtr genCall() {
    const FunDef* callee = callees_[static_cast<std::size_t>(
        pick(static_cast<int>(callees_.size())))];
    std::vector<ExprPtr> args;
    for (std::size_t i = 0; i < callee->params.size(); ++i) {
      args.push_back(genExpr(cfg_.maxExprDepth - 1));
    }
    return makeCall(pickAssignable(), callee->name, std::move(args));
  }

  void genStmts(int depth, std::vector<StmtPtr>& out) {
    int len = 1 + pick(cfg_.maxBlockLen);
    for (int i = 0; i < len; ++i) genStmt(depth, out);
  }

  StmtPtr genBlock(int depth) {
    std::vector<StmtPtr> stmts;
    genStmts(depth, stmts);
    return seqOf(std::move(stmts));
  }

  FunDef genFunction(const std::string& name, HllProgram& prog) {
    FunDef fn;
    fn.name = name;
    fn.fnTag = randFnTag();
    int params = name == "main" ? 0 : pick(cfg_.maxParams + 1);
    for (int i = 0; i < params; ++i) fn.params.push_back("p" + std::to_string(i));
    int locals = 1 + pick(cfg_.maxLocals);
    for (int i = 0; i < locals; ++i) fn.locals.push_back("v" + std::to_string(i));

    vars_.clear();
    protected_.clear();
    exprPool_.clear();
    for (const auto& p : fn.params) vars_.push_back(p);
    for (const auto& l : fn.locals) vars_.push_back(l);
    callees_.clear();
    for (const auto& [fname, def] : prog.functions) callees_.push_back(&def);

    fn.body = genBlock(cfg_.maxStmtDepth);
    return fn;
  }

  GenConfig cfg_;
  const HllPolicy& pol_;
  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
  std::set<std::string> protected_;
  std::vector<ExprPtr> exprPool_;
  std::vector<const FunDef*> callees_;
  bool inCond_ = false;
};

}  // namespace

HllProgram genProgram(const GenConfig& cfg, const HllPolicy& pol) {
  ProgramGen gen(cfg, pol);
  HllProgram prog = gen.generate();
  checkWellFormed(prog);
  return prog;
}

}  // namespace tagc
