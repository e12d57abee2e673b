#include <set>
#include <sstream>

#include "tagc/hll.hpp"

namespace tagc {

ExprPtr makeLit(Atom a) { return std::make_shared<Expr>(Expr{LitExpr{a}}); }
ExprPtr makeVar(std::string name) {
  return std::make_shared<Expr>(Expr{VarExpr{std::move(name)}});
}
ExprPtr makeBin(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{BinExpr{op, std::move(lhs), std::move(rhs)}});
}

StmtPtr makeSkip() { return std::make_shared<Stmt>(Stmt{SkipStmt{}}); }
StmtPtr makeSeq(StmtPtr a, StmtPtr b) {
  return std::make_shared<Stmt>(Stmt{SeqStmt{std::move(a), std::move(b)}});
}
StmtPtr makeAssign(std::string target, ExprPtr value) {
  return std::make_shared<Stmt>(Stmt{AssignStmt{std::move(target), std::move(value)}});
}
StmtPtr makeIf(ExprPtr lhs, RelOp cmp, ExprPtr rhs, StmtPtr thenB, StmtPtr elseB) {
  return std::make_shared<Stmt>(
      Stmt{IfStmt{std::move(lhs), cmp, std::move(rhs), std::move(thenB), std::move(elseB)}});
}
StmtPtr makeWhile(ExprPtr lhs, RelOp cmp, ExprPtr rhs, StmtPtr body) {
  return std::make_shared<Stmt>(
      Stmt{WhileStmt{std::move(lhs), cmp, std::move(rhs), std::move(body)}});
}
StmtPtr makeCall(std::string target, std::string callee, std::vector<ExprPtr> args) {
  return std::make_shared<Stmt>(
      Stmt{CallStmt{std::move(target), std::move(callee), std::move(args)}});
}
StmtPtr makeReturn(ExprPtr value) {
  return std::make_shared<Stmt>(Stmt{ReturnStmt{std::move(value)}});
}

StmtPtr seqOf(std::vector<StmtPtr> stmts) {
  if (stmts.empty()) return makeSkip();
  StmtPtr out = stmts.back();
  for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) {
    out = makeSeq(*it, out);
  }
  return out;
}

bool exprEq(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* la = std::get_if<LitExpr>(&a.node)) {
    return la->atom == std::get<LitExpr>(b.node).atom;
  }
  if (const auto* va = std::get_if<VarExpr>(&a.node)) {
    return va->name == std::get<VarExpr>(b.node).name;
  }
  const auto& ba = std::get<BinExpr>(a.node);
  const auto& bb = std::get<BinExpr>(b.node);
  return ba.op == bb.op && exprEq(*ba.lhs, *bb.lhs) && exprEq(*ba.rhs, *bb.rhs);
}

bool stmtEq(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<SkipStmt>(a.node)) return true;
  if (const auto* sa = std::get_if<SeqStmt>(&a.node)) {
    const auto& sb = std::get<SeqStmt>(b.node);
    return stmtEq(*sa->first, *sb.first) && stmtEq(*sa->second, *sb.second);
  }
  if (const auto* aa = std::get_if<AssignStmt>(&a.node)) {
    const auto& ab = std::get<AssignStmt>(b.node);
    return aa->target == ab.target && exprEq(*aa->value, *ab.value);
  }
  if (const auto* ia = std::get_if<IfStmt>(&a.node)) {
    const auto& ib = std::get<IfStmt>(b.node);
    return ia->cmp == ib.cmp && exprEq(*ia->lhs, *ib.lhs) && exprEq(*ia->rhs, *ib.rhs) &&
           stmtEq(*ia->thenBody, *ib.thenBody) && stmtEq(*ia->elseBody, *ib.elseBody);
  }
  if (const auto* wa = std::get_if<WhileStmt>(&a.node)) {
    const auto& wb = std::get<WhileStmt>(b.node);
    return wa->cmp == wb.cmp && exprEq(*wa->lhs, *wb.lhs) && exprEq(*wa->rhs, *wb.rhs) &&
           stmtEq(*wa->body, *wb.body);
  }
  if (const auto* ca = std::get_if<CallStmt>(&a.node)) {
    const auto& cb = std::get<CallStmt>(b.node);
    if (ca->target != cb.target || ca->callee != cb.callee ||
        ca->args.size() != cb.args.size())
      return false;
    for (std::size_t i = 0; i < ca->args.size(); ++i) {
      if (!exprEq(*ca->args[i], *cb.args[i])) return false;
    }
    return true;
  }
  const auto& ra = std::get<ReturnStmt>(a.node);
  const auto& rb = std::get<ReturnStmt>(b.node);
  return exprEq(*ra.value, *rb.value);
}

const FunDef& HllProgram::fn(const std::string& name) const {
  auto it = functions.find(name);
  if (it == functions.end()) {
    throw WellFormednessError("unknown function " + name);
  }
  return it->second;
}

bool programEq(const HllProgram& a, const HllProgram& b) {
  if (a.functions.size() != b.functions.size()) return false;
  for (const auto& [name, fa] : a.functions) {
    auto it = b.functions.find(name);
    if (it == b.functions.end()) return false;
    const FunDef& fb = it->second;
    if (fa.params != fb.params || fa.locals != fb.locals || fa.fnTag != fb.fnTag)
      return false;
    if (!stmtEq(*fa.body, *fb.body)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

std::string printExpr(const ExprPtr& e, const HllPolicy& pol) {
  if (const auto* l = std::get_if<LitExpr>(&e->node)) {
    return std::to_string(l->atom.value) + "@" + pol.printVTag(l->atom.tag);
  }
  if (const auto* v = std::get_if<VarExpr>(&e->node)) {
    return v->name;
  }
  const auto& b = std::get<BinExpr>(e->node);
  // Equal precedence, left associative: parenthesize right-nested operands.
  std::string lhs = printExpr(b.lhs, pol);
  std::string rhs = std::holds_alternative<BinExpr>(b.rhs->node)
                        ? "(" + printExpr(b.rhs, pol) + ")"
                        : printExpr(b.rhs, pol);
  return lhs + " " + std::string(binOpName(b.op)) + " " + rhs;
}

namespace {

void flattenSeq(const StmtPtr& s, std::vector<StmtPtr>& out) {
  if (const auto* sq = std::get_if<SeqStmt>(&s->node)) {
    flattenSeq(sq->first, out);
    flattenSeq(sq->second, out);
  } else {
    out.push_back(s);
  }
}

std::string indentStr(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

void printStmtList(const StmtPtr& s, const HllPolicy& pol, int indent,
                   std::ostringstream& os) {
  std::vector<StmtPtr> items;
  flattenSeq(s, items);
  for (std::size_t i = 0; i < items.size(); ++i) {
    os << printStmt(items[i], pol, indent);
    if (i + 1 < items.size()) os << ";";
    os << "\n";
  }
}

}  // namespace

std::string printStmt(const StmtPtr& s, const HllPolicy& pol, int indent) {
  std::ostringstream os;
  const std::string pad = indentStr(indent);
  if (std::holds_alternative<SkipStmt>(s->node)) {
    os << pad << "skip";
  } else if (std::holds_alternative<SeqStmt>(s->node)) {
    // Sequences are printed by the caller as statement lists; print inline.
    std::vector<StmtPtr> items;
    flattenSeq(s, items);
    for (std::size_t i = 0; i < items.size(); ++i) {
      os << printStmt(items[i], pol, indent);
      if (i + 1 < items.size()) os << ";\n";
    }
  } else if (const auto* a = std::get_if<AssignStmt>(&s->node)) {
    os << pad << a->target << " = " << printExpr(a->value, pol);
  } else if (const auto* i = std::get_if<IfStmt>(&s->node)) {
    os << pad << "if (" << printExpr(i->lhs, pol) << " " << relOpName(i->cmp) << " "
       << printExpr(i->rhs, pol) << ") {\n";
    printStmtList(i->thenBody, pol, indent + 1, os);
    os << pad << "} else {\n";
    printStmtList(i->elseBody, pol, indent + 1, os);
    os << pad << "}";
  } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
    os << pad << "while (" << printExpr(w->lhs, pol) << " " << relOpName(w->cmp) << " "
       << printExpr(w->rhs, pol) << ") {\n";
    printStmtList(w->body, pol, indent + 1, os);
    os << pad << "}";
  } else if (const auto* c = std::get_if<CallStmt>(&s->node)) {
    os << pad << c->target << " = " << c->callee << "(";
    for (std::size_t k = 0; k < c->args.size(); ++k) {
      if (k) os << ", ";
      os << printExpr(c->args[k], pol);
    }
    os << ")";
  } else {
    const auto& r = std::get<ReturnStmt>(s->node);
    os << pad << "return(" << printExpr(r.value, pol) << ")";
  }
  return os.str();
}

std::string printProgram(const HllProgram& prog, const HllPolicy& pol) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, fn] : prog.functions) {
    if (!first) os << "\n";
    first = false;
    os << "fun " << name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) os << ", ";
      os << fn.params[i];
    }
    os << ") tag " << pol.printPTag(fn.fnTag) << " {\n";
    if (!fn.locals.empty()) {
      os << "  var ";
      for (std::size_t i = 0; i < fn.locals.size(); ++i) {
        if (i) os << ", ";
        os << fn.locals[i];
      }
      os << ";\n";
    }
    printStmtList(fn.body, pol, 1, os);
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void checkExprWf(const Expr& e, const std::set<std::string>& vars,
                 const std::string& where) {
  if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    if (!vars.count(v->name)) {
      throw WellFormednessError("undeclared variable " + v->name + " in " + where);
    }
  } else if (const auto* b = std::get_if<BinExpr>(&e.node)) {
    checkExprWf(*b->lhs, vars, where);
    checkExprWf(*b->rhs, vars, where);
  }
}

void checkStmtWf(const Stmt& s, const HllProgram& prog,
                 const std::set<std::string>& vars, const std::string& where) {
  if (const auto* sq = std::get_if<SeqStmt>(&s.node)) {
    checkStmtWf(*sq->first, prog, vars, where);
    checkStmtWf(*sq->second, prog, vars, where);
  } else if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
    if (!vars.count(a->target)) {
      throw WellFormednessError("undeclared variable " + a->target + " in " + where);
    }
    checkExprWf(*a->value, vars, where);
  } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
    checkExprWf(*i->lhs, vars, where);
    checkExprWf(*i->rhs, vars, where);
    checkStmtWf(*i->thenBody, prog, vars, where);
    checkStmtWf(*i->elseBody, prog, vars, where);
  } else if (const auto* w = std::get_if<WhileStmt>(&s.node)) {
    checkExprWf(*w->lhs, vars, where);
    checkExprWf(*w->rhs, vars, where);
    checkStmtWf(*w->body, prog, vars, where);
  } else if (const auto* c = std::get_if<CallStmt>(&s.node)) {
    if (!vars.count(c->target)) {
      throw WellFormednessError("undeclared variable " + c->target + " in " + where);
    }
    auto it = prog.functions.find(c->callee);
    if (it == prog.functions.end()) {
      throw WellFormednessError("unknown function " + c->callee + " called in " + where);
    }
    if (it->second.params.size() != c->args.size()) {
      throw WellFormednessError("arity mismatch calling " + c->callee + " in " + where);
    }
    for (const auto& arg : c->args) checkExprWf(*arg, vars, where);
  } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
    checkExprWf(*r->value, vars, where);
  }
}

}  // namespace

void checkWellFormed(const HllProgram& prog) {
  auto mainIt = prog.functions.find("main");
  if (mainIt == prog.functions.end()) {
    throw WellFormednessError("no main function");
  }
  if (!mainIt->second.params.empty()) {
    throw WellFormednessError("main must take no parameters");
  }
  for (const auto& [name, fn] : prog.functions) {
    std::set<std::string> vars;
    for (const auto& p : fn.params) {
      if (!vars.insert(p).second) {
        throw WellFormednessError("duplicate declaration " + p + " in " + name);
      }
    }
    for (const auto& l : fn.locals) {
      if (!vars.insert(l).second) {
        throw WellFormednessError("duplicate declaration " + l + " in " + name);
      }
    }
    checkStmtWf(*fn.body, prog, vars, name);
  }
}

}  // namespace tagc
