#include <sstream>

#include "tagc/rtl.hpp"

namespace tagc {

std::string_view opcodeName(Opcode op) {
  switch (op) {
    case Opcode::Nop:
      return "nop";
    case Opcode::Op:
      return "op";
    case Opcode::Mov:
      return "mov";
    case Opcode::Movi:
      return "movi";
    case Opcode::Cond:
      return "cond";
    case Opcode::Call:
      return "call";
    case Opcode::Ret:
      return "ret";
  }
  return "?";
}

Instr Instr::nop(Node succ, ITag itag) {
  Instr i;
  i.kind = Opcode::Nop;
  i.itag = itag;
  i.succ = succ;
  return i;
}

Instr Instr::binop(BinOp op, Reg rs1, Reg rs2, Reg rd, Node succ, ITag itag) {
  Instr i;
  i.kind = Opcode::Op;
  i.itag = itag;
  i.op = op;
  i.rs1 = rs1;
  i.rs2 = rs2;
  i.rd = rd;
  i.succ = succ;
  return i;
}

Instr Instr::mov(Reg rs, Reg rd, Node succ, ITag itag) {
  Instr i;
  i.kind = Opcode::Mov;
  i.itag = itag;
  i.rs1 = rs;
  i.rd = rd;
  i.succ = succ;
  return i;
}

Instr Instr::movi(Atom a, Reg rd, Node succ, ITag itag) {
  Instr i;
  i.kind = Opcode::Movi;
  i.itag = itag;
  i.imm = a;
  i.rd = rd;
  i.succ = succ;
  return i;
}

Instr Instr::cond(RelOp cmp, Reg r1, Reg r2, Node nTrue, Node nFalse, ITag itag) {
  Instr i;
  i.kind = Opcode::Cond;
  i.itag = itag;
  i.cmp = cmp;
  i.rs1 = r1;
  i.rs2 = r2;
  i.succ = nTrue;
  i.succFalse = nFalse;
  return i;
}

Instr Instr::call(std::string callee, std::vector<Reg> argRegs, Reg rd, Node succ,
                  ITag itag) {
  Instr i;
  i.kind = Opcode::Call;
  i.itag = itag;
  i.callee = std::move(callee);
  i.argRegs = std::move(argRegs);
  i.rd = rd;
  i.succ = succ;
  return i;
}

Instr Instr::ret(Reg r) {
  Instr i;
  i.kind = Opcode::Ret;
  i.itag = ITag::ret();
  i.rs1 = r;
  return i;
}

std::vector<Node> Instr::successors() const {
  switch (kind) {
    case Opcode::Ret:
      return {};
    case Opcode::Cond:
      return {succ, succFalse};
    default:
      return {succ};
  }
}

std::vector<Reg> Instr::uses() const {
  switch (kind) {
    case Opcode::Nop:
    case Opcode::Movi:
      return {};
    case Opcode::Op:
    case Opcode::Cond:
      return {rs1, rs2};
    case Opcode::Mov:
      return {rs1, rd};  // the rule also receives the old destination tag
    case Opcode::Call:
      return argRegs;
    case Opcode::Ret:
      return {rs1};
  }
  return {};
}

std::optional<Reg> Instr::def() const {
  switch (kind) {
    case Opcode::Op:
    case Opcode::Mov:
    case Opcode::Movi:
    case Opcode::Call:
      return rd;
    default:
      return std::nullopt;
  }
}

const Instr& RtlFunction::at(Node n) const {
  auto it = graph.find(n);
  if (it == graph.end()) {
    throw std::out_of_range("no node " + std::to_string(n) + " in " + name);
  }
  return it->second;
}

const RtlFunction& RtlProgram::fn(const std::string& name) const {
  auto it = functions.find(name);
  if (it == functions.end()) {
    throw std::out_of_range("no function " + name);
  }
  return it->second;
}

std::vector<WfDefect> wfCheck(const RtlFunction& fn) {
  std::vector<WfDefect> defects;
  auto defect = [&](std::string msg) { defects.push_back({fn.name, std::move(msg)}); };

  if (!fn.graph.count(fn.entry)) defect("entry node missing from graph");
  if (!fn.graph.count(fn.nDef)) defect("exit protocol: nDef missing from graph");
  if (!fn.graph.count(fn.nRet)) defect("exit protocol: nRet missing from graph");

  for (const auto& [n, instr] : fn.graph) {
    for (Node s : instr.successors()) {
      if (!fn.graph.count(s)) {
        defect("dangling successor " + std::to_string(s) + " at node " + std::to_string(n));
      }
    }
    if (instr.kind == Opcode::Ret && n != fn.nRet) {
      defect("stray ret at node " + std::to_string(n));
    }
  }

  if (auto it = fn.graph.find(fn.nRet); it != fn.graph.end()) {
    if (it->second.kind != Opcode::Ret || it->second.rs1 != fn.retReg) {
      defect("exit protocol: nRet is not 'ret retReg'");
    }
  }
  if (auto it = fn.graph.find(fn.nDef); it != fn.graph.end()) {
    const Instr& d = it->second;
    if (d.kind != Opcode::Movi || d.rd != fn.retReg || d.succ != fn.nRet ||
        d.imm.value != 0) {
      defect("exit protocol: nDef is not 'movi a_d retReg -> nRet'");
    }
  }
  return defects;
}

std::vector<WfDefect> wfCheck(const RtlProgram& prog) {
  std::vector<WfDefect> defects;
  for (const auto& [name, fn] : prog.functions) {
    auto d = wfCheck(fn);
    defects.insert(defects.end(), d.begin(), d.end());
    for (const auto& [n, instr] : fn.graph) {
      if (instr.kind != Opcode::Call) continue;
      auto it = prog.functions.find(instr.callee);
      if (it == prog.functions.end()) {
        defects.push_back({name, "call to unknown function " + instr.callee + " at node " +
                                     std::to_string(n)});
      } else if (it->second.paramRegs.size() != instr.argRegs.size()) {
        defects.push_back({name, "arity mismatch calling " + instr.callee + " at node " +
                                     std::to_string(n)});
      }
    }
  }
  return defects;
}

namespace {

std::string instrText(const Instr& i, const HllPolicy& pol) {
  std::ostringstream os;
  os << opcodeName(i.kind);
  switch (i.kind) {
    case Opcode::Nop:
      break;
    case Opcode::Op:
      os << binOpName(i.op) << " r" << i.rs1 << " r" << i.rs2 << " r" << i.rd;
      break;
    case Opcode::Mov:
      os << " r" << i.rs1 << " r" << i.rd;
      break;
    case Opcode::Movi:
      os << " " << printAtom(pol, i.imm) << " r" << i.rd;
      break;
    case Opcode::Cond:
      os << relOpName(i.cmp) << " r" << i.rs1 << " r" << i.rs2;
      break;
    case Opcode::Call:
      os << " " << i.callee << "(";
      for (std::size_t k = 0; k < i.argRegs.size(); ++k) {
        if (k) os << ",";
        os << "r" << i.argRegs[k];
      }
      os << ") r" << i.rd;
      break;
    case Opcode::Ret:
      os << " r" << i.rs1;
      break;
  }
  return os.str();
}

std::string succText(const Instr& i) {
  std::string s;
  auto succs = i.successors();
  for (std::size_t k = 0; k < succs.size(); ++k) {
    if (k) s += ",";
    s += "n" + std::to_string(succs[k]);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

std::string dumpFunction(const RtlFunction& fn, const HllPolicy& pol) {
  std::ostringstream os;
  os << "fun " << fn.name << "(";
  for (std::size_t k = 0; k < fn.paramRegs.size(); ++k) {
    if (k) os << ",";
    os << "r" << fn.paramRegs[k];
  }
  os << ") tag " << pol.printPTag(fn.fnTag) << " entry n" << fn.entry << " ret r"
     << fn.retReg << " ndef n" << fn.nDef << " nret n" << fn.nRet << "\n";
  // Entry labels are numerically largest; print in execution-friendly order.
  for (auto it = fn.graph.rbegin(); it != fn.graph.rend(); ++it) {
    os << "  n" << it->first << ": " << instrText(it->second, pol) << " -> "
       << succText(it->second) << " @ " << printITag(pol, it->second.itag) << "\n";
  }
  return os.str();
}

std::string dumpProgram(const RtlProgram& prog, const HllPolicy& pol) {
  std::string out;
  for (const auto& [name, fn] : prog.functions) {
    out += dumpFunction(fn, pol);
    out += "\n";
  }
  return out;
}

std::string dotFunction(const RtlFunction& fn, const HllPolicy& pol) {
  std::ostringstream os;
  os << "digraph \"" << fn.name << "\" {\n";
  os << "  node [shape=box fontname=\"monospace\"];\n";
  for (const auto& [n, instr] : fn.graph) {
    os << "  n" << n << " [label=\"n" << n << ": " << instrText(instr, pol) << "\\n@"
       << printITag(pol, instr.itag) << "\"];\n";
  }
  for (const auto& [n, instr] : fn.graph) {
    if (instr.kind == Opcode::Cond) {
      os << "  n" << n << " -> n" << instr.succ << " [label=\"t\"];\n";
      os << "  n" << n << " -> n" << instr.succFalse << " [label=\"f\"];\n";
    } else {
      for (Node s : instr.successors()) {
        os << "  n" << n << " -> n" << s << ";\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

std::string dotProgram(const RtlProgram& prog, const HllPolicy& pol) {
  std::string out;
  for (const auto& [name, fn] : prog.functions) out += dotFunction(fn, pol);
  return out;
}

}  // namespace tagc
