#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tagc/core.hpp"
#include "tagc/policy.hpp"

namespace tagc {

using Reg = std::uint32_t;
using Node = std::uint32_t;

enum class Opcode : std::uint8_t { Nop, Op, Mov, Movi, Cond, Call, Ret };
std::string_view opcodeName(Opcode op);

// One CFG node. Field use by opcode:
//   Nop   succ
//   Op    op rs1 rs2 rd succ
//   Mov   rs1 rd succ
//   Movi  imm rd succ
//   Cond  cmp rs1 rs2 succ(true) succFalse
//   Call  callee argRegs rd succ
//   Ret   rs1
struct Instr {
  Opcode kind = Opcode::Nop;
  ITag itag;
  BinOp op = BinOp::Add;
  RelOp cmp = RelOp::Eq;
  Reg rs1 = 0, rs2 = 0, rd = 0;
  Atom imm;
  std::string callee;
  std::vector<Reg> argRegs;
  Node succ = 0;
  Node succFalse = 0;

  static Instr nop(Node succ, ITag itag);
  static Instr binop(BinOp op, Reg rs1, Reg rs2, Reg rd, Node succ, ITag itag);
  static Instr mov(Reg rs, Reg rd, Node succ, ITag itag);
  static Instr movi(Atom a, Reg rd, Node succ, ITag itag);
  static Instr cond(RelOp cmp, Reg r1, Reg r2, Node nTrue, Node nFalse, ITag itag);
  static Instr call(std::string callee, std::vector<Reg> argRegs, Reg rd, Node succ,
                    ITag itag);
  static Instr ret(Reg r);

  std::vector<Node> successors() const;
  // Registers whose value or tag feeds this instruction's rule. Movs read
  // both the source and the old destination tag.
  std::vector<Reg> uses() const;
  std::optional<Reg> def() const;
};

struct RtlFunction {
  std::string name;
  std::map<Node, Instr> graph;
  Node entry = 0;
  std::vector<Reg> paramRegs;
  PTag fnTag;
  Reg retReg = 0;
  Node nDef = 0;  // movi a_d retReg -> nRet
  Node nRet = 0;  // ret retReg

  const Instr& at(Node n) const;
};

struct RtlProgram {
  std::map<std::string, RtlFunction> functions;
  const RtlFunction& fn(const std::string& name) const;
};

struct WfDefect {
  std::string where;
  std::string message;
};

// Structural checks: resolvable successors, the two-instruction single-exit
// protocol, and no stray Ret nodes.
std::vector<WfDefect> wfCheck(const RtlFunction& fn);
std::vector<WfDefect> wfCheck(const RtlProgram& prog);

std::string dumpFunction(const RtlFunction& fn, const HllPolicy& pol);
std::string dumpProgram(const RtlProgram& prog, const HllPolicy& pol);
std::string dotFunction(const RtlFunction& fn, const HllPolicy& pol);
std::string dotProgram(const RtlProgram& prog, const HllPolicy& pol);

// Register bank: conceptually infinite, unassigned registers hold the
// default atom.
class RegBank {
 public:
  explicit RegBank(Atom defaultAtom) : def_(defaultAtom) {}

  const Atom& get(Reg r) const {
    auto it = regs_.find(r);
    return it == regs_.end() ? def_ : it->second;
  }
  void set(Reg r, Atom a) { regs_[r] = a; }

 private:
  Atom def_;
  std::map<Reg, Atom> regs_;
};

struct RtlFrame {
  const RtlFunction* caller = nullptr;
  Reg destReg = 0;
  Node retNode = 0;
  RegBank bank;
  PTag pSaved;
};

struct RtlRegular {
  const RtlFunction* fn = nullptr;
  Node node = 0;
  PTag pc;
  RegBank bank;
};
struct RtlCalling {
  const RtlFunction* callee = nullptr;
  std::vector<Atom> args;
  PTag pc;
  ITag itag;  // of the originating call instruction
};
struct RtlReturning {
  Atom atom;
  PTag pc;
  ITag itag;  // of the ret instruction just executed
};
struct RtlErrored {
  TagErr err;
};

struct RtlState {
  using Regular = RtlRegular;
  using Calling = RtlCalling;
  using Returning = RtlReturning;
  using Errored = RtlErrored;

  std::variant<Calling, Regular, Returning, Errored> st;
  std::vector<RtlFrame> stack;
};

}  // namespace tagc
