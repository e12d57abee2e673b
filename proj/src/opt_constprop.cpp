#include <deque>

#include "tagc/opt.hpp"

namespace tagc {

AbsAtom absJoin(const AbsAtom& a, const AbsAtom& b) {
  AbsAtom out;
  if (a.val && b.val && *a.val == *b.val) out.val = a.val;
  if (a.tag && b.tag && *a.tag == *b.tag) out.tag = a.tag;
  return out;
}

namespace {

AbsAtom lookup(const AbsEnv& env, Reg r) {
  auto it = env.find(r);
  return it == env.end() ? AbsAtom{} : it->second;
}

void store(AbsEnv& env, Reg r, AbsAtom a) {
  if (!a.val && !a.tag) {
    env.erase(r);
  } else {
    env[r] = a;
  }
}

// Evaluate an operator rule at compile time. Only meaningful when the rule's
// value output cannot depend on the PC input; the PC argument is arbitrary.
RuleResult<VTag> evalOpStatic(const LoweredPolicy& pol, BinOp op, VTag t1, VTag t2) {
  TraceSink scratch;
  auto r = pol.opRule(op, ITag::opTag(op), pol.initPc(), t1, t2, scratch);
  if (!r.ok()) return r.err();
  return r.outs().tag;
}

// Transfer one instruction's effect on the abstract environment.
void transfer(const Instr& instr, const LoweredPolicy& pol, const LoweredFlags& flags,
              AbsEnv& env) {
  switch (instr.kind) {
    case Opcode::Movi:
      if (instr.itag.kind == ITKind::Param) {
        // The literal's tag is a placeholder; the runtime tag comes from the
        // re-fired operator rule.
        store(env, instr.rd, AbsAtom{instr.imm.value, std::nullopt});
      } else {
        store(env, instr.rd, AbsAtom{instr.imm.value, instr.imm.tag});
      }
      break;
    case Opcode::Mov: {
      AbsAtom src = lookup(env, instr.rs1);
      if (instr.itag.kind == ITKind::Copy || instr.itag.kind == ITKind::Dc ||
          instr.itag.kind == ITKind::LocalInit) {
        store(env, instr.rd, src);  // rule-silent moves transport the atom
      } else {
        store(env, instr.rd, AbsAtom{src.val, std::nullopt});
      }
      break;
    }
    case Opcode::Op: {
      AbsAtom a1 = lookup(env, instr.rs1);
      AbsAtom a2 = lookup(env, instr.rs2);
      AbsAtom out;
      if (a1.val && a2.val) out.val = applyBinOp(instr.op, *a1.val, *a2.val);
      if (a1.tag && a2.tag &&
          flags.get(instr.kind, instr.itag).spci == Tri::Holds) {
        auto r = evalOpStatic(pol, instr.op, *a1.tag, *a2.tag);
        if (r.ok()) out.tag = r.outs();
      }
      store(env, instr.rd, out);
      break;
    }
    case Opcode::Call:
      store(env, instr.rd, AbsAtom{});
      break;
    default:
      break;
  }
}

}  // namespace

std::map<Node, AbsEnv> analyze(const RtlFunction& fn, const LoweredPolicy& pol,
                               const LoweredFlags& flags) {
  std::map<Node, AbsEnv> in;
  std::deque<Node> work;
  std::set<Node> queued;

  in[fn.entry] = {};  // everything Top at entry
  work.push_back(fn.entry);
  queued.insert(fn.entry);

  while (!work.empty()) {
    Node n = work.front();
    work.pop_front();
    queued.erase(n);

    AbsEnv out = in[n];
    transfer(fn.at(n), pol, flags, out);

    for (Node s : fn.at(n).successors()) {
      auto it = in.find(s);
      AbsEnv merged;
      if (it == in.end()) {
        merged = out;
      } else {
        // Pointwise join; registers missing on either side are Top.
        for (const auto& [r, a] : it->second) {
          auto jt = out.find(r);
          if (jt == out.end()) continue;
          AbsAtom j = absJoin(a, jt->second);
          if (j.val || j.tag) merged[r] = j;
        }
      }
      if (it == in.end() || merged != it->second) {
        in[s] = std::move(merged);
        if (queued.insert(s).second) work.push_back(s);
      }
    }
  }
  return in;
}

RtlFunction constprop(const RtlFunction& fn, const LoweredPolicy& pol,
                      const LoweredFlags& flags, ConstpropReport* report,
                      ConstpropOptions opts) {
  std::map<Node, AbsEnv> in = analyze(fn, pol, flags);

  RtlFunction out = fn;
  for (auto& [n, instr] : out.graph) {
    if (instr.kind != Opcode::Op || instr.itag.kind != ITKind::Op) continue;
    auto inIt = in.find(n);
    if (inIt == in.end()) continue;  // unreachable
    AbsAtom a1 = lookup(inIt->second, instr.rs1);
    AbsAtom a2 = lookup(inIt->second, instr.rs2);
    if (!a1.val || !a2.val) continue;
    Value folded = applyBinOp(instr.op, *a1.val, *a2.val);

    if (opts.plainFold) {
      // Mutation knob: classic untagged folding, no tag story at all.
      instr = Instr::movi(Atom{folded, pol.defaultAtom().tag}, instr.rd, instr.succ,
                          ITag::dc());
      continue;
    }

    if (!a1.tag || !a2.tag) continue;  // both folding approaches need operand tags

    if (flags.get(instr.kind, instr.itag).spci == Tri::Holds) {
      // The rule's outputs ignore the PC input, so it can run now. A
      // compile-time fail-stop means the op must stay and fail at runtime.
      auto r = evalOpStatic(pol, instr.op, *a1.tag, *a2.tag);
      if (!r.ok()) continue;
      instr = Instr::movi(Atom{folded, r.outs()}, instr.rd, instr.succ, ITag::dc());
      if (report) report->foldsStatic++;
      continue;
    }

    // Parameterized I-tag: the operator rule is re-fired at runtime on the
    // recorded operand tags, preserving both the result tag and any
    // fail-stop.
    instr = Instr::movi(Atom{folded, pol.defaultAtom().tag}, instr.rd, instr.succ,
                        ITag::param(instr.op, *a1.tag, *a2.tag));
    if (report) report->foldsParam++;
  }
  return out;
}

std::optional<PassKind> passByName(std::string_view name) {
  if (name == "deadcode") return PassKind::Deadcode;
  if (name == "cse") return PassKind::Cse;
  if (name == "constprop") return PassKind::Constprop;
  return std::nullopt;
}

std::string_view passName(PassKind kind) {
  switch (kind) {
    case PassKind::Deadcode:
      return "deadcode";
    case PassKind::Cse:
      return "cse";
    case PassKind::Constprop:
      return "constprop";
  }
  return "?";
}

RtlProgram runPasses(const RtlProgram& prog, const LoweredPolicy& pol,
                     const LoweredFlags& flags, std::span<const PassSpec> passes,
                     PassReports* reports) {
  RtlProgram out = prog;
  for (const PassSpec& pass : passes) {
    RtlProgram next;
    for (const auto& [name, fn] : out.functions) {
      switch (pass.kind) {
        case PassKind::Deadcode:
          next.functions.emplace(
              name, deadcode(fn, flags, reports ? &reports->deadcode : nullptr,
                             DeadcodeOptions{pass.unsafeVariant}));
          break;
        case PassKind::Cse:
          next.functions.emplace(name, cse(fn, flags, reports ? &reports->cse : nullptr,
                                           CseOptions{pass.unsafeVariant}));
          break;
        case PassKind::Constprop:
          next.functions.emplace(
              name, constprop(fn, pol, flags, reports ? &reports->constprop : nullptr,
                              ConstpropOptions{pass.unsafeVariant}));
          break;
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace tagc
