#include <deque>

#include "tagc/opt.hpp"

namespace tagc {

std::set<Reg> LivenessResult::liveAfter(const RtlFunction& fn, Node n) const {
  std::set<Reg> out;
  for (Node s : fn.at(n).successors()) {
    auto it = liveIn.find(s);
    if (it == liveIn.end()) continue;
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

LivenessResult liveness(const RtlFunction& fn) {
  // Predecessors, for worklist seeding and propagation.
  std::map<Node, std::vector<Node>> preds;
  for (const auto& [n, instr] : fn.graph) {
    for (Node s : instr.successors()) preds[s].push_back(n);
  }

  LivenessResult result;
  std::deque<Node> work;
  std::set<Node> queued;
  for (const auto& [n, instr] : fn.graph) {
    result.liveIn[n] = {};
    work.push_back(n);
    queued.insert(n);
  }

  while (!work.empty()) {
    Node n = work.front();
    work.pop_front();
    queued.erase(n);

    const Instr& instr = fn.at(n);
    std::set<Reg> live;
    for (Node s : instr.successors()) {
      const auto& in = result.liveIn[s];
      live.insert(in.begin(), in.end());
    }
    if (auto d = instr.def()) live.erase(*d);
    for (Reg u : instr.uses()) live.insert(u);

    if (live != result.liveIn[n]) {
      result.liveIn[n] = std::move(live);
      for (Node p : preds[n]) {
        if (queued.insert(p).second) work.push_back(p);
      }
    }
  }
  return result;
}

namespace {

bool removableKind(const Instr& instr) {
  switch (instr.kind) {
    case Opcode::Op:
    case Opcode::Movi:
      return true;
    case Opcode::Mov:
      // PC saves and joins carry control-point rules and are never removed.
      return instr.itag.kind != ITKind::SavePc && instr.itag.kind != ITKind::IfJoin &&
             instr.itag.kind != ITKind::WhileJoin;
    default:
      return false;
  }
}

}  // namespace

RtlFunction deadcode(const RtlFunction& fn, const LoweredFlags& flags,
                     DeadcodeReport* report, DeadcodeOptions opts) {
  RtlFunction out = fn;
  // Removing an instruction drops its uses, which can kill its producers;
  // iterate until liveness stabilizes.
  bool changed = true;
  while (changed) {
    changed = false;
    LivenessResult live = liveness(out);
    for (auto& [n, instr] : out.graph) {
      if (!removableKind(instr)) continue;
      auto dest = instr.def();
      if (!dest) continue;
      std::set<Reg> after = live.liveAfter(out, n);
      if (after.count(*dest)) continue;
      if (!opts.ignoreRuleGuard) {
        // Skipping a rule that might fail-stop or move the PC tag is unsound.
        RuleFlags rf = flags.get(instr.kind, instr.itag);
        if (rf.dfs != Tri::Holds || rf.pcp != Tri::Holds) continue;
      }
      instr = Instr::nop(instr.succ, ITag::dc());
      changed = true;
      if (report) report->removed++;
    }
  }
  return out;
}

RtlFunction compactNops(const RtlFunction& fn) {
  // Resolve each node to the first non-nop@ITdc instruction it reaches.
  auto resolve = [&](Node n) {
    std::set<Node> seen;
    while (true) {
      const Instr& instr = fn.at(n);
      if (instr.kind != Opcode::Nop || instr.itag.kind != ITKind::Dc) return n;
      if (!seen.insert(n).second) return n;  // nop cycle, keep as is
      n = instr.succ;
    }
  };

  RtlFunction out = fn;
  out.entry = resolve(fn.entry);
  for (auto& [n, instr] : out.graph) {
    if (instr.kind == Opcode::Ret) continue;
    instr.succ = resolve(instr.succ);
    if (instr.kind == Opcode::Cond) instr.succFalse = resolve(instr.succFalse);
  }

  // Drop nodes no longer reachable, keeping the exit protocol pair intact.
  std::set<Node> keep = {out.entry, out.nDef, out.nRet};
  std::deque<Node> work = {out.entry, out.nDef, out.nRet};
  while (!work.empty()) {
    Node n = work.front();
    work.pop_front();
    for (Node s : out.at(n).successors()) {
      if (keep.insert(s).second) work.push_back(s);
    }
  }
  for (auto it = out.graph.begin(); it != out.graph.end();) {
    it = keep.count(it->first) ? std::next(it) : out.graph.erase(it);
  }
  return out;
}

}  // namespace tagc
