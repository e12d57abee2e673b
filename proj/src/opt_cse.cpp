#include <deque>
#include <tuple>

#include "tagc/opt.hpp"

namespace tagc {

namespace {

std::set<Node> reachableNodes(const RtlFunction& fn) {
  std::set<Node> seen = {fn.entry};
  std::deque<Node> work = {fn.entry};
  while (!work.empty()) {
    Node n = work.front();
    work.pop_front();
    for (Node s : fn.at(n).successors()) {
      if (seen.insert(s).second) work.push_back(s);
    }
  }
  return seen;
}

std::map<Node, int> predEdgeCounts(const RtlFunction& fn, const std::set<Node>& nodes) {
  std::map<Node, int> preds;
  for (Node n : nodes) preds[n] = 0;
  for (Node n : nodes) {
    for (Node s : fn.at(n).successors()) preds[s]++;
  }
  return preds;
}

}  // namespace

std::vector<Ebb> ebbPartition(const RtlFunction& fn) {
  std::set<Node> nodes = reachableNodes(fn);
  std::map<Node, int> preds = predEdgeCounts(fn, nodes);

  std::vector<Ebb> ebbs;
  std::set<Node> assigned;
  auto isRoot = [&](Node n) { return n == fn.entry || preds.at(n) != 1; };

  // Entry labels are numerically largest; descending order lists blocks in
  // execution-friendly order with the entry block first.
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    Node root = *it;
    if (!isRoot(root) || assigned.count(root)) continue;
    Ebb ebb;
    ebb.root = root;
    std::vector<Node> stack = {root};
    while (!stack.empty()) {
      Node n = stack.back();
      stack.pop_back();
      if (!assigned.insert(n).second) continue;
      ebb.nodes.push_back(n);
      auto succs = fn.at(n).successors();
      for (auto it = succs.rbegin(); it != succs.rend(); ++it) {
        if (!isRoot(*it) && !assigned.count(*it)) stack.push_back(*it);
      }
    }
    ebbs.push_back(std::move(ebb));
  }
  return ebbs;
}

namespace {

// Value-numbering state for one path through an EBB tree.
//
// Register-rooted numbers name whatever atom a register currently holds and
// stay valid across PC-tag changes. Entries created by rule firings (ops,
// variable reads) additionally remember whether their defining rule is
// PC-insensitive (wpciSafe) and whether only PC-pure instructions have run
// since the defining occurrence (pcpClean); a future hit is usable only when
// one of the two holds, which guarantees the repeated rule would receive the
// same inputs and produce the same outputs as the original.
struct VnInfo {
  std::optional<Reg> holder;
  bool wpciSafe = false;
  bool pcpClean = false;
  Node defNode = 0;
};

struct LvnState {
  std::map<Reg, int> regVn;
  std::map<std::tuple<int, int, int>, int> opKeys;  // (operator, vn1, vn2)
  std::map<int, int> varKeys;                       // source vn of a var read
  std::vector<VnInfo> info;

  int fresh(std::optional<Reg> holder, bool wpciSafe = false, bool pcpClean = false,
            Node defNode = 0) {
    info.push_back(VnInfo{holder, wpciSafe, pcpClean, defNode});
    return static_cast<int>(info.size()) - 1;
  }

  int vnOf(Reg r) {
    auto it = regVn.find(r);
    if (it != regVn.end()) return it->second;
    int vn = fresh(r);
    regVn[r] = vn;
    return vn;
  }

  void define(Reg rd, int vn) {
    regVn[rd] = vn;
    for (std::size_t i = 0; i < info.size(); ++i) {
      if (static_cast<int>(i) != vn && info[i].holder == rd) info[i].holder.reset();
    }
    if (!info[vn].holder) info[vn].holder = rd;
  }

  // A non-PC-pure rule ran: entries of PC-sensitive rules become unusable,
  // the rest lose the equal-PC guarantee.
  void pcUnclean() {
    auto sweep = [&](auto& keys) {
      for (auto it = keys.begin(); it != keys.end();) {
        it = info[it->second].wpciSafe ? std::next(it) : keys.erase(it);
      }
    };
    sweep(opKeys);
    sweep(varKeys);
    for (VnInfo& vi : info) vi.pcpClean = false;
  }
};

class LvnWalker {
 public:
  LvnWalker(const RtlFunction& fn, const LoweredFlags& flags, CseOptions opts,
            std::map<Node, Instr>& replacements, CseReport* report)
      : fn_(fn), flags_(flags), opts_(opts), replacements_(replacements), report_(report) {}

  void walkEbb(const Ebb& ebb) {
    std::set<Node> members(ebb.nodes.begin(), ebb.nodes.end());
    std::vector<std::pair<Node, LvnState>> stack;
    stack.emplace_back(ebb.root, LvnState{});
    while (!stack.empty()) {
      auto [n, state] = std::move(stack.back());
      stack.pop_back();
      processNode(n, state);
      for (Node s : fn_.at(n).successors()) {
        if (s != ebb.root && members.count(s)) stack.emplace_back(s, state);
      }
    }
  }

 private:
  void processNode(Node n, LvnState& st) {
    const Instr& instr = fn_.at(n);
    const RuleFlags rf = flags_.get(instr.kind, instr.itag);

    switch (instr.kind) {
      case Opcode::Op: {
        int v1 = st.vnOf(instr.rs1);
        int v2 = st.vnOf(instr.rs2);
        auto key = std::make_tuple(static_cast<int>(instr.op), v1, v2);
        auto it = st.opKeys.find(key);
        if (it != st.opKeys.end() && usable(st, it->second, rf)) {
          int vn = it->second;
          if (auto holder = st.info[vn].holder) {
            replacements_[n] = Instr::mov(*holder, instr.rd, instr.succ, ITag::copy());
            if (report_) {
              report_->replaced++;
              report_->sites.push_back(
                  CseReport::Site{n, st.info[vn].defNode, rf.wpci == Tri::Holds});
            }
          }
          st.define(instr.rd, vn);
        } else {
          int vn = st.fresh(instr.rd, rf.wpci == Tri::Holds, rf.pcp == Tri::Holds, n);
          st.opKeys[key] = vn;
          st.define(instr.rd, vn);
        }
        break;
      }
      case Opcode::Mov: {
        if (instr.itag.kind == ITKind::Copy || instr.itag.kind == ITKind::Dc) {
          // Identity rules transport the atom verbatim.
          st.define(instr.rd, st.vnOf(instr.rs1));
        } else if (instr.itag.kind == ITKind::Var) {
          // A variable read is a unary rule application on the source atom;
          // repeated reads of an unchanged source yield equal results under
          // the same PC conditions as ops. Reads are never rewritten (the
          // rule stays cheap), but the result numbering feeds op matching.
          int vs = st.vnOf(instr.rs1);
          auto it = st.varKeys.find(vs);
          if (it != st.varKeys.end() && usable(st, it->second, rf)) {
            st.define(instr.rd, it->second);
          } else {
            int vn = st.fresh(instr.rd, rf.wpci == Tri::Holds, rf.pcp == Tri::Holds, n);
            st.varKeys[vs] = vn;
            st.define(instr.rd, vn);
          }
        } else {
          st.define(instr.rd, st.fresh(instr.rd));
        }
        break;
      }
      case Opcode::Movi:
        st.define(instr.rd, st.fresh(instr.rd));
        break;
      case Opcode::Call:
        st.define(instr.rd, st.fresh(instr.rd));
        break;
      default:
        break;
    }

    if (opts_.ignorePcConditions) return;
    // Callee rule sequences can move the PC tag even when the call rule
    // itself is PC-pure, so calls always end the equal-PC window.
    if (instr.kind == Opcode::Call || rf.pcp != Tri::Holds) st.pcUnclean();
  }

  bool usable(const LvnState& st, int vn, const RuleFlags& rf) const {
    if (opts_.ignorePcConditions) return true;
    return rf.wpci == Tri::Holds || st.info[vn].pcpClean;
  }

  const RtlFunction& fn_;
  const LoweredFlags& flags_;
  CseOptions opts_;
  std::map<Node, Instr>& replacements_;
  CseReport* report_;
};

}  // namespace

RtlFunction cse(const RtlFunction& fn, const LoweredFlags& flags, CseReport* report,
                CseOptions opts) {
  std::map<Node, Instr> replacements;
  LvnWalker walker(fn, flags, opts, replacements, report);
  for (const Ebb& ebb : ebbPartition(fn)) walker.walkEbb(ebb);

  RtlFunction out = fn;
  for (auto& [n, instr] : replacements) out.graph[n] = std::move(instr);
  return out;
}

}  // namespace tagc
