#include <atomic>
#include <thread>

#include "tagc/harness.hpp"

namespace tagc {

Verdict diffRun(const HllProgram& prog, const HllPolicy& pol, std::uint64_t fuel,
                std::span<const PassSpec> passes) {
  Verdict v;
  RunResult src = runHll(prog, pol, fuel);
  v.src = src.behavior;
  if (std::holds_alternative<TimedOut>(src.behavior)) {
    v.kind = Verdict::Kind::Inconclusive;
    return v;
  }

  RtlProgram compiled = compileProgram(prog, pol);
  LoweredPolicy lowered(pol);
  LoweredFlags flags = lowerFlags(pol.flags());
  RtlProgram optimized = runPasses(compiled, lowered, flags, passes);
  RunResult tgt = runRtl(optimized, lowered, kFuelScale * fuel + kFuelSlack);
  v.tgt = tgt.behavior;

  v.kind = behaviorEq(v.src, v.tgt) ? Verdict::Kind::Agree : Verdict::Kind::Mismatch;

  if (passes.empty()) {
    // Policy independence: the compiled run must invoke the same source
    // rules with the same arguments in the same order.
    const auto& a = src.trace.events;
    const auto& b = tgt.trace.events;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!(a[i] == b[i])) {
        v.traceDivergence = i;
        return v;
      }
    }
    if (a.size() != b.size()) v.traceDivergence = n;
  } else if (v.kind == Verdict::Kind::Agree) {
    v.optTracesCompared = true;
    v.optTraceEqual = src.trace.events == tgt.trace.events;
  }
  return v;
}

namespace {

void exprVariants(const ExprPtr& e, const std::function<void(ExprPtr)>& emit) {
  if (const auto* bin = std::get_if<BinExpr>(&e->node)) {
    emit(bin->lhs);
    emit(bin->rhs);
    exprVariants(bin->lhs, [&](ExprPtr sub) { emit(makeBin(bin->op, sub, bin->rhs)); });
    exprVariants(bin->rhs, [&](ExprPtr sub) { emit(makeBin(bin->op, bin->lhs, sub)); });
  }
}

void stmtVariants(const StmtPtr& s, const std::function<void(StmtPtr)>& emit) {
  if (!std::holds_alternative<SkipStmt>(s->node)) emit(makeSkip());

  if (const auto* seq = std::get_if<SeqStmt>(&s->node)) {
    emit(seq->first);
    emit(seq->second);
    stmtVariants(seq->first, [&](StmtPtr sub) { emit(makeSeq(sub, seq->second)); });
    stmtVariants(seq->second, [&](StmtPtr sub) { emit(makeSeq(seq->first, sub)); });
  } else if (const auto* a = std::get_if<AssignStmt>(&s->node)) {
    exprVariants(a->value, [&](ExprPtr sub) { emit(makeAssign(a->target, sub)); });
  } else if (const auto* i = std::get_if<IfStmt>(&s->node)) {
    emit(i->thenBody);
    emit(i->elseBody);
    stmtVariants(i->thenBody, [&](StmtPtr sub) {
      emit(makeIf(i->lhs, i->cmp, i->rhs, sub, i->elseBody));
    });
    stmtVariants(i->elseBody, [&](StmtPtr sub) {
      emit(makeIf(i->lhs, i->cmp, i->rhs, i->thenBody, sub));
    });
    exprVariants(i->lhs, [&](ExprPtr sub) {
      emit(makeIf(sub, i->cmp, i->rhs, i->thenBody, i->elseBody));
    });
    exprVariants(i->rhs, [&](ExprPtr sub) {
      emit(makeIf(i->lhs, i->cmp, sub, i->thenBody, i->elseBody));
    });
  } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
    emit(w->body);
    stmtVariants(w->body,
                 [&](StmtPtr sub) { emit(makeWhile(w->lhs, w->cmp, w->rhs, sub)); });
  } else if (const auto* r = std::get_if<ReturnStmt>(&s->node)) {
    exprVariants(r->value, [&](ExprPtr sub) { emit(makeReturn(sub)); });
  } else if (const auto* c = std::get_if<CallStmt>(&s->node)) {
    for (std::size_t k = 0; k < c->args.size(); ++k) {
      exprVariants(c->args[k], [&](ExprPtr sub) {
        std::vector<ExprPtr> args = c->args;
        args[k] = sub;
        emit(makeCall(c->target, c->callee, std::move(args)));
      });
    }
  }
}

}  // namespace

HllProgram shrinkMismatch(const HllProgram& prog, const HllPolicy& pol,
                          std::uint64_t fuel, std::span<const PassSpec> passes,
                          int maxRounds) {
  HllProgram current = prog;
  for (int round = 0; round < maxRounds; ++round) {
    bool improved = false;
    for (const auto& [name, fn] : current.functions) {
      std::vector<StmtPtr> bodies;
      stmtVariants(fn.body, [&](StmtPtr sub) { bodies.push_back(std::move(sub)); });
      for (StmtPtr& body : bodies) {
        HllProgram candidate = current;
        candidate.functions[name].body = body;
        if (diffRun(candidate, pol, fuel, passes).kind == Verdict::Kind::Mismatch) {
          current = std::move(candidate);
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }
  return current;
}

CampaignResult runCampaign(const CampaignConfig& cfg, const HllPolicy& pol) {
  struct SeedOutcome {
    bool done = false;
    Verdict::Kind kind = Verdict::Kind::Agree;
    bool traceMismatch = false;
    bool optCompared = false;
    bool optEqual = false;
    std::string program;
    std::string srcBehavior, tgtBehavior;
    std::optional<std::size_t> divergence;
  };

  std::vector<SeedOutcome> outcomes(cfg.seeds);
  std::atomic<std::uint64_t> nextIndex{0};
  std::atomic<bool> stop{false};

  auto worker = [&]() {
    while (!stop.load(std::memory_order_relaxed)) {
      std::uint64_t i = nextIndex.fetch_add(1);
      if (i >= cfg.seeds) return;
      GenConfig gen = cfg.gen;
      gen.seed = cfg.startSeed + i;
      HllProgram prog = genProgram(gen, pol);
      Verdict v = diffRun(prog, pol, cfg.fuel, cfg.passes);

      SeedOutcome& out = outcomes[i];
      out.done = true;
      out.kind = v.kind;
      out.traceMismatch = v.traceDivergence.has_value();
      out.optCompared = v.optTracesCompared;
      out.optEqual = v.optTraceEqual;
      out.divergence = v.traceDivergence;
      bool failed = v.kind == Verdict::Kind::Mismatch || out.traceMismatch;
      if (failed) {
        HllProgram reported = prog;
        if (cfg.shrink && v.kind == Verdict::Kind::Mismatch) {
          reported = shrinkMismatch(prog, pol, cfg.fuel, cfg.passes);
          v = diffRun(reported, pol, cfg.fuel, cfg.passes);
        }
        out.program = printProgram(reported, pol);
        out.srcBehavior = printBehavior(pol, v.src);
        out.tgtBehavior = printBehavior(pol, v.tgt);
        if (cfg.stopAtFirstMismatch) stop.store(true, std::memory_order_relaxed);
      }
    }
  };

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  CampaignResult result;
  std::uint64_t processed = std::min<std::uint64_t>(nextIndex.load(), cfg.seeds);
  for (std::uint64_t i = 0; i < processed; ++i) {
    const SeedOutcome& out = outcomes[i];
    if (!out.done) continue;  // claimed but skipped after an early stop
    switch (out.kind) {
      case Verdict::Kind::Agree:
        result.agree++;
        break;
      case Verdict::Kind::Mismatch:
        result.mismatch++;
        break;
      case Verdict::Kind::Inconclusive:
        result.inconclusive++;
        break;
    }
    if (out.traceMismatch) result.traceMismatch++;
    if (out.optCompared) {
      result.optTracesCompared++;
      if (out.optEqual) result.optTraceEqual++;
    }
    bool failed = out.kind == Verdict::Kind::Mismatch || out.traceMismatch;
    if (failed && static_cast<int>(result.examples.size()) < cfg.maxCounterexamples) {
      result.examples.push_back(Counterexample{cfg.startSeed + i, out.program,
                                               out.srcBehavior, out.tgtBehavior,
                                               out.divergence});
    }
  }
  return result;
}

}  // namespace tagc
