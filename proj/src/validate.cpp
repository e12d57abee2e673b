#include <random>
#include <sstream>

#include "tagc/harness.hpp"

namespace tagc {

namespace {

struct ProbeInputs {
  std::optional<BinOp> op;
  std::optional<RelOp> cmp;
  std::optional<PTag> pAux;
  std::vector<VTag> vtags;
};

struct Sampled {
  bool ok = true;
  std::optional<PTag> pcOut;
  std::vector<VTag> tagOuts;
};

// One rule under test: its enumerated non-PC inputs and an evaluator. Rules
// whose PC output is structurally the input PC (expression lifts, the
// identity plumbing) are exempt from the PC-output clause of the strong
// insensitivity check; their PC output carries no policy information.
struct RuleProbe {
  std::string name;
  bool pcPassthrough = false;
  RuleFlags declared;
  std::vector<ProbeInputs> inputs;
  std::function<Sampled(PTag, const ProbeInputs&)> apply;
};

std::string describeInputs(const HllPolicy& pol, PTag p, const ProbeInputs& in) {
  std::ostringstream os;
  os << "pc=" << pol.printPTag(p);
  if (in.op) os << " op=" << binOpName(*in.op);
  if (in.cmp) os << " cmp=" << relOpName(*in.cmp);
  if (in.pAux) os << " p'=" << pol.printPTag(*in.pAux);
  for (VTag t : in.vtags) os << " " << pol.printVTag(t);
  return os.str();
}

class ProbeBuilder {
 public:
  ProbeBuilder(const HllPolicy& pol, std::uint64_t maxSamples, std::uint64_t seed)
      : pol_(pol), maxSamples_(maxSamples), rng_(seed) {}

  std::vector<ProbeInputs> tagTuples(int arity, bool withAux = false,
                                     std::optional<BinOp> op = std::nullopt,
                                     std::optional<RelOp> cmp = std::nullopt) {
    std::vector<ProbeInputs> out;
    const auto vs = pol_.vtagUniverse();
    const auto ps = pol_.ptagUniverse();
    std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
    bool more = true;
    while (more) {
      ProbeInputs in;
      in.op = op;
      in.cmp = cmp;
      for (int k = 0; k < arity; ++k) in.vtags.push_back(vs[idx[static_cast<std::size_t>(k)]]);
      if (withAux) {
        for (PTag aux : ps) {
          ProbeInputs withP = in;
          withP.pAux = aux;
          out.push_back(std::move(withP));
        }
      } else {
        out.push_back(std::move(in));
      }
      // odometer over the tag universe
      more = false;
      for (int k = 0; k < arity; ++k) {
        auto& i = idx[static_cast<std::size_t>(k)];
        if (++i < vs.size()) {
          more = true;
          break;
        }
        i = 0;
      }
      if (arity == 0) break;
    }
    if (out.size() > maxSamples_) {
      std::vector<ProbeInputs> sampled;
      for (std::uint64_t i = 0; i < maxSamples_; ++i) {
        sampled.push_back(out[rng_() % out.size()]);
      }
      return sampled;
    }
    return out;
  }

  std::vector<ProbeInputs> withOps(int arity) {
    std::vector<ProbeInputs> out;
    for (BinOp op : {BinOp::Add, BinOp::Sub}) {
      auto tuples = tagTuples(arity, false, op);
      out.insert(out.end(), tuples.begin(), tuples.end());
    }
    return out;
  }

  std::vector<ProbeInputs> withCmps(int arity) {
    std::vector<ProbeInputs> out;
    for (RelOp cmp : {RelOp::Eq, RelOp::Ne, RelOp::Le, RelOp::Lt, RelOp::Ge, RelOp::Gt}) {
      auto tuples = tagTuples(arity, false, std::nullopt, cmp);
      out.insert(out.end(), tuples.begin(), tuples.end());
    }
    return out;
  }

  std::vector<ProbeInputs> callTuples() {
    std::vector<ProbeInputs> out;
    for (int arity = 0; arity <= 2; ++arity) {
      auto tuples = tagTuples(arity, true);
      out.insert(out.end(), tuples.begin(), tuples.end());
    }
    return out;
  }

 private:
  const HllPolicy& pol_;
  std::uint64_t maxSamples_;
  std::mt19937_64 rng_;
};

template <typename Outs>
Sampled sampleFrom(const RuleResult<Outs>& r, std::optional<PTag> pcOut,
                   std::vector<VTag> tagOuts) {
  if (!r.ok()) return Sampled{false, std::nullopt, {}};
  return Sampled{true, pcOut, std::move(tagOuts)};
}

std::vector<RuleProbe> hllProbes(const HllPolicy& pol, const FlagSet& declared,
                                 std::uint64_t maxSamples, std::uint64_t seed) {
  ProbeBuilder b(pol, maxSamples, seed);
  std::vector<RuleProbe> probes;

  auto add = [&](HllRule rule, bool passthrough, std::vector<ProbeInputs> inputs,
                 std::function<Sampled(PTag, const ProbeInputs&)> apply) {
    probes.push_back(RuleProbe{std::string(hllRuleName(rule)), passthrough,
                               declared.at(rule), std::move(inputs), std::move(apply)});
  };

  add(HllRule::Const, true, b.tagTuples(1), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.constRule(p, in.vtags[0]);
    return sampleFrom(r, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  });
  add(HllRule::Var, true, b.tagTuples(1), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.varRule(p, in.vtags[0]);
    return sampleFrom(r, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  });
  add(HllRule::Binop, true, b.withOps(2), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.binopRule(*in.op, p, in.vtags[0], in.vtags[1]);
    return sampleFrom(r, std::nullopt, r.ok() ? std::vector<VTag>{r.outs()} : std::vector<VTag>{});
  });
  add(HllRule::Assign, false, b.tagTuples(2), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.assignRule(p, in.vtags[0], in.vtags[1]);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
                      r.ok() ? std::vector<VTag>{r.outs().tag} : std::vector<VTag>{});
  });
  add(HllRule::IfSplit, false, b.withCmps(2), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.ifSplitRule(p, *in.cmp, in.vtags[0], in.vtags[1]);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  });
  add(HllRule::WhileSplit, false, b.withCmps(2), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.whileSplitRule(p, *in.cmp, in.vtags[0], in.vtags[1]);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  });
  add(HllRule::IfJoin, false, b.tagTuples(0, true), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.ifJoinRule(p, *in.pAux);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  });
  add(HllRule::WhileExit, false, b.tagTuples(0, true), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.whileExitRule(p, *in.pAux);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  });
  add(HllRule::Call, false, b.callTuples(), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.callRule(p, *in.pAux, in.vtags);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
                      r.ok() ? r.outs().argTags : std::vector<VTag>{});
  });
  add(HllRule::Ret, false, b.tagTuples(1, true), [&pol](PTag p, const ProbeInputs& in) {
    auto r = pol.retRule(p, *in.pAux, in.vtags[0]);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
                      r.ok() ? std::vector<VTag>{r.outs().tag} : std::vector<VTag>{});
  });
  return probes;
}

std::vector<RuleProbe> loweredProbes(const HllPolicy& base, const LoweredFlags& flags,
                                     std::uint64_t maxSamples, std::uint64_t seed) {
  ProbeBuilder b(base, maxSamples, seed);
  std::vector<RuleProbe> probes;
  // Rules fire through a scratch sink; only results matter here.
  auto pol = std::make_shared<LoweredPolicy>(base);

  auto add = [&](Opcode opcode, ITKind itk, bool passthrough,
                 std::vector<ProbeInputs> inputs,
                 std::function<Sampled(PTag, const ProbeInputs&)> apply) {
    std::string name =
        std::string(opcodeName(opcode)) + " " + std::string(itKindName(itk));
    probes.push_back(RuleProbe{std::move(name), passthrough,
                               flags.get(opcode, ITag::make(itk)), std::move(inputs),
                               std::move(apply)});
  };

  auto pcTagSample = [](const RuleResult<PcTagOuts>& r) {
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
                      r.ok() ? std::vector<VTag>{r.outs().tag} : std::vector<VTag>{});
  };

  add(Opcode::Movi, ITKind::Const, true, b.tagTuples(1),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->moviRule(ITag::constLit(), p, in.vtags[0], s));
      });
  add(Opcode::Mov, ITKind::Var, true, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::var(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Op, ITKind::Op, true, b.withOps(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->opRule(*in.op, ITag::opTag(*in.op), p, in.vtags[0],
                                       in.vtags[1], s));
      });
  add(Opcode::Mov, ITKind::Assign, false, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::assign(), p, in.vtags[1], in.vtags[0], s));
      });
  add(Opcode::Mov, ITKind::SavePc, true, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::savePc(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Cond, ITKind::IfSplit, false, b.withCmps(2),
      [pol](PTag p, const ProbeInputs& in) {
        TraceSink s;
        auto r = pol->condRule(*in.cmp, ITag::ifSplit(), p, in.vtags[0], in.vtags[1], s);
        return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
      });
  add(Opcode::Cond, ITKind::WhileSplit, false, b.withCmps(2),
      [pol](PTag p, const ProbeInputs& in) {
        TraceSink s;
        auto r =
            pol->condRule(*in.cmp, ITag::whileSplit(), p, in.vtags[0], in.vtags[1], s);
        return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
      });
  add(Opcode::Mov, ITKind::IfJoin, false, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::ifJoin(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Mov, ITKind::WhileJoin, false, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::whileJoin(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Call, ITKind::Call, false, b.callTuples(),
      [pol](PTag p, const ProbeInputs& in) {
        TraceSink s;
        auto r = pol->callRule(ITag::call(), p, *in.pAux, in.vtags, s);
        return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs().pc) : std::nullopt,
                          r.ok() ? r.outs().argTags : std::vector<VTag>{});
      });
  add(Opcode::Ret, ITKind::Ret, false, b.tagTuples(1, true),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->retRule(ITag::ret(), p, *in.pAux, in.vtags[0], s));
      });
  add(Opcode::Nop, ITKind::Dc, true, b.tagTuples(0), [pol](PTag p, const ProbeInputs&) {
    TraceSink s;
    auto r = pol->nopRule(ITag::dc(), p, s);
    return sampleFrom(r, r.ok() ? std::optional<PTag>(r.outs()) : std::nullopt, {});
  });
  add(Opcode::Movi, ITKind::Dc, true, b.tagTuples(1),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->moviRule(ITag::dc(), p, in.vtags[0], s));
      });
  add(Opcode::Movi, ITKind::LocalInit, true, b.tagTuples(1),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->moviRule(ITag::localInit(), p, in.vtags[0], s));
      });
  add(Opcode::Mov, ITKind::Copy, true, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::copy(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Mov, ITKind::Dc, true, b.tagTuples(2),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->movRule(ITag::dc(), p, in.vtags[0], in.vtags[1], s));
      });
  add(Opcode::Movi, ITKind::Param, true, b.withOps(3),
      [pol, pcTagSample](PTag p, const ProbeInputs& in) {
        TraceSink s;
        return pcTagSample(pol->moviRule(ITag::param(*in.op, in.vtags[0], in.vtags[1]),
                                         p, in.vtags[2], s));
      });
  return probes;
}

ValidateReport checkProbes(const HllPolicy& pol, const std::vector<RuleProbe>& probes) {
  ValidateReport report;
  const auto ps = pol.ptagUniverse();

  for (const RuleProbe& probe : probes) {
    auto finding = [&](char prop, const std::string& detail) {
      report.findings.push_back(FlagFinding{probe.name, prop, detail});
    };

    for (const ProbeInputs& in : probe.inputs) {
      // Per-PC checks.
      for (PTag p : ps) {
        Sampled s = probe.apply(p, in);
        report.checksRun++;
        if (probe.declared.dfs == Tri::Holds && !s.ok) {
          finding('D', describeInputs(pol, p, in));
        }
        if (probe.declared.pcp == Tri::Holds && s.ok && s.pcOut && !(*s.pcOut == p)) {
          finding('P', describeInputs(pol, p, in));
        }
      }
      // PC-variation checks.
      bool wantW = probe.declared.wpci == Tri::Holds;
      bool wantS = probe.declared.spci == Tri::Holds;
      if ((wantW || wantS) && ps.size() > 1) {
        Sampled base = probe.apply(ps[0], in);
        for (std::size_t k = 1; k < ps.size(); ++k) {
          Sampled other = probe.apply(ps[k], in);
          report.checksRun++;
          bool sameStatus = base.ok == other.ok;
          bool sameTags = base.tagOuts == other.tagOuts;
          if (wantW && (!sameStatus || (base.ok && !sameTags))) {
            finding('W', describeInputs(pol, ps[k], in));
          }
          if (wantS) {
            bool samePc = probe.pcPassthrough || base.pcOut == other.pcOut;
            if (!sameStatus || (base.ok && (!sameTags || !samePc))) {
              finding('S', describeInputs(pol, ps[k], in));
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace

ValidateReport validateFlags(const HllPolicy& pol, const FlagSet& declared,
                             std::uint64_t maxSamples, std::uint64_t seed) {
  return checkProbes(pol, hllProbes(pol, declared, maxSamples, seed));
}

ValidateReport validateLoweredFlags(const HllPolicy& base, const LoweredFlags& flags,
                                    std::uint64_t maxSamples, std::uint64_t seed) {
  return checkProbes(base, loweredProbes(base, flags, maxSamples, seed));
}

}  // namespace tagc
