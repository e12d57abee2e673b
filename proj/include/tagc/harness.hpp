#pragma once

#include "tagc/hll.hpp"
#include "tagc/lower.hpp"
#include "tagc/opt.hpp"
#include "tagc/rtl_run.hpp"
#include "tagc/rtlgen.hpp"

namespace tagc {

// Target fuel per unit of source fuel, checked empirically by campaigns: a
// target run that exhausts scale*fuel + slack after the source completed is
// reported as a mismatch.
inline constexpr std::uint64_t kFuelScale = 64;
inline constexpr std::uint64_t kFuelSlack = 1024;

// ---------------------------------------------------------------------------
// Random well-formed programs. Identical (seed, config) yields identical
// programs. Generated programs cannot go wrong: all variables are declared,
// calls resolve with matching arity, and the call graph is acyclic.

struct GenConfig {
  std::uint64_t seed = 0;
  int maxFunctions = 3;
  int maxStmtDepth = 3;
  int maxExprDepth = 3;
  int maxBlockLen = 4;
  int maxParams = 3;
  int maxLocals = 4;
  double countedLoopBias = 0.9;  // probability a loop is bounded by construction
  // Probability a literal draws a non-default tag. Split and call points never
  // reject tags, so condition and argument literals can be tagged freely;
  // tagged literals in assigned values end runs early under rejecting
  // policies and stay rare.
  double condTagProb = 0.4;
  double valueTagProb = 0.08;
};

HllProgram genProgram(const GenConfig& cfg, const HllPolicy& pol);

// ---------------------------------------------------------------------------
// Differential execution

struct Verdict {
  enum class Kind { Agree, Mismatch, Inconclusive };
  Kind kind = Kind::Inconclusive;
  Behavior src = TimedOut{};
  Behavior tgt = TimedOut{};
  // Index of the first divergent rule event; only set when traces are
  // compared (no optimization passes) and they differ.
  std::optional<std::size_t> traceDivergence;
  // Informational when passes ran: did the optimized trace still match?
  bool optTracesCompared = false;
  bool optTraceEqual = false;
};

Verdict diffRun(const HllProgram& prog, const HllPolicy& pol, std::uint64_t fuel,
                std::span<const PassSpec> passes);

// Locally minimal failing program: statement/expression deletion until no
// single deletion still mismatches.
HllProgram shrinkMismatch(const HllProgram& prog, const HllPolicy& pol,
                          std::uint64_t fuel, std::span<const PassSpec> passes,
                          int maxRounds = 200);

struct Counterexample {
  std::uint64_t seed = 0;
  std::string program;
  std::string srcBehavior;
  std::string tgtBehavior;
  std::optional<std::size_t> traceDivergence;
};

struct CampaignConfig {
  std::uint64_t startSeed = 1;
  std::uint64_t seeds = 100;
  std::vector<PassSpec> passes;
  std::uint64_t fuel = 10000;
  int jobs = 1;
  int maxCounterexamples = 3;
  bool shrink = true;
  bool stopAtFirstMismatch = false;
  GenConfig gen;
};

struct CampaignResult {
  std::uint64_t agree = 0;
  std::uint64_t mismatch = 0;
  std::uint64_t traceMismatch = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t optTracesCompared = 0;
  std::uint64_t optTraceEqual = 0;
  std::vector<Counterexample> examples;
};

// Runs diffRun over consecutive seeds; embarrassingly parallel over seeds,
// merged deterministically in seed order.
CampaignResult runCampaign(const CampaignConfig& cfg, const HllPolicy& pol);

// ---------------------------------------------------------------------------
// Flag validation: declared Holds properties are checked against sampled (for
// boolean-tag policies, exhaustive) rule evaluations.

struct FlagFinding {
  std::string rule;      // rule or (opcode, I-tag) pair
  char property;         // 'D', 'P', 'W', 'S'
  std::string detail;    // offending inputs
};

struct ValidateReport {
  std::vector<FlagFinding> findings;
  std::uint64_t checksRun = 0;
};

ValidateReport validateFlags(const HllPolicy& pol, const FlagSet& declared,
                             std::uint64_t maxSamples = 10000, std::uint64_t seed = 0);

inline ValidateReport validateFlags(const HllPolicy& pol,
                                    std::uint64_t maxSamples = 10000,
                                    std::uint64_t seed = 0) {
  return validateFlags(pol, pol.flags(), maxSamples, seed);
}

// Same checks applied to the lowered rules against the lowered flag table.
ValidateReport validateLoweredFlags(const HllPolicy& base, const LoweredFlags& flags,
                                    std::uint64_t maxSamples = 10000,
                                    std::uint64_t seed = 0);

}  // namespace tagc
