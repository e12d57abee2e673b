#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tagc/harness.hpp"
#include "tagc/hll.hpp"
#include "tagc/lower.hpp"
#include "tagc/opt.hpp"
#include "tagc/rtl_run.hpp"
#include "tagc/rtlgen.hpp"

using namespace tagc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailStop = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitUsage = 3;

std::string readInput(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<PassSpec> parsePasses(const std::vector<std::string>& names) {
  std::vector<PassSpec> passes;
  for (const std::string& name : names) {
    auto kind = passByName(name);
    if (!kind) throw CLI::ValidationError("--passes", "unknown pass: " + name);
    passes.push_back(PassSpec{*kind, false});
  }
  return passes;
}

std::uint64_t effectiveSeed(std::uint64_t cliSeed) {
  if (const char* env = std::getenv("TAGC_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return cliSeed;
}

int behaviorExit(const Behavior& b, const HllPolicy& pol) {
  if (const auto* f = std::get_if<FailStopped>(&b)) {
    std::cout << "FailStop: " << f->err.token << "\n";
    return kExitFailStop;
  }
  std::cout << printBehavior(pol, b) << "\n";
  return kExitOk;
}

json campaignJson(const CampaignConfig& cfg, const std::string& policy,
                  const CampaignResult& result, const ValidateReport& flagReport) {
  json examples = json::array();
  for (const Counterexample& ex : result.examples) {
    json e = {{"seed", ex.seed},
              {"program", ex.program},
              {"source", ex.srcBehavior},
              {"target", ex.tgtBehavior}};
    if (ex.traceDivergence) e["divergenceIndex"] = *ex.traceDivergence;
    examples.push_back(std::move(e));
  }
  json findings = json::array();
  for (const FlagFinding& f : flagReport.findings) {
    findings.push_back({{"rule", f.rule},
                        {"property", std::string(1, f.property)},
                        {"inputs", f.detail}});
  }
  json names = json::array();
  for (const PassSpec& p : cfg.passes) names.push_back(std::string(passName(p.kind)));
  return json{
      {"policy", policy},
      {"seeds", cfg.seeds},
      {"startSeed", cfg.startSeed},
      {"fuel", cfg.fuel},
      {"passes", names},
      {"verdicts",
       {{"agree", result.agree},
        {"mismatch", result.mismatch},
        {"traceMismatch", result.traceMismatch},
        {"inconclusive", result.inconclusive}}},
      {"optimizedTraces",
       {{"compared", result.optTracesCompared}, {"equal", result.optTraceEqual}}},
      {"counterexamples", examples},
      {"flagValidation", {{"checks", flagReport.checksRun}, {"findings", findings}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tag-aware compiler and differential policy checker"};
  app.require_subcommand(1);

  std::string input;
  std::string policyName = "ifc";
  std::string output;
  std::string dotOutput;
  std::string jsonOutput;
  std::vector<std::string> passNames;
  std::uint64_t fuel = 100000;
  std::uint64_t seeds = 1000;
  std::uint64_t startSeed = 1;
  std::uint64_t samples = 10000;
  int jobs = 1;
  bool trace = false;
  bool target = false;
  bool compact = false;

  auto addPolicy = [&](CLI::App* cmd) {
    cmd->add_option("--policy", policyName, "policy name (ifc|taint|unit)")
        ->default_val("ifc");
  };
  auto addPasses = [&](CLI::App* cmd) {
    cmd->add_option("--passes", passNames,
                    "optimization passes (deadcode,cse,constprop)")
        ->delimiter(',');
  };

  CLI::App* compile = app.add_subcommand("compile", "translate a source file");
  compile->add_option("input", input, "source file or -")->required();
  addPolicy(compile);
  addPasses(compile);
  compile->add_option("-o,--output", output, "write the textual dump here");
  compile->add_option("--dot", dotOutput, "also emit a graphviz rendering");
  compile->add_flag("--compact", compact, "rethread and drop dead nops");

  CLI::App* run = app.add_subcommand("run", "execute a source file");
  run->add_option("input", input, "source file or -")->required();
  addPolicy(run);
  addPasses(run);
  run->add_option("--fuel", fuel, "step budget")->default_val(100000);
  run->add_flag("--trace", trace, "stream rule firings as they happen");
  run->add_flag("--target", target, "compile first and run the target code");

  CLI::App* opt = app.add_subcommand("opt", "optimize and report per pass");
  opt->add_option("input", input, "source file or -")->required();
  addPolicy(opt);
  addPasses(opt);
  opt->add_option("-o,--output", output, "write the optimized dump here");
  opt->add_option("--dot", dotOutput, "also emit a graphviz rendering");
  opt->add_flag("--compact", compact, "rethread and drop dead nops");

  CLI::App* dot = app.add_subcommand("dot", "emit a graphviz rendering");
  dot->add_option("input", input, "source file or -")->required();
  addPolicy(dot);
  dot->add_option("-o,--output", output, "write the dot text here");

  CLI::App* diff =
      app.add_subcommand("diff", "differential campaign over generated programs");
  addPolicy(diff);
  addPasses(diff);
  diff->add_option("--seeds", seeds, "number of seeds")->default_val(1000);
  diff->add_option("--seed", startSeed, "first seed")->default_val(1);
  diff->add_option("--fuel", fuel, "source step budget per program")
      ->default_val(10000);
  diff->add_option("--jobs", jobs, "worker threads")->default_val(1);
  diff->add_option("--json", jsonOutput, "write the JSON report here");

  CLI::App* validate = app.add_subcommand("validate", "check declared rule flags");
  addPolicy(validate);
  validate->add_option("--samples", samples, "sample budget per rule")
      ->default_val(10000);
  validate->add_option("--seed", startSeed, "sampling seed")->default_val(0);

  CLI::App* dispatch =
      app.add_subcommand("dump-dispatch", "print the I-tag dispatch table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const HllPolicy& pol = policyByName(policyName);
    std::vector<PassSpec> passes = parsePasses(passNames);

    if (dispatch->parsed()) {
      std::cout << dumpDispatch();
      return kExitOk;
    }

    if (validate->parsed()) {
      ValidateReport report = validateFlags(pol, samples, effectiveSeed(startSeed));
      std::cout << "checks run: " << report.checksRun << "\n";
      for (const FlagFinding& f : report.findings) {
        std::cout << "counterexample: " << f.rule << " " << f.property << " "
                  << f.detail << "\n";
      }
      if (report.findings.empty()) {
        std::cout << "0 counterexamples\n";
        return kExitOk;
      }
      return kExitMismatch;
    }

    if (diff->parsed()) {
      CampaignConfig cfg;
      cfg.startSeed = effectiveSeed(startSeed);
      cfg.seeds = seeds;
      cfg.passes = passes;
      cfg.fuel = fuel;
      cfg.jobs = jobs;
      CampaignResult result = runCampaign(cfg, pol);
      ValidateReport flagReport = validateFlags(pol, samples, cfg.startSeed);
      json report = campaignJson(cfg, policyName, result, flagReport);
      if (jsonOutput.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        writeOutput(jsonOutput, report.dump(2) + "\n");
        std::cout << "agree=" << result.agree << " mismatch=" << result.mismatch
                  << " traceMismatch=" << result.traceMismatch
                  << " inconclusive=" << result.inconclusive << "\n";
      }
      bool failed = result.mismatch > 0 || result.traceMismatch > 0 ||
                    !flagReport.findings.empty();
      return failed ? kExitMismatch : kExitOk;
    }

    // The remaining subcommands read a program.
    HllProgram prog = parseProgram(readInput(input), pol);

    if (run->parsed()) {
      if (!target && !passes.empty()) {
        throw CLI::ValidationError("--passes", "passes apply to --target runs");
      }
      TraceSink streaming;
      if (trace) {
        streaming.onEvent = [&pol](const RuleEvent& ev) {
          std::cout << printEvent(pol, ev) << "\n";
        };
      }
      if (target) {
        RtlProgram compiled = compileProgram(prog, pol);
        LoweredPolicy lowered(pol);
        RtlProgram optimized =
            runPasses(compiled, lowered, lowerFlags(pol.flags()), passes);
        RunResult r = runRtl(optimized, lowered, fuel, trace ? &streaming : nullptr);
        return behaviorExit(r.behavior, pol);
      }
      RunResult r = runHll(prog, pol, fuel, trace ? &streaming : nullptr);
      return behaviorExit(r.behavior, pol);
    }

    // compile / opt / dot
    RtlProgram compiled = compileProgram(prog, pol);
    LoweredPolicy lowered(pol);
    LoweredFlags flags = lowerFlags(pol.flags());
    PassReports reports;
    RtlProgram result = runPasses(compiled, lowered, flags, passes, &reports);
    if (compact) {
      RtlProgram compacted;
      for (const auto& [name, fn] : result.functions) {
        compacted.functions.emplace(name, compactNops(fn));
      }
      result = std::move(compacted);
    }
    auto defects = wfCheck(result);
    for (const WfDefect& d : defects) {
      std::cerr << "wf defect in " << d.where << ": " << d.message << "\n";
    }
    if (!defects.empty()) return kExitUsage;

    if (opt->parsed()) {
      for (const PassSpec& p : passes) {
        switch (p.kind) {
          case PassKind::Deadcode:
            std::cout << "deadcode: removed " << reports.deadcode.removed
                      << " instructions\n";
            break;
          case PassKind::Cse:
            std::cout << "cse: replaced " << reports.cse.replaced << " ops\n";
            break;
          case PassKind::Constprop:
            std::cout << "constprop: folded " << reports.constprop.foldsParam
                      << " via parameterized tags, " << reports.constprop.foldsStatic
                      << " statically\n";
            break;
        }
      }
    }

    if (dot->parsed()) {
      writeOutput(output, dotProgram(result, pol));
      return kExitOk;
    }
    if (!dotOutput.empty()) writeOutput(dotOutput, dotProgram(result, pol));
    writeOutput(output, dumpProgram(result, pol));
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const WellFormednessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
