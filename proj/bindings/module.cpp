#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tagc/harness.hpp"
#include "tagc/hll.hpp"
#include "tagc/lower.hpp"
#include "tagc/opt.hpp"
#include "tagc/rtl_run.hpp"
#include "tagc/rtlgen.hpp"

namespace py = pybind11;
using namespace tagc;

namespace {

std::vector<PassSpec> toPasses(const std::vector<std::string>& names) {
  std::vector<PassSpec> passes;
  for (const std::string& name : names) {
    auto kind = passByName(name);
    if (!kind) throw py::value_error("unknown pass: " + name);
    passes.push_back(PassSpec{*kind, false});
  }
  return passes;
}

py::dict behaviorDict(const HllPolicy& pol, const Behavior& b) {
  py::dict d;
  if (const auto* t = std::get_if<Terminated>(&b)) {
    d["kind"] = "terminate";
    d["value"] = t->result.value;
    d["tag"] = pol.printVTag(t->result.tag);
  } else if (const auto* f = std::get_if<FailStopped>(&b)) {
    d["kind"] = "failstop";
    d["error"] = f->err.token;
  } else {
    d["kind"] = "timeout";
  }
  d["text"] = printBehavior(pol, b);
  return d;
}

py::dict resultDict(const HllPolicy& pol, const RunResult& r, bool withTrace) {
  py::dict d = behaviorDict(pol, r.behavior);
  if (withTrace) {
    py::list lines;
    for (const RuleEvent& ev : r.trace.events) lines.append(printEvent(pol, ev));
    d["trace"] = lines;
  }
  d["rule_firings"] = r.trace.events.size();
  return d;
}

py::dict runSource(const std::string& text, const std::string& policy,
                   std::uint64_t fuel, bool trace) {
  const HllPolicy& pol = policyByName(policy);
  HllProgram prog = parseProgram(text, pol);
  return resultDict(pol, runHll(prog, pol, fuel), trace);
}

py::dict runCompiledPy(const std::string& text, const std::string& policy,
                       std::uint64_t fuel, const std::vector<std::string>& passes,
                       bool trace) {
  const HllPolicy& pol = policyByName(policy);
  HllProgram prog = parseProgram(text, pol);
  RtlProgram compiled = compileProgram(prog, pol);
  LoweredPolicy lowered(pol);
  RtlProgram optimized =
      runPasses(compiled, lowered, lowerFlags(pol.flags()), toPasses(passes));
  return resultDict(pol, runRtl(optimized, lowered, fuel), trace);
}

std::string compileText(const std::string& text, const std::string& policy,
                        const std::vector<std::string>& passes) {
  const HllPolicy& pol = policyByName(policy);
  RtlProgram compiled = compileProgram(parseProgram(text, pol), pol);
  LoweredPolicy lowered(pol);
  RtlProgram optimized =
      runPasses(compiled, lowered, lowerFlags(pol.flags()), toPasses(passes));
  return dumpProgram(optimized, pol);
}

std::string compileDot(const std::string& text, const std::string& policy,
                       const std::vector<std::string>& passes) {
  const HllPolicy& pol = policyByName(policy);
  RtlProgram compiled = compileProgram(parseProgram(text, pol), pol);
  LoweredPolicy lowered(pol);
  RtlProgram optimized =
      runPasses(compiled, lowered, lowerFlags(pol.flags()), toPasses(passes));
  return dotProgram(optimized, pol);
}

py::dict diffCampaign(std::uint64_t seeds, const std::string& policy,
                      const std::vector<std::string>& passes, std::uint64_t fuel,
                      int jobs, std::uint64_t startSeed) {
  const HllPolicy& pol = policyByName(policy);
  CampaignConfig cfg;
  cfg.startSeed = startSeed;
  cfg.seeds = seeds;
  cfg.passes = toPasses(passes);
  cfg.fuel = fuel;
  cfg.jobs = jobs;
  CampaignResult r;
  {
    py::gil_scoped_release release;
    r = runCampaign(cfg, pol);
  }
  py::dict d;
  d["agree"] = r.agree;
  d["mismatch"] = r.mismatch;
  d["trace_mismatch"] = r.traceMismatch;
  d["inconclusive"] = r.inconclusive;
  d["optimized_traces_equal"] = r.optTraceEqual;
  d["optimized_traces_compared"] = r.optTracesCompared;
  py::list examples;
  for (const Counterexample& ex : r.examples) {
    py::dict e;
    e["seed"] = ex.seed;
    e["program"] = ex.program;
    e["source"] = ex.srcBehavior;
    e["target"] = ex.tgtBehavior;
    examples.append(e);
  }
  d["counterexamples"] = examples;
  return d;
}

py::dict validatePolicy(const std::string& policy, std::uint64_t samples,
                        std::uint64_t seed) {
  const HllPolicy& pol = policyByName(policy);
  ValidateReport r = validateFlags(pol, samples, seed);
  py::dict d;
  d["checks"] = r.checksRun;
  py::list findings;
  for (const FlagFinding& f : r.findings) {
    py::dict e;
    e["rule"] = f.rule;
    e["property"] = std::string(1, f.property);
    e["inputs"] = f.detail;
    findings.append(e);
  }
  d["findings"] = findings;
  return d;
}

std::string generateProgram(std::uint64_t seed, const std::string& policy) {
  const HllPolicy& pol = policyByName(policy);
  GenConfig cfg;
  cfg.seed = seed;
  return printProgram(genProgram(cfg, pol), pol);
}

}  // namespace

PYBIND11_MODULE(_tagc, m) {
  m.doc() = "Tag-aware compiler for a monitored WHILE language: source and "
            "register-level interpreters, policy lowering, tag-safe "
            "optimizations, and differential checking.";

  py::register_exception<ParseError>(m, "SourceError", PyExc_ValueError);
  py::register_exception<WellFormednessError>(m, "ProgramError", PyExc_ValueError);

  m.def("policies", &policyNames, "Names of the built-in policies.");
  m.def("run_source", &runSource, py::arg("text"), py::arg("policy") = "ifc",
        py::arg("fuel") = 100000, py::arg("trace") = false,
        "Parse and execute a source program; returns its behavior.");
  m.def("run_compiled", &runCompiledPy, py::arg("text"), py::arg("policy") = "ifc",
        py::arg("fuel") = 100000, py::arg("passes") = std::vector<std::string>{},
        py::arg("trace") = false,
        "Compile (optionally optimize) and execute under the lowered policy.");
  m.def("compile_text", &compileText, py::arg("text"), py::arg("policy") = "ifc",
        py::arg("passes") = std::vector<std::string>{},
        "Compile to the textual register-transfer dump.");
  m.def("compile_dot", &compileDot, py::arg("text"), py::arg("policy") = "ifc",
        py::arg("passes") = std::vector<std::string>{},
        "Compile to a graphviz rendering of the control-flow graphs.");
  m.def("diff_campaign", &diffCampaign, py::arg("seeds"), py::arg("policy") = "ifc",
        py::arg("passes") = std::vector<std::string>{}, py::arg("fuel") = 10000,
        py::arg("jobs") = 1, py::arg("start_seed") = 1,
        "Differential campaign over generated programs.");
  m.def("validate_policy", &validatePolicy, py::arg("policy") = "ifc",
        py::arg("samples") = 10000, py::arg("seed") = 0,
        "Check a policy's declared rule properties by sampling.");
  m.def("generate_program", &generateProgram, py::arg("seed"),
        py::arg("policy") = "ifc",
        "Deterministically generate a well-formed source program.");
  m.def("dispatch_table", &dumpDispatch,
        "The (opcode, I-tag) to source-rule dispatch map.");
}
