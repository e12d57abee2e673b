#pragma once

#include <functional>

#include "tagc/hll.hpp"
#include "tagc/lower.hpp"
#include "tagc/rtl.hpp"

namespace tagc {

// Invoked before each instruction executes; used by instrumented checks.
using NodeHook =
    std::function<void(const RtlFunction&, Node, const Instr&, const RegBank&, PTag)>;

RtlState initialRtlState(const RtlProgram& prog, const LoweredPolicy& pol);

StepStatus stepRtl(RtlState& st, const RtlProgram& prog, const LoweredPolicy& pol,
                   TraceSink& sink, std::uint64_t& fuel, const NodeHook* hook = nullptr);

RunResult runRtl(const RtlProgram& prog, const LoweredPolicy& pol, std::uint64_t fuel,
                 TraceSink* external = nullptr, const NodeHook* hook = nullptr);

}  // namespace tagc
