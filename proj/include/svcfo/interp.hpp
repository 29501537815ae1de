#pragma once

#include "svcfo/ast.hpp"
#include "svcfo/fom.hpp"
#include "svcfo/transform.hpp"
#include "svcfo/value.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace svcfo {

/// Deterministic failure injection: crash on the n-th execution of fault(label).
struct CrashPlan {
    std::map<std::string, int> triggers;

    bool empty() const { return triggers.empty(); }
};

/// Crash-plan file format: lines `crash <label> <occurrence>`.
CrashPlan parse_crash_plan(const std::string& text);

struct InterpStats {
    std::map<NodeId, std::int64_t> stmt_counts;       // executions per statement node
    std::map<std::string, std::int64_t> fault_counts; // label → times reached
    std::map<std::string, std::int64_t> method_entries;
};

struct InvokeOutcome {
    enum class Kind { Returned, Crashed };

    Kind kind = Kind::Returned;
    Value return_value = make_int(0);
    std::vector<std::string> transcript;
    std::map<std::string, Value> final_locals; // entry frame locals; empty when crashed
    InterpStats stats;

    bool returned() const { return kind == Kind::Returned; }
    bool crashed() const { return kind == Kind::Crashed; }
};

/// Registry for running a unit as-is: method names in declaration order,
/// fop totals zero. No meta-information is touched.
MethodRegistry scan_methods(const AsltTree& unit);

/// Runs one top-level call of `method` against the unit.
///
/// `fom` may be null: level/state intrinsics become no-ops and getFOPCount
/// reports 0, so transformed code runs like the original. A triggered fault
/// aborts instantly — no level decrements, no cleanup — modeling process
/// death; the outcome is Crashed with the transcript so far. On normal
/// completion the session's persisted state is cleared.
InvokeOutcome invoke(const AsltTree& unit, const MethodRegistry& registry,
                     const std::shared_ptr<Fom>& fom, const std::string& session_id,
                     const std::string& method, const std::vector<Value>& args,
                     const CrashPlan& plan = {});

} // namespace svcfo
