#include "svcfo/oracle.hpp"

#include "svcfo/transform.hpp"

#include <algorithm>

namespace svcfo {

namespace {

constexpr const char* kSession = "oracle-session";

bool is_prefix(const std::vector<std::string>& prefix, const std::vector<std::string>& full) {
    if (prefix.size() > full.size())
        return false;
    return std::equal(prefix.begin(), prefix.end(), full.begin());
}

bool is_suffix(const std::vector<std::string>& suffix, const std::vector<std::string>& full) {
    if (suffix.size() > full.size())
        return false;
    return std::equal(suffix.rbegin(), suffix.rend(), full.rbegin());
}

std::int64_t count_of(const InterpStats& stats, NodeId id) {
    auto it = stats.stmt_counts.find(id);
    return it == stats.stmt_counts.end() ? 0 : it->second;
}

} // namespace

ResumeReport resume_equivalence_oracle(const AsltTree& original_unit, const std::string& method,
                                       const std::vector<Value>& args, const CrashSite& site) {
    ResumeReport report;
    TransformResult tr = transform_unit(original_unit);

    const MethodPlan* entry_plan = nullptr;
    for (const MethodPlan& plan : tr.plans)
        if (plan.name == method)
            entry_plan = &plan;
    if (!entry_plan)
        fail(Err::RuntimeError, "entry method '" + method + "' not found");

    // Reference: uninterrupted run over its own store.
    auto ref_fom = std::make_shared<Fom>("oracle", make_memory_store());
    report.reference = invoke(tr.tree, tr.registry, ref_fom, kSession, method, args);

    // Crash run: separate store that survives the crash.
    std::shared_ptr<StateStore> store = make_memory_store();
    CrashPlan plan;
    plan.triggers[site.label] = site.occurrence;
    auto crash_fom = std::make_shared<Fom>("oracle", store);
    report.crash_run = invoke(tr.tree, tr.registry, crash_fom, kSession, method, args, plan);
    report.crash_triggered = report.crash_run.crashed();

    if (!report.crash_triggered) {
        // The site never fired; the "crash" run is itself a full reference run.
        report.return_equal = report.crash_run.return_value == report.reference.return_value;
        report.saved_vars_equal = true;
        report.transcript_covered = report.crash_run.transcript == report.reference.transcript;
        report.prefix_segments_ok = true;
        report.resume_run = report.crash_run;
        if (!report.ok())
            report.notes.push_back("untriggered site diverged from reference");
        return report;
    }

    // The record the resumed entry frame will key on (top level = 1).
    if (auto rec = store->load({kSession, entry_plan->method_id, 1}))
        report.frontier_fop = rec->fop_index;

    // Resume: a fresh handle over the surviving store is what a restarted
    // process holds.
    auto resume_fom = std::make_shared<Fom>("oracle", store);
    report.resume_run = invoke(tr.tree, tr.registry, resume_fom, kSession, method, args);
    if (!report.resume_run.returned()) {
        report.notes.push_back("resume run did not complete");
        return report;
    }

    report.return_equal = report.resume_run.return_value == report.reference.return_value;
    if (!report.return_equal)
        report.notes.push_back("return value differs: reference " +
                               to_display(report.reference.return_value) + ", resumed " +
                               to_display(report.resume_run.return_value));

    // Final values of the saved vars still in force: the frontier FOP restores
    // exactly its own set, and later FOPs' vars are declared by the re-executed
    // segments. Vars saved only by earlier FOPs died with the process and are
    // unobservable afterwards (reading one aborts the resume run loudly).
    report.saved_vars_equal = true;
    for (const FopSite& fop : entry_plan->sites) {
        if (fop.fop_index < report.frontier_fop)
            continue;
        for (const std::string& var : fop.saved_vars) {
            auto ref_it = report.reference.final_locals.find(var);
            auto res_it = report.resume_run.final_locals.find(var);
            bool ref_has = ref_it != report.reference.final_locals.end();
            bool res_has = res_it != report.resume_run.final_locals.end();
            if (ref_has != res_has || (ref_has && !(ref_it->second == res_it->second))) {
                report.saved_vars_equal = false;
                report.notes.push_back("saved var '" + var + "' differs after resume");
            }
        }
    }

    bool crash_prefix = is_prefix(report.crash_run.transcript, report.reference.transcript);
    bool resume_suffix = is_suffix(report.resume_run.transcript, report.reference.transcript);
    bool covered = report.crash_run.transcript.size() + report.resume_run.transcript.size() >=
                   report.reference.transcript.size();
    report.transcript_covered = crash_prefix && resume_suffix && covered;
    if (!crash_prefix)
        report.notes.push_back("crash transcript is not a prefix of the reference");
    if (!resume_suffix)
        report.notes.push_back("resume transcript is not a suffix of the reference");
    if (!covered)
        report.notes.push_back("some reference output was never produced");

    // Segments of the entry method strictly before the stored FOP must have
    // run exactly once, entirely inside the pre-crash execution.
    report.prefix_segments_ok = true;
    for (int seg = 0; seg < report.frontier_fop; ++seg) {
        for (NodeId stmt : entry_plan->segments[static_cast<std::size_t>(seg)]) {
            std::int64_t in_resume = count_of(report.resume_run.stats, stmt);
            std::int64_t in_crash = count_of(report.crash_run.stats, stmt);
            std::int64_t in_ref = count_of(report.reference.stats, stmt);
            if (in_resume != 0) {
                report.prefix_segments_ok = false;
                report.notes.push_back("segment " + std::to_string(seg) +
                                       " re-executed after resume (node " + std::to_string(stmt) + ")");
            }
            if (in_crash != in_ref) {
                report.prefix_segments_ok = false;
                report.notes.push_back("segment " + std::to_string(seg) +
                                       " count differs from reference before the crash");
            }
        }
    }
    return report;
}

std::vector<CrashSite> enumerate_crash_sites(const AsltTree& original_unit, const std::string& method,
                                             const std::vector<Value>& args) {
    TransformResult tr = transform_unit(original_unit);
    auto fom = std::make_shared<Fom>("oracle", make_memory_store());
    InvokeOutcome reference = invoke(tr.tree, tr.registry, fom, kSession, method, args);
    std::vector<CrashSite> sites;
    for (const auto& [label, count] : reference.stats.fault_counts)
        for (int n = 1; n <= count; ++n)
            sites.push_back({label, n});
    return sites;
}

} // namespace svcfo
