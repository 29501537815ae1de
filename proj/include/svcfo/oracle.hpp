#pragma once

#include "svcfo/ast.hpp"
#include "svcfo/interp.hpp"

#include <string>
#include <vector>

namespace svcfo {

struct CrashSite {
    std::string label;
    int occurrence = 1;
};

/// Outcome of one crash-then-resume experiment against its uninterrupted
/// reference run. `ok()` means the resumed session is indistinguishable from
/// the reference within the defined windows:
///   - same return value; same final values of the saved vars still in force
///     (sets of the frontier FOP and every later one — earlier-only vars died
///     with the process and nothing after the frontier may read them);
///   - crash transcript is a prefix of the reference, resume transcript a
///     suffix, and together they cover it (duplication only after the last
///     stored FOP);
///   - entry-method segments before the resume frontier ran exactly once, all
///     of it before the crash.
struct ResumeReport {
    bool crash_triggered = false;
    bool return_equal = false;
    bool saved_vars_equal = false;
    bool transcript_covered = false;
    bool prefix_segments_ok = false;
    int frontier_fop = 0; // entry-method FOP index stored at crash time, 0 = none
    std::vector<std::string> notes;

    InvokeOutcome reference;
    InvokeOutcome crash_run;
    InvokeOutcome resume_run;

    bool ok() const {
        return return_equal && saved_vars_equal && transcript_covered && prefix_segments_ok;
    }
};

/// Transforms `original_unit`, runs it three ways (reference; crash at the
/// site; resume with a fresh process handle over the surviving store), and
/// compares. The unit must be untransformed source.
ResumeReport resume_equivalence_oracle(const AsltTree& original_unit, const std::string& method,
                                       const std::vector<Value>& args, const CrashSite& site);

/// Every (label, occurrence) a reference run of the program reaches, in
/// deterministic order — the sweep domain for the oracle.
std::vector<CrashSite> enumerate_crash_sites(const AsltTree& original_unit, const std::string& method,
                                             const std::vector<Value>& args);

} // namespace svcfo
