#include <doctest.h>

#include "svcfo/errors.hpp"
#include "svcfo/oracle.hpp"
#include "svcfo/parser.hpp"
#include "svcfo/util.hpp"

using namespace svcfo;

namespace {

AsltTree corpus(const char* name) {
    return code_to_aslt(read_file(std::string(TEST_DATA_DIR) + "/corpus/" + name + ".svc"));
}

} // namespace

TEST_CASE("site enumeration finds every fault occurrence") {
    AsltTree p04 = corpus("p04");
    auto sites = enumerate_crash_sites(p04, "main", {});
    REQUIRE(sites.size() == 8);
    CHECK(sites[0].label == "in-loop");
    CHECK(sites[0].occurrence == 1);
    CHECK(sites[3].label == "in-loop");
    CHECK(sites[3].occurrence == 4);
    CHECK(sites[4].label == "second-loop");
    CHECK(sites[6].occurrence == 3);
    CHECK(sites[7].label == "tail");
    CHECK(sites[7].occurrence == 1);
}

TEST_CASE("every crash site of the straight-line program resumes equivalently") {
    AsltTree p01 = corpus("p01");
    for (const CrashSite& site : enumerate_crash_sites(p01, "main", {})) {
        ResumeReport report = resume_equivalence_oracle(p01, "main", {}, site);
        CHECK_MESSAGE(report.crash_triggered, site.label << "#" << site.occurrence);
        CHECK_MESSAGE(report.ok(), site.label << "#" << site.occurrence << ": " << report.notes);
    }
}

TEST_CASE("resume skips segments before the stored frontier") {
    AsltTree p02 = corpus("p02");
    ResumeReport report = resume_equivalence_oracle(p02, "main", {}, {"after-third", 1});
    REQUIRE(report.crash_triggered);
    CHECK(report.frontier_fop == 3); // all three FOPs stored before the crash
    CHECK(report.prefix_segments_ok);
    CHECK(report.ok());
    // the crash run printed all three segment banners; the resume none of them
    CHECK(report.crash_run.transcript ==
          std::vector<std::string>{"seg1", "seg2", "seg3"});
    CHECK(report.resume_run.transcript == std::vector<std::string>{"fin"});
}

TEST_CASE("a crash before any store resumes from the beginning") {
    AsltTree p01 = corpus("p01");
    ResumeReport report = resume_equivalence_oracle(p01, "main", {}, {"early", 1});
    REQUIRE(report.crash_triggered);
    CHECK(report.frontier_fop == 0);
    CHECK(report.ok());
    CHECK(report.resume_run.transcript == report.reference.transcript);
}

TEST_CASE("untriggered sites degrade to a plain equivalence check") {
    AsltTree p01 = corpus("p01");
    ResumeReport report = resume_equivalence_oracle(p01, "main", {}, {"early", 99});
    CHECK_FALSE(report.crash_triggered);
    CHECK(report.ok());
}

TEST_CASE("nested-call chain resumes without re-entering finished siblings") {
    AsltTree p06 = corpus("p06");
    for (const CrashSite& site : enumerate_crash_sites(p06, "main", {})) {
        ResumeReport report = resume_equivalence_oracle(p06, "main", {}, site);
        CHECK_MESSAGE(report.ok(), site.label << ": " << report.notes);
    }
    // crash inside e(): b and d already completed and must not run again
    ResumeReport deep = resume_equivalence_oracle(p06, "main", {}, {"in-e", 1});
    REQUIRE(deep.crash_triggered);
    CHECK(deep.resume_run.stats.method_entries.count("b") == 0);
    CHECK(deep.resume_run.stats.method_entries.count("d") == 0);
    CHECK(deep.resume_run.stats.method_entries.at("e") == 1);
}

TEST_CASE("recursive accumulator resumes at maximal depth") {
    AsltTree p08 = corpus("p08");
    auto sites = enumerate_crash_sites(p08, "main", {});
    int step_sites = 0;
    for (const CrashSite& site : sites)
        if (site.label == "step-fault")
            ++step_sites;
    CHECK(step_sites == 6); // one per recursive activation, depth 6

    ResumeReport deepest = resume_equivalence_oracle(p08, "main", {}, {"step-fault", 6});
    REQUIRE(deepest.crash_triggered);
    CHECK_MESSAGE(deepest.ok(), deepest.notes);
    CHECK(deepest.reference.return_value == make_int(21));
    CHECK(deepest.resume_run.return_value == make_int(21));
    // only the interrupted deepest activation and the base case run again
    CHECK(deepest.resume_run.stats.method_entries.at("acc") == 7);
    CHECK(deepest.resume_run.transcript == std::vector<std::string>{"base", "end"});
}

TEST_CASE("the oracle flags a program that shares one FOP key across calls") {
    // Two sequential calls to the same helper at the same level share the
    // (session, method, level) key. A crash in the second call leaves a
    // record that the resumed FIRST call consumes, so the first call picks
    // up the second call's state and the final result diverges.
    std::string src = "/*<MISet>\nfailover.VarSetDef(\"S\", total)\n</MISet>*/\n"
                      "method main() {\n"
                      "    var total = 0;\n"
                      "    /*<MISet>\n    failover.Failoverpoint(#S)\n    </MISet>*/\n"
                      "    var a = call work(1);\n"
                      "    var b = call work(2);\n"
                      "    total = a + b;\n"
                      "    return total;\n"
                      "}\n"
                      "method work(n) {\n"
                      "    var out = n;\n"
                      "    print(\"working\");\n"
                      "    /*<MISet>\n    failover.Failoverpoint(out, n)\n    </MISet>*/\n"
                      "    fault(\"late\");\n"
                      "    out = out * 10;\n"
                      "    return out;\n"
                      "}\n";
    AsltTree t = code_to_aslt(src);
    ResumeReport report = resume_equivalence_oracle(t, "main", {}, {"late", 2});
    REQUIRE(report.crash_triggered);
    CHECK_FALSE(report.ok()); // detected: the first call's work is skipped on resume
}

TEST_CASE("a segment using an unsaved variable fails loudly on resume") {
    std::string src = "method main() {\n"
                      "    var kept = 1;\n"
                      "    var dropped = 2;\n"
                      "    /*<MISet>\n    failover.Failoverpoint(kept)\n    </MISet>*/\n"
                      "    fault(\"boom\");\n"
                      "    return kept + dropped;\n"
                      "}\n";
    AsltTree t = code_to_aslt(src);
    CHECK_THROWS_AS(resume_equivalence_oracle(t, "main", {}, {"boom", 1}), SvcError);
}
