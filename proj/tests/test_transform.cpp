#include <doctest.h>

#include "svcfo/errors.hpp"
#include "svcfo/interp.hpp"
#include "svcfo/parser.hpp"
#include "svcfo/printer.hpp"
#include "svcfo/transform.hpp"
#include "svcfo/util.hpp"

#include "generator.hpp"

#include <set>

using namespace svcfo;

namespace {

NodeId method_named(const AsltTree& t, const std::string& name) {
    for (NodeId c : t.node(t.root()).children)
        if (t.node(c).kind == NodeKind::MethodDecl && t.node(c).str_attr("name") == name)
            return c;
    FAIL("method not found: " << name);
    return kNoNode;
}

NodeId body_of(const AsltTree& t, NodeId method) { return t.node(method).children.back(); }

bool is_intrinsic(const AsltTree& t, NodeId n, const std::string& name) {
    return t.node(n).kind == NodeKind::IntrinsicCall && t.node(n).str_attr("name") == name;
}

std::vector<std::string> var_names(const AsltTree& t, NodeId intrinsic) {
    std::vector<std::string> out;
    for (NodeId c : t.node(intrinsic).children)
        out.push_back(t.node(c).str_attr("name"));
    return out;
}

Err transform_err(const std::string& src) {
    try {
        AsltTree t = code_to_aslt(src);
        transform_unit(t);
    } catch (const SvcError& e) {
        return e.code();
    }
    return Err::InternalError;
}

} // namespace

TEST_CASE("listing transformation matches the documented shape") {
    AsltTree tree = code_to_aslt(read_file(std::string(TEST_DATA_DIR) + "/listing1.svc"));
    TransformResult result = transform_unit(tree);

    REQUIRE(result.registry.methods.size() == 1);
    CHECK(result.registry.methods[0].name == "test");
    CHECK(result.registry.methods[0].method_id == 1);
    CHECK(result.registry.methods[0].fop_total == 1);

    const AsltTree& t = result.tree;
    NodeId body = body_of(t, method_named(t, "test"));
    const auto& stmts = t.node(body).children;

    // level inc first, guard second
    REQUIRE(stmts.size() >= 3);
    CHECK(is_intrinsic(t, stmts[0], "levelInc"));
    const AsltNode& guard = t.node(stmts[1]);
    REQUIRE(guard.kind == NodeKind::If);

    // condition: getFOPCount(sID, mID, levelCount) < 1
    NodeId cond = guard.children[0];
    CHECK(t.node(cond).str_attr("op") == "<");
    CHECK(is_intrinsic(t, t.node(cond).children[0], "getFOPCount"));
    CHECK(t.node(t.node(cond).children[1]).int_attr("value") == 1);

    // then: the code before the FOP, then the store of j, str, i
    NodeId then_block = guard.children[1];
    const auto& then_stmts = t.node(then_block).children;
    REQUIRE(then_stmts.size() == 7); // 4 decls + print + assign + store
    NodeId store = then_stmts.back();
    CHECK(is_intrinsic(t, store, "storeState"));
    CHECK(t.node(store).int_attr("index") == 1);
    CHECK(var_names(t, store) == std::vector<std::string>{"j", "str", "i"});

    // else-if: recover branch for FOP 1
    REQUIRE(guard.children.size() == 3);
    const AsltNode& else_if = t.node(guard.children[2]);
    REQUIRE(else_if.kind == NodeKind::If);
    NodeId econd = else_if.children[0];
    CHECK(t.node(econd).str_attr("op") == "==");
    CHECK(is_intrinsic(t, t.node(econd).children[0], "getFOPCount"));
    NodeId recover_block = else_if.children[1];
    REQUIRE(t.node(recover_block).children.size() == 1);
    NodeId recover = t.node(recover_block).children[0];
    CHECK(is_intrinsic(t, recover, "recoverState"));
    CHECK(var_names(t, recover) == std::vector<std::string>{"j", "str", "i"});

    // code after the FOP sits outside the guard; levelDec right before return
    CHECK(t.node(stmts[2]).kind == NodeKind::Print);
    CHECK(t.node(stmts[3]).kind == NodeKind::Assign);
    CHECK(is_intrinsic(t, stmts[4], "levelDec"));
    CHECK(t.node(stmts[5]).kind == NodeKind::Return);
    CHECK(stmts.size() == 6);

    // no MISet nodes survive the rewrite
    CHECK(t.count_kind(NodeKind::MetaInfoSet) == 0);
}

TEST_CASE("method ids follow declaration order") {
    AsltTree t = code_to_aslt("method a() { return 1; }\n"
                              "method b() { return 2; }\n"
                              "method c() { return 3; }\n");
    CollectResult c = collect(t);
    REQUIRE(c.registry.methods.size() == 3);
    CHECK(c.registry.methods[0].name == "a");
    CHECK(c.registry.methods[0].method_id == 1);
    CHECK(c.registry.methods[1].method_id == 2);
    CHECK(c.registry.methods[2].method_id == 3);
}

TEST_CASE("fig-4 chain registry: two FOPs each for a and c") {
    AsltTree t = code_to_aslt(read_file(std::string(TEST_DATA_DIR) + "/corpus/p06.svc"));
    TransformResult r = transform_unit(t);
    auto total = [&](const std::string& name) {
        const MethodInfo* m = r.registry.find(name);
        REQUIRE(m != nullptr);
        return m->fop_total;
    };
    CHECK(total("main") == 1);
    CHECK(total("a") == 2);
    CHECK(total("b") == 0);
    CHECK(total("c") == 2);
    CHECK(total("d") == 0);
    CHECK(total("e") == 0);
}

TEST_CASE("registry text round-trips and validates") {
    AsltTree t = code_to_aslt(read_file(std::string(TEST_DATA_DIR) + "/corpus/p06.svc"));
    MethodRegistry reg = transform_unit(t).registry;
    MethodRegistry back = parse_registry(emit_registry(reg));
    REQUIRE(back.methods.size() == reg.methods.size());
    for (std::size_t i = 0; i < reg.methods.size(); ++i) {
        CHECK(back.methods[i].name == reg.methods[i].name);
        CHECK(back.methods[i].method_id == reg.methods[i].method_id);
        CHECK(back.methods[i].fop_total == reg.methods[i].fop_total);
    }

    CHECK(emit_registry(MethodRegistry{}) == "");
    CHECK_THROWS_AS(parse_registry("method a id 2 fops 0\n"), SvcError);    // ids must start at 1
    CHECK_THROWS_AS(parse_registry("method a id 1 fops\n"), SvcError);      // truncated
    CHECK_THROWS_AS(parse_registry("wat\n"), SvcError);
}

TEST_CASE("empty unit transforms to empty text") {
    AsltTree t = code_to_aslt("");
    TransformResult r = transform_unit(t);
    CHECK(aslt_to_code(r.tree) == "");
    CHECK(emit_registry(r.registry) == "");
}

TEST_CASE("a method without FOPs still gets level wrappers") {
    AsltTree t = code_to_aslt("method f() { print(\"x\"); return 1; }");
    TransformResult r = transform_unit(t);
    const AsltTree& out = r.tree;
    NodeId body = body_of(out, method_named(out, "f"));
    const auto& stmts = out.node(body).children;
    REQUIRE(stmts.size() == 4);
    CHECK(is_intrinsic(out, stmts[0], "levelInc"));
    CHECK(out.node(stmts[1]).kind == NodeKind::Print);
    CHECK(is_intrinsic(out, stmts[2], "levelDec"));
    CHECK(out.node(stmts[3]).kind == NodeKind::Return);
    CHECK(r.registry.methods[0].fop_total == 0);
}

TEST_CASE("method without trailing return gets a trailing levelDec") {
    AsltTree t = code_to_aslt("method f() { print(\"x\"); }");
    TransformResult r = transform_unit(t);
    const AsltTree& out = r.tree;
    NodeId body = body_of(out, method_named(out, "f"));
    const auto& stmts = out.node(body).children;
    REQUIRE(stmts.size() == 3);
    CHECK(is_intrinsic(out, stmts[0], "levelInc"));
    CHECK(is_intrinsic(out, stmts[2], "levelDec"));
}

TEST_CASE("every return in nested control flow is preceded by levelDec") {
    AsltTree t = code_to_aslt("method f(x) {\n"
                              "    if (x < 0) { return 0; } else if (x == 0) {\n"
                              "        if (x == 0) { return 1; }\n"
                              "    } else { return 2; }\n"
                              "    while (x > 3) { return 4; }\n"
                              "    return 5;\n"
                              "}");
    TransformResult r = transform_unit(t);
    std::string text = aslt_to_code(r.tree);
    // every one of the five returns is directly preceded by a levelDec line
    std::size_t pos = 0;
    int returns = 0;
    while ((pos = text.find("return", pos)) != std::string::npos) {
        std::size_t line_start = text.rfind('\n', pos);
        std::size_t prev_line_start = text.rfind('\n', line_start - 1);
        std::string prev = text.substr(prev_line_start + 1, line_start - prev_line_start - 1);
        CHECK_MESSAGE(prev.find("fo.levelDec()") != std::string::npos,
                      "return without levelDec before it:\n" << text);
        ++returns;
        ++pos;
    }
    CHECK(returns == 5);
}

TEST_CASE("saved variables expand explicit-first, set order, deduplicated") {
    AsltTree t = code_to_aslt("/*<MISet>\n"
                              "failover.VarSetDef(\"Poll\", votes, quorum)\n"
                              "failover.VarSetDef(\"Flags\", open, votes)\n"
                              "</MISet>*/\n"
                              "method f() {\n"
                              "    var votes = 0; var quorum = 0; var open = true;\n"
                              "    /*<MISet>\n"
                              "    failover.Failoverpoint(quorum, #Flags, #Poll, votes)\n"
                              "    </MISet>*/\n"
                              "    return votes;\n"
                              "}");
    CollectResult c = collect(t);
    REQUIRE(c.sites.size() == 1);
    // argument order; each #Set contributes its members in definition order;
    // only the first occurrence of a name survives
    CHECK(c.sites[0].saved_vars == std::vector<std::string>{"quorum", "open", "votes"});
}

TEST_CASE("guard completeness over generated programs") {
    for (std::uint32_t seed = 40; seed < 60; ++seed) {
        AsltTree t = code_to_aslt(testgen::generate_program(seed));
        CollectResult before = collect(t);
        TransformResult r = transform_unit(t);
        for (const MethodInfo& m : r.registry.methods) {
            NodeId method = method_named(r.tree, m.name);
            int stores = 0, recovers = 0, incs = 0, decs = 0;
            // count intrinsics in this method's subtree
            std::vector<NodeId> stack{method};
            while (!stack.empty()) {
                NodeId n = stack.back();
                stack.pop_back();
                if (r.tree.node(n).kind == NodeKind::IntrinsicCall) {
                    std::string name = r.tree.node(n).str_attr("name");
                    if (name == "storeState") ++stores;
                    if (name == "recoverState") ++recovers;
                    if (name == "levelInc") ++incs;
                    if (name == "levelDec") ++decs;
                }
                for (NodeId ch : r.tree.node(n).children)
                    stack.push_back(ch);
            }
            CHECK(stores == m.fop_total);
            CHECK(recovers == m.fop_total);
            CHECK(incs == 1);
            CHECK(decs >= 1);
        }
        (void)before;
    }
}

TEST_CASE("segmentation partitions the original statements") {
    std::string src = read_file(std::string(TEST_DATA_DIR) + "/corpus/p02.svc");
    AsltTree original = code_to_aslt(src);
    NodeId obody = body_of(original, method_named(original, "main"));
    std::size_t original_stmts = 0;
    for (NodeId c : original.node(obody).children)
        if (original.node(c).kind != NodeKind::MetaInfoSet)
            ++original_stmts;

    AsltTree t = code_to_aslt(src);
    TransformResult r = transform_unit(t);
    REQUIRE(r.plans.size() == 1);
    const MethodPlan& plan = r.plans[0];
    REQUIRE(plan.segments.size() == plan.sites.size() + 1);
    std::set<NodeId> seen;
    std::size_t total = 0;
    for (const auto& seg : plan.segments)
        for (NodeId id : seg) {
            CHECK(seen.insert(id).second); // no statement appears twice
            ++total;
        }
    CHECK(total == original_stmts);
}

TEST_CASE("transforming twice is refused") {
    AsltTree t = code_to_aslt(read_file(std::string(TEST_DATA_DIR) + "/corpus/p01.svc"));
    TransformResult first = transform_unit(t);
    AsltTree reparsed = code_to_aslt(aslt_to_code(first.tree));
    CHECK_THROWS_AS(transform_unit(reparsed), SvcError);
    try {
        transform_unit(reparsed);
    } catch (const SvcError& e) {
        CHECK(e.code() == Err::AlreadyTransformedError);
    }
}

TEST_CASE("rejection paths carry their named codes") {
    CHECK(transform_err("method f() {\n"
                        "    var x = 1;\n"
                        "    if (x == 1) {\n"
                        "        /*<MISet>\n        failover.Failoverpoint(x)\n        </MISet>*/\n"
                        "        x = 2;\n"
                        "    }\n"
                        "    return x;\n"
                        "}") == Err::NestedFopError);
    CHECK(transform_err("method f() {\n"
                        "    var x = 1;\n"
                        "    while (x < 3) {\n"
                        "        /*<MISet>\n        failover.Failoverpoint(x)\n        </MISet>*/\n"
                        "        x = x + 1;\n"
                        "    }\n"
                        "    return x;\n"
                        "}") == Err::NestedFopError);
    CHECK(transform_err("method f() {\n"
                        "    var x = 1;\n"
                        "    /*<MISet>\n    failover.Failoverpoint(#Nope)\n    </MISet>*/\n"
                        "    return x;\n"
                        "}") == Err::UnknownVarSetError);
    CHECK(transform_err("method f() {\n"
                        "    /*<MISet>\n    failover.Failoverpoint(later)\n    </MISet>*/\n"
                        "    var later = 1;\n"
                        "    return later;\n"
                        "}") == Err::UnknownVariableError);
    CHECK(transform_err("method f() {\n"
                        "    /*<MISet>\n    failover.Failoverpoint(ghost)\n    </MISet>*/\n"
                        "    return 0;\n"
                        "}") == Err::UnknownVariableError);
    // VarSetDef belongs at unit scope only
    CHECK(transform_err("method f() {\n"
                        "    var x = 1;\n"
                        "    /*<MISet>\n    failover.VarSetDef(\"A\", x)\n    </MISet>*/\n"
                        "    return x;\n"
                        "}") == Err::MetaSyntaxError);
    // Failoverpoint is meaningless at unit scope
    CHECK(transform_err("/*<MISet>\nfailover.Failoverpoint(x)\n</MISet>*/\n"
                        "method f() { return 0; }") == Err::MetaSyntaxError);
    // duplicate set names collide
    CHECK(transform_err("/*<MISet>\nfailover.VarSetDef(\"A\", x)\n"
                        "failover.VarSetDef(\"A\", y)\n</MISet>*/\n"
                        "method f() { var x = 1; var y = 2; return x; }") == Err::MetaSyntaxError);
    // duplicate method names
    CHECK(transform_err("method f() { return 0; }\nmethod f() { return 1; }") == Err::SyntaxError);
}

TEST_CASE("transformed corpus behaves like the original without crashes") {
    for (const char* name : {"p01", "p02", "p03", "p04", "p05", "p06", "p07", "p08", "p09", "p10"}) {
        std::string src = read_file(std::string(TEST_DATA_DIR) + "/corpus/" + name + ".svc");
        AsltTree original = code_to_aslt(src);
        MethodRegistry oreg = scan_methods(original);
        InvokeOutcome ref = invoke(original, oreg, nullptr, "s", "main", {});
        REQUIRE(ref.returned());

        AsltTree copy = code_to_aslt(src);
        TransformResult r = transform_unit(copy);
        FomConfig config;
        config.rules.push_back({"*", Backend::Memory, ""});
        InvokeOutcome got = invoke(r.tree, r.registry, fom_for_service(config, "svc"), "s", "main", {});
        REQUIRE(got.returned());

        CHECK_MESSAGE(got.return_value == ref.return_value, name << ": return value changed");
        CHECK_MESSAGE(got.transcript == ref.transcript, name << ": transcript changed");
        CHECK_MESSAGE(got.final_locals == ref.final_locals, name << ": final locals changed");
    }
}
