#pragma once

#include "svcfo/ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace svcfo {

struct MethodInfo {
    std::string name;
    int method_id = 0;
    int fop_total = 0;

    friend bool operator==(const MethodInfo&, const MethodInfo&) = default;
};

/// Maps method names to MethodIDs. IDs are dense, 1-based, in declaration order.
struct MethodRegistry {
    std::vector<MethodInfo> methods; // index i holds method_id i+1

    const MethodInfo* find(const std::string& name) const;
    /// Fails with UnknownNodeError when the method is not registered.
    int id_of(const std::string& name) const;
    const MethodInfo& by_id(int method_id) const;
};

/// Named variable sets from unit-scope VarSetDef directives.
struct VarSetTable {
    std::map<std::string, std::vector<std::string>> sets;
};

/// One Failoverpoint occurrence inside a method body.
struct FopSite {
    int method_id = 0;
    int fop_index = 0;                   // MethodFOPCount, 1-based within the method
    std::vector<std::string> saved_vars; // expansion order: explicit args, then set members
    std::size_t position = 0;            // statement index within the method body
};

struct CollectResult {
    MethodRegistry registry;
    VarSetTable var_sets;
    std::vector<FopSite> sites; // grouped by method in declaration order, fop_index ascending
};

/// Walks a parsed unit and gathers method identities, var sets, and FOP sites.
CollectResult collect(const AsltTree& unit);

/// Bookkeeping for one rewritten method: which original statements landed in
/// which segment. Segment i (0-based) precedes FOP i+1; the last segment
/// follows the final FOP. Statement node ids survive the rewrite unchanged.
struct MethodPlan {
    std::string name;
    int method_id = 0;
    std::vector<FopSite> sites;
    std::vector<std::vector<NodeId>> segments; // sites.size() + 1 entries
};

/// Rewrites one method in place per the guard pattern:
///   levelInc; for each FOP i: if (count < i) { segment i-1; store(i) }
///   else if (count == i) { recover(i) }; final segment; levelDec at exits.
MethodPlan rewrite_method(AsltTree& tree, NodeId method, const std::vector<FopSite>& sites);

struct TransformResult {
    AsltTree tree;
    MethodRegistry registry;
    std::vector<MethodPlan> plans;
};

/// Full pre-processor pass: collect, then rewrite every method. The output
/// tree contains no MetaInfoSet nodes. Refuses re-transformation with
/// AlreadyTransformedError when level intrinsics are already present.
TransformResult transform_unit(const AsltTree& tree);

/// Registry sidecar, line format `method <name> id <id> fops <n>`, id order.
std::string emit_registry(const MethodRegistry& reg);
MethodRegistry parse_registry(const std::string& text);

} // namespace svcfo
