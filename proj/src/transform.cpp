#include "svcfo/transform.hpp"

#include "svcfo/meta.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace svcfo {

const MethodInfo* MethodRegistry::find(const std::string& name) const {
    for (const MethodInfo& m : methods)
        if (m.name == name)
            return &m;
    return nullptr;
}

int MethodRegistry::id_of(const std::string& name) const {
    const MethodInfo* m = find(name);
    if (!m)
        fail(Err::UnknownNodeError, "method '" + name + "' is not registered");
    return m->method_id;
}

const MethodInfo& MethodRegistry::by_id(int method_id) const {
    if (method_id < 1 || static_cast<std::size_t>(method_id) > methods.size())
        fail(Err::UnknownNodeError, "no method with id " + std::to_string(method_id));
    return methods[static_cast<std::size_t>(method_id) - 1];
}

namespace {

NodeId body_of(const AsltTree& tree, NodeId method) {
    const AsltNode& m = tree.node(method);
    if (m.kind != NodeKind::MethodDecl || m.children.empty())
        fail(Err::InvalidTreeError, "node " + std::to_string(method) + " is not a method");
    return m.children.back();
}

/// Collects every name introduced by a VarDecl in the subtree rooted at `id`.
void gather_var_decls(const AsltTree& tree, NodeId id, std::set<std::string>& out) {
    const AsltNode& n = tree.node(id);
    if (n.kind == NodeKind::VarDecl)
        out.insert(n.str_attr("name"));
    for (NodeId c : n.children)
        gather_var_decls(tree, c, out);
}

/// Rejects meta blocks nested below the top statement level of a method body.
void reject_nested_meta(const AsltTree& tree, NodeId id, const std::string& method_name) {
    const AsltNode& n = tree.node(id);
    if (n.kind == NodeKind::MetaInfoSet) {
        for (const MetaDirective& dir : parse_meta(n.str_attr("raw"))) {
            if (dir.kind == MetaDirective::Kind::Failoverpoint)
                fail(Err::NestedFopError,
                     "method '" + method_name + "': Failoverpoint inside an if/while block is not supported");
            fail(Err::MetaSyntaxError, "method '" + method_name + "': VarSetDef must appear at unit scope");
        }
        return;
    }
    for (NodeId c : n.children)
        reject_nested_meta(tree, c, method_name);
}

std::vector<std::string> expand_saved_vars(const MetaDirective& dir, const VarSetTable& table,
                                           const std::string& method_name) {
    std::vector<std::string> vars;
    auto push = [&vars](const std::string& v) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            vars.push_back(v);
    };
    for (const MetaArg& arg : dir.args) {
        if (!arg.is_set_ref) {
            push(arg.name);
            continue;
        }
        auto it = table.sets.find(arg.name);
        if (it == table.sets.end())
            fail(Err::UnknownVarSetError, "method '" + method_name + "': no VarSetDef for '#" + arg.name + "'");
        for (const std::string& member : it->second)
            push(member);
    }
    return vars;
}

NodeId make_intrinsic(AsltTree& tree, const std::string& name) {
    NodeId id = tree.make(NodeKind::IntrinsicCall);
    tree.node(id).attrs["name"] = name;
    return id;
}

NodeId make_state_call(AsltTree& tree, const std::string& name, const FopSite& site) {
    NodeId id = make_intrinsic(tree, name);
    tree.node(id).attrs["index"] = static_cast<std::int64_t>(site.fop_index);
    for (const std::string& var : site.saved_vars)
        tree.add_child(id, make_var_ref(tree, var));
    return id;
}

NodeId make_count_compare(AsltTree& tree, const std::string& op, int fop_index) {
    return make_binary(tree, op, make_intrinsic(tree, "getFOPCount"), make_literal_int(tree, fop_index));
}

void guard_returns(AsltTree& tree, NodeId block);

void guard_returns_in_if(AsltTree& tree, NodeId if_node) {
    const std::vector<NodeId> kids = tree.node(if_node).children; // copy; recursion reallocates nodes
    guard_returns(tree, kids.at(1));
    if (kids.size() == 3) {
        NodeId alt = kids.at(2);
        if (tree.node(alt).kind == NodeKind::If)
            guard_returns_in_if(tree, alt);
        else
            guard_returns(tree, alt);
    }
}

/// Inserts a level-decrement before every Return in the block subtree.
void guard_returns(AsltTree& tree, NodeId block) {
    const std::vector<NodeId> stmts = tree.node(block).children; // copy; we insert below
    std::size_t inserted = 0;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        NodeKind kind = tree.node(stmts[i]).kind;
        if (kind == NodeKind::Return) {
            tree.insert_child(block, i + inserted, make_intrinsic(tree, "levelDec"));
            ++inserted;
        } else if (kind == NodeKind::If) {
            guard_returns_in_if(tree, stmts[i]);
        } else if (kind == NodeKind::While) {
            guard_returns(tree, tree.node(stmts[i]).children.at(1));
        }
    }
}

void strip_nested_meta(AsltTree& tree, NodeId id) {
    AsltNode& n = tree.node(id);
    std::vector<NodeId> metas;
    for (NodeId c : n.children)
        if (tree.node(c).kind == NodeKind::MetaInfoSet)
            metas.push_back(c);
    for (NodeId m : metas)
        tree.detach(m);
    for (NodeId c : tree.node(id).children)
        strip_nested_meta(tree, c);
}

} // namespace

CollectResult collect(const AsltTree& unit) {
    unit.validate();
    CollectResult result;

    // Pass 1: unit-scope meta (var sets) and method identities.
    std::vector<NodeId> method_nodes;
    for (NodeId child : unit.node(unit.root()).children) {
        const AsltNode& n = unit.node(child);
        if (n.kind == NodeKind::MethodDecl) {
            MethodInfo info;
            info.name = n.str_attr("name");
            info.method_id = static_cast<int>(result.registry.methods.size()) + 1;
            if (result.registry.find(info.name))
                fail(Err::SyntaxError, "method '" + info.name + "' declared twice");
            result.registry.methods.push_back(info);
            method_nodes.push_back(child);
            continue;
        }
        for (const MetaDirective& dir : parse_meta(n.str_attr("raw"))) {
            if (dir.kind == MetaDirective::Kind::Failoverpoint)
                fail(Err::MetaSyntaxError, "Failoverpoint is only valid inside a method body");
            if (result.var_sets.sets.count(dir.set_name))
                fail(Err::MetaSyntaxError, "VarSetDef '" + dir.set_name + "' defined twice");
            std::vector<std::string>& members = result.var_sets.sets[dir.set_name];
            for (const MetaArg& arg : dir.args)
                members.push_back(arg.name);
        }
    }

    // Pass 2: per-method FOP sites.
    for (std::size_t mi = 0; mi < method_nodes.size(); ++mi) {
        MethodInfo& info = result.registry.methods[mi];
        NodeId body = body_of(unit, method_nodes[mi]);
        const std::vector<NodeId>& stmts = unit.node(body).children;

        std::set<std::string> bindable; // names valid to save at the current position
        for (NodeId c : unit.node(method_nodes[mi]).children)
            if (unit.node(c).kind == NodeKind::Param)
                bindable.insert(unit.node(c).str_attr("name"));

        for (std::size_t pos = 0; pos < stmts.size(); ++pos) {
            const AsltNode& stmt = unit.node(stmts[pos]);
            if (stmt.kind != NodeKind::MetaInfoSet) {
                gather_var_decls(unit, stmts[pos], bindable);
                reject_nested_meta(unit, stmts[pos], info.name);
                continue;
            }
            for (const MetaDirective& dir : parse_meta(stmt.str_attr("raw"))) {
                if (dir.kind == MetaDirective::Kind::VarSetDef)
                    fail(Err::MetaSyntaxError,
                         "method '" + info.name + "': VarSetDef must appear at unit scope");
                FopSite site;
                site.method_id = info.method_id;
                site.fop_index = ++info.fop_total;
                site.saved_vars = expand_saved_vars(dir, result.var_sets, info.name);
                site.position = pos;
                for (const std::string& var : site.saved_vars)
                    if (!bindable.count(var))
                        fail(Err::UnknownVariableError, "method '" + info.name + "': FOP " +
                                                            std::to_string(site.fop_index) + " saves '" + var +
                                                            "' which is neither a parameter nor declared "
                                                            "before the failover point");
                result.sites.push_back(std::move(site));
            }
        }
    }
    return result;
}

MethodPlan rewrite_method(AsltTree& tree, NodeId method, const std::vector<FopSite>& sites) {
    MethodPlan plan;
    plan.name = tree.node(method).str_attr("name");
    plan.method_id = sites.empty() ? 0 : sites.front().method_id;
    plan.sites = sites;

    NodeId body = body_of(tree, method);
    const std::vector<NodeId> original = tree.detach_children(body);

    // Bucket the original statements into segments delimited by FOP positions.
    plan.segments.assign(sites.size() + 1, {});
    std::size_t seg = 0;
    std::size_t dropped_meta = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (tree.node(original[i]).kind == NodeKind::MetaInfoSet) {
            for (const FopSite& s : sites)
                if (s.position == i)
                    ++seg;
            ++dropped_meta;
            continue;
        }
        if (seg >= plan.segments.size())
            fail(Err::InternalError, "method '" + plan.name + "': segment index out of range");
        plan.segments[seg].push_back(original[i]);
    }
    if (seg != sites.size())
        fail(Err::InternalError, "method '" + plan.name + "': failover point positions do not match the body");
    std::size_t covered = dropped_meta;
    for (const std::vector<NodeId>& s : plan.segments)
        covered += s.size();
    if (covered != original.size())
        fail(Err::InternalError, "method '" + plan.name + "': segmentation lost statements");

    tree.add_child(body, make_intrinsic(tree, "levelInc"));
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const FopSite& site = sites[k];

        NodeId then_block = tree.make(NodeKind::Block);
        for (NodeId stmt : plan.segments[k]) {
            strip_nested_meta(tree, stmt);
            tree.add_child(then_block, stmt);
        }
        tree.add_child(then_block, make_state_call(tree, "storeState", site));

        NodeId recover_block = tree.make(NodeKind::Block);
        tree.add_child(recover_block, make_state_call(tree, "recoverState", site));
        NodeId inner_if = tree.make(NodeKind::If);
        tree.add_child(inner_if, make_count_compare(tree, "==", site.fop_index));
        tree.add_child(inner_if, recover_block);

        NodeId guard = tree.make(NodeKind::If);
        tree.add_child(guard, make_count_compare(tree, "<", site.fop_index));
        tree.add_child(guard, then_block);
        tree.add_child(guard, inner_if);
        tree.add_child(body, guard);
    }
    for (NodeId stmt : plan.segments.back()) {
        strip_nested_meta(tree, stmt);
        tree.add_child(body, stmt);
    }

    guard_returns(tree, body);
    const std::vector<NodeId>& final_stmts = tree.node(body).children;
    if (final_stmts.empty() || tree.node(final_stmts.back()).kind != NodeKind::Return)
        tree.add_child(body, make_intrinsic(tree, "levelDec"));
    return plan;
}

TransformResult transform_unit(const AsltTree& tree) {
    TransformResult result;
    result.tree = tree;
    AsltTree& out = result.tree;

    // A second pass over already-generated code would double the wrappers.
    for (NodeId id = 1; id <= out.next_id() - 1; ++id) {
        const AsltNode& n = out.node(id);
        if (n.kind == NodeKind::IntrinsicCall) {
            const std::string& name = n.str_attr("name");
            if (name == "levelInc" || name == "levelDec")
                fail(Err::AlreadyTransformedError, "unit already contains level intrinsics");
        }
    }

    CollectResult collected = collect(out);
    result.registry = collected.registry;

    // Drop unit-scope meta blocks.
    std::vector<NodeId> unit_meta;
    for (NodeId child : out.node(out.root()).children)
        if (out.node(child).kind == NodeKind::MetaInfoSet)
            unit_meta.push_back(child);
    for (NodeId id : unit_meta)
        out.detach(id);

    std::size_t site_cursor = 0;
    int next_method_id = 1;
    for (NodeId child : out.node(out.root()).children) {
        if (out.node(child).kind != NodeKind::MethodDecl)
            continue;
        int method_id = next_method_id++;
        std::vector<FopSite> sites;
        while (site_cursor < collected.sites.size() && collected.sites[site_cursor].method_id == method_id)
            sites.push_back(collected.sites[site_cursor++]);
        MethodPlan plan = rewrite_method(out, child, sites);
        plan.method_id = method_id;
        result.plans.push_back(std::move(plan));
    }
    out.validate();
    return result;
}

std::string emit_registry(const MethodRegistry& reg) {
    std::string out;
    for (const MethodInfo& m : reg.methods) {
        out += "method " + m.name + " id " + std::to_string(m.method_id) + " fops " +
               std::to_string(m.fop_total) + "\n";
    }
    return out;
}

MethodRegistry parse_registry(const std::string& text) {
    MethodRegistry reg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string kw_method, name, kw_id, kw_fops;
        int id = 0, fops = -1;
        if (!(fields >> kw_method >> name >> kw_id >> id >> kw_fops >> fops) || kw_method != "method" ||
            kw_id != "id" || kw_fops != "fops" || fops < 0)
            fail(Err::SerializationError, "registry line " + std::to_string(line_no) + " is malformed");
        if (id != static_cast<int>(reg.methods.size()) + 1)
            fail(Err::SerializationError, "registry line " + std::to_string(line_no) +
                                              ": method ids must be dense and ascending");
        reg.methods.push_back({name, id, fops});
    }
    return reg;
}

} // namespace svcfo
