#include "svcfo/ast.hpp"

#include <algorithm>

namespace svcfo {

const char* kind_name(NodeKind kind) {
    switch (kind) {
    case NodeKind::Unit: return "Unit";
    case NodeKind::MethodDecl: return "MethodDecl";
    case NodeKind::Param: return "Param";
    case NodeKind::Block: return "Block";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::Assign: return "Assign";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::Call: return "Call";
    case NodeKind::Return: return "Return";
    case NodeKind::Print: return "Print";
    case NodeKind::Fault: return "Fault";
    case NodeKind::IntrinsicCall: return "IntrinsicCall";
    case NodeKind::Literal: return "Literal";
    case NodeKind::VarRef: return "VarRef";
    case NodeKind::BinaryOp: return "BinaryOp";
    case NodeKind::MetaInfoSet: return "MetaInfoSet";
    }
    return "?";
}

const std::string& AsltNode::str_attr(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end() || !std::holds_alternative<std::string>(it->second))
        fail(Err::InvalidTreeError,
             "node " + std::to_string(id) + " (" + kind_name(kind) + ") lacks string attribute '" + key + "'");
    return std::get<std::string>(it->second);
}

std::int64_t AsltNode::int_attr(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end() || !std::holds_alternative<std::int64_t>(it->second))
        fail(Err::InvalidTreeError,
             "node " + std::to_string(id) + " (" + kind_name(kind) + ") lacks int attribute '" + key + "'");
    return std::get<std::int64_t>(it->second);
}

NodeId AsltTree::make(NodeKind kind, SourceSpan span) {
    AsltNode n;
    n.id = static_cast<NodeId>(nodes_.size() + 1);
    n.kind = kind;
    n.span = span;
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
}

AsltNode& AsltTree::node(NodeId id) {
    if (!valid_id(id))
        fail(Err::UnknownNodeError, "no node with id " + std::to_string(id));
    return nodes_[id - 1];
}

const AsltNode& AsltTree::node(NodeId id) const {
    if (!valid_id(id))
        fail(Err::UnknownNodeError, "no node with id " + std::to_string(id));
    return nodes_[id - 1];
}

void AsltTree::set_root(NodeId id) {
    node(id); // existence check
    root_ = id;
}

void AsltTree::add_child(NodeId parent, NodeId child) {
    AsltNode& p = node(parent);
    AsltNode& c = node(child);
    if (c.parent != kNoNode)
        fail(Err::InternalError, "node " + std::to_string(child) + " already has a parent");
    p.children.push_back(child);
    c.parent = parent;
}

void AsltTree::insert_child(NodeId parent, std::size_t index, NodeId child) {
    AsltNode& p = node(parent);
    AsltNode& c = node(child);
    if (c.parent != kNoNode)
        fail(Err::InternalError, "node " + std::to_string(child) + " already has a parent");
    if (index > p.children.size())
        fail(Err::InternalError, "child index out of range");
    p.children.insert(p.children.begin() + static_cast<std::ptrdiff_t>(index), child);
    c.parent = parent;
}

void AsltTree::detach(NodeId child) {
    AsltNode& c = node(child);
    if (c.parent == kNoNode)
        return;
    AsltNode& p = node(c.parent);
    auto it = std::find(p.children.begin(), p.children.end(), child);
    if (it != p.children.end())
        p.children.erase(it);
    c.parent = kNoNode;
}

std::vector<NodeId> AsltTree::detach_children(NodeId parent) {
    AsltNode& p = node(parent);
    std::vector<NodeId> out = p.children;
    for (NodeId c : out)
        node(c).parent = kNoNode;
    p.children.clear();
    return out;
}

bool AsltTree::is_ancestor(NodeId maybe_ancestor, NodeId n) const {
    NodeId cur = node(n).parent;
    while (cur != kNoNode) {
        if (cur == maybe_ancestor)
            return true;
        cur = node(cur).parent;
    }
    return false;
}

void AsltTree::splice(NodeId target, const std::vector<NodeId>& replacement) {
    AsltNode& t = node(target);
    if (t.parent == kNoNode)
        fail(Err::UnknownNodeError, "splice target " + std::to_string(target) + " has no parent");
    NodeId parent = t.parent;

    for (NodeId r : replacement) {
        node(r); // existence
        if (r != target && is_ancestor(r, target))
            fail(Err::CycleError,
                 "replacement node " + std::to_string(r) + " is an ancestor of target " + std::to_string(target));
    }

    AsltNode& p = node(parent);
    auto it = std::find(p.children.begin(), p.children.end(), target);
    if (it == p.children.end())
        fail(Err::InternalError, "target not found in parent's child list");
    std::size_t index = static_cast<std::size_t>(it - p.children.begin());
    p.children.erase(it);
    t.parent = kNoNode;

    for (NodeId r : replacement) {
        AsltNode& rn = node(r);
        if (rn.parent != kNoNode)
            fail(Err::InternalError, "replacement node " + std::to_string(r) + " is not detached");
        insert_child(parent, index++, r);
    }
}

namespace {

struct Arity {
    std::size_t min;
    std::size_t max; // SIZE_MAX = unbounded
};

Arity arity_of(NodeKind kind) {
    constexpr std::size_t many = SIZE_MAX;
    switch (kind) {
    case NodeKind::Unit: return {0, many};
    case NodeKind::MethodDecl: return {1, many}; // params then exactly one Block
    case NodeKind::Param: return {0, 0};
    case NodeKind::Block: return {0, many};
    case NodeKind::VarDecl: return {1, 1};
    case NodeKind::Assign: return {2, 2};
    case NodeKind::If: return {2, 3};
    case NodeKind::While: return {2, 2};
    case NodeKind::Call: return {0, many};
    case NodeKind::Return: return {0, 1};
    case NodeKind::Print: return {1, 1};
    case NodeKind::Fault: return {0, 0};
    case NodeKind::IntrinsicCall: return {0, many};
    case NodeKind::Literal: return {0, 0};
    case NodeKind::VarRef: return {0, 0};
    case NodeKind::BinaryOp: return {2, 2};
    case NodeKind::MetaInfoSet: return {0, 0};
    }
    return {0, many};
}

} // namespace

void AsltTree::validate_node(NodeId id, std::vector<bool>& seen) const {
    const AsltNode& n = node(id);
    if (seen[id - 1])
        fail(Err::InvalidTreeError, "node " + std::to_string(id) + " reachable twice (cycle or shared child)");
    seen[id - 1] = true;

    Arity a = arity_of(n.kind);
    if (n.children.size() < a.min || n.children.size() > a.max)
        fail(Err::InvalidTreeError, "node " + std::to_string(id) + " (" + kind_name(n.kind) + ") has " +
                                        std::to_string(n.children.size()) + " children");
    if (n.kind == NodeKind::MethodDecl) {
        for (std::size_t i = 0; i + 1 < n.children.size(); ++i)
            if (node(n.children[i]).kind != NodeKind::Param)
                fail(Err::InvalidTreeError,
                     "node " + std::to_string(id) + ": method children must be params then a body block");
        if (node(n.children.back()).kind != NodeKind::Block)
            fail(Err::InvalidTreeError, "node " + std::to_string(id) + ": method body must be a Block");
    }
    for (NodeId c : n.children) {
        if (node(c).parent != id)
            fail(Err::InvalidTreeError, "node " + std::to_string(c) + " has inconsistent parent link");
        validate_node(c, seen);
    }
}

void AsltTree::validate() const {
    if (root_ == kNoNode)
        fail(Err::InvalidTreeError, "tree has no root");
    if (node(root_).kind != NodeKind::Unit)
        fail(Err::InvalidTreeError, "root must be a Unit node");
    std::vector<bool> seen(nodes_.size(), false);
    validate_node(root_, seen);
}

std::size_t AsltTree::count_kind(NodeKind kind) const {
    if (root_ == kNoNode)
        return 0;
    std::size_t n = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        const AsltNode& nd = node(id);
        if (nd.kind == kind)
            ++n;
        for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it)
            stack.push_back(*it);
    }
    return n;
}

bool structurally_equal(const AsltTree& a, NodeId na, const AsltTree& b, NodeId nb) {
    const AsltNode& x = a.node(na);
    const AsltNode& y = b.node(nb);
    if (x.kind != y.kind || x.attrs != y.attrs || x.children.size() != y.children.size())
        return false;
    for (std::size_t i = 0; i < x.children.size(); ++i)
        if (!structurally_equal(a, x.children[i], b, y.children[i]))
            return false;
    return true;
}

bool structurally_equal(const AsltTree& a, const AsltTree& b) {
    if (a.root() == kNoNode || b.root() == kNoNode)
        return a.root() == b.root();
    return structurally_equal(a, a.root(), b, b.root());
}

NodeId make_literal_int(AsltTree& tree, std::int64_t v) {
    NodeId id = tree.make(NodeKind::Literal);
    tree.node(id).attrs["type"] = std::string("int");
    tree.node(id).attrs["value"] = v;
    return id;
}

NodeId make_literal_str(AsltTree& tree, const std::string& v) {
    NodeId id = tree.make(NodeKind::Literal);
    tree.node(id).attrs["type"] = std::string("str");
    tree.node(id).attrs["value"] = v;
    return id;
}

NodeId make_literal_bool(AsltTree& tree, bool v) {
    NodeId id = tree.make(NodeKind::Literal);
    tree.node(id).attrs["type"] = std::string("bool");
    tree.node(id).attrs["value"] = static_cast<std::int64_t>(v ? 1 : 0);
    return id;
}

NodeId make_var_ref(AsltTree& tree, const std::string& name) {
    NodeId id = tree.make(NodeKind::VarRef);
    tree.node(id).attrs["name"] = name;
    return id;
}

NodeId make_binary(AsltTree& tree, const std::string& op, NodeId lhs, NodeId rhs) {
    NodeId id = tree.make(NodeKind::BinaryOp);
    tree.node(id).attrs["op"] = op;
    tree.add_child(id, lhs);
    tree.add_child(id, rhs);
    return id;
}

} // namespace svcfo
