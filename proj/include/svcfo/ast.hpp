#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "svcfo/errors.hpp"

namespace svcfo {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0;

enum class NodeKind {
    Unit,
    MethodDecl,
    Param,
    Block,
    VarDecl,
    Assign,
    If,
    While,
    Call,
    Return,
    Print,
    Fault,
    IntrinsicCall,
    Literal,
    VarRef,
    BinaryOp,
    MetaInfoSet,
};

const char* kind_name(NodeKind kind);

/// Node attribute values are strings or 64-bit ints; bools are stored as 0/1.
using AttrValue = std::variant<std::int64_t, std::string>;

struct SourceSpan {
    std::uint32_t begin = 0; // byte offsets; 0/0 for synthesized nodes
    std::uint32_t end = 0;
};

struct AsltNode {
    NodeId id = kNoNode;
    NodeKind kind = NodeKind::Unit;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    std::map<std::string, AttrValue> attrs;
    SourceSpan span;

    bool has_attr(const std::string& key) const { return attrs.count(key) != 0; }
    const std::string& str_attr(const std::string& key) const;
    std::int64_t int_attr(const std::string& key) const;
};

/// Syntax tree with value semantics. Nodes live in id-indexed storage; ids are
/// assigned densely starting at 1 and are never reused, so detached nodes stay
/// addressable until the tree is discarded.
class AsltTree {
public:
    NodeId make(NodeKind kind, SourceSpan span = {});

    AsltNode& node(NodeId id);
    const AsltNode& node(NodeId id) const;
    bool valid_id(NodeId id) const { return id >= 1 && id <= nodes_.size(); }

    NodeId root() const { return root_; }
    void set_root(NodeId id);
    NodeId next_id() const { return static_cast<NodeId>(nodes_.size() + 1); }

    void add_child(NodeId parent, NodeId child);
    void insert_child(NodeId parent, std::size_t index, NodeId child);
    /// Unlinks `child` from its parent; the node itself stays in storage.
    void detach(NodeId child);
    /// Unlinks every child of `parent` and returns their ids in order.
    std::vector<NodeId> detach_children(NodeId parent);

    /// Replaces `target` in its parent's child list with `replacement`, in
    /// order. `target` itself may appear in the replacement list.
    void splice(NodeId target, const std::vector<NodeId>& replacement);

    bool is_ancestor(NodeId maybe_ancestor, NodeId node) const;

    /// Checks tree invariants (root set, child links resolve, kind arities).
    /// Throws InvalidTreeError naming the offending node.
    void validate() const;

    std::size_t count_kind(NodeKind kind) const; // reachable from root only

private:
    void validate_node(NodeId id, std::vector<bool>& seen) const;

    NodeId root_ = kNoNode;
    std::vector<AsltNode> nodes_;
};

/// Structural equality: kinds, attributes and child structure; ids, parents
/// and source spans are ignored.
bool structurally_equal(const AsltTree& a, NodeId na, const AsltTree& b, NodeId nb);
bool structurally_equal(const AsltTree& a, const AsltTree& b);

// Construction helpers shared by the parser and the transformer.
NodeId make_literal_int(AsltTree& tree, std::int64_t v);
NodeId make_literal_str(AsltTree& tree, const std::string& v);
NodeId make_literal_bool(AsltTree& tree, bool v);
NodeId make_var_ref(AsltTree& tree, const std::string& name);
NodeId make_binary(AsltTree& tree, const std::string& op, NodeId lhs, NodeId rhs);

} // namespace svcfo
