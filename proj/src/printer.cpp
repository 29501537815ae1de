#include "svcfo/printer.hpp"

#include "svcfo/errors.hpp"

#include <string>

namespace svcfo {

namespace {

int precedence(const std::string& op) {
    if (op == "||")
        return 1;
    if (op == "&&")
        return 2;
    if (op == "==" || op == "!=")
        return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=")
        return 4;
    if (op == "+" || op == "-")
        return 5;
    if (op == "*" || op == "/" || op == "%")
        return 6;
    fail(Err::InvalidTreeError, "unknown operator '" + op + "'");
}

constexpr int kPrimaryPrec = 7;

std::string escape_str(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out;
}

class Printer {
public:
    explicit Printer(const AsltTree& tree) : tree_(tree) {}

    std::string run() {
        const AsltNode& root = tree_.node(tree_.root());
        if (root.kind != NodeKind::Unit)
            fail(Err::InvalidTreeError, "root must be a unit");
        bool first = true;
        for (NodeId child : root.children) {
            if (!first)
                out_ += '\n';
            first = false;
            emit_top_level(child);
        }
        return out_;
    }

private:
    void indent() { out_.append(static_cast<std::size_t>(depth_) * 4, ' '); }

    void line(const std::string& text) {
        indent();
        out_ += text;
        out_ += '\n';
    }

    void emit_top_level(NodeId id) {
        const AsltNode& n = tree_.node(id);
        if (n.kind == NodeKind::MetaInfoSet) {
            emit_meta(n);
            return;
        }
        if (n.kind != NodeKind::MethodDecl)
            fail(Err::InvalidTreeError, "unit children must be methods or meta blocks");
        emit_method(n);
    }

    void emit_meta(const AsltNode& n) {
        line("/*<MISet>" + n.str_attr("raw") + "</MISet>*/");
    }

    void emit_method(const AsltNode& n) {
        std::string header = "method " + n.str_attr("name") + "(";
        bool first = true;
        NodeId body = kNoNode;
        for (NodeId cid : n.children) {
            const AsltNode& child = tree_.node(cid);
            if (child.kind == NodeKind::Param) {
                if (!first)
                    header += ", ";
                first = false;
                header += child.str_attr("name");
            } else if (child.kind == NodeKind::Block) {
                body = cid;
            } else {
                fail(Err::InvalidTreeError, "method children must be params then a block");
            }
        }
        if (body == kNoNode)
            fail(Err::InvalidTreeError, "method lacks a body block");
        header += ") {";
        line(header);
        ++depth_;
        for (NodeId sid : tree_.node(body).children)
            emit_statement(sid);
        --depth_;
        line("}");
    }

    void emit_statement(NodeId id) {
        const AsltNode& n = tree_.node(id);
        switch (n.kind) {
        case NodeKind::MetaInfoSet:
            emit_meta(n);
            return;
        case NodeKind::VarDecl:
            line("var " + n.str_attr("name") + " = " + expr(n.children.at(0), 0) + ";");
            return;
        case NodeKind::Assign:
            line(expr(n.children.at(0), 0) + " = " + expr(n.children.at(1), 0) + ";");
            return;
        case NodeKind::If:
            emit_if(n, /*chained=*/false);
            return;
        case NodeKind::While:
            indent();
            out_ += "while (" + expr(n.children.at(0), 0) + ") {\n";
            ++depth_;
            for (NodeId sid : tree_.node(n.children.at(1)).children)
                emit_statement(sid);
            --depth_;
            line("}");
            return;
        case NodeKind::Call:
            line(call_text(n) + ";");
            return;
        case NodeKind::Return:
            if (n.children.empty())
                line("return;");
            else
                line("return " + expr(n.children.at(0), 0) + ";");
            return;
        case NodeKind::Print:
            line("print(" + expr(n.children.at(0), 0) + ");");
            return;
        case NodeKind::Fault:
            line("fault(\"" + escape_str(n.str_attr("label")) + "\");");
            return;
        case NodeKind::IntrinsicCall:
            line(intrinsic_text(n) + ";");
            return;
        default:
            fail(Err::InvalidTreeError, std::string("node kind '") + kind_name(n.kind) + "' is not a statement");
        }
    }

    void emit_if(const AsltNode& n, bool chained) {
        if (!chained)
            indent();
        out_ += "if (" + expr(n.children.at(0), 0) + ") {\n";
        ++depth_;
        for (NodeId sid : tree_.node(n.children.at(1)).children)
            emit_statement(sid);
        --depth_;
        if (n.children.size() < 3) {
            line("}");
            return;
        }
        indent();
        out_ += "} else ";
        const AsltNode& alt = tree_.node(n.children.at(2));
        if (alt.kind == NodeKind::If) {
            emit_if(alt, /*chained=*/true);
            return;
        }
        if (alt.kind != NodeKind::Block)
            fail(Err::InvalidTreeError, "else branch must be a block or another if");
        out_ += "{\n";
        ++depth_;
        for (NodeId sid : alt.children)
            emit_statement(sid);
        --depth_;
        line("}");
    }

    std::string call_text(const AsltNode& n) {
        std::string text = "call " + n.str_attr("name") + "(";
        bool first = true;
        for (NodeId arg : n.children) {
            if (!first)
                text += ", ";
            first = false;
            text += expr(arg, 0);
        }
        return text + ")";
    }

    std::string intrinsic_text(const AsltNode& n) {
        const std::string& name = n.str_attr("name");
        std::string text = "fo." + name + "(";
        if (name == "getFOPCount") {
            text += "sID, mID, levelCount";
        } else if (name == "storeState" || name == "recoverState") {
            text += std::to_string(n.int_attr("index"));
            for (NodeId arg : n.children)
                text += ", " + tree_.node(arg).str_attr("name");
        } else if (name != "levelInc" && name != "levelDec") {
            fail(Err::InvalidTreeError, "unknown intrinsic '" + name + "'");
        }
        return text + ")";
    }

    // parent_prec: minimum precedence needed to omit parentheses.
    std::string expr(NodeId id, int parent_prec) {
        const AsltNode& n = tree_.node(id);
        switch (n.kind) {
        case NodeKind::Literal: {
            const std::string& type = n.str_attr("type");
            if (type == "int")
                return std::to_string(n.int_attr("value"));
            if (type == "str")
                return "\"" + escape_str(n.str_attr("value")) + "\"";
            if (type == "bool")
                return n.int_attr("value") != 0 ? "true" : "false";
            fail(Err::InvalidTreeError, "unknown literal type '" + type + "'");
        }
        case NodeKind::VarRef:
            return n.str_attr("name");
        case NodeKind::Call:
            return call_text(n);
        case NodeKind::IntrinsicCall:
            return intrinsic_text(n);
        case NodeKind::BinaryOp: {
            const std::string& op = n.str_attr("op");
            int prec = precedence(op);
            std::string text =
                expr(n.children.at(0), prec) + " " + op + " " + expr(n.children.at(1), prec + 1);
            if (prec < parent_prec)
                return "(" + text + ")";
            return text;
        }
        default:
            fail(Err::InvalidTreeError, std::string("node kind '") + kind_name(n.kind) + "' is not an expression");
        }
    }

    const AsltTree& tree_;
    std::string out_;
    int depth_ = 0;
};

} // namespace

std::string aslt_to_code(const AsltTree& tree) {
    tree.validate();
    return Printer(tree).run();
}

} // namespace svcfo
