#include "svcfo/interp.hpp"

#include "svcfo/util.hpp"

#include <sstream>

namespace svcfo {

namespace {

/// Thrown when a fault trigger fires. Deliberately not a SvcError: a crash is
/// an outcome, not a diagnostic, and must not be swallowed by error handling.
struct CrashSignal {};

struct Frame {
    std::string method;
    int method_id = 0;
    int level = 0; // set by the levelInc intrinsic; 0 until then
    std::map<std::string, Value> locals;
};

class Interp {
public:
    Interp(const AsltTree& unit, const MethodRegistry& registry, std::shared_ptr<Fom> fom,
           std::string session_id, const CrashPlan& plan, InvokeOutcome& out)
        : unit_(unit), registry_(registry), fom_(std::move(fom)), session_(std::move(session_id)),
          plan_(plan), out_(out) {
        for (NodeId child : unit_.node(unit_.root()).children) {
            const AsltNode& n = unit_.node(child);
            if (n.kind == NodeKind::MethodDecl)
                methods_[n.str_attr("name")] = child;
        }
    }

    Value call_method(const std::string& name, const std::vector<Value>& args, Frame* entry_out) {
        auto it = methods_.find(name);
        if (it == methods_.end())
            fail(Err::RuntimeError, "unknown method '" + name + "'");
        const AsltNode& decl = unit_.node(it->second);

        Frame frame;
        frame.method = name;
        if (const MethodInfo* info = registry_.find(name))
            frame.method_id = info->method_id;
        NodeId body = kNoNode;
        std::size_t arg_index = 0;
        for (NodeId child : decl.children) {
            const AsltNode& c = unit_.node(child);
            if (c.kind == NodeKind::Param) {
                if (arg_index >= args.size())
                    fail(Err::RuntimeError, "method '" + name + "' expects more arguments");
                frame.locals[c.str_attr("name")] = args[arg_index++];
            } else {
                body = child;
            }
        }
        if (arg_index != args.size())
            fail(Err::RuntimeError, "method '" + name + "' called with too many arguments");
        ++out_.stats.method_entries[name];

        Value result = make_int(0);
        exec_block(frame, body, result);
        if (entry_out)
            *entry_out = frame;
        return result;
    }

private:
    enum class Flow { Normal, Returned };

    Flow exec_block(Frame& frame, NodeId block, Value& result) {
        for (NodeId stmt : unit_.node(block).children) {
            Flow flow = exec_statement(frame, stmt, result);
            if (flow == Flow::Returned)
                return flow;
        }
        return Flow::Normal;
    }

    Flow exec_statement(Frame& frame, NodeId id, Value& result) {
        const AsltNode& n = unit_.node(id);
        if (n.kind == NodeKind::MetaInfoSet)
            return Flow::Normal; // comments carry no behavior
        ++out_.stats.stmt_counts[id];
        switch (n.kind) {
        case NodeKind::VarDecl:
            frame.locals[n.str_attr("name")] = eval(frame, n.children.at(0));
            return Flow::Normal;
        case NodeKind::Assign: {
            const std::string& name = unit_.node(n.children.at(0)).str_attr("name");
            auto slot = frame.locals.find(name);
            if (slot == frame.locals.end())
                fail(Err::UnboundVariableError, "assignment to undeclared variable '" + name + "'");
            slot->second = eval(frame, n.children.at(1));
            return Flow::Normal;
        }
        case NodeKind::If: {
            if (truthy(frame, n.children.at(0)))
                return exec_branch(frame, n.children.at(1), result);
            if (n.children.size() == 3)
                return exec_branch(frame, n.children.at(2), result);
            return Flow::Normal;
        }
        case NodeKind::While:
            while (truthy(frame, n.children.at(0))) {
                Flow flow = exec_block(frame, n.children.at(1), result);
                if (flow == Flow::Returned)
                    return flow;
            }
            return Flow::Normal;
        case NodeKind::Call:
            eval(frame, id);
            return Flow::Normal;
        case NodeKind::Return:
            result = n.children.empty() ? make_int(0) : eval(frame, n.children.at(0));
            return Flow::Returned;
        case NodeKind::Print:
            out_.transcript.push_back(to_print(eval(frame, n.children.at(0))));
            return Flow::Normal;
        case NodeKind::Fault: {
            const std::string& label = n.str_attr("label");
            std::int64_t count = ++out_.stats.fault_counts[label];
            auto trig = plan_.triggers.find(label);
            if (trig != plan_.triggers.end() && count == trig->second)
                throw CrashSignal{};
            return Flow::Normal;
        }
        case NodeKind::IntrinsicCall:
            eval_intrinsic(frame, n);
            return Flow::Normal;
        default:
            fail(Err::RuntimeError, std::string("node kind '") + kind_name(n.kind) + "' is not executable");
        }
    }

    // If branches are blocks or chained ifs; chained ifs count as statements.
    Flow exec_branch(Frame& frame, NodeId id, Value& result) {
        if (unit_.node(id).kind == NodeKind::Block)
            return exec_block(frame, id, result);
        return exec_statement(frame, id, result);
    }

    bool truthy(Frame& frame, NodeId expr) {
        Value v = eval(frame, expr);
        if (!is_bool(v))
            fail(Err::RuntimeError, "condition must be a bool, got " + std::string(value_type_name(v)));
        return as_bool(v);
    }

    Value eval(Frame& frame, NodeId id) {
        const AsltNode& n = unit_.node(id);
        switch (n.kind) {
        case NodeKind::Literal: {
            const std::string& type = n.str_attr("type");
            if (type == "int")
                return make_int(n.int_attr("value"));
            if (type == "str")
                return make_str(n.str_attr("value"));
            return make_bool(n.int_attr("value") != 0);
        }
        case NodeKind::VarRef: {
            const std::string& name = n.str_attr("name");
            auto it = frame.locals.find(name);
            if (it == frame.locals.end())
                fail(Err::UnboundVariableError, "variable '" + name + "' is not bound");
            return it->second;
        }
        case NodeKind::Call: {
            std::vector<Value> args;
            args.reserve(n.children.size());
            for (NodeId arg : n.children)
                args.push_back(eval(frame, arg));
            return call_method(n.str_attr("name"), args, nullptr);
        }
        case NodeKind::IntrinsicCall:
            return eval_intrinsic(frame, n);
        case NodeKind::BinaryOp:
            return eval_binary(frame, n);
        default:
            fail(Err::RuntimeError, std::string("node kind '") + kind_name(n.kind) + "' is not an expression");
        }
    }

    Value eval_binary(Frame& frame, const AsltNode& n) {
        const std::string& op = n.str_attr("op");
        if (op == "&&" || op == "||") {
            Value lhs = eval(frame, n.children.at(0));
            if (!is_bool(lhs))
                fail(Err::RuntimeError, "'" + op + "' needs bool operands");
            if (op == "&&" && !as_bool(lhs))
                return make_bool(false);
            if (op == "||" && as_bool(lhs))
                return make_bool(true);
            Value rhs = eval(frame, n.children.at(1));
            if (!is_bool(rhs))
                fail(Err::RuntimeError, "'" + op + "' needs bool operands");
            return rhs;
        }

        Value lhs = eval(frame, n.children.at(0));
        Value rhs = eval(frame, n.children.at(1));
        if (op == "==" || op == "!=") {
            if (lhs.index() != rhs.index())
                fail(Err::RuntimeError, "'" + op + "' compares values of different types");
            bool eq = lhs == rhs;
            return make_bool(op == "==" ? eq : !eq);
        }
        if (op == "+") {
            if (is_str(lhs) && is_str(rhs))
                return make_str(as_str(lhs) + as_str(rhs));
            return make_int(wrap_add(want_int(lhs, op), want_int(rhs, op)));
        }
        if (op == "-")
            return make_int(wrap_sub(want_int(lhs, op), want_int(rhs, op)));
        if (op == "*")
            return make_int(wrap_mul(want_int(lhs, op), want_int(rhs, op)));
        if (op == "/" || op == "%") {
            std::int64_t a = want_int(lhs, op), b = want_int(rhs, op);
            if (b == 0)
                fail(Err::RuntimeError, op == "/" ? "division by zero" : "modulo by zero");
            if (a == INT64_MIN && b == -1) // the one overflowing case
                return make_int(op == "/" ? INT64_MIN : 0);
            return make_int(op == "/" ? a / b : a % b);
        }
        // relational: ints only
        std::int64_t a = want_int(lhs, op), b = want_int(rhs, op);
        if (op == "<")
            return make_bool(a < b);
        if (op == "<=")
            return make_bool(a <= b);
        if (op == ">")
            return make_bool(a > b);
        if (op == ">=")
            return make_bool(a >= b);
        fail(Err::RuntimeError, "unknown operator '" + op + "'");
    }

    std::int64_t want_int(const Value& v, const std::string& op) {
        if (!is_int(v))
            fail(Err::RuntimeError, "'" + op + "' needs int operands, got " + std::string(value_type_name(v)));
        return as_int(v);
    }

    static std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
    }
    static std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
    }
    static std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
    }

    Value eval_intrinsic(Frame& frame, const AsltNode& n) {
        const std::string& name = n.str_attr("name");
        if (name == "levelInc") {
            frame.level = ++session_level_;
            return make_int(0);
        }
        if (name == "levelDec") {
            if (fom_)
                fom_->clear_level(session_, frame.method_id, frame.level);
            session_level_ = frame.level - 1;
            return make_int(0);
        }
        if (name == "getFOPCount") {
            if (!fom_)
                return make_int(0);
            return make_int(fom_->get_fop_count(session_, frame.method_id, frame.level));
        }
        if (name == "storeState") {
            if (!fom_)
                return make_int(0);
            std::vector<Binding> bindings;
            for (NodeId arg : n.children) {
                const std::string& var = unit_.node(arg).str_attr("name");
                auto it = frame.locals.find(var);
                // Declared-but-not-reached variables persist as the default.
                bindings.push_back({var, it != frame.locals.end() ? it->second : make_int(0)});
            }
            fom_->store_state(session_, frame.method_id, frame.level,
                              static_cast<int>(n.int_attr("index")), std::move(bindings));
            return make_int(0);
        }
        if (name == "recoverState") {
            if (!fom_)
                return make_int(0);
            std::vector<Binding> bindings;
            try {
                bindings = fom_->recover_state(session_, frame.method_id, frame.level,
                                               static_cast<int>(n.int_attr("index")));
            } catch (const SvcError& e) {
                if (e.code() == Err::NoRecordError)
                    fail(Err::InternalError, std::string("recovery guard mismatch: ") + e.what());
                throw;
            }
            for (Binding& b : bindings)
                frame.locals[b.name] = std::move(b.value);
            return make_int(0);
        }
        fail(Err::RuntimeError, "unknown intrinsic 'fo." + name + "'");
    }

    const AsltTree& unit_;
    const MethodRegistry& registry_;
    std::shared_ptr<Fom> fom_;
    std::string session_;
    const CrashPlan& plan_;
    InvokeOutcome& out_;
    std::map<std::string, NodeId> methods_;
    int session_level_ = 0;
};

} // namespace

CrashPlan parse_crash_plan(const std::string& text) {
    CrashPlan plan;
    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        std::string kw, label;
        int occurrence = 0;
        if (!(fields >> kw >> label >> occurrence) || kw != "crash" || occurrence < 1)
            fail(Err::ScenarioError, "crash plan line " + std::to_string(line_no) +
                                         ": want 'crash <label> <occurrence>'");
        std::string extra;
        if (fields >> extra)
            fail(Err::ScenarioError, "crash plan line " + std::to_string(line_no) + ": trailing content");
        plan.triggers[label] = occurrence;
    }
    return plan;
}

MethodRegistry scan_methods(const AsltTree& unit) {
    MethodRegistry reg;
    for (NodeId child : unit.node(unit.root()).children) {
        const AsltNode& n = unit.node(child);
        if (n.kind != NodeKind::MethodDecl)
            continue;
        reg.methods.push_back({n.str_attr("name"), static_cast<int>(reg.methods.size()) + 1, 0});
    }
    return reg;
}

InvokeOutcome invoke(const AsltTree& unit, const MethodRegistry& registry,
                     const std::shared_ptr<Fom>& fom, const std::string& session_id,
                     const std::string& method, const std::vector<Value>& args, const CrashPlan& plan) {
    InvokeOutcome out;
    Interp interp(unit, registry, fom, session_id, plan, out);
    try {
        Frame entry;
        out.return_value = interp.call_method(method, args, &entry);
        out.kind = InvokeOutcome::Kind::Returned;
        out.final_locals = std::move(entry.locals);
        if (fom)
            fom->clear_session(session_id);
    } catch (const CrashSignal&) {
        out.kind = InvokeOutcome::Kind::Crashed;
        out.final_locals.clear();
    }
    return out;
}

} // namespace svcfo
