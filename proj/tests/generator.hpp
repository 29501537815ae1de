#pragma once

// Deterministic random-program generator for round-trip, preservation, and
// transform property tests. All randomness flows through one mt19937 seeded
// by the caller, so a seed identifies a program forever.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace svcfo::testgen {

struct GenOptions {
    bool with_fops = true;   // sprinkle Failoverpoint directives between statements
    bool with_calls = true;  // helper methods + calls (always FOP-guarded when with_fops)
    bool with_faults = false; // fault("L#") sites for crash sweeps
};

class ProgramGen {
public:
    explicit ProgramGen(std::uint32_t seed, GenOptions opt = {}) : rng_(seed), opt_(opt) {}

    std::string generate() {
        src_.clear();
        next_var_ = 1;
        src_ += "/*<MISet>\nfailover.VarSetDef(\"GSet\", g1, g2)\n</MISet>*/\n\n";
        int helpers = static_cast<int>(pick(3)); // 0, 1, or 2
        if (!opt_.with_calls)
            helpers = 0;
        // declare callees first so main can call them; calls stay acyclic:
        // h2 calls nothing, h1 may call h2, main may call either.
        for (int i = helpers; i >= 1; --i) {
            std::vector<std::string> callees;
            for (int j = i + 1; j <= helpers; ++j)
                callees.push_back("h" + std::to_string(j));
            emit_method("h" + std::to_string(i), true, callees);
            src_ += "\n";
        }
        std::vector<std::string> callees;
        for (int j = 1; j <= helpers; ++j)
            callees.push_back("h" + std::to_string(j));
        emit_method("main", false, callees);
        return src_;
    }

private:
    enum class Ty { Int, Str, Bool };

    struct Scope {
        std::vector<std::string> ints, strs, bools;
        const std::vector<std::string>* callees = nullptr;

        std::vector<std::string>& of(Ty t) {
            switch (t) {
            case Ty::Int: return ints;
            case Ty::Str: return strs;
            default: return bools;
            }
        }
    };

    std::size_t pick(std::size_t n) { return rng_() % n; }
    bool chance(std::size_t percent) { return pick(100) < percent; }

    std::string fresh(const char* prefix) { return prefix + std::to_string(next_var_++); }

    std::string int_expr(Scope& s, int depth) {
        if (depth <= 0 || chance(40)) {
            if (!s.ints.empty() && chance(60))
                return s.ints[pick(s.ints.size())];
            return std::to_string(pick(10));
        }
        const char* ops[] = {"+", "-", "*", "/", "%"};
        const char* op = ops[pick(5)];
        std::string lhs = int_expr(s, depth - 1);
        std::string rhs = (op[0] == '/' || op[0] == '%')
                              ? std::to_string(1 + pick(9)) // literal, never zero
                              : int_expr(s, depth - 1);
        return "(" + lhs + " " + op + " " + rhs + ")";
    }

    std::string str_expr(Scope& s, int depth) {
        if (depth <= 0 || chance(50)) {
            if (!s.strs.empty() && chance(60))
                return s.strs[pick(s.strs.size())];
            return "\"s" + std::to_string(pick(16)) + "\"";
        }
        return "(" + str_expr(s, depth - 1) + " + " + str_expr(s, depth - 1) + ")";
    }

    std::string bool_expr(Scope& s, int depth) {
        if (depth <= 0 || chance(35)) {
            if (!s.bools.empty() && chance(50))
                return s.bools[pick(s.bools.size())];
            return chance(50) ? "true" : "false";
        }
        switch (pick(4)) {
        case 0: {
            const char* cmps[] = {"<", "<=", ">", ">=", "==", "!="};
            return "(" + int_expr(s, depth - 1) + " " + cmps[pick(6)] + " " + int_expr(s, depth - 1) + ")";
        }
        case 1: return "(" + bool_expr(s, depth - 1) + " && " + bool_expr(s, depth - 1) + ")";
        case 2: return "(" + bool_expr(s, depth - 1) + " || " + bool_expr(s, depth - 1) + ")";
        default: return "!" + bool_expr(s, 0);
        }
    }

    std::string expr_of(Scope& s, Ty t, int depth) {
        switch (t) {
        case Ty::Int: return int_expr(s, depth);
        case Ty::Str: return str_expr(s, depth);
        default: return bool_expr(s, depth);
        }
    }

    Ty random_type() {
        switch (pick(3)) {
        case 0: return Ty::Int;
        case 1: return Ty::Str;
        default: return Ty::Bool;
        }
    }

    void line(int indent, const std::string& text) {
        src_.append(static_cast<std::size_t>(indent) * 4, ' ');
        src_ += text;
        src_ += "\n";
    }

    // Simple statements allowed inside if/while bodies: no declarations that
    // escape, no FOPs (rejected there), no calls (keeps levels predictable).
    void emit_inner(Scope& s, int indent) {
        std::size_t n = 1 + pick(2);
        for (std::size_t i = 0; i < n; ++i) {
            switch (pick(3)) {
            case 0:
                if (!s.ints.empty()) {
                    const std::string& v = s.ints[pick(s.ints.size())];
                    line(indent, v + " = " + int_expr(s, 2) + ";");
                    break;
                }
                [[fallthrough]];
            case 1: line(indent, "print(" + str_expr(s, 1) + ");"); break;
            default:
                if (!s.strs.empty()) {
                    const std::string& v = s.strs[pick(s.strs.size())];
                    line(indent, v + " = " + str_expr(s, 1) + ";");
                } else {
                    line(indent, "print(" + int_expr(s, 1) + ");");
                }
            }
        }
    }

    void emit_fop(Scope& s, int indent) {
        std::string args;
        if (chance(60))
            args = "#GSet";
        std::size_t extras = pick(3);
        for (std::size_t i = 0; i < extras; ++i) {
            Ty t = random_type();
            const auto& pool = s.of(t);
            if (pool.empty())
                continue;
            if (!args.empty())
                args += ", ";
            args += pool[pick(pool.size())];
        }
        if (args.empty())
            args = "g1";
        line(indent, "/*<MISet>");
        line(indent, "failover.Failoverpoint(" + args + ")");
        line(indent, "</MISet>*/");
    }

    void emit_statement(Scope& s, int indent) {
        switch (pick(6)) {
        case 0: { // fresh declaration
            Ty t = random_type();
            std::string name = fresh("v");
            line(indent, "var " + name + " = " + expr_of(s, t, 2) + ";");
            s.of(t).push_back(name);
            return;
        }
        case 1: { // assignment to an existing variable
            Ty t = random_type();
            auto& pool = s.of(t);
            if (pool.empty()) {
                line(indent, "print(\"skip\");");
                return;
            }
            line(indent, pool[pick(pool.size())] + " = " + expr_of(s, t, 2) + ";");
            return;
        }
        case 2:
            line(indent, "print(" + (chance(50) ? str_expr(s, 1) : int_expr(s, 2)) + ");");
            return;
        case 3: { // if / else
            line(indent, "if (" + bool_expr(s, 2) + ") {");
            emit_inner(s, indent + 1);
            if (chance(50)) {
                line(indent, "} else {");
                emit_inner(s, indent + 1);
            }
            line(indent, "}");
            return;
        }
        case 4: { // bounded counter loop; the counter is never touched elsewhere
            std::string c = fresh("c");
            std::size_t bound = 1 + pick(4);
            line(indent, "var " + c + " = 0;");
            line(indent, "while (" + c + " < " + std::to_string(bound) + ") {");
            emit_inner(s, indent + 1);
            line(indent + 1, c + " = " + c + " + 1;");
            line(indent, "}");
            return;
        }
        default:
            if (opt_.with_faults) {
                line(indent, "fault(\"L" + std::to_string(1 + pick(3)) + "\");");
                return;
            }
            line(indent, "print(" + int_expr(s, 1) + ");");
            return;
        }
    }

    void emit_call(Scope& s, int indent) {
        if (opt_.with_fops)
            emit_fop(s, indent); // a FOP guards every call
        const std::string callee = (*s.callees)[pick(s.callees->size())];
        std::string r = fresh("r");
        line(indent, "var " + r + " = call " + callee + "(" + int_expr(s, 1) + ");");
        s.ints.push_back(r);
    }

    void emit_method(const std::string& name, bool takes_param, const std::vector<std::string>& callees) {
        Scope s;
        s.callees = &callees;
        std::string param;
        if (takes_param) {
            param = fresh("p");
            s.ints.push_back(param);
        }
        src_ += "method " + name + "(" + param + ") {\n";
        line(1, "var g1 = " + std::to_string(pick(10)) + ";");
        line(1, "var g2 = " + std::to_string(pick(10)) + ";");
        s.ints.push_back("g1");
        s.ints.push_back("g2");

        std::size_t stmts = 3 + pick(6);
        for (std::size_t i = 0; i < stmts; ++i) {
            if (opt_.with_fops && chance(30))
                emit_fop(s, 1);
            if (!callees.empty() && opt_.with_calls && chance(25))
                emit_call(s, 1);
            else
                emit_statement(s, 1);
        }
        Ty ret = random_type();
        line(1, "return " + expr_of(s, ret, 2) + ";");
        src_ += "}\n";
    }

    std::mt19937 rng_;
    GenOptions opt_;
    std::string src_;
    int next_var_ = 1;
};

inline std::string generate_program(std::uint32_t seed, GenOptions opt = {}) {
    return ProgramGen(seed, opt).generate();
}

} // namespace svcfo::testgen
