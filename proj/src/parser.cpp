#include "svcfo/parser.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <vector>

namespace svcfo {

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Str,
    Meta,   // whole /*<MISet>...</MISet>*/ block; text = raw payload
    Punct,  // text holds the exact operator / punctuation
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t ivalue = 0;
    std::uint32_t offset = 0;
    int line = 1;
    int col = 1;
};

constexpr const char* kMetaOpen = "/*<MISet>";
constexpr const char* kMetaClose = "</MISet>*/";

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            Token t = next_token();
            bool end = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (end)
                break;
        }
        return out;
    }

private:
    [[noreturn]] void error(const std::string& msg, int line, int col) {
        fail(Err::SyntaxError, "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg);
    }

    bool starts_with(const char* s) const {
        std::size_t n = std::char_traits<char>::length(s);
        return src_.compare(pos_, n, s) == 0;
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (pos_ >= src_.size())
            return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_n(std::size_t n) {
        while (n--)
            advance();
    }

    void skip_trivia() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
                advance();
            if (peek() == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
                continue;
            }
            // An ordinary block comment; MISet blocks are handled as tokens.
            if (peek() == '/' && peek(1) == '*' && !starts_with(kMetaOpen)) {
                int line = line_, col = col_;
                advance_n(2);
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/'))
                    advance();
                if (pos_ >= src_.size())
                    error("unterminated comment", line, col);
                advance_n(2);
                continue;
            }
            break;
        }
    }

    Token next_token() {
        Token t;
        t.line = line_;
        t.col = col_;
        t.offset = static_cast<std::uint32_t>(pos_);
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = peek();

        if (starts_with(kMetaOpen)) {
            advance_n(std::char_traits<char>::length(kMetaOpen));
            std::size_t start = pos_;
            std::size_t close = src_.find(kMetaClose, start);
            if (close == std::string::npos)
                fail(Err::UnterminatedMetaError, "line " + std::to_string(t.line) + ": <MISet> block lacks " +
                                                     kMetaClose);
            t.kind = Tok::Meta;
            t.text = src_.substr(start, close - start);
            advance_n(close - start + std::char_traits<char>::length(kMetaClose));
            return t;
        }

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                advance();
            t.kind = Tok::Ident;
            t.text = src_.substr(start, pos_ - start);
            return t;
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek())))
                advance();
            t.kind = Tok::Int;
            t.text = src_.substr(start, pos_ - start);
            errno = 0;
            t.ivalue = std::strtoll(t.text.c_str(), nullptr, 10);
            if (errno == ERANGE)
                error("integer literal out of range", t.line, t.col);
            return t;
        }

        if (c == '"') {
            advance();
            std::string value;
            for (;;) {
                if (pos_ >= src_.size() || peek() == '\n')
                    error("unterminated string literal", t.line, t.col);
                char ch = peek();
                if (ch == '"') {
                    advance();
                    break;
                }
                if (ch == '\\') {
                    advance();
                    char esc = peek();
                    switch (esc) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: error(std::string("unknown escape '\\") + esc + "'", line_, col_);
                    }
                    advance();
                    continue;
                }
                value += ch;
                advance();
            }
            t.kind = Tok::Str;
            t.text = std::move(value);
            return t;
        }

        static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
        for (const char* op : two_char) {
            if (starts_with(op)) {
                t.kind = Tok::Punct;
                t.text = op;
                advance_n(2);
                return t;
            }
        }
        static const std::string one_char = "(){},;=<>+-*/%!.#";
        if (one_char.find(c) != std::string::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            advance();
            return t;
        }
        error(std::string("unexpected character '") + c + "'", t.line, t.col);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& src) : tokens_(Lexer(src).run()) {}

    AsltTree parse_unit() {
        AsltTree tree;
        NodeId unit = tree.make(NodeKind::Unit, span_from(peek()));
        tree.set_root(unit);
        while (!at_end()) {
            if (peek().kind == Tok::Meta) {
                tree.add_child(unit, meta_node(tree));
            } else if (is_kw("method")) {
                tree.add_child(unit, parse_method(tree));
            } else {
                error(peek(), "expected 'method' declaration or meta block");
            }
        }
        return tree;
    }

private:
    [[noreturn]] void error(const Token& t, const std::string& msg) {
        fail(Err::SyntaxError, "line " + std::to_string(t.line) + ", col " + std::to_string(t.col) + ": " + msg +
                                   (t.kind == Tok::End ? " (at end of input)" : " (near '" + t.text + "')"));
    }

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    bool at_end() const { return peek().kind == Tok::End; }

    SourceSpan span_from(const Token& t) const { return {t.offset, t.offset}; }

    bool is_kw(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    bool is_punct(const char* p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }

    Token take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    Token expect_punct(const char* p) {
        if (!is_punct(p))
            error(peek(), std::string("expected '") + p + "'");
        return take();
    }

    Token expect_ident() {
        if (peek().kind != Tok::Ident)
            error(peek(), "expected identifier");
        return take();
    }

    Token expect_kw(const char* kw) {
        if (!is_kw(kw))
            error(peek(), std::string("expected '") + kw + "'");
        return take();
    }

    NodeId meta_node(AsltTree& tree) {
        Token t = take();
        NodeId id = tree.make(NodeKind::MetaInfoSet, {t.offset, t.offset});
        tree.node(id).attrs["raw"] = t.text;
        return id;
    }

    NodeId parse_method(AsltTree& tree) {
        Token kw = expect_kw("method");
        Token name = expect_ident();
        NodeId method = tree.make(NodeKind::MethodDecl, span_from(kw));
        tree.node(method).attrs["name"] = name.text;
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                Token p = expect_ident();
                NodeId param = tree.make(NodeKind::Param, span_from(p));
                tree.node(param).attrs["name"] = p.text;
                tree.add_child(method, param);
                if (is_punct(","))
                    take();
                else
                    break;
            }
        }
        expect_punct(")");
        tree.add_child(method, parse_block(tree));
        return method;
    }

    NodeId parse_block(AsltTree& tree) {
        Token open = expect_punct("{");
        NodeId block = tree.make(NodeKind::Block, span_from(open));
        while (!is_punct("}")) {
            if (at_end())
                error(peek(), "unterminated block");
            tree.add_child(block, parse_statement(tree));
        }
        expect_punct("}");
        return block;
    }

    NodeId parse_statement(AsltTree& tree) {
        if (peek().kind == Tok::Meta)
            return meta_node(tree);
        if (is_kw("var"))
            return parse_var_decl(tree);
        if (is_kw("if"))
            return parse_if(tree);
        if (is_kw("while"))
            return parse_while(tree);
        if (is_kw("return"))
            return parse_return(tree);
        if (is_kw("print"))
            return parse_print(tree);
        if (is_kw("fault"))
            return parse_fault(tree);
        if (is_kw("call")) {
            NodeId call = parse_call(tree);
            expect_punct(";");
            return call;
        }
        if (is_kw("fo") && is_punct(".", 1)) {
            NodeId intr = parse_intrinsic(tree);
            expect_punct(";");
            return intr;
        }
        if (peek().kind == Tok::Ident && is_punct("=", 1))
            return parse_assign(tree);
        error(peek(), "expected a statement");
    }

    NodeId parse_var_decl(AsltTree& tree) {
        Token kw = expect_kw("var");
        Token name = expect_ident();
        expect_punct("=");
        NodeId init = parse_expr(tree);
        expect_punct(";");
        NodeId decl = tree.make(NodeKind::VarDecl, span_from(kw));
        tree.node(decl).attrs["name"] = name.text;
        tree.add_child(decl, init);
        return decl;
    }

    NodeId parse_assign(AsltTree& tree) {
        Token name = expect_ident();
        expect_punct("=");
        NodeId value = parse_expr(tree);
        expect_punct(";");
        NodeId assign = tree.make(NodeKind::Assign, span_from(name));
        NodeId target = make_var_ref(tree, name.text);
        tree.node(target).span = span_from(name);
        tree.add_child(assign, target);
        tree.add_child(assign, value);
        return assign;
    }

    NodeId parse_if(AsltTree& tree) {
        Token kw = expect_kw("if");
        expect_punct("(");
        NodeId cond = parse_expr(tree);
        expect_punct(")");
        NodeId then_block = parse_block(tree);
        NodeId node = tree.make(NodeKind::If, span_from(kw));
        tree.add_child(node, cond);
        tree.add_child(node, then_block);
        if (is_kw("else")) {
            take();
            if (is_kw("if"))
                tree.add_child(node, parse_if(tree)); // else-if chain
            else
                tree.add_child(node, parse_block(tree));
        }
        return node;
    }

    NodeId parse_while(AsltTree& tree) {
        Token kw = expect_kw("while");
        expect_punct("(");
        NodeId cond = parse_expr(tree);
        expect_punct(")");
        NodeId body = parse_block(tree);
        NodeId node = tree.make(NodeKind::While, span_from(kw));
        tree.add_child(node, cond);
        tree.add_child(node, body);
        return node;
    }

    NodeId parse_return(AsltTree& tree) {
        Token kw = expect_kw("return");
        NodeId node = tree.make(NodeKind::Return, span_from(kw));
        if (!is_punct(";"))
            tree.add_child(node, parse_expr(tree));
        expect_punct(";");
        return node;
    }

    NodeId parse_print(AsltTree& tree) {
        Token kw = expect_kw("print");
        expect_punct("(");
        NodeId value = parse_expr(tree);
        expect_punct(")");
        expect_punct(";");
        NodeId node = tree.make(NodeKind::Print, span_from(kw));
        tree.add_child(node, value);
        return node;
    }

    NodeId parse_fault(AsltTree& tree) {
        Token kw = expect_kw("fault");
        expect_punct("(");
        if (peek().kind != Tok::Str)
            error(peek(), "fault() takes a string label");
        Token label = take();
        expect_punct(")");
        expect_punct(";");
        NodeId node = tree.make(NodeKind::Fault, span_from(kw));
        tree.node(node).attrs["label"] = label.text;
        return node;
    }

    NodeId parse_call(AsltTree& tree) {
        Token kw = expect_kw("call");
        Token name = expect_ident();
        NodeId node = tree.make(NodeKind::Call, span_from(kw));
        tree.node(node).attrs["name"] = name.text;
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                tree.add_child(node, parse_expr(tree));
                if (is_punct(","))
                    take();
                else
                    break;
            }
        }
        expect_punct(")");
        return node;
    }

    // fo.getFOPCount(sID, mID, levelCount) | fo.storeState(i, v...) |
    // fo.recoverState(i, v...) | fo.levelInc() | fo.levelDec()
    NodeId parse_intrinsic(AsltTree& tree) {
        Token kw = expect_kw("fo");
        expect_punct(".");
        Token name = expect_ident();
        NodeId node = tree.make(NodeKind::IntrinsicCall, span_from(kw));
        tree.node(node).attrs["name"] = name.text;
        expect_punct("(");
        if (name.text == "levelInc" || name.text == "levelDec") {
            // no arguments
        } else if (name.text == "getFOPCount") {
            for (const char* arg : {"sID", "mID", "levelCount"}) {
                Token a = expect_ident();
                if (a.text != arg)
                    error(a, std::string("expected '") + arg + "' argument");
                if (std::string(arg) != "levelCount")
                    expect_punct(",");
            }
        } else if (name.text == "storeState" || name.text == "recoverState") {
            if (peek().kind != Tok::Int)
                error(peek(), name.text + " expects a failover point index");
            Token index = take();
            tree.node(node).attrs["index"] = index.ivalue;
            while (is_punct(",")) {
                take();
                Token var = expect_ident();
                NodeId ref = make_var_ref(tree, var.text);
                tree.node(ref).span = span_from(var);
                tree.add_child(node, ref);
            }
            if (tree.node(node).children.empty())
                error(index, name.text + " expects at least one variable");
        } else {
            error(name, "unknown intrinsic 'fo." + name.text + "'");
        }
        expect_punct(")");
        return node;
    }

    // Precedence climbing; '!' is desugared to `... == false`.
    NodeId parse_expr(AsltTree& tree) { return parse_or(tree); }

    NodeId parse_or(AsltTree& tree) {
        NodeId lhs = parse_and(tree);
        while (is_punct("||")) {
            take();
            lhs = make_binary(tree, "||", lhs, parse_and(tree));
        }
        return lhs;
    }

    NodeId parse_and(AsltTree& tree) {
        NodeId lhs = parse_equality(tree);
        while (is_punct("&&")) {
            take();
            lhs = make_binary(tree, "&&", lhs, parse_equality(tree));
        }
        return lhs;
    }

    NodeId parse_equality(AsltTree& tree) {
        NodeId lhs = parse_relational(tree);
        while (is_punct("==") || is_punct("!=")) {
            std::string op = take().text;
            lhs = make_binary(tree, op, lhs, parse_relational(tree));
        }
        return lhs;
    }

    NodeId parse_relational(AsltTree& tree) {
        NodeId lhs = parse_additive(tree);
        while (is_punct("<") || is_punct("<=") || is_punct(">") || is_punct(">=")) {
            std::string op = take().text;
            lhs = make_binary(tree, op, lhs, parse_additive(tree));
        }
        return lhs;
    }

    NodeId parse_additive(AsltTree& tree) {
        NodeId lhs = parse_multiplicative(tree);
        while (is_punct("+") || is_punct("-")) {
            std::string op = take().text;
            lhs = make_binary(tree, op, lhs, parse_multiplicative(tree));
        }
        return lhs;
    }

    NodeId parse_multiplicative(AsltTree& tree) {
        NodeId lhs = parse_unary(tree);
        while (is_punct("*") || is_punct("/") || is_punct("%")) {
            std::string op = take().text;
            lhs = make_binary(tree, op, lhs, parse_unary(tree));
        }
        return lhs;
    }

    NodeId parse_unary(AsltTree& tree) {
        if (is_punct("!")) {
            take();
            NodeId operand = parse_unary(tree);
            return make_binary(tree, "==", operand, make_literal_bool(tree, false));
        }
        return parse_primary(tree);
    }

    NodeId parse_primary(AsltTree& tree) {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            Token lit = take();
            NodeId id = make_literal_int(tree, lit.ivalue);
            tree.node(id).span = span_from(lit);
            return id;
        }
        if (t.kind == Tok::Str) {
            Token lit = take();
            NodeId id = make_literal_str(tree, lit.text);
            tree.node(id).span = span_from(lit);
            return id;
        }
        if (is_kw("true") || is_kw("false")) {
            Token lit = take();
            NodeId id = make_literal_bool(tree, lit.text == "true");
            tree.node(id).span = span_from(lit);
            return id;
        }
        if (is_kw("call"))
            return parse_call(tree);
        if (is_kw("fo") && is_punct(".", 1))
            return parse_intrinsic(tree);
        if (t.kind == Tok::Ident) {
            Token name = take();
            NodeId id = make_var_ref(tree, name.text);
            tree.node(id).span = span_from(name);
            return id;
        }
        if (is_punct("(")) {
            take();
            NodeId inner = parse_expr(tree);
            expect_punct(")");
            return inner;
        }
        error(t, "expected an expression");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

AsltTree code_to_aslt(const std::string& source) {
    return Parser(source).parse_unit();
}

} // namespace svcfo
