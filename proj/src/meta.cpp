#include "svcfo/meta.hpp"

#include "svcfo/errors.hpp"

#include <cctype>

namespace svcfo {

namespace {

class MetaParser {
public:
    explicit MetaParser(const std::string& raw) : raw_(raw) {}

    std::vector<MetaDirective> run() {
        std::vector<MetaDirective> out;
        skip_space();
        while (pos_ < raw_.size()) {
            out.push_back(directive());
            skip_space();
        }
        return out;
    }

private:
    [[noreturn]] void error(const std::string& msg) {
        fail(Err::MetaSyntaxError, "meta line " + std::to_string(line_) + ": " + msg);
    }

    char peek() const { return pos_ < raw_.size() ? raw_[pos_] : '\0'; }

    void advance() {
        if (pos_ < raw_.size()) {
            if (raw_[pos_] == '\n')
                ++line_;
            ++pos_;
        }
    }

    void skip_space() {
        while (pos_ < raw_.size() && std::isspace(static_cast<unsigned char>(raw_[pos_])))
            advance();
    }

    void expect(char c, const char* what) {
        skip_space();
        if (peek() != c)
            error(std::string("expected ") + what);
        advance();
    }

    std::string ident() {
        skip_space();
        if (!std::isalpha(static_cast<unsigned char>(peek())) && peek() != '_')
            error("expected identifier");
        std::string name;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
            name += peek();
            advance();
        }
        return name;
    }

    std::string quoted_string() {
        skip_space();
        if (peek() != '"')
            error("expected quoted set name");
        advance();
        std::string value;
        while (peek() != '"') {
            if (pos_ >= raw_.size() || peek() == '\n')
                error("unterminated set name");
            value += peek();
            advance();
        }
        advance();
        return value;
    }

    MetaDirective directive() {
        std::string prefix = ident();
        if (prefix != "failover")
            error("directives start with 'failover.' (got '" + prefix + "')");
        expect('.', "'.'");
        std::string name = ident();
        MetaDirective dir;
        if (name == "VarSetDef") {
            dir.kind = MetaDirective::Kind::VarSetDef;
            expect('(', "'('");
            dir.set_name = quoted_string();
            if (dir.set_name.empty())
                error("VarSetDef name must be nonempty");
            skip_space();
            while (peek() == ',') {
                advance();
                skip_space();
                if (peek() == '#')
                    error("VarSetDef members must be plain identifiers");
                dir.args.push_back({false, ident()});
                skip_space();
            }
            expect(')', "')'");
            if (dir.args.empty())
                error("VarSetDef('" + dir.set_name + "') lists no variables");
        } else if (name == "Failoverpoint") {
            dir.kind = MetaDirective::Kind::Failoverpoint;
            expect('(', "'('");
            skip_space();
            for (;;) {
                skip_space();
                if (peek() == '#') {
                    advance();
                    dir.args.push_back({true, ident()});
                } else {
                    dir.args.push_back({false, ident()});
                }
                skip_space();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                break;
            }
            expect(')', "')'");
        } else {
            error("unknown directive 'failover." + name + "'");
        }
        return dir;
    }

    const std::string& raw_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace

std::vector<MetaDirective> parse_meta(const std::string& raw) {
    return MetaParser(raw).run();
}

} // namespace svcfo
