#include "svcfo/value.hpp"

#include <charconv>

namespace svcfo {

const char* value_type_name(const Value& v) {
    switch (v.index()) {
    case 0: return "int";
    case 1: return "str";
    default: return "bool";
    }
}

std::string to_print(const Value& v) {
    switch (v.index()) {
    case 0: return std::to_string(as_int(v));
    case 1: return as_str(v);
    default: return as_bool(v) ? "true" : "false";
    }
}

std::string to_display(const Value& v) {
    if (!is_str(v))
        return to_print(v);
    std::string out = "\"";
    for (char c : as_str(v)) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

Value parse_value_literal(const std::string& text) {
    if (text == "true")
        return make_bool(true);
    if (text == "false")
        return make_bool(false);
    if (!text.empty()) {
        const char* first = text.data();
        const char* last = text.data() + text.size();
        std::int64_t n = 0;
        auto [ptr, ec] = std::from_chars(first, last, n);
        if (ec == std::errc() && ptr == last)
            return make_int(n);
    }
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            char c = text[i];
            if (c == '\\' && i + 2 < text.size()) {
                char e = text[++i];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: out += e;
                }
            } else {
                out += c;
            }
        }
        return make_str(out);
    }
    return make_str(text);
}

} // namespace svcfo
