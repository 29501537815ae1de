#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace svcfo {

/// A runtime value of the service language: 64-bit signed int, string or bool.
using Value = std::variant<std::int64_t, std::string, bool>;

inline Value make_int(std::int64_t v) { return Value(std::in_place_index<0>, v); }
inline Value make_str(std::string v) { return Value(std::in_place_index<1>, std::move(v)); }
inline Value make_bool(bool v) { return Value(std::in_place_index<2>, v); }

inline bool is_int(const Value& v) { return v.index() == 0; }
inline bool is_str(const Value& v) { return v.index() == 1; }
inline bool is_bool(const Value& v) { return v.index() == 2; }

inline std::int64_t as_int(const Value& v) { return std::get<0>(v); }
inline const std::string& as_str(const Value& v) { return std::get<1>(v); }
inline bool as_bool(const Value& v) { return std::get<2>(v); }

/// Type tag as it appears in persisted state files.
const char* value_type_name(const Value& v);

/// Rendering used by print(): ints in decimal, strings raw, bools true/false.
std::string to_print(const Value& v);

/// Rendering used in traces and CLI output: strings quoted and escaped.
std::string to_display(const Value& v);

/// Parses a command-line / scenario literal: 123, -7, true, false, "quoted",
/// anything else is taken as a bare string.
Value parse_value_literal(const std::string& text);

} // namespace svcfo
