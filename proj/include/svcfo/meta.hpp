#pragma once

#include <string>
#include <vector>

namespace svcfo {

/// One argument of a Failoverpoint directive: a variable name or a `#Set` reference.
struct MetaArg {
    bool is_set_ref = false;
    std::string name;

    friend bool operator==(const MetaArg&, const MetaArg&) = default;
};

/// A parsed meta-directive from a `/*<MISet>...</MISet>*/` block.
///
///   failover.VarSetDef("Name", v1, v2, ...)
///   failover.Failoverpoint(v, #Name, ...)
struct MetaDirective {
    enum class Kind { VarSetDef, Failoverpoint };

    Kind kind = Kind::VarSetDef;
    std::string set_name;      // VarSetDef only
    std::vector<MetaArg> args; // VarSetDef: plain identifiers; Failoverpoint: either form

    friend bool operator==(const MetaDirective&, const MetaDirective&) = default;
};

/// Parses the raw payload of a MISet block into directives, in textual order.
/// Whitespace and newlines between directives are insignificant.
/// Throws MetaSyntaxError for unknown directive names or malformed argument lists.
std::vector<MetaDirective> parse_meta(const std::string& raw);

} // namespace svcfo
