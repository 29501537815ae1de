#pragma once

#include "svcfo/ast.hpp"

#include <string>

namespace svcfo {

/// Renders a tree back to canonical source text. Round-trip stable:
/// aslt_to_code(code_to_aslt(s)) is a fixed point after one pass.
/// Throws InvalidTreeError when the tree violates node arities.
std::string aslt_to_code(const AsltTree& tree);

} // namespace svcfo
