#pragma once

#include <string>

#include "svcfo/ast.hpp"

namespace svcfo {

/// Parses service-language source text into a syntax tree. Plain comments are
/// dropped; /*<MISet>...</MISet>*/ blocks become MetaInfoSet nodes anchored at
/// the statement (or method) position they precede.
///
/// Throws SyntaxError with line/column on malformed input and
/// UnterminatedMetaError when a <MISet> block is never closed.
AsltTree code_to_aslt(const std::string& source);

} // namespace svcfo
