#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

/// Parses one s-expression. Atoms are symbols, variables, `?pattern` vars,
/// decimal or `p/q` numerals, and true/false; `;` starts a line comment.
/// Without a signature, an operator must keep one arity throughout the text.
/// Throws ParseError (with byte offset) or ArityError.
Term parse_sexpr(std::string_view text, const Signature* signature = nullptr);

/// Parses one s-expression starting at `offset` and advances `offset` past
/// it. Trailing text is left for the caller.
Term parse_sexpr_prefix(std::string_view text, std::size_t& offset, const Signature* signature = nullptr);

std::string print_sexpr(const Term& t);

}  // namespace rewrite_arena
