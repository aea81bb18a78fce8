#pragma once

#include <optional>
#include <span>

#include "rewrite_arena/rational.hpp"
#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

/// Exact evaluation of one operator over constant arguments. Knows the
/// arithmetic (+ - * / neg pow abs max min), comparison (< <= > >= == !=)
/// and boolean (&& || !) operators. Returns nullopt when the operator is
/// unknown, the result is undefined (division by zero) or it overflows.
std::optional<Constant> fold_op(Symbol op, std::span<const Constant> args);

/// Folds a whole closed subterm; nullopt if any leaf is not a literal or any
/// step fails to fold.
std::optional<Constant> fold_constant(const Term& t);

}  // namespace rewrite_arena
