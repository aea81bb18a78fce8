#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "rewrite_arena/rational.hpp"

namespace rewrite_arena {

enum class SymbolKind : std::uint8_t {
  Name,        // operator or variable (x, sin, *, A1)
  Numeral,     // exact rational literal
  Boolean,     // true / false
  PatternVar,  // ?a
};

/// Interned symbol. Equality and hashing are O(1) on the id; the kind is
/// packed into the id so hot paths never touch the intern table.
class Symbol {
 public:
  static Symbol intern(std::string_view name);
  static Symbol numeral(const Rational& value);
  static Symbol boolean(bool value);
  static Symbol of(const Constant& value);

  std::string_view name() const;
  SymbolKind kind() const noexcept { return static_cast<SymbolKind>(id_ >> kIndexBits); }
  std::uint32_t id() const noexcept { return id_; }

  bool is_pattern_var() const noexcept { return kind() == SymbolKind::PatternVar; }
  /// Literal value for Numeral and Boolean symbols.
  std::optional<Constant> constant() const;

  friend bool operator==(Symbol, Symbol) = default;
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

 private:
  static constexpr unsigned kIndexBits = 30;
  explicit Symbol(std::uint32_t id) : id_(id) {}
  friend class SymbolTable;

  std::uint32_t id_;
};

/// Arity declarations for one language. Parsing against a signature rejects
/// operators used with the wrong number of children.
class Signature {
 public:
  void declare(std::string_view name, std::size_t arity);
  std::optional<std::size_t> arity_of(Symbol s) const;
  bool empty() const noexcept { return arities_.empty(); }

 private:
  std::unordered_map<std::uint32_t, std::size_t> arities_;
};

}  // namespace rewrite_arena

template <>
struct std::hash<rewrite_arena::Symbol> {
  std::size_t operator()(rewrite_arena::Symbol s) const noexcept { return std::hash<std::uint32_t>{}(s.id()); }
};
