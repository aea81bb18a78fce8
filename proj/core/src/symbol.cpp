#include "rewrite_arena/symbol.hpp"

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

/// Process-wide intern table. Entries live in fixed-size chunks that never
/// move, so a published Symbol can be read without locking.
class SymbolTable {
 public:
  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

  Symbol intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = ids_.find(name); it != ids_.end()) return Symbol(it->second);
    }
    std::unique_lock lock(mutex_);
    if (auto it = ids_.find(name); it != ids_.end()) return Symbol(it->second);

    std::uint32_t index = count_;
    if (index / kChunkSize >= kMaxChunks) throw Error("symbol table full");
    auto& chunk = chunks_[index / kChunkSize];
    if (!chunk) chunk = std::make_unique<Entry[]>(kChunkSize);
    Entry& entry = chunk[index % kChunkSize];
    entry.name = std::string(name);
    SymbolKind kind = classify(entry.name, entry.value);
    ++count_;

    std::uint32_t id = (static_cast<std::uint32_t>(kind) << Symbol::kIndexBits) | index;
    ids_.emplace(entry.name, id);
    return Symbol(id);
  }

  const std::string& name(std::uint32_t id) const { return entry(id).name; }
  const std::optional<Constant>& value(std::uint32_t id) const { return entry(id).value; }

 private:
  static constexpr std::uint32_t kChunkSize = 4096;
  static constexpr std::uint32_t kMaxChunks = 4096;

  struct Entry {
    std::string name;
    std::optional<Constant> value;
  };

  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  static SymbolKind classify(const std::string& name, std::optional<Constant>& value) {
    if (name.size() > 1 && name.front() == '?') return SymbolKind::PatternVar;
    if (name == "true" || name == "false") {
      value = Constant(name == "true");
      return SymbolKind::Boolean;
    }
    if (auto r = Rational::parse(name); r && r->to_string() == name) {
      value = Constant(*r);
      return SymbolKind::Numeral;
    }
    return SymbolKind::Name;
  }

  const Entry& entry(std::uint32_t id) const {
    std::uint32_t index = id & ((1u << Symbol::kIndexBits) - 1);
    return chunks_[index / kChunkSize][index % kChunkSize];
  }

  std::shared_mutex mutex_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
  std::array<std::unique_ptr<Entry[]>, kMaxChunks> chunks_;
  std::uint32_t count_ = 0;
};

Symbol Symbol::intern(std::string_view name) {
  if (name.empty()) throw Error("empty symbol name");
  return SymbolTable::instance().intern(name);
}

Symbol Symbol::numeral(const Rational& value) { return intern(value.to_string()); }

Symbol Symbol::boolean(bool value) { return intern(value ? "true" : "false"); }

Symbol Symbol::of(const Constant& value) {
  if (const auto* b = std::get_if<bool>(&value)) return boolean(*b);
  return numeral(std::get<Rational>(value));
}

std::string_view Symbol::name() const { return SymbolTable::instance().name(id_); }

std::optional<Constant> Symbol::constant() const {
  SymbolKind k = kind();
  if (k != SymbolKind::Numeral && k != SymbolKind::Boolean) return std::nullopt;
  return SymbolTable::instance().value(id_);
}

void Signature::declare(std::string_view name, std::size_t arity) {
  Symbol s = Symbol::intern(name);
  auto [it, inserted] = arities_.emplace(s.id(), arity);
  if (!inserted && it->second != arity) throw ArityError(std::string(name), it->second, arity);
}

std::optional<std::size_t> Signature::arity_of(Symbol s) const {
  auto it = arities_.find(s.id());
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

}  // namespace rewrite_arena
