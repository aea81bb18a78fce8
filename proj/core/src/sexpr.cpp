#include "rewrite_arena/sexpr.hpp"

#include <cctype>
#include <unordered_map>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/rational.hpp"

namespace rewrite_arena {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t offset, const Signature* signature)
      : text_(text), pos_(offset), signature_(signature) {}

  Term parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    if (text_[pos_] == ')') throw ParseError(pos_, "unexpected ')'");
    if (text_[pos_] == '(') return parse_list();
    return Term::leaf(parse_atom());
  }

  std::size_t offset() const { return pos_; }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

 private:
  static bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';';
  }

  Symbol parse_atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    std::string_view atom = text_.substr(start, pos_ - start);
    if (atom.empty()) throw ParseError(start, "expected an atom");
    if (atom.front() == '?' && atom.size() == 1) throw ParseError(start, "pattern variable needs a name");
    if (auto r = Rational::parse(atom)) return Symbol::numeral(*r);
    if (!atom.empty() && (std::isdigit(static_cast<unsigned char>(atom.front())) ||
                          (atom.size() > 1 && atom.front() == '-' && std::isdigit(static_cast<unsigned char>(atom[1]))))) {
      throw ParseError(start, "malformed numeral '" + std::string(atom) + "'");
    }
    return Symbol::intern(atom);
  }

  Term parse_list() {
    std::size_t open = pos_;
    ++pos_;  // '('
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unterminated list opened at offset " + std::to_string(open));
    if (text_[pos_] == '(' || text_[pos_] == ')') throw ParseError(pos_, "expected an operator symbol");
    std::size_t op_offset = pos_;
    Symbol op = parse_atom();
    if (op.kind() != SymbolKind::Name) throw ParseError(op_offset, "operator must be a name, got '" + std::string(op.name()) + "'");

    std::vector<Term> children;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError(pos_, "unterminated list opened at offset " + std::to_string(open));
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      children.push_back(parse());
    }
    if (children.empty()) throw ParseError(open, "empty application of '" + std::string(op.name()) + "'");
    check_arity(op, children.size());
    return Term::make(op, std::move(children));
  }

  void check_arity(Symbol op, std::size_t arity) {
    if (signature_ != nullptr && !signature_->empty()) {
      auto declared = signature_->arity_of(op);
      if (!declared) throw ParseError(pos_, "undeclared operator '" + std::string(op.name()) + "'");
      if (*declared != arity) throw ArityError(std::string(op.name()), *declared, arity);
      return;
    }
    auto [it, inserted] = seen_.emplace(op.id(), arity);
    if (!inserted && it->second != arity) throw ArityError(std::string(op.name()), it->second, arity);
  }

  std::string_view text_;
  std::size_t pos_;
  const Signature* signature_;
  std::unordered_map<std::uint32_t, std::size_t> seen_;
};

void print_into(const Term& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.op().name();
    return;
  }
  out += '(';
  out += t.op().name();
  for (const Term& c : t.children()) {
    out += ' ';
    print_into(c, out);
  }
  out += ')';
}

}  // namespace

Term parse_sexpr(std::string_view text, const Signature* signature) {
  std::size_t offset = 0;
  Term t = parse_sexpr_prefix(text, offset, signature);
  Parser tail(text, offset, signature);
  tail.skip_space();
  if (tail.offset() != text.size()) throw ParseError(tail.offset(), "trailing input after expression");
  return t;
}

Term parse_sexpr_prefix(std::string_view text, std::size_t& offset, const Signature* signature) {
  Parser parser(text, offset, signature);
  Term t = parser.parse();
  offset = parser.offset();
  return t;
}

std::string print_sexpr(const Term& t) {
  std::string out;
  print_into(t, out);
  return out;
}

}  // namespace rewrite_arena
