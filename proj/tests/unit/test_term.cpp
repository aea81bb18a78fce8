#include <doctest.h>

#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/fold.hpp"
#include "rewrite_arena/rational.hpp"
#include "rewrite_arena/sexpr.hpp"
#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

using namespace rewrite_arena;

TEST_CASE("rational arithmetic is exact and normalized") {
  auto half = *Rational::make(2, 4);
  CHECK(half.num() == 1);
  CHECK(half.den() == 2);
  CHECK(*Rational::make(3, -6) == *Rational::make(-1, 2));
  CHECK(*add(half, *Rational::make(1, 3)) == *Rational::make(5, 6));
  CHECK(*mul(half, Rational(4)) == Rational(2));
  CHECK_FALSE(div(half, Rational(0)).has_value());
  CHECK_FALSE(Rational::make(1, 0).has_value());
  CHECK(*pow(*Rational::make(2, 3), 2) == *Rational::make(4, 9));
  CHECK(*pow(Rational(2), -1) == *Rational::make(1, 2));
  CHECK(*Rational::parse("0.25") == *Rational::make(1, 4));
  CHECK(*Rational::parse("-7/2") == *Rational::make(-7, 2));
  CHECK_FALSE(Rational::parse("1/0").has_value());
  CHECK_FALSE(Rational::parse("abc").has_value());
  CHECK(Rational::make(1, 3)->to_string() == "1/3");
  CHECK(Rational(-5).to_string() == "-5");
  CHECK(*Rational::make(1, 3) < *Rational::make(1, 2));
}

TEST_CASE("rational overflow is reported instead of wrapping") {
  Rational big(INT64_MAX);
  CHECK_FALSE(add(big, Rational(1)).has_value());
  CHECK_FALSE(mul(big, Rational(2)).has_value());
  CHECK_FALSE(pow(Rational(10), 40).has_value());
}

TEST_CASE("symbols intern by name and classify their kind") {
  CHECK(Symbol::intern("sin") == Symbol::intern("sin"));
  CHECK(Symbol::intern("sin") != Symbol::intern("cos"));
  CHECK(Symbol::intern("x").kind() == SymbolKind::Name);
  CHECK(Symbol::intern("?a").kind() == SymbolKind::PatternVar);
  CHECK(Symbol::intern("true").kind() == SymbolKind::Boolean);
  CHECK(Symbol::numeral(Rational(3)).kind() == SymbolKind::Numeral);
  CHECK(std::get<Rational>(*Symbol::numeral(*Rational::make(1, 2)).constant()) == *Rational::make(1, 2));
  CHECK(std::get<bool>(*Symbol::boolean(false).constant()) == false);
  CHECK_FALSE(Symbol::intern("x").constant().has_value());
  CHECK(Symbol::intern("tan").name() == "tan");
  CHECK_THROWS_AS(Symbol::intern(""), Error);
}

TEST_CASE("interning is safe from several threads") {
  std::vector<std::thread> threads;
  std::vector<std::uint32_t> ids(4);
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      for (int k = 0; k < 2000; ++k) Symbol::intern("thread-sym-" + std::to_string(k));
      ids[i] = Symbol::intern("thread-sym-1234").id();
    });
  }
  for (auto& t : threads) t.join();
  for (std::uint32_t id : ids) CHECK(id == ids[0]);
}

TEST_CASE("parse and print round-trip") {
  for (const char* text : {"x", "(sin x)", "(+ (* 2 x) (pow (cos y) 2))", "(/ 1/2 x)", "(< (max i 2) (max (+ i 3) 3))",
                           "(f ?a ?b)", "(&& true false)", "-3"}) {
    CAPTURE(text);
    CHECK(print_sexpr(parse_sexpr(text)) == text);
  }
  CHECK(print_sexpr(parse_sexpr("  ( +  x\n 1 ) ; comment")) == "(+ x 1)");
  CHECK(print_sexpr(parse_sexpr("0.5")) == "1/2");
}

TEST_CASE("parse errors carry byte offsets") {
  auto offset_of = [](const char* text) -> std::size_t {
    try {
      parse_sexpr(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return SIZE_MAX;
  };
  CHECK(offset_of("(+ x") == 4);
  CHECK(offset_of(")") == 0);
  CHECK(offset_of("(+ x 1) y") == 8);
  CHECK(offset_of("(1 x)") == 1);
  CHECK(offset_of("(f)") == 0);
  CHECK(offset_of("(+ 12abc 1)") == 3);
  CHECK(offset_of("") == 0);
}

TEST_CASE("arity is checked within one text and against a signature") {
  CHECK_THROWS_AS(parse_sexpr("(+ (f x) (f x y))"), ArityError);
  Signature sig;
  sig.declare("sin", 1);
  sig.declare("+", 2);
  CHECK_NOTHROW(parse_sexpr("(+ (sin x) y)", &sig));
  CHECK_THROWS_AS(parse_sexpr("(sin x y)", &sig), ArityError);
  CHECK_THROWS_AS(parse_sexpr("(cos x)", &sig), ParseError);
}

TEST_CASE("terms share structure and cache hash and size") {
  Term t = parse_sexpr("(+ (sin x) (sin x))");
  CHECK(t.size() == 5);
  CHECK(node_count(t) == 5);
  CHECK(t.child(0) == t.child(1));
  CHECK(t.child(0).hash() == t.child(1).hash());
  Term u = replace_at(t, Position{1, 0}, parse_sexpr("y"));
  CHECK(print_sexpr(u) == "(+ (sin x) (sin y))");
  CHECK(u.child(0).identity() == t.child(0).identity());
  CHECK(print_sexpr(t) == "(+ (sin x) (sin x))");
  CHECK(subterm_at(t, Position{0}) == parse_sexpr("(sin x)"));
  CHECK(subterm_at(t, Position{}) == t);
  CHECK_THROWS_AS(subterm_at(t, Position{2}), InvalidPosition);
  CHECK_THROWS_AS(replace_at(t, Position{0, 0, 0}, t), InvalidPosition);
  CHECK(is_valid_position(t, Position{1, 0}));
  CHECK_FALSE(is_valid_position(t, Position{1, 1}));
  CHECK(Position{1, 0}.to_string() == "[1,0]");
}

TEST_CASE("for_each_position visits in pre-order") {
  std::vector<std::string> seen;
  for_each_position(parse_sexpr("(f (g a) b)"), [&](const Position& p, const Term& s) {
    seen.push_back(p.to_string() + print_sexpr(s));
  });
  CHECK(seen == std::vector<std::string>{"[](f (g a) b)", "[0](g a)", "[0,0]a", "[1]b"});
}

TEST_CASE("property: hash_with_child predicts the hash of a rebuilt node") {
  Rng rng(11);
  std::vector<std::string> ops = {"+", "*", "-"};
  std::vector<std::string> leaves = {"x", "y", "1", "2"};
  for (int i = 0; i < 300; ++i) {
    Term t = oracle::random_term(rng, ops, leaves, 4);
    if (t.is_leaf()) continue;
    Term repl = oracle::random_term(rng, ops, leaves, 2);
    std::size_t idx = rng() % t.arity();
    Term rebuilt = replace_at(t, Position{static_cast<std::uint32_t>(idx)}, repl);
    CHECK(Term::hash_with_child(t, idx, repl.hash()) == rebuilt.hash());
  }
}

TEST_CASE("property: print then parse is the identity on random terms") {
  Rng rng(5);
  std::vector<std::string> ops = {"+", "*", "/", "max"};
  std::vector<std::string> leaves = {"x", "y", "0", "-1", "3/4", "true"};
  for (int i = 0; i < 300; ++i) {
    Term t = oracle::random_term(rng, ops, leaves, 5);
    CHECK(parse_sexpr(print_sexpr(t)) == t);
  }
}

TEST_CASE("constant folding is exact") {
  CHECK(std::get<Rational>(*fold_constant(parse_sexpr("(+ 1/2 (* 3 1/6))"))) == Rational(1));
  CHECK(std::get<bool>(*fold_constant(parse_sexpr("(< (max 1 2) 3)"))) == true);
  CHECK(std::get<bool>(*fold_constant(parse_sexpr("(&& true (! true))"))) == false);
  CHECK_FALSE(fold_constant(parse_sexpr("(/ 1 0)")).has_value());
  CHECK_FALSE(fold_constant(parse_sexpr("(+ x 1)")).has_value());
  CHECK_FALSE(fold_constant(parse_sexpr("(sin 0)")).has_value());
}
