#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/pattern.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/sexpr.hpp"

using namespace rewrite_arena;

namespace {

Term T(const char* s) { return parse_sexpr(s); }

std::set<std::string> printed(const std::vector<Term>& ts) {
  std::set<std::string> out;
  for (const Term& t : ts) out.insert(print_sexpr(t));
  return out;
}

}  // namespace

TEST_CASE("patterns bind variables consistently") {
  Pattern p = Pattern::parse("(* (/ ?a ?b) ?b)");
  CHECK(p.vars().size() == 2);
  auto sigma = match_pattern(p, T("(* (/ (sin x) (cos x)) (cos x))"));
  REQUIRE(sigma.has_value());
  CHECK(*sigma->lookup(Symbol::intern("?a")) == T("(sin x)"));
  CHECK_FALSE(match_pattern(p, T("(* (/ (sin x) (cos x)) (cos y))")).has_value());
  CHECK_FALSE(match_pattern(p, T("(+ 1 2)")).has_value());
  CHECK(Pattern::parse("(+ 1 2)").is_ground());
}

TEST_CASE("match_into restores the substitution on failure") {
  Substitution sigma;
  sigma.bind(Symbol::intern("?a"), T("x"));
  CHECK_FALSE(match_into(T("(+ ?a ?b)"), T("(+ y z)"), sigma));
  CHECK(sigma.size() == 1);
  CHECK(match_into(T("(+ ?a ?b)"), T("(+ x z)"), sigma));
  CHECK(sigma.size() == 2);
}

TEST_CASE("instantiate requires every variable") {
  Substitution sigma;
  sigma.bind(Symbol::intern("?a"), T("x"));
  CHECK(instantiate(Pattern::parse("(sin ?a)"), sigma) == T("(sin x)"));
  CHECK_THROWS_AS(instantiate(Pattern::parse("(+ ?a ?b)"), sigma), UnboundVariable);
}

TEST_CASE("rules reject right-hand variables the left side does not bind") {
  CHECK_THROWS_AS(Rule::rewrite("bad", Pattern::parse("(f ?a)"), Pattern::parse("(g ?b)")), Error);
  CHECK_THROWS_AS(Rule::rewrite("bad", Pattern::parse("(f ?a)"), Pattern::parse("?a"), Guard::nonzero(Symbol::intern("?z"))),
                  Error);
}

TEST_CASE("guards only reject a literal zero") {
  Rule r = Rule::rewrite("cancel-self", Pattern::parse("(/ ?a ?a)"), Pattern::parse("1"), Guard::nonzero(Symbol::intern("?a")));
  CHECK(r.apply_root(T("(/ x x)")) == T("1"));
  CHECK_FALSE(r.apply_root(T("(/ 0 0)")).has_value());
  CHECK_FALSE(r.apply_root(T("(/ (- 1 1) (- 1 1))")).has_value());
  // Syntactic: x - x is not recognized as zero.
  CHECK(r.apply_root(T("(/ (- x x) (- x x))")) == T("1"));
  Guard g = Guard::nonzero(Symbol::intern("?a"));
  CHECK(g.holds_for(std::nullopt));
  CHECK(g.holds_for(Constant{Rational(2)}));
  CHECK_FALSE(g.holds_for(Constant{Rational(0)}));
}

TEST_CASE("constant-fold rule folds one operator over literals") {
  Rule fold = Rule::constant_fold("fold");
  CHECK(fold.apply_root(T("(+ 2 3)")) == T("5"));
  CHECK(fold.apply_root(T("(< 1 2)")) == T("true"));
  CHECK_FALSE(fold.apply_root(T("(+ x 3)")).has_value());
  CHECK_FALSE(fold.apply_root(T("(+ (+ 1 1) 3)")).has_value());
  CHECK_FALSE(fold.apply_root(T("7")).has_value());
}

TEST_CASE("ruleset text format") {
  Ruleset rs = parse_ruleset(R"(
; comment line
assoc: (* (* ?a ?b) ?c) <=> (* ?a (* ?b ?c))
cancel: (/ ?a ?a) => 1 if nonzero(?a)
fold: constant-fold
)");
  REQUIRE(rs.size() == 4);
  CHECK(rs[0].name() == "assoc");
  CHECK(rs[1].name() == "assoc-rev");
  CHECK(rs[2].guard().has_value());
  CHECK(rs[3].kind() == Rule::Kind::ConstantFold);
  CHECK(rs.find("cancel") != nullptr);
  CHECK(rs.find("nope") == nullptr);
  std::vector<std::string> drop = {"cancel"};
  CHECK(rs.without(drop).size() == 3);
}

TEST_CASE("ruleset parse errors point into the text") {
  auto offset_of = [](const char* text) -> std::size_t {
    try {
      parse_ruleset(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return SIZE_MAX;
  };
  CHECK(offset_of("r: (f ?a) -> ?a") != SIZE_MAX);
  CHECK(offset_of("ok: x => y\nbad: (f ?a => ?a") >= 11);
  CHECK(offset_of("r: (f ?a) <=> ?a if nonzero(?a)") != SIZE_MAX);
  CHECK(offset_of("no colon here") != SIZE_MAX);
  CHECK_THROWS_AS(parse_ruleset("r: x => y\nr: y => x"), Error);
}

TEST_CASE("rules_for only returns rules whose root can match") {
  Ruleset rs = *builtin_ruleset("trig");
  for (std::uint32_t i : rs.rules_for(Symbol::intern("sin"))) {
    const Rule& r = rs[i];
    bool ok = r.kind() == Rule::Kind::ConstantFold || r.lhs().tree().op() == Symbol::intern("sin") ||
              r.lhs().tree().op().is_pattern_var();
    CHECK(ok);
  }
}

TEST_CASE("apply_rule_at rejects invalid positions") {
  Ruleset rs = parse_ruleset("comm: (+ ?a ?b) => (+ ?b ?a)");
  CHECK(apply_rule_at(rs[0], T("(sin (+ x y))"), Position{0}) == T("(sin (+ y x))"));
  CHECK_FALSE(apply_rule_at(rs[0], T("(sin (+ x y))"), Position{}).has_value());
  CHECK_THROWS_AS(apply_rule_at(rs[0], T("(sin (+ x y))"), Position{1}), InvalidPosition);
}

TEST_CASE("proposals of a matrix chain are its reassociations") {
  auto assoc = builtin_ruleset("assoc");
  auto ps = proposals(T("(* (* A1 A2) A3)"), *assoc);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].term == T("(* A1 (* A2 A3))"));
  CHECK(ps[0].rule == "assoc");
  CHECK(ps[0].position.is_root());
}

TEST_CASE("proposals are ordered by position then rule, without duplicates or the source") {
  Ruleset rs = parse_ruleset(R"(
comm: (+ ?a ?b) => (+ ?b ?a)
self: (+ ?a ?b) => (+ ?a ?b)
twice: (+ ?a ?a) => (* 2 ?a)
)");
  auto ps = proposals(T("(+ (+ x x) (+ x x))"), rs);
  std::vector<std::string> got;
  for (const auto& p : ps) got.push_back(p.rule + p.position.to_string() + print_sexpr(p.term));
  CHECK(got == std::vector<std::string>{"twice[](* 2 (+ x x))", "twice[0](+ (* 2 x) (+ x x))",
                                        "twice[1](+ (+ x x) (* 2 x))"});
}

TEST_CASE("property: CandidateSet equals brute-force one-step successors") {
  Rng rng(3);
  std::vector<std::string> ops = {"+", "*", "-", "/"};
  std::vector<std::string> leaves = {"x", "y", "0", "1", "2"};
  auto rules = builtin_ruleset("trig");
  CandidateSet cs;
  for (int i = 0; i < 200; ++i) {
    Term t = oracle::random_term(rng, ops, leaves, 4);
    cs.collect(t, *rules);
    std::vector<Term> mine;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      Term m = cs.materialize(k);
      CHECK(m.hash() == cs[k].result_hash);
      CHECK(subterm_at(m, cs[k].position) == cs[k].replacement);
      CHECK(subterm_at(t, cs[k].position) == cs[k].original);
      mine.push_back(m);
    }
    auto expected = oracle::one_step_successors(t, *rules);
    CHECK(mine.size() == expected.size());
    CHECK(printed(mine) == printed(expected));
  }
}

TEST_CASE("every builtin ruleset parses") {
  for (const char* name : {"assoc", "trig", "integration", "halide"}) {
    CAPTURE(name);
    auto rs = builtin_ruleset(name);
    REQUIRE(rs != nullptr);
    CHECK_FALSE(rs->empty());
  }
  CHECK_THROWS_AS(builtin_ruleset("missing"), Error);
}
