#include <gtest/gtest.h>

#include "packrat/catalog.hpp"
#include "packrat/grammar.hpp"
#include "packrat/oracles.hpp"

using namespace packrat;
using namespace packrat::peg;

namespace {

Grammar one_rule(PegExpr body) { return Grammar({{"A", std::move(body)}}, RuleId{0}); }

bool has_code(const std::vector<ValidationIssue>& issues, IssueCode code) {
	for (const auto& i : issues)
		if (i.code == code)
			return true;
	return false;
}

} // namespace

TEST(Nullable, Basics) {
	const Grammar g = one_rule(empty());
	EXPECT_TRUE(nullable(g, empty()));
	EXPECT_FALSE(nullable(g, ch('+')));
	EXPECT_TRUE(nullable(g, seq({star(ch('a')), opt(ch('b'))})));
	EXPECT_TRUE(nullable(g, not_(ch('a'))));
	EXPECT_TRUE(nullable(g, and_(ch('a'))));
	EXPECT_FALSE(nullable(g, plus(ch('a'))));
	EXPECT_FALSE(nullable(g, any()));
	EXPECT_FALSE(nullable(g, lit(U"ab")));
	EXPECT_TRUE(nullable(g, lit(U"")));
	EXPECT_TRUE(nullable(g, choice({ch('a'), empty()})));
	EXPECT_FALSE(nullable(g, seq({ch('a'), empty()})));
}

TEST(Nullable, FixpointThroughRules) {
	GrammarBuilder b;
	const RuleId a = b.declare("A");
	const RuleId bb = b.declare("B");
	b.define(a, choice({seq({ch('x'), ref(bb)}), ref(bb)}));
	b.define(bb, choice({ch('y'), empty()}));
	const Grammar g = b.build();
	EXPECT_TRUE(g.rule_nullable(a));
	EXPECT_TRUE(g.rule_nullable(bb));
	EXPECT_TRUE(nullable(g, ref(a)));
	EXPECT_FALSE(nullable(g, seq({ch('x'), ref(bb)})));
}

TEST(Validate, ArithHasNoErrors) {
	const auto issues = validate(arith_basic().grammar);
	for (const auto& i : issues)
		EXPECT_NE(i.severity, Severity::Error) << i.message;
	EXPECT_TRUE(arith_basic().grammar.valid());
}

TEST(Validate, StarOverEmptyIsNullableRepetition) {
	const Grammar g = one_rule(star(empty()));
	const auto issues = validate(g);
	ASSERT_EQ(issues.size(), 1u);
	EXPECT_EQ(issues[0].code, IssueCode::NullableRepetition);
	EXPECT_EQ(issues[0].severity, Severity::Error);
	EXPECT_FALSE(g.valid());
	EXPECT_THROW(g.require_valid(), GrammarError);
}

TEST(Validate, UnknownRef) {
	const Grammar g({{"A", ref(RuleId{99})}, {"B", ch('b')}, {"C", ch('c')}}, RuleId{0});
	EXPECT_TRUE(has_code(validate(g), IssueCode::UnknownRef));
	EXPECT_FALSE(g.valid());
}

TEST(Validate, EmptyChoiceAndPath) {
	const Grammar g = one_rule(seq({ch('a'), choice({})}));
	const auto issues = validate(g);
	ASSERT_EQ(issues.size(), 1u);
	EXPECT_EQ(issues[0].code, IssueCode::EmptyChoice);
	EXPECT_EQ(issues[0].path, (std::vector<std::uint32_t>{1}));
}

TEST(Validate, UnreachableRuleIsOnlyAWarning) {
	const Grammar g({{"A", ch('a')}, {"B", ch('b')}}, RuleId{0});
	const auto issues = validate(g);
	ASSERT_EQ(issues.size(), 1u);
	EXPECT_EQ(issues[0].code, IssueCode::UnreachableRule);
	EXPECT_EQ(issues[0].severity, Severity::Warning);
	EXPECT_TRUE(g.valid());
}

TEST(Validate, IsDeterministic) {
	auto make = [] {
		return Grammar({{"A", seq({star(empty()), ref(RuleId{7})})}, {"B", choice({})}}, RuleId{0});
	};
	EXPECT_EQ(validate(make()), validate(make()));
}

TEST(Validate, BadStartRule) {
	const Grammar g({{"A", ch('a')}}, RuleId{3});
	EXPECT_TRUE(has_code(validate(g), IssueCode::UnknownRef));
}

TEST(Grammar, DuplicateNamesRejected) {
	EXPECT_THROW(Grammar({{"A", ch('a')}, {"A", ch('b')}}, RuleId{0}), std::invalid_argument);
}

TEST(Grammar, LookupAndEquality) {
	const Grammar g = arith_basic().grammar;
	ASSERT_TRUE(g.find("Primary"));
	EXPECT_EQ(g.name(*g.find("Primary")), "Primary");
	EXPECT_FALSE(g.find("Nope"));
	EXPECT_EQ(g, arith_basic().grammar);
	EXPECT_FALSE(g == arith_left_assoc().grammar);
	EXPECT_THROW(g.rule(RuleId{42}), std::out_of_range);
}

TEST(GrammarBuilder, UndefinedAndRedefinedRules) {
	GrammarBuilder b;
	b.define("A", ref(b.declare("B")));
	EXPECT_THROW(b.build(), std::invalid_argument);
	b.define("B", ch('b'));
	EXPECT_NO_THROW(b.build());
	EXPECT_THROW({
		b.define("B", ch('c'));
		b.build();
	}, std::invalid_argument);
}

TEST(Describe, PrecedenceAwarePrinting) {
	const Grammar g = arith_basic().grammar;
	EXPECT_EQ(describe(g, g.rule(RuleId{0}).body), "Multitive '+' Additive / Multitive");
	EXPECT_EQ(describe(seq({choice({ch('a'), ch('b')}), star(seq({ch('c'), ch('d')}))})), "('a' / 'b') ('c' 'd')*");
	EXPECT_EQ(describe(not_(any())), "!.");
	EXPECT_EQ(describe(cls(U"^a-z\\]")), "[^a-z\\]]");
	EXPECT_EQ(describe(lit(U"==")), "\"==\"");
	EXPECT_EQ(describe(empty()), "()");
	EXPECT_EQ(describe(ref(RuleId{2})), "#2");
}

TEST(CharClass, ParseAndContains) {
	const CharClass digits = CharClass::parse(U"0-9");
	EXPECT_TRUE(digits.contains(U'5'));
	EXPECT_FALSE(digits.contains(U'a'));
	const CharClass ws = CharClass::parse(U" \\t\\n");
	EXPECT_TRUE(ws.contains(U'\t'));
	EXPECT_TRUE(ws.contains(U' '));
	const CharClass neg = CharClass::parse(U"^a");
	EXPECT_FALSE(neg.contains(U'a'));
	EXPECT_TRUE(neg.contains(U'b'));
	EXPECT_TRUE(CharClass::parse(U"\\-+").contains(U'-'));
	EXPECT_THROW(CharClass::parse(U"z-a"), std::invalid_argument);
}

// A rule is nullable iff the naive interpreter can succeed on it at the end
// of some input without consuming anything; for the catalog grammars the
// empty input and the end of each alphabet character are enough.
TEST(Nullable, AgreesWithNaiveOnCatalogRules) {
	for (const auto& [name, entry] : registry()) {
		if (entry.traits.left_recursive)
			continue;
		const Grammar& g = entry.grammar;
		for (std::uint32_t r = 0; r < g.rule_count(); ++r) {
			const RuleId rule{r};
			bool empty_match = false;
			std::vector<std::u32string> inputs{U""};
			for (char32_t c : entry.alphabet)
				inputs.push_back(std::u32string(1, c));
			for (const auto& in : inputs) {
				const auto rep = naive_parse(g, rule, 0, in);
				empty_match = empty_match || (rep.verdict.success && rep.verdict.end == 0);
			}
			EXPECT_EQ(g.rule_nullable(rule), empty_match) << name << "." << g.name(rule);
		}
	}
}
