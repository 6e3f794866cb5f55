#include <gtest/gtest.h>

#include <algorithm>

#include "packrat/catalog.hpp"
#include "packrat/engine.hpp"

using namespace packrat;
using namespace packrat::peg;

namespace {

RuleId id(const Grammar& g, std::string_view name) { return *g.find(name); }

std::int64_t value_at(const CatalogEntry& e, ParseSession& s, std::string_view rule, Pos pos) {
	const Outcome o = s.apply(id(e.grammar, rule), pos);
	EXPECT_TRUE(o.success);
	return (*e.evaluator)(s.node(o.node)).as_int();
}

bool contains(const std::vector<std::string>& v, std::string_view x) {
	return std::find(v.begin(), v.end(), x) != v.end();
}

// Children are ordered, contiguous, inside the parent, and every rule node
// matches its memo cell.
void check_tree(const ParseTreeNode& n) {
	Pos cur = n.start();
	for (auto c : n.children()) {
		EXPECT_EQ(c.start(), cur);
		EXPECT_LE(c.start(), c.end());
		cur = c.end();
		check_tree(c);
	}
	if (n.child_count() > 0)
		EXPECT_LE(cur, n.end());
	if (n.is_rule()) {
		const auto cell = n.session().cell(n.rule(), n.start());
		ASSERT_TRUE(cell);
		EXPECT_EQ(cell->end, n.end());
	}
}

} // namespace

TEST(Session, Dimensions) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "2*(3+4)");
	EXPECT_EQ(s.columns(), 8u);
	EXPECT_EQ(s.capacity(), 32u);
	EXPECT_EQ(ParseSession(g, "").columns(), 1u);
	EXPECT_EQ(s.stats().cells_evaluated, 0u);
	for (std::uint32_t r = 0; r < 4; ++r)
		for (Pos p = 0; p < 8; ++p)
			EXPECT_EQ(s.cell_state(RuleId{r}, p), CellState::Unevaluated);
}

TEST(Session, RejectsInvalidGrammar) {
	const Grammar bad({{"A", star(empty())}}, RuleId{0});
	EXPECT_THROW(ParseSession(bad, "x"), GrammarError);
}

TEST(Apply, KnownCells) {
	const CatalogEntry e = arith_basic();
	ParseSession s(e.grammar, "2*(3+4)");
	const Outcome add = s.apply(id(e.grammar, "Additive"), 3);
	ASSERT_TRUE(add.success);
	EXPECT_EQ(add.end + 1, 7u); // remainder column C7
	EXPECT_EQ((*e.evaluator)(s.node(add.node)).as_int(), 7);
	const Outcome prim = s.apply(id(e.grammar, "Primary"), 2);
	ASSERT_TRUE(prim.success);
	EXPECT_EQ(prim.end + 1, 8u);
	EXPECT_EQ((*e.evaluator)(s.node(prim.node)).as_int(), 7);
}

TEST(Apply, MemoizedResultIsIdentical) {
	const CatalogEntry e = arith_basic();
	ParseSession s(e.grammar, "2*(3+4)");
	const Outcome a = s.apply(e.grammar.start(), 0);
	const Stats before = s.stats();
	const Outcome b = s.apply(e.grammar.start(), 0);
	EXPECT_EQ(a.success, b.success);
	EXPECT_EQ(a.end, b.end);
	EXPECT_EQ(a.node, b.node);
	EXPECT_EQ(s.stats().cells_evaluated, before.cells_evaluated);
	EXPECT_EQ(s.stats().expr_steps, before.expr_steps);
	EXPECT_EQ(value_at(e, s, "Additive", 0), 14);
}

TEST(Apply, LeftRecursionIsReported) {
	const CatalogEntry e = left_recursive_arith();
	for (const char* input : {"", "1", "1+2", "((("}) {
		ParseSession s(e.grammar, input);
		try {
			s.apply(e.grammar.start(), 0);
			FAIL() << "no error on '" << input << "'";
		} catch (const LeftRecursionError& err) {
			ASSERT_FALSE(err.cycle().empty());
			EXPECT_EQ(err.cycle().front(), (CellCoord{id(e.grammar, "Additive"), 0}));
			EXPECT_NE(std::string(err.what()).find("Additive@C1"), std::string::npos) << err.what();
		}
		// The session is poisoned; the in-progress cell stays visible.
		EXPECT_TRUE(s.failed());
		EXPECT_THROW(s.apply(id(e.grammar, "Decimal"), 0), LeftRecursionError);
		EXPECT_EQ(s.cell_state(e.grammar.start(), 0), CellState::InProgress);
	}
}

TEST(Apply, IndirectLeftRecursionCycle) {
	const Grammar g = Grammar({
		{"A", choice({seq({ref(RuleId{1}), ch('a')}), ch('a')})},
		{"B", seq({opt(ch('b')), ref(RuleId{0})})},
	}, RuleId{0});
	ParseSession s(g, "ba");
	try {
		s.apply(RuleId{0}, 0);
		FAIL();
	} catch (const LeftRecursionError& err) {
		// A@0 -> B@0 consumes 'b', then A@1 -> B@1 -> A@1.
		EXPECT_EQ(err.cycle().front(), (CellCoord{RuleId{0}, 1}));
		EXPECT_EQ(err.cycle().size(), 2u);
	}
}

TEST(Apply, PositionOutOfRange) {
	ParseSession s(arith_basic().grammar, "1");
	EXPECT_THROW(s.apply(RuleId{0}, 2), std::out_of_range);
	EXPECT_THROW(s.apply(RuleId{9}, 0), std::out_of_range);
	EXPECT_NO_THROW(s.apply(RuleId{0}, 1));
}

TEST(EvalExpr, Terminals) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "+3");
	EXPECT_EQ(to_verdict(s.eval_expr(ch('+'), 0)), Verdict::match(1));
	EXPECT_EQ(to_verdict(s.eval_expr(not_(ch('+')), 0)), Verdict::fail());
	EXPECT_EQ(to_verdict(s.eval_expr(not_(ch('+')), 1)), Verdict::match(1));
	EXPECT_EQ(to_verdict(s.eval_expr(and_(ch('3')), 1)), Verdict::match(1));
	EXPECT_EQ(to_verdict(s.eval_expr(any(), 2)), Verdict::fail());
	EXPECT_EQ(to_verdict(s.eval_expr(end_of_input(), 2)), Verdict::match(2));
	EXPECT_EQ(to_verdict(s.eval_expr(cls(U"0-9"), 1)), Verdict::match(2));
	EXPECT_EQ(to_verdict(s.eval_expr(empty(), 2)), Verdict::match(2));
}

TEST(EvalExpr, OrderedChoiceTakesFirstMatch) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "==");
	EXPECT_EQ(to_verdict(s.eval_expr(choice({lit(U"=="), lit(U"=")}), 0)), Verdict::match(2));
	EXPECT_EQ(to_verdict(s.eval_expr(choice({lit(U"="), lit(U"==")}), 0)), Verdict::match(1));
}

TEST(EvalExpr, SequenceBacktracksAsAWhole) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "ab");
	EXPECT_FALSE(s.eval_expr(seq({ch('a'), ch('c')}), 0).success);
	EXPECT_EQ(to_verdict(s.eval_expr(choice({seq({ch('a'), ch('c')}), seq({ch('a'), ch('b')})}), 0)),
		Verdict::match(2));
}

TEST(EvalExpr, RepetitionIsGreedy) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "aaab");
	EXPECT_EQ(to_verdict(s.eval_expr(star(ch('a')), 0)), Verdict::match(3));
	EXPECT_EQ(to_verdict(s.eval_expr(star(ch('b')), 0)), Verdict::match(0));
	EXPECT_EQ(to_verdict(s.eval_expr(plus(ch('b')), 0)), Verdict::fail());
	EXPECT_EQ(to_verdict(s.eval_expr(plus(ch('b')), 3)), Verdict::match(4));
	EXPECT_EQ(to_verdict(s.eval_expr(opt(ch('b')), 0)), Verdict::match(0));
	// Greedy: a* never gives characters back.
	EXPECT_FALSE(s.eval_expr(seq({star(ch('a')), ch('a')}), 0).success);
}

TEST(EvalExpr, PredicatesAddNoChildren) {
	const CatalogEntry e = arith_lexed();
	ParseSession s(e.grammar, "1+2");
	const Outcome o = s.apply(id(e.grammar, "Additive"), 0);
	ASSERT_TRUE(o.success);
	const ParseTreeNode n = s.node(o.node);
	ASSERT_EQ(n.child_count(), 3u); // Multitive Symbol Additive; &'+' is absent
	EXPECT_EQ(n.child(0).rule_name(), "Multitive");
	EXPECT_EQ(n.child(1).rule_name(), "Symbol");
	EXPECT_EQ(n.child(2).rule_name(), "Additive");
}

TEST(ParseComplete, Arith) {
	const CatalogEntry e = arith_basic();
	ParseSession s(e.grammar, "2*(3+4)");
	const ParseTreeNode root = s.parse_complete();
	EXPECT_EQ((*e.evaluator)(root).as_int(), 14);
	EXPECT_EQ(root.start(), 0u);
	EXPECT_EQ(root.end(), 7u);
	check_tree(root);
}

TEST(ParseComplete, PegLimitation) {
	const Grammar g = peg_limitation().grammar;
	ParseSession ok(g, "xxx");
	EXPECT_NO_THROW(ok.parse_complete());
	ParseSession bad(g, "xxxxx");
	EXPECT_THROW(bad.parse_complete(), ParseFailedError);
	EXPECT_EQ(bad.apply(g.start(), 0).end, 3u);
}

TEST(ParseComplete, PrefixMatchReportsEndOfInput) {
	ParseSession s(arith_basic().grammar, "1)");
	try {
		s.parse_complete();
		FAIL();
	} catch (const ParseFailedError& e) {
		EXPECT_EQ(e.position(), 1u);
		EXPECT_TRUE(contains(e.expected(), "end of input"));
	}
}

TEST(Stats, BoundedByMatrixSize) {
	const Grammar g = arith_basic().grammar;
	for (const char* in : {"", "1", "2*(3+4)", "((((1))))", "1+2+3*4*5", "+*("}) {
		ParseSession s(g, in);
		try {
			s.parse_complete();
		} catch (const ParseFailedError&) {
		}
		const Stats st = s.stats();
		EXPECT_LE(st.cells_evaluated, g.rule_count() * s.columns());
		EXPECT_EQ(st.cells_evaluated, count_done_cells(s));
		EXPECT_GT(st.memo_bytes_estimate, 0u);
		EXPECT_GE(st.max_active_depth, 1u);
	}
}

TEST(Stats, CountersNeverDecrease) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "1+2*3");
	Stats prev = s.stats();
	for (std::uint32_t r = 0; r < g.rule_count(); ++r) {
		for (Pos p = 0; p <= s.size(); ++p) {
			s.apply(RuleId{r}, p);
			const Stats cur = s.stats();
			EXPECT_GE(cur.cells_evaluated, prev.cells_evaluated);
			EXPECT_GE(cur.expr_steps, prev.expr_steps);
			EXPECT_GE(cur.max_active_depth, prev.max_active_depth);
			EXPECT_GE(cur.memo_bytes_estimate, prev.memo_bytes_estimate);
			EXPECT_GE(cur.rule_invocations, prev.rule_invocations);
			prev = cur;
		}
	}
}

TEST(FurthestFailure, UnclosedParenthesis) {
	ParseSession s(arith_basic().grammar, "2*(3+4");
	EXPECT_FALSE(s.furthest_failure().attempted);
	EXPECT_THROW(s.parse_complete(), ParseFailedError);
	const FailureReport f = s.furthest_failure();
	EXPECT_EQ(f.position, 6u); // the end of the 6-character input
	EXPECT_TRUE(contains(f.expected, "')'"));
	try {
		s.parse_complete();
	} catch (const ParseFailedError& e) {
		EXPECT_EQ(e.position(), 6u);
		EXPECT_NE(std::string(e.what()).find("column 7"), std::string::npos);
	}
}

TEST(FurthestFailure, DanglingOperator) {
	ParseSession s(arith_basic().grammar, "2*");
	EXPECT_THROW(s.parse_complete(), ParseFailedError);
	const FailureReport f = s.furthest_failure();
	EXPECT_EQ(f.position, 2u);
	EXPECT_TRUE(contains(f.expected, "'('"));
	EXPECT_TRUE(contains(f.expected, "[0-9]"));
}

TEST(FurthestFailure, SuccessfulParseStillRecordsLookahead) {
	ParseSession s(arith_basic().grammar, "1+2");
	s.parse_complete();
	const FailureReport f = s.furthest_failure();
	EXPECT_EQ(f.position, 3u);
	EXPECT_TRUE(contains(f.expected, "'+'"));
	EXPECT_TRUE(contains(f.expected, "'*'"));
	EXPECT_TRUE(std::is_sorted(f.expected.begin(), f.expected.end()));
}

TEST(FurthestFailure, PredicateInternalsAreNotReported) {
	const Grammar g({{"S", seq({not_(ch('x')), ch('y')})}}, RuleId{0});
	ParseSession s(g, "x");
	EXPECT_THROW(s.parse_complete(), ParseFailedError);
	const FailureReport f = s.furthest_failure();
	EXPECT_EQ(f.position, 0u);
	EXPECT_EQ(f.expected, std::vector<std::string>{"!'x'"});
}

TEST(Depth, LimitGivesCleanError) {
	const Grammar g = arith_basic().grammar;
	const std::string deep = std::string(50, '(') + "1" + std::string(50, ')');
	ParseSession s(g, deep, SessionOptions{20});
	EXPECT_THROW(s.apply(g.start(), 0), DepthExceededError);
	EXPECT_TRUE(s.failed());
}

TEST(Depth, DeepNestingNeedsNoCallStack) {
	const Grammar g = arith_basic().grammar;
	const std::string deep = std::string(30000, '(') + "1" + std::string(30000, ')');
	ParseSession s(g, deep);
	const ParseTreeNode root = s.parse_complete();
	EXPECT_EQ(root.end(), deep.size());
	EXPECT_GE(s.stats().max_active_depth, 90000u);
}

TEST(Tree, NodeAccessors) {
	const CatalogEntry e = arith_basic();
	ParseSession s(e.grammar, "1+2");
	const ParseTreeNode root = s.parse_complete();
	EXPECT_EQ(root.rule_name(), "Additive");
	EXPECT_EQ(root.child_count(), 3u);
	const ParseTreeNode plus = root.child(1);
	EXPECT_TRUE(plus.is_terminal());
	EXPECT_EQ(plus.text(), U"+");
	EXPECT_THROW(plus.rule(), std::logic_error);
	EXPECT_THROW(root.child(3), std::out_of_range);
	EXPECT_EQ(s.eval_expr(ch('1'), 0).success, true);
	EXPECT_EQ(s.node(s.eval_expr(ch('1'), 0).node).kind(), NodeKind::Group);
}

TEST(CharRow, TracksInspectedPositions) {
	const Grammar g = arith_basic().grammar;
	ParseSession s(g, "12");
	EXPECT_FALSE(s.char_accessed(0));
	s.apply(g.start(), 0);
	EXPECT_TRUE(s.char_accessed(0));
	EXPECT_TRUE(s.char_accessed(1));
	EXPECT_FALSE(s.char_accessed(2)); // parsing stops after the first digit
}
