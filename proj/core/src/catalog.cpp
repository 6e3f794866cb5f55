#include "packrat/catalog.hpp"

#include <unordered_map>

#include "packrat/utf8.hpp"

namespace packrat {

using namespace peg;

namespace {

/// Declares every rule up front so rule ids follow the listed order.
struct Rules {
	GrammarBuilder b;

	explicit Rules(std::initializer_list<std::string_view> names) {
		for (auto n : names)
			b.declare(n);
	}
	PegExpr operator()(std::string_view name) { return ref(b.declare(name)); }
	void def(std::string_view name, PegExpr body) { b.define(b.declare(name), std::move(body)); }
	Grammar build() const { return b.build(); }
};

std::vector<ParseTreeNode> rule_children(const ParseTreeNode& n) {
	std::vector<ParseTreeNode> out;
	for (auto c : n.children())
		if (c.is_rule())
			out.push_back(c);
	return out;
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
	return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
	return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
	return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

/// Evaluator built from one function per rule name; each gets the node and
/// a callback for evaluating sub-nodes.
class RuleDispatch {
public:
	using Recurse = std::function<SemanticValue(const ParseTreeNode&)>;
	using Action = std::function<SemanticValue(const ParseTreeNode&, const Recurse&)>;

	RuleDispatch& on(std::string name, Action a) {
		actions_->emplace(std::move(name), std::move(a));
		return *this;
	}

	Evaluator evaluator() const {
		auto actions = actions_;
		return [actions](const ParseTreeNode& root) {
			Recurse recurse;
			recurse = [&](const ParseTreeNode& n) -> SemanticValue {
				if (!n.is_rule())
					return SemanticValue(encode_utf8(n.text()));
				auto it = actions->find(n.rule_name());
				if (it == actions->end())
					throw std::logic_error("no evaluator action for rule '" + n.rule_name() + "'");
				return it->second(n, recurse);
			};
			return recurse(root);
		};
	}

private:
	std::shared_ptr<std::unordered_map<std::string, Action>> actions_ =
		std::make_shared<std::unordered_map<std::string, Action>>();
};

SemanticValue digit_value(const ParseTreeNode& n, const RuleDispatch::Recurse&) {
	return std::int64_t{n.text().front() - U'0'};
}

/// X <- Y op X / Y, folded to the right.
RuleDispatch::Action right_fold(std::int64_t (*op)(std::int64_t, std::int64_t)) {
	return [op](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
		auto kids = rule_children(n); // [operand] or [operand, rest]
		std::int64_t v = r(kids.front()).as_int();
		if (kids.size() == 2)
			v = op(v, r(kids[1]).as_int());
		return v;
	};
}

/// The operand rules shared by the arithmetic grammars' evaluators.
SemanticValue first_rule_child(const ParseTreeNode& n, const RuleDispatch::Recurse& r) {
	return r(rule_children(n).front());
}

/// Like first_rule_child but skipping token rules (Symbol) in between.
SemanticValue first_child_named(const ParseTreeNode& n, const RuleDispatch::Recurse& r, std::string_view name) {
	for (const auto& c : rule_children(n))
		if (c.rule_name() == name)
			return r(c);
	throw std::logic_error("expected a '" + std::string(name) + "' child");
}

} // namespace

CatalogEntry arith_basic() {
	Rules R{"Additive", "Multitive", "Primary", "Decimal"};
	R.def("Additive", choice({seq({R("Multitive"), ch('+'), R("Additive")}), R("Multitive")}));
	R.def("Multitive", choice({seq({R("Primary"), ch('*'), R("Multitive")}), R("Primary")}));
	R.def("Primary", choice({seq({ch('('), R("Additive"), ch(')')}), R("Decimal")}));
	R.def("Decimal", cls(U"0-9"));

	RuleDispatch d;
	d.on("Additive", right_fold(wrap_add))
		.on("Multitive", right_fold(wrap_mul))
		.on("Primary", first_rule_child)
		.on("Decimal", digit_value);
	return {"arith", "right-associative + and * over single digits", R.build(), d.evaluator(),
		U"07+*()", {}};
}

CatalogEntry arith_left_assoc() {
	Rules R{"Additive", "AdditiveSuffix", "Multitive", "Primary", "Decimal"};
	R.def("Additive", seq({R("Multitive"), R("AdditiveSuffix")}));
	R.def("AdditiveSuffix", choice({
		seq({ch('+'), R("Multitive"), R("AdditiveSuffix")}),
		seq({ch('-'), R("Multitive"), R("AdditiveSuffix")}),
		empty(),
	}));
	R.def("Multitive", choice({seq({R("Primary"), ch('*'), R("Multitive")}), R("Primary")}));
	R.def("Primary", choice({seq({ch('('), R("Additive"), ch(')')}), R("Decimal")}));
	R.def("Decimal", cls(U"0-9"));

	RuleDispatch d;
	d.on("Additive", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
		auto kids = rule_children(n);
		std::int64_t v = r(kids[0]).as_int();
		const SemanticValue suffix = r(kids[1]);
		for (const auto& step : suffix.as_sequence())
			v = step.first().as_char() == U'+' ? wrap_add(v, step.second().as_int())
			                                   : wrap_sub(v, step.second().as_int());
		return v;
	})
		// Value: the list of (operator, operand) pairs, left to right.
		.on("AdditiveSuffix", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
			SemanticValue::Sequence steps;
			if (n.child_count() == 0)
				return steps;
			const char32_t op = n.child(0).text().front();
			auto kids = rule_children(n);
			steps.emplace_back(SemanticValue(op), r(kids[0]));
			const SemanticValue rest = r(kids[1]);
			for (const auto& s : rest.as_sequence())
				steps.push_back(s);
			return steps;
		})
		.on("Multitive", right_fold(wrap_mul))
		.on("Primary", first_rule_child)
		.on("Decimal", digit_value);
	return {"arith_left_assoc", "left-associative + and - via a suffix rule", R.build(), d.evaluator(),
		U"07+-*()", {}};
}

CatalogEntry arith_lexed() {
	Rules R{"Start", "Additive", "Multitive", "Primary", "Decimal", "Digits", "Digit", "Symbol", "Whitespace"};
	R.def("Start", seq({R("Whitespace"), R("Additive")}));
	R.def("Additive", choice({seq({R("Multitive"), and_(ch('+')), R("Symbol"), R("Additive")}), R("Multitive")}));
	R.def("Multitive", choice({seq({R("Primary"), and_(ch('*')), R("Symbol"), R("Multitive")}), R("Primary")}));
	R.def("Primary", choice({
		seq({and_(ch('(')), R("Symbol"), R("Additive"), and_(ch(')')), R("Symbol")}),
		R("Decimal"),
	}));
	R.def("Decimal", seq({R("Digits"), R("Whitespace")}));
	R.def("Digits", choice({seq({R("Digit"), R("Digits")}), R("Digit")}));
	R.def("Digit", cls(U"0-9"));
	R.def("Symbol", seq({cls(U"\\-+*/%()"), R("Whitespace")}));
	R.def("Whitespace", choice({seq({cls(U" \\t\\n\\r\\f\\v"), R("Whitespace")}), empty()}));

	auto fold_over = [](std::int64_t (*op)(std::int64_t, std::int64_t)) {
		return [op](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
			auto kids = rule_children(n); // [operand] or [operand, Symbol, rest]
			std::int64_t v = r(kids.front()).as_int();
			if (kids.size() == 3)
				v = op(v, r(kids[2]).as_int());
			return v;
		};
	};
	RuleDispatch d;
	d.on("Start", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) {
		return first_child_named(n, r, "Additive");
	})
		.on("Additive", fold_over(wrap_add))
		.on("Multitive", fold_over(wrap_mul))
		.on("Primary", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
			auto kids = rule_children(n);
			if (kids.size() == 1)
				return r(kids[0]);
			return first_child_named(n, r, "Additive");
		})
		.on("Decimal", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
			return r(rule_children(n).front()).first();
		})
		// (value, digit count)
		.on("Digits", [](const ParseTreeNode& n, const RuleDispatch::Recurse& r) -> SemanticValue {
			auto kids = rule_children(n);
			const std::int64_t d = r(kids[0]).as_int();
			if (kids.size() == 1)
				return SemanticValue(d, std::int64_t{1});
			const SemanticValue rest = r(kids[1]);
			std::int64_t scale = 1;
			for (std::int64_t i = 0; i < rest.second().as_int(); ++i)
				scale = wrap_mul(scale, 10);
			return SemanticValue(wrap_add(wrap_mul(d, scale), rest.first().as_int()),
				rest.second().as_int() + 1);
		})
		.on("Digit", digit_value)
		.on("Symbol", [](const ParseTreeNode& n, const RuleDispatch::Recurse&) -> SemanticValue {
			return n.text().front();
		})
		.on("Whitespace", [](const ParseTreeNode&, const RuleDispatch::Recurse&) -> SemanticValue {
			return Unit{};
		});
	return {"arith_lexed", "scannerless arithmetic with whitespace and multi-digit numbers", R.build(),
		d.evaluator(), U"07+-*() ", {}};
}

CatalogEntry lookahead_ab() {
	Rules R{"S", "A", "B"};
	// The end markers keep ordered choice from committing to A when A only
	// matches a prefix (as it does on x^n z y^2n).
	R.def("S", choice({seq({R("A"), end_of_input()}), seq({R("B"), end_of_input()})}));
	R.def("A", choice({seq({ch('x'), R("A"), ch('y')}), seq({ch('x'), ch('z'), ch('y')})}));
	R.def("B", choice({seq({ch('x'), R("B"), ch('y'), ch('y')}), seq({ch('x'), ch('z'), ch('y'), ch('y')})}));
	CatalogTraits t;
	t.non_lr_k = true;
	return {"lookahead_ab", "x^n z y^n or x^n z y^2n; needs unbounded lookahead", R.build(), std::nullopt,
		U"xyz", t};
}

namespace {

// Shared by both composition grammars: alternatives are ordered longest
// first so ordered choice does not commit to a shorter prefix.
void composition_common(Rules& R, PegExpr operand) {
	R.def("R", choice({
		seq({R("A"), R("EQ"), R("A")}),
		seq({R("A"), R("NE"), R("A")}),
		R("A"),
	}));
	R.def("A", choice({
		seq({operand, ch('+'), operand}),
		seq({operand, ch('-'), operand}),
		operand,
	}));
	R.def("ID", choice({seq({ch('a'), R("ID")}), ch('a')}));
	R.def("EQ", seq({ch('='), ch('=')}));
	R.def("NE", seq({ch('!'), ch('=')}));
}

} // namespace

CatalogEntry composition_assign() {
	Rules R{"S", "R", "A", "P", "ID", "EQ", "NE"};
	R.def("S", choice({seq({R("ID"), ch('='), R("R")}), R("R")}));
	composition_common(R, R("P"));
	R.def("P", choice({R("ID"), seq({ch('('), R("R"), ch(')')})}));
	return {"composition_assign", "assignment over relational over additive expressions", R.build(),
		std::nullopt, U"a=!+-()", {}};
}

CatalogEntry composition_lvalue() {
	Rules R{"S", "R", "A", "P", "PBase", "PSuffix", "L", "LBase", "LSuffix", "ID", "EQ", "NE"};
	R.def("S", choice({seq({R("L"), ch('='), R("R")}), R("R")}));
	composition_common(R, R("P"));
	// P <- P '[' A ']' / ID / '(' R ')' and L <- L '[' A ']' / ID / '(' L ')'
	// with the left recursion turned into suffix rules.
	R.def("P", seq({R("PBase"), R("PSuffix")}));
	R.def("PBase", choice({R("ID"), seq({ch('('), R("R"), ch(')')})}));
	R.def("PSuffix", choice({seq({ch('['), R("A"), ch(']'), R("PSuffix")}), empty()}));
	R.def("L", seq({R("LBase"), R("LSuffix")}));
	R.def("LBase", choice({R("ID"), seq({ch('('), R("L"), ch(')')})}));
	R.def("LSuffix", choice({seq({ch('['), R("A"), ch(']'), R("LSuffix")}), empty()}));
	CatalogTraits t;
	t.non_lr_k = true;
	return {"composition_lvalue", "composition_assign with indexed lvalues", R.build(), std::nullopt,
		U"a=!+-()[]", t};
}

CatalogEntry peg_limitation() {
	Rules R{"S"};
	R.def("S", choice({seq({ch('x'), R("S"), ch('x')}), ch('x')}));
	CatalogTraits t;
	t.peg_cfg_divergent = true;
	return {"peg_limitation", "S <- 'x' S 'x' / 'x'; accepts only x^(2^k - 1)", R.build(), std::nullopt,
		U"x", t};
}

CatalogEntry left_recursive_arith() {
	Rules R{"Additive", "Multitive", "Primary", "Decimal"};
	R.def("Additive", choice({
		seq({R("Additive"), ch('+'), R("Multitive")}),
		seq({R("Additive"), ch('-'), R("Multitive")}),
		R("Multitive"),
	}));
	R.def("Multitive", choice({seq({R("Primary"), ch('*'), R("Multitive")}), R("Primary")}));
	R.def("Primary", choice({seq({ch('('), R("Additive"), ch(')')}), R("Decimal")}));
	R.def("Decimal", cls(U"0-9"));
	CatalogTraits t;
	t.left_recursive = true;
	return {"left_recursive_arith", "directly left-recursive Additive", R.build(), std::nullopt,
		U"0123456789+-*()", t};
}

CatalogEntry blowup_family() {
	Rules R{"S"};
	R.def("S", choice({
		seq({ch('a'), R("S"), ch('b')}),
		seq({ch('a'), R("S"), ch('c')}),
		ch('a'),
	}));
	return {"blowup", "S <- 'a' S 'b' / 'a' S 'c' / 'a'; exponential without memoization", R.build(),
		std::nullopt, U"abc", {}};
}

std::u32string blowup_input(std::size_t k) {
	return std::u32string(k, U'a') + U'b';
}

const std::map<std::string, CatalogEntry, std::less<>>& registry() {
	static const auto entries = [] {
		std::map<std::string, CatalogEntry, std::less<>> m;
		for (auto make : {arith_basic, arith_left_assoc, arith_lexed, lookahead_ab, composition_assign,
			     composition_lvalue, peg_limitation, left_recursive_arith, blowup_family}) {
			CatalogEntry e = make();
			const std::string name = e.name;
			if (!m.emplace(name, std::move(e)).second)
				throw std::logic_error("duplicate catalog name '" + name + "'");
		}
		return m;
	}();
	return entries;
}

const CatalogEntry& lookup(std::string_view name) {
	const auto& r = registry();
	auto it = r.find(name);
	if (it == r.end())
		throw UnknownGrammarError(std::string(name));
	return it->second;
}

SemanticValue evaluate(const CatalogEntry& entry, std::u32string_view input) {
	if (!entry.evaluator)
		throw std::logic_error("grammar '" + entry.name + "' has no evaluator");
	ParseSession session(entry.grammar, std::u32string(input));
	return (*entry.evaluator)(session.parse_complete());
}

CellFormatter value_formatter(const CatalogEntry& entry) {
	if (!entry.evaluator)
		return {};
	return [eval = *entry.evaluator](const ParseTreeNode& n) -> std::optional<std::string> {
		return to_string(eval(n));
	};
}

} // namespace packrat
