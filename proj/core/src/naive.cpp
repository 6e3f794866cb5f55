#include <algorithm>

#include "packrat/oracles.hpp"

namespace packrat {

namespace {

class NaiveParser {
public:
	NaiveParser(const Grammar& g, const NaiveOptions& options)
		: grammar_(g), rules_(g.rules().data()), options_(options) {}

	/// Prepares for a run over `input`, reusing buffers.
	void reset(std::u32string_view input) {
		input_ = input;
		columns_ = input.size() + 1;
		active_.assign(grammar_.rule_count() * columns_, 0);
		stack_.clear();
		report = {};
	}

	Verdict call(RuleId rule, Pos pos) {
		++report.calls;
		if (options_.call_budget != 0 && report.calls > options_.call_budget)
			throw CallBudgetExceededError("naive call budget of " + std::to_string(options_.call_budget) +
				" exhausted", options_.call_budget);
		const std::size_t slot = std::size_t{rule.index} * columns_ + pos;
		if (active_[slot])
			left_recursion(rule, pos);
		if (stack_.size() >= options_.depth_limit)
			throw DepthExceededError("naive recursion depth limit of " + std::to_string(options_.depth_limit) +
				" exceeded", options_.depth_limit);
		active_[slot] = 1;
		stack_.push_back(CellCoord{rule, pos});
		report.max_depth = std::max(report.max_depth, stack_.size());
		const Verdict v = eval(rules_[rule.index].body, pos);
		stack_.pop_back();
		active_[slot] = 0;
		return v;
	}

	NaiveReport report;

private:
	const Grammar& grammar_;
	const Rule* rules_;
	NaiveOptions options_;
	std::u32string_view input_;
	std::size_t columns_ = 1;
	std::vector<std::uint8_t> active_;
	std::vector<CellCoord> stack_;

	[[noreturn]] void left_recursion(RuleId rule, Pos pos) {
		auto first = std::find(stack_.begin(), stack_.end(), CellCoord{rule, pos});
		std::vector<CellCoord> cycle(first, stack_.end());
		std::string what = "left recursion (naive): ";
		for (const auto& c : cycle)
			what += grammar_.name(c.rule) + "@C" + std::to_string(c.pos + 1) + " -> ";
		what += grammar_.name(rule) + "@C" + std::to_string(pos + 1);
		throw LeftRecursionError(what, std::move(cycle));
	}

	// Single characters and references skip a level of eval(); they make
	// up most of the work on backtracking-heavy grammars.
	Verdict step(const PegExpr& e, Pos pos) {
		if (e.kind() == ExprKind::Char)
			return pos < input_.size() && input_[pos] == e.character() ? Verdict::match(pos + 1) : Verdict::fail();
		if (e.kind() == ExprKind::Ref)
			return call(e.rule(), pos);
		return eval(e, pos);
	}

	Verdict eval(const PegExpr& e, Pos pos) {
		const std::size_t n = input_.size();
		switch (e.kind()) {
		case ExprKind::Empty:
			return Verdict::match(pos);
		case ExprKind::AnyChar:
			return pos < n ? Verdict::match(pos + 1) : Verdict::fail();
		case ExprKind::Char:
			return pos < n && input_[pos] == e.character() ? Verdict::match(pos + 1) : Verdict::fail();
		case ExprKind::Class:
			return pos < n && e.char_class().contains(input_[pos]) ? Verdict::match(pos + 1) : Verdict::fail();
		case ExprKind::Literal: {
			const auto& lit = e.literal();
			if (input_.substr(pos).starts_with(lit))
				return Verdict::match(static_cast<Pos>(pos + lit.size()));
			return Verdict::fail();
		}
		case ExprKind::Seq: {
			Pos cur = pos;
			for (const auto& part : e.parts()) {
				const Verdict v = step(part, cur);
				if (!v.success)
					return Verdict::fail();
				cur = v.end;
			}
			return Verdict::match(cur);
		}
		case ExprKind::Choice:
			for (const auto& alt : e.parts()) {
				const Verdict v = step(alt, pos);
				if (v.success)
					return v;
			}
			return Verdict::fail();
		case ExprKind::Star:
		case ExprKind::Plus: {
			Pos cur = pos;
			std::size_t count = 0;
			for (;;) {
				const Verdict v = eval(e.body(), cur);
				if (!v.success || v.end == cur)
					break;
				cur = v.end;
				++count;
			}
			if (e.kind() == ExprKind::Plus && count == 0)
				return Verdict::fail();
			return Verdict::match(cur);
		}
		case ExprKind::Opt: {
			const Verdict v = eval(e.body(), pos);
			return v.success ? v : Verdict::match(pos);
		}
		case ExprKind::And:
			return eval(e.body(), pos).success ? Verdict::match(pos) : Verdict::fail();
		case ExprKind::Not:
			return eval(e.body(), pos).success ? Verdict::fail() : Verdict::match(pos);
		case ExprKind::Ref:
			return call(e.rule(), pos);
		}
		return Verdict::fail();
	}
};

} // namespace

struct NaiveOracle::Impl {
	Grammar grammar;
	NaiveParser parser;

	Impl(Grammar g, const NaiveOptions& options) : grammar(std::move(g)), parser(grammar, options) {}
};

NaiveOracle::NaiveOracle(Grammar g, NaiveOptions options) {
	g.require_valid();
	impl_ = std::make_unique<Impl>(std::move(g), options);
}

NaiveOracle::~NaiveOracle() = default;
NaiveOracle::NaiveOracle(NaiveOracle&&) noexcept = default;
NaiveOracle& NaiveOracle::operator=(NaiveOracle&&) noexcept = default;

NaiveReport NaiveOracle::parse(RuleId rule, Pos pos, std::u32string_view input) {
	if (pos > input.size())
		throw std::out_of_range("naive_parse: position beyond input");
	if (rule.index >= impl_->grammar.rule_count())
		throw std::out_of_range("naive_parse: rule id out of range");
	auto& parser = impl_->parser;
	parser.reset(input);
	const Verdict v = parser.call(rule, pos);
	parser.report.verdict = v;
	return parser.report;
}

NaiveReport naive_parse(const Grammar& g, RuleId rule, Pos pos, std::u32string_view input,
	const NaiveOptions& options) {
	return NaiveOracle(g, options).parse(rule, pos, input);
}

} // namespace packrat
