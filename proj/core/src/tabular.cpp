#include <algorithm>

#include "packrat/oracles.hpp"

namespace packrat {

namespace {

// Rules that `e` may invoke at the position where `e` starts.
void first_refs(const Grammar& g, const PegExpr& e, std::vector<RuleId>& out) {
	switch (e.kind()) {
	case ExprKind::Ref:
		out.push_back(e.rule());
		break;
	case ExprKind::Seq:
		for (const auto& part : e.parts()) {
			first_refs(g, part, out);
			if (!nullable(g, part))
				break;
		}
		break;
	case ExprKind::Choice:
		for (const auto& alt : e.parts())
			first_refs(g, alt, out);
		break;
	case ExprKind::Star:
	case ExprKind::Plus:
	case ExprKind::Opt:
	case ExprKind::And:
	case ExprKind::Not:
		first_refs(g, e.body(), out);
		break;
	default:
		break;
	}
}

bool uses_repetition(const PegExpr& e) {
	if (e.is_repetition())
		return true;
	return std::any_of(e.parts().begin(), e.parts().end(), uses_repetition);
}

class TabularFiller {
public:
	TabularFiller(const Grammar& g, std::u32string_view input, TabularMatrix& m)
		: grammar_(g), input_(input), m_(m), filled_(m.cells.size(), 0) {}

	void fill(RuleId rule, Pos pos) {
		current_ = pos;
		const Verdict v = eval(grammar_.rule(rule).body, pos);
		const std::size_t slot = std::size_t{rule.index} * m_.columns + pos;
		if (filled_[slot])
			throw std::logic_error("tabular cell filled twice");
		m_.cells[slot] = v;
		filled_[slot] = 1;
		m_.fill_order.push_back(CellCoord{rule, pos});
	}

private:
	const Grammar& grammar_;
	std::u32string_view input_;
	TabularMatrix& m_;
	std::vector<std::uint8_t> filled_;
	Pos current_ = 0;

	Verdict lookup(RuleId rule, Pos pos) const {
		const std::size_t slot = std::size_t{rule.index} * m_.columns + pos;
		if (!filled_[slot])
			throw std::logic_error("tabular fill read unfilled cell " + grammar_.name(rule) + "@C" +
				std::to_string(pos + 1) + " while filling column C" + std::to_string(current_ + 1));
		return m_.cells[slot];
	}

	Verdict eval(const PegExpr& e, Pos pos) const {
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
		case ExprKind::Literal:
			return input_.substr(pos).starts_with(e.literal())
				? Verdict::match(static_cast<Pos>(pos + e.literal().size())) : Verdict::fail();
		case ExprKind::Seq: {
			Pos cur = pos;
			for (const auto& part : e.parts()) {
				const Verdict v = eval(part, cur);
				if (!v.success)
					return Verdict::fail();
				cur = v.end;
			}
			return Verdict::match(cur);
		}
		case ExprKind::Choice:
			for (const auto& alt : e.parts()) {
				const Verdict v = eval(alt, pos);
				if (v.success)
					return v;
			}
			return Verdict::fail();
		case ExprKind::Opt: {
			const Verdict v = eval(e.body(), pos);
			return v.success ? v : Verdict::match(pos);
		}
		case ExprKind::And:
			return eval(e.body(), pos).success ? Verdict::match(pos) : Verdict::fail();
		case ExprKind::Not:
			return eval(e.body(), pos).success ? Verdict::fail() : Verdict::match(pos);
		case ExprKind::Ref:
			return lookup(e.rule(), pos);
		case ExprKind::Star:
		case ExprKind::Plus:
			break;
		}
		throw UnsupportedConstructError("tabular fill does not support repetition");
	}
};

} // namespace

std::vector<RuleId> same_position_order(const Grammar& g) {
	const std::size_t rule_count = g.rule_count();
	std::vector<std::vector<RuleId>> callees(rule_count);
	for (std::uint32_t r = 0; r < rule_count; ++r) {
		first_refs(g, g.rule(RuleId{r}).body, callees[r]);
		std::sort(callees[r].begin(), callees[r].end());
		callees[r].erase(std::unique(callees[r].begin(), callees[r].end()), callees[r].end());
	}

	enum class Mark : std::uint8_t { None, Active, Done };
	std::vector<Mark> mark(rule_count, Mark::None);
	std::vector<RuleId> order;
	std::vector<RuleId> path;

	// Iterative DFS; post-order gives callee-before-caller.
	struct Item {
		RuleId rule;
		std::size_t next;
	};
	for (std::uint32_t root = 0; root < rule_count; ++root) {
		if (mark[root] != Mark::None)
			continue;
		std::vector<Item> stack{{RuleId{root}, 0}};
		mark[root] = Mark::Active;
		while (!stack.empty()) {
			Item& top = stack.back();
			const auto& out = callees[top.rule.index];
			if (top.next == out.size()) {
				mark[top.rule.index] = Mark::Done;
				order.push_back(top.rule);
				stack.pop_back();
				continue;
			}
			const RuleId callee = out[top.next++];
			if (mark[callee.index] == Mark::Done)
				continue;
			if (mark[callee.index] == Mark::Active) {
				std::vector<RuleId> cycle;
				auto it = std::find_if(stack.begin(), stack.end(), [&](const Item& i) { return i.rule == callee; });
				for (; it != stack.end(); ++it)
					cycle.push_back(it->rule);
				std::string what = "same-position cycle: ";
				for (RuleId r : cycle)
					what += g.name(r) + " -> ";
				what += g.name(callee);
				throw SamePositionCycleError(what, std::move(cycle));
			}
			mark[callee.index] = Mark::Active;
			stack.push_back({callee, 0});
		}
	}
	return order;
}

TabularOracle::TabularOracle(Grammar g) : grammar_(std::move(g)) {
	grammar_.require_valid();
	for (const auto& rule : grammar_.rules())
		if (uses_repetition(rule.body))
			throw UnsupportedConstructError("tabular fill does not support repetition (rule '" + rule.name + "')");
	order_ = same_position_order(grammar_);
}

TabularMatrix TabularOracle::parse(std::u32string_view input) const {
	TabularMatrix m;
	m.rule_count = grammar_.rule_count();
	m.columns = input.size() + 1;
	m.cells.assign(m.rule_count * m.columns, Verdict::fail());
	m.fill_order.reserve(m.cells.size());
	TabularFiller filler(grammar_, input, m);
	for (std::size_t col = m.columns; col-- > 0;)
		for (RuleId r : order_)
			filler.fill(r, static_cast<Pos>(col));
	return m;
}

TabularMatrix tabular_parse(const Grammar& g, std::u32string_view input) {
	return TabularOracle(g).parse(input);
}

} // namespace packrat
