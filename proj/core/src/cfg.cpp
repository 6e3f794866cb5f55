#include <bit>
#include <functional>

#include "packrat/oracles.hpp"

namespace packrat {

bool PosSet::empty() const {
	for (auto w : words_)
		if (w)
			return false;
	return true;
}

bool PosSet::merge(const PosSet& other) {
	bool changed = false;
	for (std::size_t i = 0; i < words_.size(); ++i) {
		const std::uint64_t before = words_[i];
		words_[i] |= other.words_[i];
		changed |= words_[i] != before;
	}
	return changed;
}

std::vector<Pos> PosSet::elements() const {
	std::vector<Pos> out;
	for (std::size_t i = 0; i < words_.size(); ++i) {
		std::uint64_t w = words_[i];
		while (w) {
			const int bit = std::countr_zero(w);
			out.push_back(static_cast<Pos>(i * 64 + bit));
			w &= w - 1;
		}
	}
	return out;
}

namespace {

void check_expr(const Grammar& g, const Rule& rule, const PegExpr& e) {
	switch (e.kind()) {
	case ExprKind::Star:
	case ExprKind::Plus:
		throw UnsupportedConstructError("CFG reading does not support repetition (rule '" + rule.name + "')");
	case ExprKind::And:
		throw UnsupportedConstructError("CFG reading does not support '&' predicates (rule '" + rule.name + "')");
	case ExprKind::Not:
		if (e.body().kind() != ExprKind::AnyChar)
			throw UnsupportedConstructError("CFG reading only supports the '!.' predicate (rule '" + rule.name + "')");
		return;
	default:
		break;
	}
	for (const auto& p : e.parts())
		check_expr(g, rule, p);
}

} // namespace

void check_cfg_compatible(const Grammar& g) {
	for (const auto& rule : g.rules())
		check_expr(g, rule, rule.body);
}

bool is_cfg_compatible(const Grammar& g) {
	try {
		check_cfg_compatible(g);
		return true;
	} catch (const UnsupportedConstructError&) {
		return false;
	}
}

CfgRecognizer::CfgRecognizer(const Grammar& g, std::u32string_view input)
	: grammar_(g), input_(input), columns_(input.size() + 1),
	  table_(g.rule_count() * columns_, PosSet(columns_)) {
	g.require_valid();
	check_cfg_compatible(g);
	if (columns_ <= 64) {
		fill_small();
		return;
	}
	// Columns to the right are final before a column is started; within a
	// column iterate to the least fixed point.
	for (std::size_t col = columns_; col-- > 0;) {
		const auto pos = static_cast<Pos>(col);
		bool changed = true;
		while (changed) {
			changed = false;
			for (std::uint32_t r = 0; r < g.rule_count(); ++r) {
				const PosSet s = eval(g.rule(RuleId{r}).body, pos);
				changed |= table_[std::size_t{r} * columns_ + pos].merge(s);
			}
		}
	}
}

// Same computation with one machine word per set, for inputs under 64
// characters (the common case for differential checks).
void CfgRecognizer::fill_small() {
	const std::size_t rules = grammar_.rule_count();
	std::vector<std::uint64_t> small(rules * columns_, 0);
	const std::size_t n = input_.size();

	auto bit = [](std::size_t p) { return std::uint64_t{1} << p; };
	std::function<std::uint64_t(const PegExpr&, Pos)> eval_small = [&](const PegExpr& e, Pos pos) -> std::uint64_t {
		switch (e.kind()) {
		case ExprKind::Empty:
			return bit(pos);
		case ExprKind::AnyChar:
			return pos < n ? bit(pos + 1) : 0;
		case ExprKind::Char:
			return pos < n && input_[pos] == e.character() ? bit(pos + 1) : 0;
		case ExprKind::Class:
			return pos < n && e.char_class().contains(input_[pos]) ? bit(pos + 1) : 0;
		case ExprKind::Literal:
			return input_.substr(pos).starts_with(e.literal()) ? bit(pos + e.literal().size()) : 0;
		case ExprKind::Seq: {
			std::uint64_t cur = bit(pos);
			for (const auto& part : e.parts()) {
				std::uint64_t next = 0;
				for (std::uint64_t w = cur; w; w &= w - 1)
					next |= eval_small(part, static_cast<Pos>(std::countr_zero(w)));
				cur = next;
				if (!cur)
					break;
			}
			return cur;
		}
		case ExprKind::Choice: {
			std::uint64_t out = 0;
			for (const auto& alt : e.parts())
				out |= eval_small(alt, pos);
			return out;
		}
		case ExprKind::Opt:
			return eval_small(e.body(), pos) | bit(pos);
		case ExprKind::Not:
			return pos == n ? bit(pos) : 0;
		case ExprKind::Ref:
			return small[std::size_t{e.rule().index} * columns_ + pos];
		default:
			throw UnsupportedConstructError("unsupported construct in CFG reading");
		}
	};

	for (std::size_t col = columns_; col-- > 0;) {
		const auto pos = static_cast<Pos>(col);
		bool changed = true;
		while (changed) {
			changed = false;
			for (std::uint32_t r = 0; r < rules; ++r) {
				auto& cell = small[std::size_t{r} * columns_ + pos];
				const std::uint64_t v = cell | eval_small(grammar_.rule(RuleId{r}).body, pos);
				changed |= v != cell;
				cell = v;
			}
		}
	}
	for (std::size_t i = 0; i < small.size(); ++i)
		for (std::uint64_t w = small[i]; w; w &= w - 1)
			table_[i].insert(static_cast<Pos>(std::countr_zero(w)));
}

const PosSet& CfgRecognizer::ends(RuleId rule, Pos pos) const {
	if (pos >= columns_)
		throw std::out_of_range("cfg ends: position beyond input");
	return table_.at(std::size_t{rule.index} * columns_ + pos);
}

bool CfgRecognizer::accepts() const {
	return ends(grammar_.start(), 0).contains(static_cast<Pos>(input_.size()));
}

PosSet CfgRecognizer::eval(const PegExpr& e, Pos pos) const {
	const std::size_t n = input_.size();
	PosSet out(columns_);
	switch (e.kind()) {
	case ExprKind::Empty:
		out.insert(pos);
		break;
	case ExprKind::AnyChar:
		if (pos < n)
			out.insert(pos + 1);
		break;
	case ExprKind::Char:
		if (pos < n && input_[pos] == e.character())
			out.insert(pos + 1);
		break;
	case ExprKind::Class:
		if (pos < n && e.char_class().contains(input_[pos]))
			out.insert(pos + 1);
		break;
	case ExprKind::Literal:
		if (input_.substr(pos).starts_with(e.literal()))
			out.insert(static_cast<Pos>(pos + e.literal().size()));
		break;
	case ExprKind::Seq: {
		PosSet cur(columns_);
		cur.insert(pos);
		for (const auto& part : e.parts()) {
			PosSet next(columns_);
			for (Pos q : cur.elements())
				next.merge(eval(part, q));
			cur = std::move(next);
			if (cur.empty())
				break;
		}
		out = std::move(cur);
		break;
	}
	case ExprKind::Choice:
		for (const auto& alt : e.parts())
			out.merge(eval(alt, pos));
		break;
	case ExprKind::Opt:
		out = eval(e.body(), pos);
		out.insert(pos);
		break;
	case ExprKind::Not:
		// Only `!.` gets here (checked at construction).
		if (pos == n)
			out.insert(pos);
		break;
	case ExprKind::Ref:
		out = table_[std::size_t{e.rule().index} * columns_ + pos];
		break;
	case ExprKind::And:
	case ExprKind::Star:
	case ExprKind::Plus:
		throw UnsupportedConstructError("unsupported construct in CFG reading");
	}
	return out;
}

std::vector<Pos> cfg_all_ends(const Grammar& g, RuleId rule, Pos pos, std::u32string_view input) {
	return CfgRecognizer(g, input).ends(rule, pos).elements();
}

} // namespace packrat
