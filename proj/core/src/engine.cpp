#include "packrat/engine.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "packrat/utf8.hpp"

namespace packrat {

std::string to_string(Verdict v) {
	return v.success ? "ok(" + std::to_string(v.end) + ")" : "X";
}

namespace {

std::string cell_name(const Grammar& g, CellCoord c) {
	return g.name(c.rule) + "@C" + std::to_string(c.pos + 1);
}

std::string failure_message(Pos position, const std::vector<std::string>& expected) {
	std::ostringstream out;
	out << "parse failed at position " << position << " (column " << position + 1 << ")";
	if (!expected.empty()) {
		out << ": expected ";
		for (std::size_t i = 0; i < expected.size(); ++i)
			out << (i ? ", " : "") << expected[i];
	}
	return out.str();
}

} // namespace

ParseFailedError::ParseFailedError(Pos position, std::vector<std::string> expected)
	: EngineError(failure_message(position, expected)), position_(position), expected_(std::move(expected)) {}

// ---------------------------------------------------------------------------
// ParseTreeNode

NodeKind ParseTreeNode::kind() const { return session_->nodes_.at(id_).kind; }

RuleId ParseTreeNode::rule() const {
	const auto& rec = session_->nodes_.at(id_);
	if (rec.kind != NodeKind::Rule)
		throw std::logic_error("parse tree node is not a rule node");
	return RuleId{rec.label};
}

const std::string& ParseTreeNode::rule_name() const { return session_->grammar_.name(rule()); }

Pos ParseTreeNode::start() const { return session_->nodes_.at(id_).start; }

Pos ParseTreeNode::end() const { return session_->nodes_.at(id_).end; }

std::size_t ParseTreeNode::child_count() const { return session_->nodes_.at(id_).child_count; }

ParseTreeNode ParseTreeNode::child(std::size_t i) const {
	const auto& rec = session_->nodes_.at(id_);
	if (i >= rec.child_count)
		throw std::out_of_range("parse tree child index out of range");
	return ParseTreeNode(*session_, session_->child_ids_[rec.first_child + i]);
}

std::u32string_view ParseTreeNode::text() const {
	const auto& rec = session_->nodes_.at(id_);
	return session_->input().substr(rec.start, rec.end - rec.start);
}

// ---------------------------------------------------------------------------
// ParseSession

ParseSession::ParseSession(Grammar grammar, std::u32string input, SessionOptions options)
	: grammar_(std::move(grammar)), input_(std::move(input)), options_(options) {
	grammar_.require_valid();
	if (input_.size() >= std::numeric_limits<Pos>::max())
		throw std::length_error("input too long for a parse session");
	cells_.resize(grammar_.rule_count() * columns());
	char_touched_.resize(columns());
}

ParseSession::ParseSession(Grammar grammar, std::string_view utf8_input, SessionOptions options)
	: ParseSession(std::move(grammar), decode_utf8(utf8_input), options) {}

void ParseSession::check_usable() const {
	if (failure_)
		std::rethrow_exception(failure_);
}

void ParseSession::check_pos(Pos pos) const {
	if (pos > size())
		throw std::out_of_range("position " + std::to_string(pos) + " beyond input length " +
			std::to_string(size()));
}

CellState ParseSession::cell_state(RuleId rule, Pos pos) const {
	check_pos(pos);
	if (rule.index >= grammar_.rule_count())
		throw std::out_of_range("rule id out of range");
	return cells_[std::size_t{rule.index} * columns() + pos].state;
}

std::optional<Outcome> ParseSession::cell(RuleId rule, Pos pos) const {
	if (cell_state(rule, pos) != CellState::Done)
		return std::nullopt;
	const auto& c = cells_[std::size_t{rule.index} * columns() + pos];
	return Outcome{c.success, c.end, c.node};
}

bool ParseSession::char_accessed(Pos pos) const {
	check_pos(pos);
	return char_touched_[pos] != 0;
}

Stats ParseSession::stats() const noexcept {
	Stats s = stats_;
	// Table overhead plus every retained node and child slot; nodes are only
	// created for successful rule cells (and eval_expr groups).
	s.memo_bytes_estimate = cells_.size() * sizeof(MemoCell) + nodes_.size() * sizeof(NodeRecord) +
		child_ids_.size() * sizeof(NodeId);
	return s;
}

FailureReport ParseSession::furthest_failure() const {
	FailureReport report;
	report.attempted = failure_attempted_;
	report.position = failure_pos_;
	std::set<std::string> labels(failure_labels_.begin(), failure_labels_.end());
	for (const PegExpr* e : failure_exprs_)
		labels.insert(describe(grammar_, *e));
	report.expected.assign(labels.begin(), labels.end());
	return report;
}

std::optional<char32_t> ParseSession::read_char(Pos pos) {
	check_pos(pos);
	touch(pos);
	if (pos >= size())
		return std::nullopt;
	return input_[pos];
}

void ParseSession::note_failure(Pos pos, const PegExpr* e) {
	if (predicate_depth_ > 0)
		return;
	if (!failure_attempted_ || pos > failure_pos_) {
		failure_attempted_ = true;
		failure_pos_ = pos;
		failure_exprs_.clear();
		failure_labels_.clear();
	} else if (pos < failure_pos_) {
		return;
	}
	if (std::find(failure_exprs_.begin(), failure_exprs_.end(), e) == failure_exprs_.end())
		failure_exprs_.push_back(e);
}

void ParseSession::note_expected(Pos pos, std::string label) {
	if (predicate_depth_ > 0)
		return;
	if (!failure_attempted_ || pos > failure_pos_) {
		failure_attempted_ = true;
		failure_pos_ = pos;
		failure_exprs_.clear();
		failure_labels_.clear();
	} else if (pos < failure_pos_) {
		return;
	}
	if (std::find(failure_labels_.begin(), failure_labels_.end(), label) == failure_labels_.end())
		failure_labels_.push_back(std::move(label));
}

void ParseSession::push_frame(FrameKind kind, const PegExpr* e, Pos pos, std::uint32_t rule) {
	frames_.push_back(Frame{e, pos, pos, 0, static_cast<std::uint32_t>(pending_.size()), rule, kind});
}

NodeId ParseSession::close_node(NodeKind kind, std::uint32_t label, Pos start, Pos end, std::uint32_t mark) {
	const auto first = static_cast<std::uint32_t>(child_ids_.size());
	const auto count = static_cast<std::uint32_t>(pending_.size() - mark);
	for (std::size_t i = mark; i < pending_.size(); ++i) {
		const PendingChild& p = pending_[i];
		NodeId id = p.node;
		if (id == kNoNode) {
			id = static_cast<NodeId>(nodes_.size());
			nodes_.push_back(NodeRecord{0, p.start, p.end, 0, 0, NodeKind::Terminal});
		}
		child_ids_.push_back(id);
	}
	pending_.resize(mark);
	const auto id = static_cast<NodeId>(nodes_.size());
	nodes_.push_back(NodeRecord{label, start, end, first, count, kind});
	return id;
}

void ParseSession::throw_left_recursion(RuleId rule, Pos pos) {
	std::vector<CellCoord> cycle;
	for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
		if (it->kind != FrameKind::Rule)
			continue;
		cycle.push_back(CellCoord{RuleId{it->rule}, it->start});
		if (it->rule == rule.index && it->start == pos)
			break;
	}
	std::reverse(cycle.begin(), cycle.end());
	std::string what = "left recursion: ";
	for (const auto& c : cycle)
		what += cell_name(grammar_, c) + " -> ";
	what += cell_name(grammar_, CellCoord{rule, pos});
	throw LeftRecursionError(what, std::move(cycle));
}

bool ParseSession::begin_rule(RuleId rule, Pos pos, Step& out) {
	++stats_.rule_invocations;
	MemoCell& c = cell_ref(rule, pos);
	switch (c.state) {
	case CellState::Done:
		if (c.success)
			pending_.push_back(PendingChild{c.node, pos, c.end});
		out = Step{c.success, c.end};
		return true;
	case CellState::InProgress:
		throw_left_recursion(rule, pos);
	case CellState::Unevaluated:
		break;
	}
	if (active_rules_ >= options_.depth_limit) {
		throw DepthExceededError("rule nesting depth limit of " + std::to_string(options_.depth_limit) +
			" exceeded at " + cell_name(grammar_, CellCoord{rule, pos}), options_.depth_limit);
	}
	c.state = CellState::InProgress;
	++active_rules_;
	stats_.max_active_depth = std::max<std::uint64_t>(stats_.max_active_depth, active_rules_);
	push_frame(FrameKind::Rule, &grammar_.rule(rule).body, pos, rule.index);
	return false;
}

bool ParseSession::begin(const PegExpr& e, Pos pos, Step& out) {
	++stats_.expr_steps;
	const Pos n = size();
	switch (e.kind()) {
	case ExprKind::Empty:
		out = Step{true, pos};
		return true;
	case ExprKind::AnyChar:
		touch(pos);
		if (pos < n) {
			pending_.push_back(PendingChild{kNoNode, pos, pos + 1});
			out = Step{true, pos + 1};
		} else {
			note_failure(pos, &e);
			out = Step{false, pos};
		}
		return true;
	case ExprKind::Char:
		touch(pos);
		if (pos < n && input_[pos] == e.character()) {
			pending_.push_back(PendingChild{kNoNode, pos, pos + 1});
			out = Step{true, pos + 1};
		} else {
			note_failure(pos, &e);
			out = Step{false, pos};
		}
		return true;
	case ExprKind::Class:
		touch(pos);
		if (pos < n && e.char_class().contains(input_[pos])) {
			pending_.push_back(PendingChild{kNoNode, pos, pos + 1});
			out = Step{true, pos + 1};
		} else {
			note_failure(pos, &e);
			out = Step{false, pos};
		}
		return true;
	case ExprKind::Literal: {
		const auto& lit = e.literal();
		std::size_t k = 0;
		while (k < lit.size()) {
			touch(static_cast<Pos>(pos + k));
			if (pos + k >= n || input_[pos + k] != lit[k])
				break;
			++k;
		}
		if (k == lit.size()) {
			const auto end = static_cast<Pos>(pos + k);
			if (k > 0)
				pending_.push_back(PendingChild{kNoNode, pos, end});
			out = Step{true, end};
		} else {
			note_failure(pos, &e);
			out = Step{false, pos};
		}
		return true;
	}
	case ExprKind::Seq:
		push_frame(FrameKind::Seq, &e, pos);
		return false;
	case ExprKind::Choice:
		push_frame(FrameKind::Choice, &e, pos);
		return false;
	case ExprKind::Star:
	case ExprKind::Plus:
		push_frame(FrameKind::Repeat, &e, pos);
		return false;
	case ExprKind::Opt:
		push_frame(FrameKind::Opt, &e, pos);
		return false;
	case ExprKind::And:
	case ExprKind::Not:
		push_frame(FrameKind::Predicate, &e, pos);
		++predicate_depth_;
		return false;
	case ExprKind::Ref:
		return begin_rule(e.rule(), pos, out);
	}
	throw std::logic_error("unhandled expression kind");
}

bool ParseSession::resume(Frame& f, std::optional<Step> child, Step& out, const PegExpr*& next, Pos& next_pos) {
	switch (f.kind) {
	case FrameKind::Rule: {
		if (!child) {
			next = f.expr;
			next_pos = f.start;
			return false;
		}
		MemoCell& c = cell_ref(RuleId{f.rule}, f.start);
		if (c.state != CellState::InProgress)
			throw std::logic_error("memo cell " + cell_name(grammar_, CellCoord{RuleId{f.rule}, f.start}) +
				" completed twice");
		if (child->ok) {
			const NodeId node = close_node(NodeKind::Rule, f.rule, f.start, child->end, f.mark);
			c = MemoCell{CellState::Done, true, child->end, node};
			pending_.push_back(PendingChild{node, f.start, child->end});
		} else {
			pending_.resize(f.mark);
			c = MemoCell{CellState::Done, false, f.start, kNoNode};
		}
		++stats_.cells_evaluated;
		--active_rules_;
		out = *child;
		return true;
	}
	case FrameKind::Seq: {
		const auto parts = f.expr->parts();
		if (child) {
			if (!child->ok) {
				pending_.resize(f.mark);
				out = Step{false, f.start};
				return true;
			}
			f.cur = child->end;
			++f.index;
		}
		if (f.index == parts.size()) {
			out = Step{true, f.cur};
			return true;
		}
		next = &parts[f.index];
		next_pos = f.cur;
		return false;
	}
	case FrameKind::Choice: {
		const auto alts = f.expr->parts();
		if (child) {
			if (child->ok) {
				out = *child;
				return true;
			}
			++f.index;
		}
		if (f.index == alts.size()) {
			out = Step{false, f.start};
			return true;
		}
		next = &alts[f.index];
		next_pos = f.start;
		return false;
	}
	case FrameKind::Repeat: {
		if (child) {
			if (child->ok && child->end > f.cur) {
				f.cur = child->end;
				++f.index;
			} else {
				// A zero-width iteration cannot happen on a validated grammar;
				// either way the loop stops here.
				const bool ok = f.expr->kind() == ExprKind::Star || f.index > 0;
				out = Step{ok, ok ? f.cur : f.start};
				return true;
			}
		}
		next = &f.expr->body();
		next_pos = f.cur;
		return false;
	}
	case FrameKind::Opt:
		if (!child) {
			next = &f.expr->body();
			next_pos = f.start;
			return false;
		}
		out = child->ok ? *child : Step{true, f.start};
		return true;
	case FrameKind::Predicate: {
		if (!child) {
			next = &f.expr->body();
			next_pos = f.start;
			return false;
		}
		pending_.resize(f.mark);
		--predicate_depth_;
		const bool ok = (f.expr->kind() == ExprKind::And) == child->ok;
		if (!ok)
			note_failure(f.start, f.expr);
		out = Step{ok, f.start};
		return true;
	}
	}
	throw std::logic_error("unhandled frame kind");
}

ParseSession::Step ParseSession::run_frames(std::size_t base) {
	Step step{false, 0};
	std::optional<Step> child;
	for (;;) {
		const PegExpr* next = nullptr;
		Pos next_pos = 0;
		if (resume(frames_.back(), child, step, next, next_pos)) {
			frames_.pop_back();
			if (frames_.size() == base)
				return step;
			child = step;
		} else if (begin(*next, next_pos, step)) {
			child = step;
		} else {
			child.reset();
		}
	}
}

Outcome ParseSession::apply(RuleId rule, Pos pos) {
	check_usable();
	check_pos(pos);
	if (rule.index >= grammar_.rule_count())
		throw std::out_of_range("rule id out of range");
	const std::size_t base = frames_.size();
	const auto mark = static_cast<std::uint32_t>(pending_.size());
	try {
		Step step{false, pos};
		if (!begin_rule(rule, pos, step))
			step = run_frames(base);
		Outcome result = Outcome::fail();
		if (step.ok)
			result = Outcome::match(step.end, pending_.back().node);
		pending_.resize(mark);
		return result;
	} catch (...) {
		failure_ = std::current_exception();
		frames_.clear();
		pending_.clear();
		throw;
	}
}

Outcome ParseSession::eval_expr(const PegExpr& e, Pos pos) {
	check_usable();
	check_pos(pos);
	const std::size_t base = frames_.size();
	const auto mark = static_cast<std::uint32_t>(pending_.size());
	try {
		Step step{false, pos};
		if (!begin(e, pos, step))
			step = run_frames(base);
		if (!step.ok) {
			pending_.resize(mark);
			return Outcome::fail();
		}
		const NodeId node = close_node(NodeKind::Group, 0, pos, step.end, mark);
		return Outcome::match(step.end, node);
	} catch (...) {
		failure_ = std::current_exception();
		frames_.clear();
		pending_.clear();
		throw;
	}
}

ParseTreeNode ParseSession::parse_complete() {
	const Outcome o = apply(grammar_.start(), 0);
	if (o.success && o.end == size())
		return node(o.node);
	FailureReport f = furthest_failure();
	if (o.success && (!f.attempted || o.end > f.position))
		throw ParseFailedError(o.end, {"end of input"});
	if (o.success && o.end == f.position) {
		f.expected.push_back("end of input");
		std::sort(f.expected.begin(), f.expected.end());
	}
	throw ParseFailedError(f.position, std::move(f.expected));
}

std::size_t count_done_cells(const ParseSession& session) {
	std::size_t done = 0;
	const auto& g = session.grammar();
	for (std::uint32_t r = 0; r < g.rule_count(); ++r)
		for (Pos p = 0; p <= session.size(); ++p)
			if (session.cell_state(RuleId{r}, p) == CellState::Done)
				++done;
	return done;
}

} // namespace packrat
