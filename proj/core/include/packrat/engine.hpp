#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <ranges>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "packrat/grammar.hpp"

namespace packrat {

/// 0-based input position; columns are displayed 1-based (C1..C(n+1)).
using Pos = std::uint32_t;
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/// Result of one memo cell or expression evaluation.
struct Outcome {
	bool success = false;
	Pos end = 0;
	NodeId node = kNoNode;

	static constexpr Outcome fail() noexcept { return {}; }
	static constexpr Outcome match(Pos end, NodeId node) noexcept { return {true, end, node}; }
	explicit operator bool() const noexcept { return success; }
};

/// Fail / Success(end) without a tree - the part every engine and oracle
/// can agree on.
struct Verdict {
	bool success = false;
	Pos end = 0;

	static constexpr Verdict fail() noexcept { return {}; }
	static constexpr Verdict match(Pos end) noexcept { return {true, end}; }
	friend constexpr bool operator==(Verdict, Verdict) = default;
};

inline Verdict to_verdict(const Outcome& o) noexcept {
	return o.success ? Verdict::match(o.end) : Verdict::fail();
}

/// "X" or "ok(end)".
std::string to_string(Verdict v);

struct CellCoord {
	RuleId rule;
	Pos pos;

	friend constexpr bool operator==(CellCoord, CellCoord) = default;
};

class EngineError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// A rule was re-entered at the same position while its cell was still
/// being computed.
class LeftRecursionError : public EngineError {
public:
	LeftRecursionError(const std::string& what, std::vector<CellCoord> cycle)
		: EngineError(what), cycle_(std::move(cycle)) {}

	/// In-progress cells from the first occurrence of the repeated cell to
	/// the innermost active rule; the repeated cell is cycle().front().
	const std::vector<CellCoord>& cycle() const noexcept { return cycle_; }

private:
	std::vector<CellCoord> cycle_;
};

class DepthExceededError : public EngineError {
public:
	DepthExceededError(const std::string& what, std::size_t limit)
		: EngineError(what), limit_(limit) {}

	std::size_t limit() const noexcept { return limit_; }

private:
	std::size_t limit_;
};

class ParseFailedError : public EngineError {
public:
	ParseFailedError(Pos position, std::vector<std::string> expected);

	Pos position() const noexcept { return position_; }
	const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
	Pos position_;
	std::vector<std::string> expected_;
};

enum class CellState : std::uint8_t { Unevaluated, InProgress, Done };

struct Stats {
	std::uint64_t cells_evaluated = 0;
	/// Expression nodes entered, including combinator steps.
	std::uint64_t expr_steps = 0;
	std::uint64_t max_active_depth = 0;
	std::uint64_t memo_bytes_estimate = 0;
	/// Rule applications, memo hits included.
	std::uint64_t rule_invocations = 0;
};

struct FailureReport {
	/// False when no terminal or predicate has failed yet.
	bool attempted = false;
	Pos position = 0;
	/// Sorted, de-duplicated labels of what was tried at `position`.
	std::vector<std::string> expected;
};

struct SessionOptions {
	/// Maximum number of simultaneously active rule applications.
	std::size_t depth_limit = 100'000;
};

enum class NodeKind : std::uint8_t {
	Rule,
	Terminal,
	/// Wrapper produced by ParseSession::eval_expr for a bare expression.
	Group,
};

class ParseSession;

/// Non-owning view of a parse tree node stored in a session. Valid while
/// the session is alive.
class ParseTreeNode {
public:
	ParseTreeNode(const ParseSession& session, NodeId id) : session_(&session), id_(id) {}

	NodeId id() const noexcept { return id_; }
	NodeKind kind() const;
	bool is_terminal() const { return kind() == NodeKind::Terminal; }
	bool is_rule() const { return kind() == NodeKind::Rule; }
	/// Rule identifier; throws std::logic_error on non-rule nodes.
	RuleId rule() const;
	const std::string& rule_name() const;
	Pos start() const;
	Pos end() const;
	std::size_t child_count() const;
	ParseTreeNode child(std::size_t i) const;
	auto children() const {
		return std::views::iota(std::size_t{0}, child_count()) |
			std::views::transform([self = *this](std::size_t i) { return self.child(i); });
	}
	std::u32string_view text() const;
	const ParseSession& session() const noexcept { return *session_; }

private:
	const ParseSession* session_;
	NodeId id_;
};

/// One parse of one input: the memo matrix (one row per rule, one column
/// per position 0..n), the node arena holding every retained tree, and the
/// instrumentation.
///
/// Cells are computed on demand and at most once. Only rule applications
/// are memoized; everything inside a rule body is re-run whenever the rule
/// is first evaluated at a position.
///
/// A session is single-owner. After an engine error (left recursion, depth
/// limit) the session keeps the matrix for inspection but every further
/// apply rethrows the same error.
class ParseSession {
public:
	ParseSession(Grammar grammar, std::u32string input, SessionOptions options = {});
	ParseSession(Grammar grammar, std::string_view utf8_input, SessionOptions options = {});

	ParseSession(const ParseSession&) = delete;
	ParseSession& operator=(const ParseSession&) = delete;
	ParseSession(ParseSession&&) noexcept = default;
	ParseSession& operator=(ParseSession&&) noexcept = default;

	const Grammar& grammar() const noexcept { return grammar_; }
	std::u32string_view input() const noexcept { return input_; }
	/// Input length n.
	Pos size() const noexcept { return static_cast<Pos>(input_.size()); }
	std::size_t columns() const noexcept { return input_.size() + 1; }
	std::size_t capacity() const noexcept { return cells_.size(); }

	Outcome apply(RuleId rule, Pos pos);
	/// Evaluates an arbitrary expression whose references resolve in this
	/// session's grammar. A successful result carries a Group node.
	Outcome eval_expr(const PegExpr& e, Pos pos);
	/// apply(start, 0) and require the whole input to be consumed. Throws
	/// ParseFailedError with the rightmost-failure diagnostics otherwise.
	ParseTreeNode parse_complete();

	CellState cell_state(RuleId rule, Pos pos) const;
	/// Stored outcome of a Done cell; std::nullopt otherwise.
	std::optional<Outcome> cell(RuleId rule, Pos pos) const;
	/// Whether the raw character at `pos` (or the end marker at n) has
	/// been inspected.
	bool char_accessed(Pos pos) const;

	ParseTreeNode node(NodeId id) const { return ParseTreeNode(*this, id); }

	Stats stats() const noexcept;
	FailureReport furthest_failure() const;
	bool failed() const noexcept { return static_cast<bool>(failure_); }

	/// Hooks for layers built on top of the engine (combinators): read one
	/// character, record a failed expectation, count a step.
	std::optional<char32_t> read_char(Pos pos);
	void note_expected(Pos pos, std::string label);
	void count_step() noexcept { ++stats_.expr_steps; }
	/// Failures noted between these calls are lookahead, not errors.
	void enter_predicate() noexcept { ++predicate_depth_; }
	void leave_predicate() noexcept { --predicate_depth_; }

private:
	friend class ParseTreeNode;

	struct MemoCell {
		CellState state = CellState::Unevaluated;
		bool success = false;
		Pos end = 0;
		NodeId node = kNoNode;
	};

	struct NodeRecord {
		std::uint32_t label;
		Pos start;
		Pos end;
		std::uint32_t first_child;
		std::uint32_t child_count;
		NodeKind kind;
	};

	struct PendingChild {
		NodeId node; // kNoNode for a terminal match not yet materialized
		Pos start;
		Pos end;
	};

	enum class FrameKind : std::uint8_t { Rule, Seq, Choice, Repeat, Opt, Predicate };

	struct Frame {
		const PegExpr* expr;
		Pos start;
		Pos cur;
		std::uint32_t index;
		std::uint32_t mark;
		std::uint32_t rule;
		FrameKind kind;
	};

	struct Step {
		bool ok;
		Pos end;
	};

	Grammar grammar_;
	std::u32string input_;
	SessionOptions options_;
	std::vector<MemoCell> cells_; // row-major: rule * columns + pos
	std::vector<std::uint8_t> char_touched_;
	std::vector<NodeRecord> nodes_;
	std::vector<NodeId> child_ids_;
	std::vector<PendingChild> pending_;
	std::vector<Frame> frames_;
	std::size_t active_rules_ = 0;
	std::uint32_t predicate_depth_ = 0;
	Stats stats_;

	bool failure_attempted_ = false;
	Pos failure_pos_ = 0;
	std::vector<const PegExpr*> failure_exprs_;
	std::vector<std::string> failure_labels_;

	std::exception_ptr failure_;

	MemoCell& cell_ref(RuleId rule, Pos pos) { return cells_[std::size_t{rule.index} * columns() + pos]; }
	void check_usable() const;
	void check_pos(Pos pos) const;

	bool begin(const PegExpr& e, Pos pos, Step& out);
	bool begin_rule(RuleId rule, Pos pos, Step& out);
	bool resume(Frame& f, std::optional<Step> child, Step& out, const PegExpr*& next, Pos& next_pos);
	Step run_frames(std::size_t base);
	NodeId close_node(NodeKind kind, std::uint32_t label, Pos start, Pos end, std::uint32_t mark);
	void push_frame(FrameKind kind, const PegExpr* e, Pos pos, std::uint32_t rule = 0);
	void note_failure(Pos pos, const PegExpr* e);
	[[noreturn]] void throw_left_recursion(RuleId rule, Pos pos);
	void touch(Pos pos) noexcept { char_touched_[pos] = 1; }
};

/// Renders the memo matrix: one row per rule plus a CHAR row, columns
/// C1..C(n+1). Success cells print `(v,Ck)` where v comes from `value` (or
/// the matched length when `value` is empty or returns nullopt) and Ck is
/// the 1-based column where the remainder starts; failures print `X`,
/// unevaluated cells `·`, cells still in progress `?`.
using CellFormatter = std::function<std::optional<std::string>(const ParseTreeNode&)>;
std::string dump_matrix(const ParseSession& session, const CellFormatter& value = {});

/// Total number of Done cells in the matrix (for cross-checking
/// Stats::cells_evaluated).
std::size_t count_done_cells(const ParseSession& session);

} // namespace packrat
