#pragma once

// Reference implementations used to cross-check the packrat engine. None of
// them share code with ParseSession beyond the grammar representation.

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "packrat/engine.hpp"
#include "packrat/grammar.hpp"

namespace packrat {

// ---------------------------------------------------------------------------
// Naive backtracking interpreter

class CallBudgetExceededError : public EngineError {
public:
	CallBudgetExceededError(const std::string& what, std::uint64_t budget)
		: EngineError(what), budget_(budget) {}

	std::uint64_t budget() const noexcept { return budget_; }

private:
	std::uint64_t budget_;
};

struct NaiveOptions {
	/// Recursion is real C++ recursion here, so the default is far lower
	/// than the engine's.
	std::size_t depth_limit = 10'000;
	/// Maximum rule invocations; 0 means unlimited.
	std::uint64_t call_budget = 0;
};

struct NaiveReport {
	Verdict verdict;
	/// Every rule invocation, redundant ones included.
	std::uint64_t calls = 0;
	std::size_t max_depth = 0;
};

/// Plain recursive descent with full backtracking and no memoization.
/// Same-position re-entry of a rule raises LeftRecursionError.
NaiveReport naive_parse(const Grammar& g, RuleId rule, Pos pos, std::u32string_view input,
	const NaiveOptions& options = {});

/// naive_parse with buffers kept between runs; not thread-safe.
class NaiveOracle {
public:
	explicit NaiveOracle(Grammar g, NaiveOptions options = {});
	~NaiveOracle();
	NaiveOracle(NaiveOracle&&) noexcept;
	NaiveOracle& operator=(NaiveOracle&&) noexcept;

	NaiveReport parse(RuleId rule, Pos pos, std::u32string_view input);

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Tabular right-to-left filler

class UnsupportedConstructError : public EngineError {
public:
	using EngineError::EngineError;
};

/// The same-position call graph has a cycle, so no bottom-up order exists
/// inside a column.
class SamePositionCycleError : public EngineError {
public:
	SamePositionCycleError(const std::string& what, std::vector<RuleId> cycle)
		: EngineError(what), cycle_(std::move(cycle)) {}

	const std::vector<RuleId>& cycle() const noexcept { return cycle_; }

private:
	std::vector<RuleId> cycle_;
};

/// Rules ordered so that every rule comes after the rules it may call
/// without consuming input first. Throws SamePositionCycleError.
std::vector<RuleId> same_position_order(const Grammar& g);

struct TabularMatrix {
	std::size_t rule_count = 0;
	std::size_t columns = 0;
	std::vector<Verdict> cells; // rule * columns + pos
	std::vector<CellCoord> fill_order;

	const Verdict& at(RuleId rule, Pos pos) const { return cells.at(std::size_t{rule.index} * columns + pos); }
};

/// Fills every (rule, position) cell, rightmost column first and callee
/// before caller within a column. Rejects repetition operators.
TabularMatrix tabular_parse(const Grammar& g, std::u32string_view input);

/// tabular_parse with the grammar checks and column order computed once,
/// for running many inputs against one grammar.
class TabularOracle {
public:
	explicit TabularOracle(Grammar g);

	TabularMatrix parse(std::u32string_view input) const;
	const std::vector<RuleId>& order() const noexcept { return order_; }

private:
	Grammar grammar_;
	std::vector<RuleId> order_;
};

// ---------------------------------------------------------------------------
// Context-free end-set recognizer

/// Set of input positions 0..n.
class PosSet {
public:
	PosSet() = default;
	explicit PosSet(std::size_t universe) : words_((universe + 63) / 64, 0) {}

	void insert(Pos p) { words_[p / 64] |= std::uint64_t{1} << (p % 64); }
	bool contains(Pos p) const { return p / 64 < words_.size() && (words_[p / 64] >> (p % 64)) & 1; }
	bool empty() const;
	/// Returns true if anything was added.
	bool merge(const PosSet& other);
	std::vector<Pos> elements() const;

	friend bool operator==(const PosSet&, const PosSet&) = default;

private:
	std::vector<std::uint64_t> words_;
};

/// Reads the grammar as a context-free grammar (choice is unordered union)
/// and computes, for every rule and start position, the set of all
/// reachable end positions. Left recursion is fine here (least fixed point
/// per column). Repetition and predicates are rejected with
/// UnsupportedConstructError, except `!.`, which is an exact end-of-input
/// marker under both readings.
class CfgRecognizer {
public:
	CfgRecognizer(const Grammar& g, std::u32string_view input);

	const PosSet& ends(RuleId rule, Pos pos) const;
	/// n is in ends(start, 0).
	bool accepts() const;

private:
	Grammar grammar_;
	std::u32string_view input_;
	std::size_t columns_;
	std::vector<PosSet> table_;

	PosSet eval(const PegExpr& e, Pos pos) const;
	void fill_small();
};

/// Throws UnsupportedConstructError if `g` cannot be read as a CFG.
void check_cfg_compatible(const Grammar& g);
bool is_cfg_compatible(const Grammar& g);

std::vector<Pos> cfg_all_ends(const Grammar& g, RuleId rule, Pos pos, std::u32string_view input);

} // namespace packrat
