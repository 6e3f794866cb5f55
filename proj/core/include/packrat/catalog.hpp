#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "packrat/engine.hpp"
#include "packrat/grammar.hpp"
#include "packrat/semantic_value.hpp"

namespace packrat {

struct CatalogTraits {
	/// Some rule calls itself at the same position; every engine must
	/// report a cycle instead of parsing.
	bool left_recursive = false;
	/// Complete-parse acceptance differs between the PEG and CFG readings
	/// on some inputs.
	bool peg_cfg_divergent = false;
	/// Needs unbounded lookahead (not LR(k) for any k).
	bool non_lr_k = false;
};

/// Computes a value from a parse tree produced by the entry's grammar.
/// The root may be any rule of that grammar.
using Evaluator = std::function<SemanticValue(const ParseTreeNode&)>;

struct CatalogEntry {
	std::string name;
	std::string summary;
	Grammar grammar;
	std::optional<Evaluator> evaluator;
	/// Characters used for exhaustive and random input generation.
	std::u32string alphabet;
	CatalogTraits traits;
};

class UnknownGrammarError : public std::out_of_range {
public:
	explicit UnknownGrammarError(const std::string& name)
		: std::out_of_range("unknown grammar '" + name + "'") {}
};

/// Classic four-rule arithmetic: right-associative + and *, parentheses,
/// single-digit numbers.
CatalogEntry arith_basic();
/// Additive written with a suffix rule so + and - fold to the left.
CatalogEntry arith_left_assoc();
/// Scannerless arithmetic: multi-digit numbers, whitespace between tokens,
/// operator tokens selected with followed-by predicates.
CatalogEntry arith_lexed();
/// S <- A / B over x^n z y^n and x^n z y^2n.
CatalogEntry lookahead_ab();
/// Assignment / equality / additive expressions over the identifier a+.
CatalogEntry composition_assign();
/// composition_assign plus indexed lvalues.
CatalogEntry composition_lvalue();
/// S <- 'x' S 'x' / 'x'.
CatalogEntry peg_limitation();
/// Additive <- Additive '+' Multitive / ... (directly left recursive).
CatalogEntry left_recursive_arith();
/// S <- 'a' S 'b' / 'a' S 'c' / 'a'; naive backtracking doubles its work
/// for each extra 'a'.
CatalogEntry blowup_family();

/// a^k b
std::u32string blowup_input(std::size_t k);

/// All entries, keyed by name.
const std::map<std::string, CatalogEntry, std::less<>>& registry();
/// Throws UnknownGrammarError.
const CatalogEntry& lookup(std::string_view name);

/// Parses `input` completely and applies the entry's evaluator. Throws
/// ParseFailedError, or std::logic_error if the entry has no evaluator.
SemanticValue evaluate(const CatalogEntry& entry, std::u32string_view input);

/// Formatter for dump_matrix that prints evaluator values.
CellFormatter value_formatter(const CatalogEntry& entry);

} // namespace packrat
