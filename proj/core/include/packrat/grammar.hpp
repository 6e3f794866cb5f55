#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace packrat {

/// Dense index of a rule within its grammar (0..R-1).
struct RuleId {
	std::uint32_t index = 0;

	friend constexpr auto operator<=>(RuleId, RuleId) = default;
};

struct CharRange {
	char32_t lo;
	char32_t hi;

	friend constexpr bool operator==(CharRange, CharRange) = default;
};

/// A set of Unicode scalar values given as inclusive ranges, optionally
/// complemented.
class CharClass {
public:
	CharClass() = default;
	CharClass(std::vector<CharRange> ranges, bool negated = false);

	/// Parses the body of a bracket expression without the brackets,
	/// e.g. "a-z0-9" or "^ \t". Escapes follow the grammar file format.
	static CharClass parse(std::u32string_view body);

	bool contains(char32_t c) const noexcept;
	bool negated() const noexcept { return negated_; }
	std::span<const CharRange> ranges() const noexcept { return ranges_; }

	friend bool operator==(const CharClass&, const CharClass&) = default;

private:
	std::vector<CharRange> ranges_;
	bool negated_ = false;
};

enum class ExprKind : std::uint8_t {
	Empty,
	AnyChar,
	Char,
	Class,
	Literal,
	Seq,
	Choice,
	Star,
	Plus,
	Opt,
	And,
	Not,
	Ref,
};

std::string_view to_string(ExprKind kind);

/// One parsing expression. Value type; trees are built with the factory
/// functions in namespace `peg` below.
class PegExpr {
public:
	PegExpr() = default;

	ExprKind kind() const noexcept { return kind_; }

	char32_t character() const noexcept { return ch_; }
	const CharClass& char_class() const noexcept { return cls_; }
	const std::u32string& literal() const noexcept { return text_; }
	/// Elements of Seq / Choice.
	std::span<const PegExpr> parts() const noexcept { return parts_; }
	/// Operand of Star / Plus / Opt / And / Not.
	const PegExpr& body() const noexcept { return parts_.front(); }
	RuleId rule() const noexcept { return rule_; }

	bool is_terminal() const noexcept;
	bool is_repetition() const noexcept { return kind_ == ExprKind::Star || kind_ == ExprKind::Plus; }
	bool is_predicate() const noexcept { return kind_ == ExprKind::And || kind_ == ExprKind::Not; }

	static PegExpr make_empty();
	static PegExpr make_any();
	static PegExpr make_char(char32_t c);
	static PegExpr make_class(CharClass cls);
	static PegExpr make_literal(std::u32string s);
	static PegExpr make_seq(std::vector<PegExpr> parts);
	static PegExpr make_choice(std::vector<PegExpr> alts);
	static PegExpr make_unary(ExprKind kind, PegExpr body);
	static PegExpr make_ref(RuleId rule);

	friend bool operator==(const PegExpr& a, const PegExpr& b);

private:
	ExprKind kind_ = ExprKind::Empty;
	char32_t ch_ = 0;
	RuleId rule_{};
	std::u32string text_;
	CharClass cls_;
	std::vector<PegExpr> parts_;
};

namespace peg {

PegExpr empty();
PegExpr any();
PegExpr ch(char32_t c);
PegExpr cls(std::u32string_view body);
PegExpr lit(std::u32string s);
PegExpr seq(std::vector<PegExpr> parts);
PegExpr choice(std::vector<PegExpr> alts);
PegExpr star(PegExpr body);
PegExpr plus(PegExpr body);
PegExpr opt(PegExpr body);
PegExpr and_(PegExpr body);
PegExpr not_(PegExpr body);
PegExpr ref(RuleId rule);
/// `!.` - succeeds only at the end of the input.
PegExpr end_of_input();

} // namespace peg

struct Rule {
	std::string name;
	PegExpr body;

	friend bool operator==(const Rule&, const Rule&) = default;
};

enum class Severity : std::uint8_t { Error, Warning };

enum class IssueCode : std::uint8_t {
	UnknownRef,
	NullableRepetition,
	EmptyChoice,
	UnreachableRule,
};

std::string_view to_string(Severity s);
std::string_view to_string(IssueCode c);

struct ValidationIssue {
	Severity severity;
	IssueCode code;
	RuleId rule;
	/// Child-index path from the rule body to the offending expression.
	std::vector<std::uint32_t> path;
	std::string message;

	friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

/// Raised when a grammar with error-severity issues is handed to something
/// that needs a valid grammar.
class GrammarError : public std::runtime_error {
public:
	explicit GrammarError(std::vector<ValidationIssue> issues);
	GrammarError(const std::string& what, std::vector<ValidationIssue> issues);

	const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
	std::vector<ValidationIssue> issues_;
};

/// Named rule set plus start rule. Immutable; copies share storage, so
/// expression addresses stay stable for the lifetime of any copy.
///
/// Construction never throws on semantic problems: validation issues and
/// the nullability table are computed once and exposed through issues()
/// and rule_nullable(). Engines refuse grammars where valid() is false.
class Grammar {
public:
	/// Throws std::invalid_argument if two rules share a name.
	Grammar(std::vector<Rule> rules, RuleId start);

	std::size_t rule_count() const noexcept;
	const Rule& rule(RuleId id) const;
	std::span<const Rule> rules() const noexcept;
	RuleId start() const noexcept;
	std::optional<RuleId> find(std::string_view name) const;
	const std::string& name(RuleId id) const { return rule(id).name; }

	const std::vector<ValidationIssue>& issues() const noexcept;
	bool valid() const noexcept;
	/// Throws GrammarError listing the error-severity issues, if any.
	void require_valid() const;

	bool rule_nullable(RuleId id) const;
	bool has_repetition() const noexcept;

	/// Structural equality: same rule names, bodies and start rule.
	friend bool operator==(const Grammar& a, const Grammar& b);

private:
	struct Data;
	std::shared_ptr<const Data> data_;
};

/// Assembles a grammar with forward references by name.
class GrammarBuilder {
public:
	/// Returns the id for `name`, creating an undefined placeholder on first
	/// mention.
	RuleId declare(std::string_view name);
	void define(RuleId id, PegExpr body);
	RuleId define(std::string_view name, PegExpr body);
	void set_start(RuleId id) { start_ = id; }

	/// Throws std::invalid_argument if a declared rule was never defined or
	/// defined twice. Semantic issues are left to Grammar's validation.
	Grammar build() const;

private:
	std::vector<std::string> names_;
	std::vector<std::optional<PegExpr>> bodies_;
	std::optional<RuleId> start_;
};

/// True iff `e` can succeed without consuming input (least fixed point over
/// the grammar's rules). References to missing rules count as non-nullable.
bool nullable(const Grammar& g, const PegExpr& e);

/// All validation issues, in deterministic order.
std::vector<ValidationIssue> validate(const Grammar& g);

/// Human-readable label used in expected-sets and error messages, in the
/// grammar file notation (e.g. `'+'`, `[0-9]`, `"=="`, `!.`).
std::string describe(const PegExpr& e);
std::string describe(const Grammar& g, const PegExpr& e);

} // namespace packrat
