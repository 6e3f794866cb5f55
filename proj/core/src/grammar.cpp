#include "packrat/grammar.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "packrat/utf8.hpp"

namespace packrat {

// ---------------------------------------------------------------------------
// CharClass

CharClass::CharClass(std::vector<CharRange> ranges, bool negated)
	: ranges_(std::move(ranges)), negated_(negated) {
	for (const auto& r : ranges_)
		if (r.lo > r.hi)
			throw std::invalid_argument("character range with lo > hi");
}

namespace {

char32_t read_escape(std::u32string_view s, std::size_t& i) {
	// s[i] is the character after the backslash.
	if (i >= s.size())
		throw std::invalid_argument("dangling backslash in character class");
	const char32_t c = s[i++];
	switch (c) {
	case U'n': return U'\n';
	case U't': return U'\t';
	case U'r': return U'\r';
	case U'f': return U'\f';
	case U'v': return U'\v';
	case U'0': return U'\0';
	case U'u': {
		if (i + 4 > s.size())
			throw std::invalid_argument("\\u escape needs four hex digits");
		char32_t v = 0;
		for (int k = 0; k < 4; ++k) {
			const char32_t h = s[i++];
			v <<= 4;
			if (h >= U'0' && h <= U'9') v |= h - U'0';
			else if (h >= U'a' && h <= U'f') v |= h - U'a' + 10;
			else if (h >= U'A' && h <= U'F') v |= h - U'A' + 10;
			else throw std::invalid_argument("bad hex digit in \\u escape");
		}
		return v;
	}
	default: return c;
	}
}

} // namespace

CharClass CharClass::parse(std::u32string_view body) {
	std::size_t i = 0;
	bool negated = false;
	if (i < body.size() && body[i] == U'^') {
		negated = true;
		++i;
	}
	auto next = [&]() -> char32_t {
		const char32_t c = body[i++];
		return c == U'\\' ? read_escape(body, i) : c;
	};
	std::vector<CharRange> ranges;
	while (i < body.size()) {
		const char32_t lo = next();
		char32_t hi = lo;
		if (i + 1 < body.size() && body[i] == U'-') {
			++i;
			hi = next();
		}
		ranges.push_back({lo, hi});
	}
	return CharClass(std::move(ranges), negated);
}

bool CharClass::contains(char32_t c) const noexcept {
	bool hit = false;
	for (const auto& r : ranges_) {
		if (c >= r.lo && c <= r.hi) {
			hit = true;
			break;
		}
	}
	return hit != negated_;
}

// ---------------------------------------------------------------------------
// PegExpr

std::string_view to_string(ExprKind kind) {
	switch (kind) {
	case ExprKind::Empty: return "Empty";
	case ExprKind::AnyChar: return "AnyChar";
	case ExprKind::Char: return "Char";
	case ExprKind::Class: return "Class";
	case ExprKind::Literal: return "Literal";
	case ExprKind::Seq: return "Seq";
	case ExprKind::Choice: return "Choice";
	case ExprKind::Star: return "Star";
	case ExprKind::Plus: return "Plus";
	case ExprKind::Opt: return "Opt";
	case ExprKind::And: return "And";
	case ExprKind::Not: return "Not";
	case ExprKind::Ref: return "Ref";
	}
	return "?";
}

bool PegExpr::is_terminal() const noexcept {
	switch (kind_) {
	case ExprKind::AnyChar:
	case ExprKind::Char:
	case ExprKind::Class:
	case ExprKind::Literal:
		return true;
	default:
		return false;
	}
}

PegExpr PegExpr::make_empty() { return PegExpr{}; }

PegExpr PegExpr::make_any() {
	PegExpr e;
	e.kind_ = ExprKind::AnyChar;
	return e;
}

PegExpr PegExpr::make_char(char32_t c) {
	PegExpr e;
	e.kind_ = ExprKind::Char;
	e.ch_ = c;
	return e;
}

PegExpr PegExpr::make_class(CharClass cls) {
	PegExpr e;
	e.kind_ = ExprKind::Class;
	e.cls_ = std::move(cls);
	return e;
}

PegExpr PegExpr::make_literal(std::u32string s) {
	PegExpr e;
	e.kind_ = ExprKind::Literal;
	e.text_ = std::move(s);
	return e;
}

PegExpr PegExpr::make_seq(std::vector<PegExpr> parts) {
	PegExpr e;
	e.kind_ = ExprKind::Seq;
	e.parts_ = std::move(parts);
	return e;
}

PegExpr PegExpr::make_choice(std::vector<PegExpr> alts) {
	PegExpr e;
	e.kind_ = ExprKind::Choice;
	e.parts_ = std::move(alts);
	return e;
}

PegExpr PegExpr::make_unary(ExprKind kind, PegExpr body) {
	switch (kind) {
	case ExprKind::Star:
	case ExprKind::Plus:
	case ExprKind::Opt:
	case ExprKind::And:
	case ExprKind::Not:
		break;
	default:
		throw std::invalid_argument("make_unary: not a unary operator");
	}
	PegExpr e;
	e.kind_ = kind;
	e.parts_.push_back(std::move(body));
	return e;
}

PegExpr PegExpr::make_ref(RuleId rule) {
	PegExpr e;
	e.kind_ = ExprKind::Ref;
	e.rule_ = rule;
	return e;
}

bool operator==(const PegExpr& a, const PegExpr& b) {
	if (a.kind_ != b.kind_)
		return false;
	switch (a.kind_) {
	case ExprKind::Empty:
	case ExprKind::AnyChar:
		return true;
	case ExprKind::Char:
		return a.ch_ == b.ch_;
	case ExprKind::Class:
		return a.cls_ == b.cls_;
	case ExprKind::Literal:
		return a.text_ == b.text_;
	case ExprKind::Ref:
		return a.rule_ == b.rule_;
	default:
		return a.parts_ == b.parts_;
	}
}

namespace peg {

PegExpr empty() { return PegExpr::make_empty(); }
PegExpr any() { return PegExpr::make_any(); }
PegExpr ch(char32_t c) { return PegExpr::make_char(c); }
PegExpr cls(std::u32string_view body) { return PegExpr::make_class(CharClass::parse(body)); }
PegExpr lit(std::u32string s) { return PegExpr::make_literal(std::move(s)); }
PegExpr seq(std::vector<PegExpr> parts) { return PegExpr::make_seq(std::move(parts)); }
PegExpr choice(std::vector<PegExpr> alts) { return PegExpr::make_choice(std::move(alts)); }
PegExpr star(PegExpr body) { return PegExpr::make_unary(ExprKind::Star, std::move(body)); }
PegExpr plus(PegExpr body) { return PegExpr::make_unary(ExprKind::Plus, std::move(body)); }
PegExpr opt(PegExpr body) { return PegExpr::make_unary(ExprKind::Opt, std::move(body)); }
PegExpr and_(PegExpr body) { return PegExpr::make_unary(ExprKind::And, std::move(body)); }
PegExpr not_(PegExpr body) { return PegExpr::make_unary(ExprKind::Not, std::move(body)); }
PegExpr ref(RuleId rule) { return PegExpr::make_ref(rule); }
PegExpr end_of_input() { return not_(any()); }

} // namespace peg

// ---------------------------------------------------------------------------
// Issues

std::string_view to_string(Severity s) {
	return s == Severity::Error ? "error" : "warning";
}

std::string_view to_string(IssueCode c) {
	switch (c) {
	case IssueCode::UnknownRef: return "UnknownRef";
	case IssueCode::NullableRepetition: return "NullableRepetition";
	case IssueCode::EmptyChoice: return "EmptyChoice";
	case IssueCode::UnreachableRule: return "UnreachableRule";
	}
	return "?";
}

namespace {

std::string summarize(const std::vector<ValidationIssue>& issues) {
	std::ostringstream out;
	out << "invalid grammar";
	for (const auto& issue : issues) {
		if (issue.severity != Severity::Error)
			continue;
		out << "; " << to_string(issue.code) << ": " << issue.message;
	}
	return out.str();
}

} // namespace

GrammarError::GrammarError(std::vector<ValidationIssue> issues)
	: std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

GrammarError::GrammarError(const std::string& what, std::vector<ValidationIssue> issues)
	: std::runtime_error(what), issues_(std::move(issues)) {}

// ---------------------------------------------------------------------------
// Grammar

struct Grammar::Data {
	std::vector<Rule> rules;
	RuleId start;
	std::unordered_map<std::string, RuleId> by_name;
	std::vector<bool> nullable;
	std::vector<ValidationIssue> issues;
	bool valid = true;
	bool has_repetition = false;
};

namespace {

bool expr_nullable(const PegExpr& e, const std::vector<bool>& rules) {
	switch (e.kind()) {
	case ExprKind::Empty:
	case ExprKind::Star:
	case ExprKind::Opt:
	case ExprKind::And:
	case ExprKind::Not:
		return true;
	case ExprKind::AnyChar:
	case ExprKind::Char:
	case ExprKind::Class:
		return false;
	case ExprKind::Literal:
		return e.literal().empty();
	case ExprKind::Plus:
		return expr_nullable(e.body(), rules);
	case ExprKind::Seq:
		return std::all_of(e.parts().begin(), e.parts().end(),
			[&](const PegExpr& p) { return expr_nullable(p, rules); });
	case ExprKind::Choice:
		return std::any_of(e.parts().begin(), e.parts().end(),
			[&](const PegExpr& p) { return expr_nullable(p, rules); });
	case ExprKind::Ref:
		return e.rule().index < rules.size() && rules[e.rule().index];
	}
	return false;
}

std::vector<bool> nullable_fixpoint(const std::vector<Rule>& rules) {
	std::vector<bool> table(rules.size(), false);
	bool changed = true;
	while (changed) {
		changed = false;
		for (std::size_t r = 0; r < rules.size(); ++r) {
			if (!table[r] && expr_nullable(rules[r].body, table)) {
				table[r] = true;
				changed = true;
			}
		}
	}
	return table;
}

void collect_refs(const PegExpr& e, std::vector<RuleId>& out) {
	if (e.kind() == ExprKind::Ref) {
		out.push_back(e.rule());
		return;
	}
	for (const auto& p : e.parts())
		collect_refs(p, out);
}

struct Checker {
	const std::vector<Rule>& rules;
	const std::vector<bool>& nullable;
	std::vector<ValidationIssue>& issues;
	bool& has_repetition;
	RuleId rule{};
	std::vector<std::uint32_t> path;

	void error(IssueCode code, std::string message) {
		issues.push_back({Severity::Error, code, rule, path, std::move(message)});
	}

	void walk(const PegExpr& e) {
		switch (e.kind()) {
		case ExprKind::Seq:
		case ExprKind::Choice:
			if (e.parts().empty())
				error(IssueCode::EmptyChoice,
					"rule '" + rules[rule.index].name + "': " + std::string(to_string(e.kind())) +
						" with no elements");
			break;
		case ExprKind::Star:
		case ExprKind::Plus:
			has_repetition = true;
			if (expr_nullable(e.body(), nullable))
				error(IssueCode::NullableRepetition,
					"rule '" + rules[rule.index].name + "': repetition over an expression that can "
						"succeed without consuming input: " + describe(e));
			break;
		case ExprKind::Ref:
			if (e.rule().index >= rules.size())
				error(IssueCode::UnknownRef,
					"rule '" + rules[rule.index].name + "' references undefined rule #" +
						std::to_string(e.rule().index));
			break;
		default:
			break;
		}
		const auto parts = e.parts();
		for (std::uint32_t i = 0; i < parts.size(); ++i) {
			path.push_back(i);
			walk(parts[i]);
			path.pop_back();
		}
	}
};

} // namespace

Grammar::Grammar(std::vector<Rule> rules, RuleId start) {
	auto data = std::make_shared<Data>();
	data->rules = std::move(rules);
	data->start = start;
	for (std::size_t r = 0; r < data->rules.size(); ++r)
		if (!data->by_name.emplace(data->rules[r].name, RuleId{static_cast<std::uint32_t>(r)}).second)
			throw std::invalid_argument("duplicate rule name '" + data->rules[r].name + "'");
	data->nullable = nullable_fixpoint(data->rules);

	auto& issues = data->issues;
	const auto rule_count = data->rules.size();
	if (start.index >= rule_count) {
		issues.push_back({Severity::Error, IssueCode::UnknownRef, start, {},
			"start rule #" + std::to_string(start.index) + " does not exist"});
	}
	Checker checker{data->rules, data->nullable, issues, data->has_repetition, RuleId{}, {}};
	for (std::size_t r = 0; r < rule_count; ++r) {
		checker.rule = RuleId{static_cast<std::uint32_t>(r)};
		checker.walk(data->rules[r].body);
	}

	if (start.index < rule_count) {
		std::vector<bool> seen(rule_count, false);
		std::vector<RuleId> todo{start};
		seen[start.index] = true;
		while (!todo.empty()) {
			const RuleId r = todo.back();
			todo.pop_back();
			std::vector<RuleId> refs;
			collect_refs(data->rules[r.index].body, refs);
			for (RuleId t : refs) {
				if (t.index < rule_count && !seen[t.index]) {
					seen[t.index] = true;
					todo.push_back(t);
				}
			}
		}
		for (std::size_t r = 0; r < rule_count; ++r) {
			if (!seen[r])
				issues.push_back({Severity::Warning, IssueCode::UnreachableRule,
					RuleId{static_cast<std::uint32_t>(r)}, {},
					"rule '" + data->rules[r].name + "' is unreachable from the start rule"});
		}
	}

	data->valid = std::none_of(issues.begin(), issues.end(),
		[](const ValidationIssue& i) { return i.severity == Severity::Error; });
	data_ = std::move(data);
}

std::size_t Grammar::rule_count() const noexcept { return data_->rules.size(); }

const Rule& Grammar::rule(RuleId id) const {
	if (id.index >= data_->rules.size())
		throw std::out_of_range("rule id " + std::to_string(id.index) + " out of range");
	return data_->rules[id.index];
}

std::span<const Rule> Grammar::rules() const noexcept { return data_->rules; }

RuleId Grammar::start() const noexcept { return data_->start; }

std::optional<RuleId> Grammar::find(std::string_view name) const {
	const auto it = data_->by_name.find(std::string(name));
	if (it == data_->by_name.end())
		return std::nullopt;
	return it->second;
}

const std::vector<ValidationIssue>& Grammar::issues() const noexcept { return data_->issues; }

bool Grammar::valid() const noexcept { return data_->valid; }

void Grammar::require_valid() const {
	if (data_->valid)
		return;
	std::vector<ValidationIssue> errors;
	for (const auto& issue : data_->issues)
		if (issue.severity == Severity::Error)
			errors.push_back(issue);
	throw GrammarError(std::move(errors));
}

bool Grammar::rule_nullable(RuleId id) const {
	return id.index < data_->nullable.size() && data_->nullable[id.index];
}

bool Grammar::has_repetition() const noexcept { return data_->has_repetition; }

bool operator==(const Grammar& a, const Grammar& b) {
	return a.data_->start == b.data_->start && a.data_->rules == b.data_->rules;
}

// ---------------------------------------------------------------------------
// GrammarBuilder

RuleId GrammarBuilder::declare(std::string_view name) {
	for (std::size_t i = 0; i < names_.size(); ++i)
		if (names_[i] == name)
			return RuleId{static_cast<std::uint32_t>(i)};
	names_.emplace_back(name);
	bodies_.emplace_back();
	return RuleId{static_cast<std::uint32_t>(names_.size() - 1)};
}

void GrammarBuilder::define(RuleId id, PegExpr body) {
	if (id.index >= bodies_.size())
		throw std::invalid_argument("define: undeclared rule id");
	if (bodies_[id.index])
		throw std::invalid_argument("rule '" + names_[id.index] + "' defined twice");
	bodies_[id.index] = std::move(body);
}

RuleId GrammarBuilder::define(std::string_view name, PegExpr body) {
	const RuleId id = declare(name);
	define(id, std::move(body));
	return id;
}

Grammar GrammarBuilder::build() const {
	std::vector<Rule> rules;
	rules.reserve(names_.size());
	for (std::size_t i = 0; i < names_.size(); ++i) {
		if (!bodies_[i])
			throw std::invalid_argument("rule '" + names_[i] + "' declared but never defined");
		rules.push_back({names_[i], *bodies_[i]});
	}
	return Grammar(std::move(rules), start_.value_or(RuleId{0}));
}

// ---------------------------------------------------------------------------
// nullable / validate

bool nullable(const Grammar& g, const PegExpr& e) {
	std::vector<bool> table(g.rule_count());
	for (std::size_t r = 0; r < table.size(); ++r)
		table[r] = g.rule_nullable(RuleId{static_cast<std::uint32_t>(r)});
	return expr_nullable(e, table);
}

std::vector<ValidationIssue> validate(const Grammar& g) { return g.issues(); }

// ---------------------------------------------------------------------------
// describe

namespace {

void quote_char(std::string& out, char32_t c, char32_t delim) {
	if (c == delim) {
		out.push_back('\\');
		append_utf8(out, c);
		return;
	}
	out += escape_char(c);
}

void class_char(std::string& out, char32_t c) {
	if (c == U']' || c == U'-' || c == U'^') {
		out.push_back('\\');
		append_utf8(out, c);
		return;
	}
	out += escape_char(c);
}

enum class Prec { Choice, Seq, Prefix, Postfix, Primary };

Prec precedence(const PegExpr& e) {
	switch (e.kind()) {
	case ExprKind::Choice: return Prec::Choice;
	case ExprKind::Seq: return Prec::Seq;
	case ExprKind::And:
	case ExprKind::Not: return Prec::Prefix;
	case ExprKind::Star:
	case ExprKind::Plus:
	case ExprKind::Opt: return Prec::Postfix;
	default: return Prec::Primary;
	}
}

struct Printer {
	const Grammar* grammar;
	std::string out;

	void wrapped(const PegExpr& e, bool parens) {
		if (parens) out.push_back('(');
		print(e);
		if (parens) out.push_back(')');
	}

	void print(const PegExpr& e) {
		switch (e.kind()) {
		case ExprKind::Empty:
			out += "()";
			break;
		case ExprKind::AnyChar:
			out.push_back('.');
			break;
		case ExprKind::Char:
			out.push_back('\'');
			quote_char(out, e.character(), U'\'');
			out.push_back('\'');
			break;
		case ExprKind::Literal:
			out.push_back('"');
			for (char32_t c : e.literal())
				quote_char(out, c, U'"');
			out.push_back('"');
			break;
		case ExprKind::Class:
			out.push_back('[');
			if (e.char_class().negated())
				out.push_back('^');
			for (const auto& r : e.char_class().ranges()) {
				class_char(out, r.lo);
				if (r.hi != r.lo) {
					out.push_back('-');
					class_char(out, r.hi);
				}
			}
			out.push_back(']');
			break;
		case ExprKind::Seq: {
			bool first = true;
			for (const auto& p : e.parts()) {
				if (!first) out.push_back(' ');
				first = false;
				wrapped(p, precedence(p) <= Prec::Seq);
			}
			break;
		}
		case ExprKind::Choice: {
			bool first = true;
			for (const auto& p : e.parts()) {
				if (!first) out += " / ";
				first = false;
				wrapped(p, precedence(p) == Prec::Choice);
			}
			break;
		}
		case ExprKind::Star:
		case ExprKind::Plus:
		case ExprKind::Opt:
			wrapped(e.body(), precedence(e.body()) != Prec::Primary);
			out.push_back(e.kind() == ExprKind::Star ? '*' : e.kind() == ExprKind::Plus ? '+' : '?');
			break;
		case ExprKind::And:
		case ExprKind::Not:
			out.push_back(e.kind() == ExprKind::And ? '&' : '!');
			wrapped(e.body(), precedence(e.body()) <= Prec::Seq);
			break;
		case ExprKind::Ref:
			if (grammar && e.rule().index < grammar->rule_count())
				out += grammar->name(e.rule());
			else
				out += "#" + std::to_string(e.rule().index);
			break;
		}
	}
};

} // namespace

std::string describe(const PegExpr& e) {
	Printer p{nullptr, {}};
	p.print(e);
	return std::move(p.out);
}

std::string describe(const Grammar& g, const PegExpr& e) {
	Printer p{&g, {}};
	p.print(e);
	return std::move(p.out);
}

} // namespace packrat
