#include "packrat/grammar_text.hpp"

#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "packrat/utf8.hpp"

namespace packrat {

namespace {

std::string where(std::size_t line, std::size_t column, const std::string& message) {
	std::ostringstream out;
	out << line << ":" << column << ": " << message;
	return out.str();
}

bool ident_start(char32_t c) {
	return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'_';
}

bool ident_char(char32_t c) {
	return ident_start(c) || (c >= U'0' && c <= U'9');
}

class TextParser {
public:
	explicit TextParser(std::u32string text) : text_(std::move(text)) {}

	Grammar run() {
		skip_space();
		std::optional<std::string> start_name;
		std::size_t start_line = 0, start_col = 0;
		while (!at_end()) {
			if (peek() == U'@') {
				const auto line = line_, col = col_;
				advance();
				const std::string directive = identifier("directive name");
				if (directive != "start")
					fail_at(line, col, "unknown directive '@" + directive + "'");
				skip_space();
				start_line = line_;
				start_col = col_;
				start_name = identifier("rule name after @start");
				skip_space();
				expect(U';', "';' after @start directive");
				continue;
			}
			parse_rule();
		}
		if (defined_.empty())
			fail("grammar has no rules");

		std::vector<Rule> rules;
		for (std::size_t i = 0; i < defined_.size(); ++i)
			rules.push_back({names_[i], defined_[i]});
		RuleId start{0};
		if (start_name) {
			const auto id = lookup(*start_name);
			if (id.index >= defined_.size()) {
				throw GrammarError({ValidationIssue{Severity::Error, IssueCode::UnknownRef, id, {},
					where(start_line, start_col, "@start names undefined rule '" + *start_name + "'")}});
			}
			start = id;
		}
		Grammar g(std::move(rules), start);
		if (!g.valid()) {
			std::vector<ValidationIssue> errors;
			for (auto issue : g.issues()) {
				if (issue.severity != Severity::Error)
					continue;
				if (issue.code == IssueCode::UnknownRef && issue.rule.index < defined_.size()) {
					// Undefined names were given ids past the defined rules;
					// put the name back into the message.
					issue.message = "rule '" + names_[issue.rule.index] +
						"' references undefined rule '" + undefined_name(issue) + "'";
				}
				errors.push_back(std::move(issue));
			}
			throw GrammarError(std::move(errors));
		}
		return g;
	}

private:
	std::u32string text_;
	std::size_t pos_ = 0;
	std::size_t line_ = 1;
	std::size_t col_ = 1;

	// Rule names in order of first definition; undefined references get ids
	// after all definitions are known.
	std::vector<std::string> names_;
	std::unordered_map<std::string, RuleId> ids_;
	std::vector<PegExpr> defined_;

	bool at_end() const { return pos_ >= text_.size(); }
	char32_t peek(std::size_t ahead = 0) const {
		return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : U'\0';
	}

	char32_t advance() {
		const char32_t c = text_[pos_++];
		if (c == U'\n') {
			++line_;
			col_ = 1;
		} else {
			++col_;
		}
		return c;
	}

	[[noreturn]] void fail(const std::string& message) const {
		throw GrammarSyntaxError(line_, col_, message);
	}
	[[noreturn]] void fail_at(std::size_t line, std::size_t col, const std::string& message) const {
		throw GrammarSyntaxError(line, col, message);
	}

	void skip_space() {
		while (!at_end()) {
			const char32_t c = peek();
			if (c == U' ' || c == U'\t' || c == U'\r' || c == U'\n') {
				advance();
			} else if (c == U'#') {
				while (!at_end() && peek() != U'\n')
					advance();
			} else {
				break;
			}
		}
	}

	void expect(char32_t c, const std::string& what) {
		if (at_end() || peek() != c)
			fail("expected " + what);
		advance();
		skip_space();
	}

	std::string identifier(const std::string& what) {
		if (at_end() || !ident_start(peek()))
			fail("expected " + what);
		std::u32string name;
		while (!at_end() && ident_char(peek()))
			name.push_back(advance());
		return encode_utf8(name);
	}

	RuleId lookup(const std::string& name) {
		const auto it = ids_.find(name);
		if (it != ids_.end())
			return it->second;
		const RuleId id{static_cast<std::uint32_t>(names_.size())};
		names_.push_back(name);
		ids_.emplace(name, id);
		return id;
	}

	void parse_rule() {
		const auto line = line_, col = col_;
		const std::string name = identifier("rule name");
		skip_space();
		if (!(peek() == U'<' && peek(1) == U'-'))
			fail("expected '<-' after rule name '" + name + "'");
		advance();
		advance();
		skip_space();
		PegExpr body = choice();
		expect(U';', "';' at end of rule '" + name + "'");

		const RuleId id = lookup(name);
		// Definitions must be dense and in file order, so a name that was
		// referenced before being defined is moved into place here.
		if (id.index < defined_.size())
			fail_at(line, col, "rule '" + name + "' defined twice");
		defined_.push_back(std::move(body));
		const RuleId slot{static_cast<std::uint32_t>(defined_.size() - 1)};
		if (id != slot)
			relabel(id, slot);
	}

	// Swaps two rule ids everywhere they appear so far.
	void relabel(RuleId a, RuleId b) {
		std::swap(names_[a.index], names_[b.index]);
		ids_[names_[a.index]] = a;
		ids_[names_[b.index]] = b;
		for (auto& body : defined_)
			swap_refs(body, a, b);
	}

	static void swap_refs(PegExpr& e, RuleId a, RuleId b) {
		if (e.kind() == ExprKind::Ref) {
			if (e.rule() == a)
				e = PegExpr::make_ref(b);
			else if (e.rule() == b)
				e = PegExpr::make_ref(a);
			return;
		}
		if (e.parts().empty())
			return;
		std::vector<PegExpr> parts(e.parts().begin(), e.parts().end());
		for (auto& p : parts)
			swap_refs(p, a, b);
		switch (e.kind()) {
		case ExprKind::Seq: e = PegExpr::make_seq(std::move(parts)); break;
		case ExprKind::Choice: e = PegExpr::make_choice(std::move(parts)); break;
		default: e = PegExpr::make_unary(e.kind(), std::move(parts.front())); break;
		}
	}

	std::string undefined_name(const ValidationIssue& issue) const {
		// Walk the path to the offending Ref.
		const PegExpr* e = &defined_[issue.rule.index];
		for (auto i : issue.path)
			e = &e->parts()[i];
		return e->kind() == ExprKind::Ref && e->rule().index < names_.size()
			? names_[e->rule().index] : std::string("?");
	}

	PegExpr choice() {
		std::vector<PegExpr> alts;
		alts.push_back(sequence());
		while (!at_end() && peek() == U'/') {
			advance();
			skip_space();
			alts.push_back(sequence());
		}
		if (alts.size() == 1)
			return std::move(alts.front());
		return PegExpr::make_choice(std::move(alts));
	}

	PegExpr sequence() {
		std::vector<PegExpr> parts;
		while (!at_end()) {
			const char32_t c = peek();
			if (c == U'/' || c == U')' || c == U';')
				break;
			parts.push_back(prefix());
		}
		if (parts.empty())
			return PegExpr::make_empty();
		if (parts.size() == 1)
			return std::move(parts.front());
		return PegExpr::make_seq(std::move(parts));
	}

	PegExpr prefix() {
		if (peek() == U'&' || peek() == U'!') {
			const auto kind = advance() == U'&' ? ExprKind::And : ExprKind::Not;
			skip_space();
			return PegExpr::make_unary(kind, prefix());
		}
		PegExpr e = primary();
		while (!at_end() && (peek() == U'*' || peek() == U'+' || peek() == U'?')) {
			const char32_t op = advance();
			skip_space();
			const auto kind = op == U'*' ? ExprKind::Star : op == U'+' ? ExprKind::Plus : ExprKind::Opt;
			e = PegExpr::make_unary(kind, std::move(e));
		}
		return e;
	}

	char32_t escaped() {
		// After a backslash.
		if (at_end())
			fail("unterminated escape");
		const char32_t c = advance();
		switch (c) {
		case U'n': return U'\n';
		case U't': return U'\t';
		case U'r': return U'\r';
		case U'f': return U'\f';
		case U'v': return U'\v';
		case U'0': return U'\0';
		case U'u': {
			char32_t v = 0;
			for (int k = 0; k < 4; ++k) {
				if (at_end())
					fail("\\u escape needs four hex digits");
				const char32_t h = advance();
				v <<= 4;
				if (h >= U'0' && h <= U'9') v |= h - U'0';
				else if (h >= U'a' && h <= U'f') v |= h - U'a' + 10;
				else if (h >= U'A' && h <= U'F') v |= h - U'A' + 10;
				else fail("bad hex digit in \\u escape");
			}
			return v;
		}
		default: return c;
		}
	}

	std::u32string quoted(char32_t delim) {
		std::u32string s;
		while (true) {
			if (at_end() || peek() == U'\n')
				fail("unterminated literal");
			const char32_t c = advance();
			if (c == delim)
				break;
			s.push_back(c == U'\\' ? escaped() : c);
		}
		return s;
	}

	PegExpr primary() {
		const auto line = line_, col = col_;
		const char32_t c = peek();
		if (ident_start(c)) {
			const std::string name = identifier("identifier");
			skip_space();
			return PegExpr::make_ref(lookup(name));
		}
		switch (c) {
		case U'(': {
			advance();
			skip_space();
			if (peek() == U')') {
				advance();
				skip_space();
				return PegExpr::make_empty();
			}
			PegExpr inner = choice();
			expect(U')', "')'");
			return inner;
		}
		case U'\'': {
			advance();
			std::u32string s = quoted(U'\'');
			if (s.size() != 1)
				fail_at(line, col, "character literal must hold exactly one character");
			skip_space();
			return PegExpr::make_char(s.front());
		}
		case U'"': {
			advance();
			std::u32string s = quoted(U'"');
			skip_space();
			return PegExpr::make_literal(std::move(s));
		}
		case U'[': {
			advance();
			std::u32string body;
			while (true) {
				if (at_end() || peek() == U'\n')
					fail_at(line, col, "unterminated character class");
				const char32_t k = advance();
				if (k == U']')
					break;
				body.push_back(k);
				if (k == U'\\') {
					if (at_end())
						fail_at(line, col, "unterminated character class");
					body.push_back(advance());
				}
			}
			skip_space();
			try {
				return PegExpr::make_class(CharClass::parse(body));
			} catch (const std::invalid_argument& e) {
				fail_at(line, col, e.what());
			}
		}
		case U'.':
			advance();
			skip_space();
			return PegExpr::make_any();
		default:
			break;
		}
		if (at_end())
			fail("unexpected end of input in expression");
		std::string shown = escape_char(c);
		fail("unexpected character '" + shown + "' in expression");
	}
};

} // namespace

GrammarSyntaxError::GrammarSyntaxError(std::size_t line, std::size_t column, const std::string& message)
	: std::runtime_error(where(line, column, message)), line_(line), column_(column) {}

Grammar load_grammar(std::string_view utf8_text) {
	std::u32string text;
	try {
		text = decode_utf8(utf8_text);
	} catch (const Utf8Error& e) {
		throw GrammarSyntaxError(1, 1, std::string(e.what()) + " at byte " + std::to_string(e.offset()));
	}
	return TextParser(std::move(text)).run();
}

std::string format_grammar(const Grammar& g) {
	std::string out;
	if (g.start().index != 0 && g.start().index < g.rule_count())
		out += "@start " + g.name(g.start()) + " ;\n";
	for (const auto& rule : g.rules()) {
		out += rule.name;
		out += " <- ";
		out += describe(g, rule.body);
		out += " ;\n";
	}
	return out;
}

} // namespace packrat
