#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "packrat/grammar.hpp"

namespace packrat {

/// Syntax error in grammar text; line and column are 1-based and count
/// Unicode scalar values.
class GrammarSyntaxError : public std::runtime_error {
public:
	GrammarSyntaxError(std::size_t line, std::size_t column, const std::string& message);

	std::size_t line() const noexcept { return line_; }
	std::size_t column() const noexcept { return column_; }

private:
	std::size_t line_;
	std::size_t column_;
};

/// Parses the textual PEG notation:
///
///     # comment
///     @start Sum ;
///     Sum   <- Digit ('+' Digit)* ;
///     Digit <- [0-9] ;
///
/// Juxtaposition is sequence, `/` ordered choice, postfix `* + ?`, prefix
/// `& !`, `'c'` a single character, `"str"` a literal, `[...]` a class
/// (`^` complements), `.` any character and `()` the empty expression.
/// The first rule is the start rule unless `@start` names another.
///
/// Throws GrammarSyntaxError on malformed text and GrammarError when the
/// result fails validation (e.g. a reference to an undefined rule).
Grammar load_grammar(std::string_view utf8_text);

/// Renders `g` in the notation accepted by load_grammar.
std::string format_grammar(const Grammar& g);

} // namespace packrat
