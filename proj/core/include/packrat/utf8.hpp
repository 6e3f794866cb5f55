#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace packrat {

/// Thrown when a byte sequence is not well-formed UTF-8.
class Utf8Error : public std::runtime_error {
public:
	Utf8Error(const std::string& what, std::size_t offset)
		: std::runtime_error(what), offset_(offset) {}

	std::size_t offset() const noexcept { return offset_; }

private:
	std::size_t offset_;
};

/// Decodes UTF-8 into Unicode scalar values. Rejects overlong forms,
/// surrogates and truncated sequences.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view text);

void append_utf8(std::string& out, char32_t c);

/// Printable rendering of one scalar value for diagnostics: control
/// characters become C-style escapes, everything else is UTF-8.
std::string escape_char(char32_t c);

} // namespace packrat
