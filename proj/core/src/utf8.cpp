#include "packrat/utf8.hpp"

#include <cstdint>
#include <cstdio>

namespace packrat {

std::u32string decode_utf8(std::string_view bytes) {
	std::u32string out;
	out.reserve(bytes.size());
	std::size_t i = 0;
	while (i < bytes.size()) {
		const auto lead = static_cast<unsigned char>(bytes[i]);
		if (lead < 0x80) {
			out.push_back(lead);
			++i;
			continue;
		}
		std::size_t extra;
		char32_t cp;
		char32_t min;
		if ((lead & 0xE0) == 0xC0) {
			extra = 1; cp = lead & 0x1F; min = 0x80;
		} else if ((lead & 0xF0) == 0xE0) {
			extra = 2; cp = lead & 0x0F; min = 0x800;
		} else if ((lead & 0xF8) == 0xF0) {
			extra = 3; cp = lead & 0x07; min = 0x10000;
		} else {
			throw Utf8Error("invalid UTF-8 lead byte", i);
		}
		if (i + extra >= bytes.size())
			throw Utf8Error("truncated UTF-8 sequence", i);
		for (std::size_t k = 1; k <= extra; ++k) {
			const auto cont = static_cast<unsigned char>(bytes[i + k]);
			if ((cont & 0xC0) != 0x80)
				throw Utf8Error("invalid UTF-8 continuation byte", i + k);
			cp = (cp << 6) | (cont & 0x3F);
		}
		if (cp < min)
			throw Utf8Error("overlong UTF-8 encoding", i);
		if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
			throw Utf8Error("UTF-8 sequence is not a Unicode scalar value", i);
		out.push_back(cp);
		i += extra + 1;
	}
	return out;
}

void append_utf8(std::string& out, char32_t c) {
	const auto cp = static_cast<std::uint32_t>(c);
	if (cp < 0x80) {
		out.push_back(static_cast<char>(cp));
	} else if (cp < 0x800) {
		out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
		out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
	} else if (cp < 0x10000) {
		out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
		out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
	} else {
		out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
		out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
		out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
	}
}

std::string encode_utf8(std::u32string_view text) {
	std::string out;
	out.reserve(text.size());
	for (char32_t c : text)
		append_utf8(out, c);
	return out;
}

std::string escape_char(char32_t c) {
	switch (c) {
	case U'\n': return "\\n";
	case U'\t': return "\\t";
	case U'\r': return "\\r";
	case U'\f': return "\\f";
	case U'\v': return "\\v";
	case U'\\': return "\\\\";
	default: break;
	}
	if (c < 0x20 || c == 0x7F) {
		char buf[12];
		std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
		return buf;
	}
	std::string out;
	append_utf8(out, c);
	return out;
}

} // namespace packrat
