#include "packrat/semantic_value.hpp"

#include "packrat/utf8.hpp"

namespace packrat {

bool operator==(const SemanticValue& a, const SemanticValue& b) {
	if (a.v_.index() != b.v_.index())
		return false;
	if (a.is_pair())
		return a.first() == b.first() && a.second() == b.second();
	return a.v_ == b.v_;
}

std::string to_string(const SemanticValue& v) {
	if (v.is_unit())
		return "()";
	if (v.is_int())
		return std::to_string(v.as_int());
	if (v.is_char())
		return escape_char(v.as_char());
	if (v.is_text())
		return v.as_text();
	if (v.is_pair())
		return "(" + to_string(v.first()) + "," + to_string(v.second()) + ")";
	std::string out = "[";
	bool first = true;
	for (const auto& item : v.as_sequence()) {
		if (!first)
			out += ',';
		out += to_string(item);
		first = false;
	}
	return out + "]";
}

} // namespace packrat
