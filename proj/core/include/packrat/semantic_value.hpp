#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace packrat {

class SemanticValue;

struct Unit {
	friend constexpr bool operator==(Unit, Unit) = default;
};

/// Value produced by a catalog evaluator: integer, character, text, unit,
/// pair or sequence. Cheap to copy (pairs share their halves).
class SemanticValue {
public:
	using Pair = std::pair<SemanticValue, SemanticValue>;
	using Sequence = std::vector<SemanticValue>;

	SemanticValue() : v_(Unit{}) {}
	SemanticValue(Unit u) : v_(u) {}
	SemanticValue(std::int64_t i) : v_(i) {}
	SemanticValue(int i) : v_(std::int64_t{i}) {}
	SemanticValue(char32_t c) : v_(c) {}
	SemanticValue(std::string s) : v_(std::move(s)) {}
	SemanticValue(SemanticValue a, SemanticValue b)
		: v_(std::make_shared<const Pair>(std::move(a), std::move(b))) {}
	SemanticValue(Sequence items) : v_(std::move(items)) {}

	bool is_unit() const noexcept { return std::holds_alternative<Unit>(v_); }
	bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(v_); }
	bool is_char() const noexcept { return std::holds_alternative<char32_t>(v_); }
	bool is_text() const noexcept { return std::holds_alternative<std::string>(v_); }
	bool is_pair() const noexcept { return std::holds_alternative<std::shared_ptr<const Pair>>(v_); }
	bool is_sequence() const noexcept { return std::holds_alternative<Sequence>(v_); }

	/// Accessors throw std::bad_variant_access on a kind mismatch.
	std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
	char32_t as_char() const { return std::get<char32_t>(v_); }
	const std::string& as_text() const { return std::get<std::string>(v_); }
	const SemanticValue& first() const { return std::get<std::shared_ptr<const Pair>>(v_)->first; }
	const SemanticValue& second() const { return std::get<std::shared_ptr<const Pair>>(v_)->second; }
	const Sequence& as_sequence() const { return std::get<Sequence>(v_); }

	friend bool operator==(const SemanticValue& a, const SemanticValue& b);

private:
	std::variant<Unit, std::int64_t, char32_t, std::string, std::shared_ptr<const Pair>, Sequence> v_;
};

/// 14, '+', "text", (), (42,2), [a,b].
std::string to_string(const SemanticValue& v);

} // namespace packrat
