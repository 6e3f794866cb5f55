#pragma once

// Typed parser combinators over a ParseSession. Parsers are immutable
// values; rule() routes through the session's memo matrix, everything else
// is recomputed on each use, so repetition (many) inside a rule can cost
// more than one step per memo cell.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "packrat/engine.hpp"
#include "packrat/semantic_value.hpp"
#include "packrat/utf8.hpp"

namespace packrat {

template <class V>
struct Reply {
	Pos end;
	V value;
};

template <class V>
using Result = std::optional<Reply<V>>;

/// Zero-width iteration inside many/many1.
class NoProgressError : public EngineError {
public:
	explicit NoProgressError(Pos pos)
		: EngineError("repetition made no progress at position " + std::to_string(pos)), pos_(pos) {}

	Pos position() const noexcept { return pos_; }

private:
	Pos pos_;
};

/// A RuleSlot was used before bind().
class ConfigurationError : public std::logic_error {
public:
	using std::logic_error::logic_error;
};

template <class V>
class Parser {
public:
	using value_type = V;
	using Fn = std::function<Result<V>(ParseSession&, Pos)>;

	explicit Parser(Fn fn) : fn_(std::make_shared<const Fn>(std::move(fn))) {}

	Result<V> operator()(ParseSession& s, Pos pos) const {
		s.count_step();
		return (*fn_)(s, pos);
	}

private:
	std::shared_ptr<const Fn> fn_;
};

template <class V>
Parser<V> pure(V v) {
	return Parser<V>([v = std::move(v)](ParseSession&, Pos pos) -> Result<V> { return Reply<V>{pos, v}; });
}

/// Runs p, then f(value) where p stopped.
template <class A, class F>
auto then(Parser<A> p, F f) {
	using PB = std::invoke_result_t<F, const A&>;
	using B = typename PB::value_type;
	return Parser<B>([p = std::move(p), f = std::move(f)](ParseSession& s, Pos pos) -> Result<B> {
		auto a = p(s, pos);
		if (!a)
			return std::nullopt;
		return f(a->value)(s, a->end);
	});
}

/// Ordered choice: q runs at the original position only if p fails.
template <class V>
Parser<V> choice(Parser<V> p, Parser<V> q) {
	return Parser<V>([p = std::move(p), q = std::move(q)](ParseSession& s, Pos pos) -> Result<V> {
		if (auto r = p(s, pos))
			return r;
		return q(s, pos);
	});
}

template <class V>
Parser<V> fail(std::string label = {}) {
	return Parser<V>([label = std::move(label)](ParseSession& s, Pos pos) -> Result<V> {
		if (!label.empty())
			s.note_expected(pos, label);
		return std::nullopt;
	});
}

template <class Pred>
Parser<char32_t> char_satisfy(Pred pred, std::string label) {
	return Parser<char32_t>([pred = std::move(pred), label = std::move(label)](ParseSession& s, Pos pos)
		-> Result<char32_t> {
		const auto c = s.read_char(pos);
		if (c && pred(*c))
			return Reply<char32_t>{pos + 1, *c};
		s.note_expected(pos, label);
		return std::nullopt;
	});
}

inline Parser<char32_t> any_char() {
	return char_satisfy([](char32_t) { return true; }, "any character");
}

inline Parser<char32_t> character(char32_t want) {
	return char_satisfy([want](char32_t c) { return c == want; }, "'" + escape_char(want) + "'");
}

inline Parser<char32_t> digit() {
	return char_satisfy([](char32_t c) { return c >= U'0' && c <= U'9'; }, "digit");
}

inline Parser<std::u32string> literal(std::u32string text) {
	std::string label = "\"" + encode_utf8(text) + "\"";
	return Parser<std::u32string>([text = std::move(text), label = std::move(label)](ParseSession& s, Pos pos)
		-> Result<std::u32string> {
		for (std::size_t i = 0; i < text.size(); ++i) {
			const auto c = s.read_char(static_cast<Pos>(pos + i));
			if (!c || *c != text[i]) {
				s.note_expected(pos, label);
				return std::nullopt;
			}
		}
		return Reply<std::u32string>{static_cast<Pos>(pos + text.size()), text};
	});
}

template <class A, class F>
auto map(Parser<A> p, F f) {
	using B = std::invoke_result_t<F, const A&>;
	return Parser<B>([p = std::move(p), f = std::move(f)](ParseSession& s, Pos pos) -> Result<B> {
		auto a = p(s, pos);
		if (!a)
			return std::nullopt;
		return Reply<B>{a->end, f(a->value)};
	});
}

/// Both in order, keeping both values.
template <class A, class B>
Parser<std::pair<A, B>> seq(Parser<A> p, Parser<B> q) {
	return Parser<std::pair<A, B>>([p = std::move(p), q = std::move(q)](ParseSession& s, Pos pos)
		-> Result<std::pair<A, B>> {
		auto a = p(s, pos);
		if (!a)
			return std::nullopt;
		auto b = q(s, a->end);
		if (!b)
			return std::nullopt;
		return Reply<std::pair<A, B>>{b->end, {std::move(a->value), std::move(b->value)}};
	});
}

/// Both in order, keeping the first value.
template <class A, class B>
Parser<A> skip_right(Parser<A> p, Parser<B> q) {
	return map(seq(std::move(p), std::move(q)), [](const std::pair<A, B>& v) { return v.first; });
}

/// Both in order, keeping the second value.
template <class A, class B>
Parser<B> skip_left(Parser<A> p, Parser<B> q) {
	return map(seq(std::move(p), std::move(q)), [](const std::pair<A, B>& v) { return v.second; });
}

namespace detail {

template <class V>
Result<std::vector<V>> repeat(const Parser<V>& p, ParseSession& s, Pos pos, std::size_t min) {
	std::vector<V> out;
	Pos cur = pos;
	while (auto r = p(s, cur)) {
		if (r->end == cur)
			throw NoProgressError(cur);
		cur = r->end;
		out.push_back(std::move(r->value));
	}
	if (out.size() < min)
		return std::nullopt;
	return Reply<std::vector<V>>{cur, std::move(out)};
}

struct PredicateScope {
	ParseSession& s;
	explicit PredicateScope(ParseSession& session) : s(session) { s.enter_predicate(); }
	~PredicateScope() { s.leave_predicate(); }
	PredicateScope(const PredicateScope&) = delete;
	PredicateScope& operator=(const PredicateScope&) = delete;
};

} // namespace detail

/// Greedy repetition. Each iteration must consume input; a zero-width
/// success throws NoProgressError. Not memoized: many(p) re-run at the same
/// position repeats all of its work.
template <class V>
Parser<std::vector<V>> many(Parser<V> p) {
	return Parser<std::vector<V>>([p = std::move(p)](ParseSession& s, Pos pos) {
		return detail::repeat(p, s, pos, 0);
	});
}

template <class V>
Parser<std::vector<V>> many1(Parser<V> p) {
	return Parser<std::vector<V>>([p = std::move(p)](ParseSession& s, Pos pos) {
		return detail::repeat(p, s, pos, 1);
	});
}

/// Succeeds without consuming input iff p succeeds.
template <class V>
Parser<Unit> and_pred(Parser<V> p) {
	return Parser<Unit>([p = std::move(p)](ParseSession& s, Pos pos) -> Result<Unit> {
		bool ok;
		{
			detail::PredicateScope scope(s);
			ok = p(s, pos).has_value();
		}
		if (!ok) {
			s.note_expected(pos, "&(...)");
			return std::nullopt;
		}
		return Reply<Unit>{pos, Unit{}};
	});
}

/// Succeeds without consuming input iff p fails.
template <class V>
Parser<Unit> not_pred(Parser<V> p) {
	return Parser<Unit>([p = std::move(p)](ParseSession& s, Pos pos) -> Result<Unit> {
		bool ok;
		{
			detail::PredicateScope scope(s);
			ok = !p(s, pos).has_value();
		}
		if (!ok) {
			s.note_expected(pos, "!(...)");
			return std::nullopt;
		}
		return Reply<Unit>{pos, Unit{}};
	});
}

/// p, but only when pred accepts its value.
template <class V, class Pred>
Parser<V> semantic_guard(Parser<V> p, Pred pred) {
	return Parser<V>([p = std::move(p), pred = std::move(pred)](ParseSession& s, Pos pos) -> Result<V> {
		auto r = p(s, pos);
		if (r && pred(r->value))
			return r;
		return std::nullopt;
	});
}

/// A grammar rule seen from the combinator layer: applying it goes through
/// the session's memo matrix, and the typed value is decoded from the
/// stored parse tree. Copies share the binding, so a slot can be captured
/// by parsers before it is bound.
template <class V>
class RuleSlot {
public:
	using Decoder = std::function<V(const ParseTreeNode&)>;

	RuleSlot() : state_(std::make_shared<State>()) {}

	void bind(RuleId rule, Decoder decode) {
		state_->rule = rule;
		state_->decode = std::move(decode);
	}
	bool bound() const noexcept { return state_->rule.has_value(); }
	RuleId rule_id() const {
		check();
		return *state_->rule;
	}
	V decode(const ParseTreeNode& n) const {
		check();
		return state_->decode(n);
	}

private:
	struct State {
		std::optional<RuleId> rule;
		Decoder decode;
	};
	std::shared_ptr<State> state_;

	void check() const {
		if (!state_->rule)
			throw ConfigurationError("rule slot used before it was bound");
	}
};

template <class V>
Parser<V> rule(RuleSlot<V> slot) {
	return Parser<V>([slot = std::move(slot)](ParseSession& s, Pos pos) -> Result<V> {
		const Outcome o = s.apply(slot.rule_id(), pos);
		if (!o)
			return std::nullopt;
		return Reply<V>{o.end, slot.decode(s.node(o.node))};
	});
}

/// Parses at `pos` and returns the value only if the parser succeeds.
template <class V>
Result<V> run(const Parser<V>& p, ParseSession& s, Pos pos = 0) {
	return p(s, pos);
}

} // namespace packrat
