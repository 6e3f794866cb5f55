#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "packrat/catalog.hpp"
#include "packrat/oracles.hpp"

namespace packrat {

struct CheckOptions {
	std::size_t max_len = 6;
	/// Every string of length 0..max_len over the alphabet; otherwise
	/// `trials` random strings with lengths uniform in 0..max_len.
	bool exhaustive = true;
	std::size_t trials = 1000;
	std::uint64_t seed = 0;
	/// Also compare against the CFG end-set recognizer where the grammar
	/// allows it.
	bool cfg = true;
	/// Counterexamples listed per grammar (all are counted).
	std::size_t max_listed = 10;
	NaiveOptions naive{};
};

struct CheckReport {
	std::string grammar;
	std::uint64_t inputs = 0;
	/// (rule, position) verdicts compared across engines.
	std::uint64_t cells_compared = 0;
	std::uint64_t failures = 0;
	std::uint64_t expected_divergences = 0;
	/// Counterexamples and expected divergences, in input order.
	std::vector<std::string> notes;

	bool ok() const noexcept { return failures == 0; }
};

/// Differential run of packrat against the naive interpreter, the tabular
/// filler and (for predicate- and repetition-free grammars) the CFG
/// recognizer. For left-recursive entries it instead checks that every
/// engine reports the cycle.
///
/// Per input, every rule is applied at every position in one packrat
/// session and compared with the oracles. Complete-parse inputs that the
/// CFG reading accepts but packrat rejects are counted as expected
/// divergences when the entry carries peg_cfg_divergent, failures
/// otherwise. The report depends only on the entry and the options.
CheckReport check_entry(const CatalogEntry& entry, const CheckOptions& options);

/// One summary line per report followed by its notes, then a total line.
std::string format_reports(const std::vector<CheckReport>& reports);

/// Strings of length 0..max_len over `alphabet`, shortest first, then in
/// alphabet order. Calls `f` for each; stops early if `f` returns false.
template <class F>
void for_each_string(std::u32string_view alphabet, std::size_t max_len, F f) {
	std::u32string s;
	std::vector<std::size_t> digits;
	for (std::size_t len = 0; len <= max_len; ++len) {
		if (len > 0 && alphabet.empty())
			return;
		digits.assign(len, 0);
		s.assign(len, len ? alphabet[0] : U'\0');
		bool more = true;
		while (more) {
			if (!f(std::u32string_view(s)))
				return;
			more = false;
			for (std::size_t i = len; i-- > 0;) {
				if (++digits[i] < alphabet.size()) {
					s[i] = alphabet[digits[i]];
					more = true;
					break;
				}
				digits[i] = 0;
				s[i] = alphabet[0];
			}
		}
	}
}

} // namespace packrat
