#include "packrat/differential.hpp"

#include <optional>
#include <random>
#include <sstream>

#include "packrat/utf8.hpp"

namespace packrat {

namespace {

std::string quoted(std::u32string_view s) {
	std::string out = "\"";
	for (char32_t c : s)
		out += c == U'"' ? std::string("\\\"") : escape_char(c);
	return out + "\"";
}

class Checker {
public:
	Checker(const CatalogEntry& entry, const CheckOptions& options)
		: entry_(entry), g_(entry.grammar), options_(options), naive_(g_, options.naive) {
		report_.grammar = entry.name;
		if (entry.traits.left_recursive)
			return;
		try {
			tabular_.emplace(g_);
		} catch (const UnsupportedConstructError&) {
		}
		cfg_ok_ = options.cfg && is_cfg_compatible(g_);
	}

	void run(std::u32string_view input) {
		++report_.inputs;
		try {
			if (entry_.traits.left_recursive)
				check_cycle(input);
			else
				check_verdicts(input);
		} catch (const std::exception& e) {
			fail(input, std::string("unexpected error: ") + e.what());
		}
	}

	CheckReport take() { return std::move(report_); }

private:
	const CatalogEntry& entry_;
	const Grammar& g_;
	const CheckOptions& options_;
	NaiveOracle naive_;
	std::optional<TabularOracle> tabular_;
	bool cfg_ok_ = false;
	CheckReport report_;
	std::size_t listed_ = 0;

	void note(std::string line) {
		if (listed_ < options_.max_listed) {
			report_.notes.push_back(std::move(line));
			++listed_;
		}
	}

	void fail(std::u32string_view input, const std::string& what) {
		++report_.failures;
		note("  FAIL " + quoted(input) + ": " + what);
	}

	std::string cell(RuleId r, Pos p) const { return g_.name(r) + "@C" + std::to_string(p + 1); }

	void check_cycle(std::u32string_view input) {
		const RuleId start = g_.start();
		try {
			ParseSession s(g_, std::u32string(input));
			s.apply(start, 0);
			fail(input, "packrat did not report left recursion");
		} catch (const LeftRecursionError&) {
		}
		try {
			naive_.parse(start, 0, input);
			fail(input, "naive interpreter did not report left recursion");
		} catch (const LeftRecursionError&) {
		}
		try {
			TabularOracle t(g_);
			t.parse(input);
			fail(input, "tabular filler did not report a same-position cycle");
		} catch (const SamePositionCycleError&) {
		}
		++report_.cells_compared;
	}

	void check_verdicts(std::u32string_view input) {
		const auto n = static_cast<Pos>(input.size());
		const std::size_t rules = g_.rule_count();
		ParseSession s(g_, std::u32string(input));

		// Start rule at 0 first, so its cost can be compared with the naive run.
		const Outcome top = s.apply(g_.start(), 0);
		const std::uint64_t top_cells = s.stats().cells_evaluated;

		std::vector<Verdict> packrat(rules * (n + 1));
		for (std::uint32_t r = 0; r < rules; ++r)
			for (Pos p = 0; p <= n; ++p)
				packrat[r * (n + 1) + p] = to_verdict(s.apply(RuleId{r}, p));
		if (s.stats().cells_evaluated != count_done_cells(s))
			fail(input, "cells_evaluated disagrees with the number of Done cells");

		std::optional<TabularMatrix> table;
		if (tabular_)
			table = tabular_->parse(input);
		std::optional<CfgRecognizer> cfg;
		if (cfg_ok_)
			cfg.emplace(g_, input);

		for (std::uint32_t r = 0; r < rules; ++r) {
			for (Pos p = 0; p <= n; ++p) {
				const RuleId rule{r};
				const Verdict pv = packrat[r * (n + 1) + p];
				++report_.cells_compared;
				const NaiveReport nv = naive_.parse(rule, p, input);
				if (nv.verdict != pv)
					fail(input, cell(rule, p) + " packrat " + to_string(pv) + " vs naive " + to_string(nv.verdict));
				if (rule == g_.start() && p == 0 && nv.calls < top_cells)
					fail(input, "naive made fewer calls than packrat evaluated cells");
				if (table && table->at(rule, p) != pv)
					fail(input, cell(rule, p) + " packrat " + to_string(pv) + " vs tabular " +
						to_string(table->at(rule, p)));
				if (cfg && pv.success && !cfg->ends(rule, p).contains(pv.end))
					fail(input, cell(rule, p) + " packrat end " + std::to_string(pv.end) +
						" is not a CFG end");
			}
		}

		if (cfg) {
			const bool peg_accepts = top.success && top.end == n;
			if (cfg->accepts() && !peg_accepts) {
				const std::string what = "CFG accepts, PEG rejects (" +
					(top.success ? "stops at " + std::to_string(top.end) : std::string("fails")) + ")";
				if (entry_.traits.peg_cfg_divergent) {
					++report_.expected_divergences;
					note("  EXPECTED divergence " + quoted(input) + ": " + what);
				} else {
					fail(input, what);
				}
			}
		}
	}
};

} // namespace

CheckReport check_entry(const CatalogEntry& entry, const CheckOptions& options) {
	Checker checker(entry, options);
	if (options.exhaustive) {
		for_each_string(entry.alphabet, options.max_len, [&](std::u32string_view s) {
			checker.run(s);
			return true;
		});
	} else {
		std::mt19937_64 rng(options.seed);
		std::u32string s;
		for (std::size_t t = 0; t < options.trials; ++t) {
			const std::size_t len = rng() % (options.max_len + 1);
			s.clear();
			for (std::size_t i = 0; i < len; ++i)
				s.push_back(entry.alphabet[rng() % entry.alphabet.size()]);
			checker.run(s);
		}
	}
	return checker.take();
}

std::string format_reports(const std::vector<CheckReport>& reports) {
	std::ostringstream out;
	std::uint64_t failures = 0, divergences = 0;
	for (const auto& r : reports) {
		out << r.grammar << ": " << r.inputs << " inputs, " << r.cells_compared << " cells compared, "
		    << r.failures << " failures, " << r.expected_divergences << " expected divergences\n";
		for (const auto& line : r.notes)
			out << line << '\n';
		failures += r.failures;
		divergences += r.expected_divergences;
	}
	out << (failures == 0 ? "OK" : "FAILED") << ": " << failures << " failures, " << divergences
	    << " expected divergences\n";
	return out.str();
}

} // namespace packrat
