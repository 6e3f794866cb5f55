// Acceptance run: one [PASS]/[FAIL] line per criterion, exit 1 if any fail.
// Every tolerance lives in the constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "packrat/catalog.hpp"
#include "packrat/combinators.hpp"
#include "packrat/differential.hpp"
#include "packrat/engine.hpp"
#include "packrat/oracles.hpp"
#include "packrat/utf8.hpp"

using namespace packrat;

namespace {

constexpr double kCellsAffineTolerance = 0.01;
constexpr double kMemoAffineTolerance = 0.05;
constexpr double kBlowupMinRatio = 1.8;
constexpr std::size_t kBlowupRatioFrom = 6;
constexpr double kWallClockRatioPerDoubling = 3.0;

constexpr double kBudgetKnownCells = 1;
constexpr double kBudgetMemoBound = 30;
constexpr double kBudgetOracles = 120;
constexpr double kBudgetBlowup = 60;
constexpr double kBudgetLinearity = 60;
constexpr double kBudgetLookahead = 10;
constexpr double kBudgetDivergence = 1;
constexpr double kBudgetLeftRecursion = 10;
constexpr double kBudgetLeftAssoc = 5;
constexpr double kBudgetLongestMatch = 10;
constexpr double kBudgetSpace = 60;

struct CriterionResult {
	bool pass = true;
	std::string detail;

	void fail(const std::string& why) {
		if (pass)
			detail = why;
		pass = false;
	}
};

// Cells-evaluated versus Done cells for every session the run creates; a
// cell evaluated twice would make the counter run ahead (the engine also
// throws on a second completion).
struct Corpus {
	std::uint64_t sessions = 0;
	std::uint64_t cells = 0;
	std::vector<std::string> violations;

	void audit(const ParseSession& s) {
		++sessions;
		cells += s.stats().cells_evaluated;
		if (s.stats().cells_evaluated != count_done_cells(s) && violations.size() < 5)
			violations.push_back(encode_utf8(s.input()));
	}
};

Corpus corpus;

double seconds_since(std::chrono::steady_clock::time_point t0) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Least-squares line through (x, y); returns max |residual| / mean(y).
double affine_residual(const std::vector<double>& x, const std::vector<double>& y) {
	const double n = static_cast<double>(x.size());
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		sx += x[i];
		sy += y[i];
		sxx += x[i] * x[i];
		sxy += x[i] * y[i];
	}
	const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
	const double icept = (sy - slope * sx) / n;
	double worst = 0;
	for (std::size_t i = 0; i < x.size(); ++i)
		worst = std::max(worst, std::abs(y[i] - (slope * x[i] + icept)));
	return worst / (sy / n);
}

std::string fmt(double v, int digits = 4) {
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*g", digits, v);
	return buf;
}

bool complete_parse(ParseSession& s) {
	try {
		s.parse_complete();
		return true;
	} catch (const ParseFailedError&) {
		return false;
	}
}

std::u32string random_string(std::mt19937_64& rng, std::u32string_view alphabet, std::size_t len) {
	std::u32string s(len, U' ');
	for (auto& c : s)
		c = alphabet[rng() % alphabet.size()];
	return s;
}

void time_check(CriterionResult& o, double elapsed, double budget) {
	if (elapsed > budget)
		o.fail("took " + fmt(elapsed) + " s, budget " + fmt(budget) + " s");
}

CriterionResult known_cells() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const CatalogEntry e = arith_basic();
	ParseSession s(e.grammar, "2*(3+4)");
	const SemanticValue total = (*e.evaluator)(s.parse_complete());
	auto cell = [&](std::string_view rule, Pos pos, std::int64_t value, std::size_t column) {
		const auto c = s.cell(*e.grammar.find(rule), pos);
		if (!c || !c->success) {
			o.fail(std::string(rule) + " at C" + std::to_string(pos + 1) + " not a success");
			return;
		}
		const auto v = (*e.evaluator)(s.node(c->node)).as_int();
		if (v != value || c->end + 1 != column)
			o.fail(std::string(rule) + " at C" + std::to_string(pos + 1) + " = (" + std::to_string(v) + ",C" +
				std::to_string(c->end + 1) + ")");
	};
	cell("Additive", 3, 7, 7);
	cell("Primary", 2, 7, 8);
	if (total.as_int() != 14)
		o.fail("value " + to_string(total));
	corpus.audit(s);
	time_check(o, seconds_since(t0), kBudgetKnownCells);
	if (o.pass)
		o.detail = "(Additive,C4)=(7,C7), (Primary,C3)=(7,C8), value 14";
	return o;
}

CriterionResult memo_bound() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const Grammar g = arith_basic().grammar;
	const std::u32string alphabet = U"0123456789+*()";
	std::uint64_t inputs = 0;
	double worst = 0;
	auto run = [&](std::u32string_view in) {
		ParseSession s(g, std::u32string(in));
		s.apply(g.start(), 0); // what parse_complete forces, minus the error report
		const auto cells = s.stats().cells_evaluated;
		const auto bound = 5 * (in.size() + 1);
		worst = std::max(worst, static_cast<double>(cells) / static_cast<double>(bound));
		if (cells > bound)
			o.fail("'" + encode_utf8(in) + "': " + std::to_string(cells) + " cells > " + std::to_string(bound));
		corpus.audit(s);
		++inputs;
	};
	for_each_string(alphabet, 6, [&](std::u32string_view in) {
		run(in);
		return true;
	});
	std::mt19937_64 rng(2);
	for (int i = 0; i < 1000; ++i)
		run(random_string(rng, alphabet, rng() % 201));
	time_check(o, seconds_since(t0), kBudgetMemoBound);
	if (o.pass)
		o.detail = std::to_string(inputs) + " inputs, max cells/(5(n+1)) = " + fmt(worst) + ", " +
			fmt(seconds_since(t0), 3) + " s";
	return o;
}

CriterionResult oracle_equivalence() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	std::uint64_t cells = 0, inputs = 0;
	std::size_t grammars = 0;
	for (const auto& [name, entry] : registry()) {
		if (entry.traits.left_recursive)
			continue;
		++grammars;
		CheckOptions opts;
		opts.cfg = false; // the CFG containment is covered by the unit tests
		opts.max_len = 6;
		opts.exhaustive = true;
		const CheckReport a = check_entry(entry, opts);
		opts.exhaustive = false;
		opts.max_len = 12;
		opts.trials = 1000;
		opts.seed = 4;
		const CheckReport b = check_entry(entry, opts);
		for (const auto* r : {&a, &b}) {
			cells += r->cells_compared;
			inputs += r->inputs;
			if (!r->ok())
				o.fail(name + ": " + std::to_string(r->failures) + " disagreements" +
					(r->notes.empty() ? "" : ", first: " + r->notes.front()));
		}
	}
	time_check(o, seconds_since(t0), kBudgetOracles);
	if (o.pass)
		o.detail = std::to_string(grammars) + " grammars, " + std::to_string(inputs) + " inputs, " +
			std::to_string(cells) + " cells agree, " + fmt(seconds_since(t0), 3) + " s";
	return o;
}

CriterionResult blowup_separation() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const Grammar g = blowup_family().grammar;
	std::vector<double> ks, cells;
	std::vector<std::uint64_t> calls;
	NaiveOracle naive(g, NaiveOptions{10'000, 100'000'000});
	for (std::size_t k = 4; k <= 14; ++k) {
		const std::u32string in = blowup_input(k);
		calls.push_back(naive.parse(g.start(), 0, in).calls);
		ParseSession s(g, in);
		complete_parse(s);
		corpus.audit(s);
		ks.push_back(static_cast<double>(k));
		cells.push_back(static_cast<double>(s.stats().cells_evaluated));
	}
	double min_ratio = 1e9;
	for (std::size_t k = kBlowupRatioFrom; k <= 14; ++k) {
		const double r = static_cast<double>(calls[k - 4]) / static_cast<double>(calls[k - 5]);
		min_ratio = std::min(min_ratio, r);
		if (r < kBlowupMinRatio)
			o.fail("calls(" + std::to_string(k) + ")/calls(" + std::to_string(k - 1) + ") = " + fmt(r));
	}
	const double resid = affine_residual(ks, cells);
	if (resid >= kCellsAffineTolerance)
		o.fail("packrat cells residual " + fmt(resid));
	time_check(o, seconds_since(t0), kBudgetBlowup);
	if (o.pass)
		o.detail = "min naive ratio " + fmt(min_ratio) + " (k=6..14), naive calls k=14: " +
			std::to_string(calls.back()) + ", packrat cells residual " + fmt(resid);
	return o;
}

struct ScalingRun {
	std::vector<double> lengths, cells, memo, nanos;
	std::vector<std::string> csv;
};

ScalingRun lexed_scaling() {
	static ScalingRun cached;
	if (!cached.lengths.empty())
		return cached;
	const CatalogEntry e = arith_lexed();
	for (std::size_t n : cli::parse_sizes("1000..64000")) {
		const std::u32string in = cli::generate_input("repeat-1+1", n);
		const cli::BenchRecord r = cli::bench_once(e.name, e.grammar, "packrat", in, cli::EngineLimits{});
		ParseSession s(e.grammar, in);
		complete_parse(s);
		corpus.audit(s);
		cached.lengths.push_back(static_cast<double>(in.size()));
		cached.cells.push_back(static_cast<double>(r.cells_evaluated));
		cached.memo.push_back(static_cast<double>(r.memo_bytes_estimate));
		cached.nanos.push_back(static_cast<double>(r.duration_ns));
		cached.csv.push_back(cli::csv_row(r));
		if (r.verdict != "accept")
			cached.csv.back() += " (not accepted)";
	}
	return cached;
}

CriterionResult linearity() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const ScalingRun run = lexed_scaling();
	for (const auto& row : run.csv)
		if (row.find(",accept,") == std::string::npos)
			o.fail("row " + row);
	const double resid = affine_residual(run.lengths, run.cells);
	if (resid >= kCellsAffineTolerance)
		o.fail("cells residual " + fmt(resid));
	double worst_clock = 0;
	for (std::size_t i = 1; i < run.nanos.size(); ++i)
		worst_clock = std::max(worst_clock, run.nanos[i] / std::max(run.nanos[i - 1], 1.0));
	time_check(o, seconds_since(t0), kBudgetLinearity);
	if (o.pass)
		o.detail = "cells residual " + fmt(resid) + " over 1K..64K; cells/char at 64K " +
			fmt(run.cells.back() / run.lengths.back()) + "; wall-clock ratio per doubling max " +
			fmt(worst_clock, 3) + (worst_clock <= kWallClockRatioPerDoubling ? "" : " (informational, above 3)");
	return o;
}

CriterionResult unlimited_lookahead() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const Grammar g = lookahead_ab().grammar;
	std::size_t cases = 0;
	for (std::size_t n = 1; n <= 8; ++n) {
		for (std::size_t m = 0; m <= 2 * n + 2; ++m) {
			const std::u32string in = std::u32string(n, U'x') + U'z' + std::u32string(m, U'y');
			const bool want = m == n || m == 2 * n;
			ParseSession s(g, in);
			const bool peg = complete_parse(s);
			corpus.audit(s);
			const bool cfg = CfgRecognizer(g, in).accepts();
			++cases;
			if (peg != want || cfg != want)
				o.fail("'" + encode_utf8(in) + "': packrat " + (peg ? "accepts" : "rejects") + ", cfg " +
					(cfg ? "accepts" : "rejects"));
		}
	}
	time_check(o, seconds_since(t0), kBudgetLookahead);
	if (o.pass)
		o.detail = std::to_string(cases) + " inputs x^n z y^m, n=1..8, m=0..2n+2";
	return o;
}

CriterionResult peg_cfg_divergence() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const Grammar g = peg_limitation().grammar;
	for (const auto& [in, want] : std::vector<std::pair<std::string, bool>>{{"x", true}, {"xxx", true}, {"xxxxx", false}}) {
		ParseSession s(g, in);
		if (complete_parse(s) != want)
			o.fail("'" + in + "' " + (want ? "rejected" : "accepted"));
		corpus.audit(s);
	}
	const auto ends = cfg_all_ends(g, g.start(), 0, U"xxxxx");
	if (ends != std::vector<Pos>{1, 3, 5})
		o.fail("cfg ends differ");
	time_check(o, seconds_since(t0), kBudgetDivergence);
	if (o.pass)
		o.detail = "x, xxx accepted; xxxxx rejected; cfg ends {1,3,5}";
	return o;
}

CriterionResult left_recursion() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const CatalogEntry e = left_recursive_arith();
	std::mt19937_64 rng(9);
	std::size_t inputs = 0;
	try {
		same_position_order(e.grammar);
		o.fail("no same-position cycle found");
	} catch (const SamePositionCycleError&) {
	}
	for (std::size_t len = 0; len <= 64; ++len) {
		for (int trial = 0; trial < 20; ++trial) {
			const std::u32string in = random_string(rng, e.alphabet, len);
			++inputs;
			ParseSession s(e.grammar, in);
			try {
				s.apply(e.grammar.start(), 0);
				o.fail("packrat parsed '" + encode_utf8(in) + "'");
			} catch (const LeftRecursionError& err) {
				if (err.cycle().empty())
					o.fail("empty cycle");
			}
			try {
				naive_parse(e.grammar, e.grammar.start(), 0, in);
				o.fail("naive parsed '" + encode_utf8(in) + "'");
			} catch (const LeftRecursionError&) {
			}
			try {
				tabular_parse(e.grammar, in);
				o.fail("tabular filled '" + encode_utf8(in) + "'");
			} catch (const SamePositionCycleError&) {
			}
		}
	}
	time_check(o, seconds_since(t0), kBudgetLeftRecursion);
	if (o.pass)
		o.detail = std::to_string(inputs) + " inputs of length 0..64, all three engines report the cycle";
	return o;
}

CriterionResult left_associativity() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const CatalogEntry e = arith_left_assoc();
	for (int a = 0; a < 10; ++a)
		for (int b = 0; b < 10; ++b)
			for (int c = 0; c < 10; ++c) {
				const std::string in = std::to_string(a) + "-" + std::to_string(b) + "-" + std::to_string(c);
				ParseSession s(e.grammar, in);
				const auto v = (*e.evaluator)(s.parse_complete()).as_int();
				corpus.audit(s);
				if (v != (a - b) - c)
					o.fail(in + " = " + std::to_string(v));
			}
	time_check(o, seconds_since(t0), kBudgetLeftAssoc);
	if (o.pass)
		o.detail = "1000 triples";
	return o;
}

CriterionResult longest_match_and_predicates() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const CatalogEntry e = arith_lexed();
	const RuleId ws = *e.grammar.find("Whitespace");
	const RuleId symbol = *e.grammar.find("Symbol");
	const std::u32string alphabet = U" \t\n\r\f\v1+*()x";
	auto is_space = [](char32_t c) { return c == U' ' || (c >= U'\t' && c <= U'\r'); };
	const auto and_sym = peg::and_(peg::ref(symbol));
	const auto not_sym = peg::not_(peg::ref(symbol));
	const auto and_c = and_pred(rule([&] {
		RuleSlot<int> slot;
		slot.bind(symbol, [](const ParseTreeNode&) { return 0; });
		return slot;
	}()));
	const auto not_c = not_pred(digit());
	std::mt19937_64 rng(11);
	std::uint64_t predicate_successes = 0;
	for (int i = 0; i < 10000; ++i) {
		const std::u32string in = random_string(rng, alphabet, rng() % 17);
		ParseSession s(e.grammar, in);
		for (Pos p = 0; p <= in.size(); ++p) {
			std::size_t q = p;
			while (q < in.size() && is_space(in[q]))
				++q;
			const auto v = to_verdict(s.apply(ws, p));
			if (v != Verdict::match(static_cast<Pos>(q)))
				o.fail("Whitespace on '" + encode_utf8(in) + "' at " + std::to_string(p) + ": " + to_string(v));
			for (const auto* pe : {&and_sym, &not_sym}) {
				const auto r = s.eval_expr(*pe, p);
				if (!r.success)
					continue;
				++predicate_successes;
				if (r.end != p)
					o.fail("predicate consumed input");
			}
			for (const auto& r : {run(and_c, s, p), run(not_c, s, p)}) {
				if (!r)
					continue;
				++predicate_successes;
				if (r->end != p)
					o.fail("combinator predicate consumed input");
			}
		}
		complete_parse(s);
		corpus.audit(s);
	}
	time_check(o, seconds_since(t0), kBudgetLongestMatch);
	if (o.pass)
		o.detail = "10000 strings; " + std::to_string(predicate_successes) + " predicate successes, all zero-width";
	return o;
}

CriterionResult space_reporting() {
	CriterionResult o;
	const auto t0 = std::chrono::steady_clock::now();
	const ScalingRun run = lexed_scaling();
	for (std::size_t i = 0; i < run.csv.size(); ++i) {
		const std::string& row = run.csv[i];
		const std::string memo = std::to_string(static_cast<std::uint64_t>(run.memo[i]));
		if (row.size() < memo.size() || row.compare(row.size() - memo.size(), memo.size(), memo) != 0)
			o.fail("memo bytes missing from row " + row);
	}
	const double resid = affine_residual(run.lengths, run.memo);
	if (resid >= kMemoAffineTolerance)
		o.fail("memo residual " + fmt(resid));
	time_check(o, seconds_since(t0), kBudgetSpace);
	if (o.pass)
		o.detail = "memo residual " + fmt(resid) + "; " + fmt(run.memo.back() / run.lengths.back()) +
			" estimated bytes per input byte at 64K";
	return o;
}

CriterionResult determinism() {
	CriterionResult o;
	auto report = [] {
		std::ostringstream out, err;
		const int code = cli::run({"packrat", "--seed", "1234", "check", "all", "9", "200"}, out, err);
		return std::to_string(code) + "\n" + out.str() + err.str();
	};
	const std::string a = report(), b = report();
	if (a != b)
		o.fail("reports differ");
	if (!a.starts_with("0\n"))
		o.fail("check failed: " + a.substr(0, 200));
	if (o.pass)
		o.detail = "two runs of `check all 9 200 --seed 1234`, " + std::to_string(a.size()) + " identical bytes";
	return o;
}

CriterionResult at_most_once() {
	CriterionResult o;
	if (!corpus.violations.empty())
		o.fail("counter ahead of Done cells on '" + corpus.violations.front() + "'");
	if (o.pass)
		o.detail = std::to_string(corpus.sessions) + " sessions, " + std::to_string(corpus.cells) +
			" cells, none evaluated twice";
	return o;
}

} // namespace

int main() {
	struct Criterion {
		int number;
		const char* name;
		std::function<CriterionResult()> check;
	};
	// The at-most-once audit runs last so it covers every other session.
	const std::vector<Criterion> criteria = {
		{1, "known memo cells", known_cells},
		{2, "memo bound 5(n+1)", memo_bound},
		{4, "oracle equivalence", oracle_equivalence},
		{5, "blowup separation", blowup_separation},
		{6, "linearity at scale", linearity},
		{7, "unlimited lookahead", unlimited_lookahead},
		{8, "peg/cfg divergence", peg_cfg_divergence},
		{9, "left recursion", left_recursion},
		{10, "left associativity", left_associativity},
		{11, "longest match and predicates", longest_match_and_predicates},
		{12, "space reporting", space_reporting},
		{13, "determinism", determinism},
		{3, "at most once", at_most_once},
	};
	std::vector<std::pair<int, std::string>> lines;
	bool all = true;
	for (const auto& c : criteria) {
		CriterionResult o;
		try {
			o = c.check();
		} catch (const std::exception& e) {
			o.fail(std::string("exception: ") + e.what());
		}
		all = all && o.pass;
		lines.emplace_back(c.number,
			std::string(o.pass ? "[PASS] " : "[FAIL] ") + std::to_string(c.number) + " " + c.name + ": " + o.detail);
	}
	std::sort(lines.begin(), lines.end());
	for (const auto& [n, line] : lines)
		std::cout << line << '\n';
	return all ? 0 : 1;
}
