#include "cli.hpp"

#include <pthread.h>

#include <chrono>
#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "packrat/differential.hpp"
#include "packrat/engine.hpp"
#include "packrat/grammar_text.hpp"
#include "packrat/oracles.hpp"
#include "packrat/utf8.hpp"

namespace packrat::cli {

namespace {

std::size_t parse_count(std::string_view s, std::string_view what) {
	std::size_t v = 0;
	auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
		throw UsageError("bad " + std::string(what) + " '" + std::string(s) + "'");
	return v;
}

std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw UsageError("cannot read '" + path + "'");
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

/// Length of the longest proper prefix of `s` that is also a suffix.
std::size_t border(std::u32string_view s) {
	std::vector<std::size_t> fail(s.size() + 1, 0);
	for (std::size_t i = 1, k = 0; i < s.size(); ++i) {
		while (k > 0 && s[i] != s[k])
			k = fail[k];
		if (s[i] == s[k])
			++k;
		fail[i + 1] = k;
	}
	return s.empty() ? 0 : fail[s.size()];
}

struct Source {
	std::string name;
	Grammar grammar;
	const CatalogEntry* entry = nullptr;
};

struct Globals {
	std::string grammar_file;
	std::size_t depth_limit = SessionOptions{}.depth_limit;
	std::uint64_t call_budget = 100'000'000;
	std::uint64_t seed = 0;
};

Source load_source(const Globals& g, std::vector<std::string>& args) {
	if (!g.grammar_file.empty()) {
		try {
			return {g.grammar_file, load_grammar(read_file(g.grammar_file)), nullptr};
		} catch (const UsageError&) {
			throw;
		} catch (const std::exception& e) {
			throw UsageError(g.grammar_file + ": " + e.what());
		}
	}
	if (args.empty())
		throw UsageError("missing grammar name");
	const std::string name = args.front();
	args.erase(args.begin());
	try {
		const CatalogEntry& e = lookup(name);
		return {e.name, e.grammar, &e};
	} catch (const UnknownGrammarError& e) {
		throw UsageError(e.what());
	}
}

std::u32string decode_arg(const std::string& s) {
	try {
		return decode_utf8(s);
	} catch (const Utf8Error& e) {
		throw UsageError(std::string("input is not valid UTF-8: ") + e.what());
	}
}

void expect_args(const std::vector<std::string>& args, std::size_t n, std::string_view usage) {
	if (args.size() != n)
		throw UsageError("usage: " + std::string(usage));
}

int cmd_eval(const Globals& g, std::vector<std::string> args, std::ostream& out, std::ostream& err) {
	Source src = load_source(g, args);
	expect_args(args, 1, "eval <grammar> <input>");
	ParseSession s(src.grammar, decode_arg(args[0]), SessionOptions{g.depth_limit});
	try {
		const ParseTreeNode root = s.parse_complete();
		if (src.entry && src.entry->evaluator)
			out << to_string((*src.entry->evaluator)(root)) << '\n';
		else
			out << "accepted (" << s.size() << " characters)\n";
		return Ok;
	} catch (const EngineError& e) {
		err << "error: " << e.what() << '\n';
		return ParseFailure;
	}
}

int cmd_matrix(const Globals& g, std::vector<std::string> args, bool lazy, std::ostream& out, std::ostream& err) {
	Source src = load_source(g, args);
	expect_args(args, 1, "matrix <grammar> <input>");
	ParseSession s(src.grammar, decode_arg(args[0]), SessionOptions{g.depth_limit});
	int code = Ok;
	try {
		s.apply(src.grammar.start(), 0);
		if (!lazy)
			for (std::uint32_t r = 0; r < src.grammar.rule_count(); ++r)
				for (Pos p = 0; p <= s.size(); ++p)
					s.apply(RuleId{r}, p);
	} catch (const EngineError& e) {
		err << "error: " << e.what() << '\n';
		code = ParseFailure;
	}
	out << dump_matrix(s, src.entry ? value_formatter(*src.entry) : CellFormatter{});
	return code;
}

std::vector<std::string> split(std::string_view s, char sep) {
	std::vector<std::string> out;
	std::size_t start = 0;
	for (;;) {
		const auto i = s.find(sep, start);
		out.emplace_back(s.substr(start, i == std::string_view::npos ? s.npos : i - start));
		if (i == std::string_view::npos)
			return out;
		start = i + 1;
	}
}

int cmd_bench(const Globals& g, std::vector<std::string> args, std::ostream& out, std::ostream&) {
	Source src = load_source(g, args);
	expect_args(args, 4, "bench <grammar> <generator> <sizes> <engines> <out.csv|->");
	const std::string family = args[0];
	const auto sizes = parse_sizes(args[1]);
	const auto engines = split(args[2], ',');
	for (const auto& e : engines)
		if (e != "packrat" && e != "naive" && e != "tabular")
			throw UsageError("unknown engine '" + e + "'");
	generate_input(family, 0); // validates the family name up front

	EngineLimits limits{g.depth_limit, g.call_budget, std::nullopt};
	std::ostringstream csv;
	csv << kBenchHeader << '\n';
	for (std::size_t n : sizes) {
		const std::u32string input = generate_input(family, n);
		for (const auto& e : engines)
			csv << csv_row(bench_once(src.name, src.grammar, e, input, limits)) << '\n';
	}
	if (args[3] == "-") {
		out << csv.str();
	} else {
		std::ofstream f(args[3], std::ios::binary);
		if (!f)
			throw UsageError("cannot write '" + args[3] + "'");
		f << csv.str();
		out << "wrote " << sizes.size() * engines.size() << " rows to " << args[3] << '\n';
	}
	return Ok;
}

int cmd_check(const Globals& g, std::vector<std::string> args, const std::string& alphabet, std::ostream& out,
	std::ostream&) {
	std::vector<CatalogEntry> entries;
	if (!g.grammar_file.empty()) {
		Source src = load_source(g, args);
		if (alphabet.empty())
			throw UsageError("check with --grammar-file needs --alphabet");
		CatalogEntry e{src.name, "", src.grammar, std::nullopt, decode_arg(alphabet), {}};
		e.traits.left_recursive = [&] {
			try {
				same_position_order(src.grammar);
				return false;
			} catch (const SamePositionCycleError&) {
				return true;
			}
		}();
		entries.push_back(std::move(e));
	} else {
		if (args.empty())
			throw UsageError("missing grammar name");
		const std::string target = args.front();
		args.erase(args.begin());
		if (target == "all") {
			for (const auto& [name, e] : registry())
				entries.push_back(e);
		} else {
			try {
				entries.push_back(lookup(target));
			} catch (const UnknownGrammarError& e) {
				throw UsageError(e.what());
			}
		}
		if (!alphabet.empty())
			for (auto& e : entries)
				e.alphabet = decode_arg(alphabet);
	}
	expect_args(args, 2, "check <grammar|all> <max_len> <exhaustive|N>");

	CheckOptions opts;
	opts.max_len = parse_count(args[0], "max_len");
	if (args[1] == "exhaustive") {
		opts.exhaustive = true;
	} else {
		opts.exhaustive = false;
		opts.trials = parse_count(args[1], "trial count");
	}
	opts.seed = g.seed;
	opts.naive.call_budget = g.call_budget;
	if (g.depth_limit < opts.naive.depth_limit)
		opts.naive.depth_limit = g.depth_limit;

	std::vector<CheckReport> reports;
	bool ok = true;
	for (const auto& e : entries) {
		reports.push_back(check_entry(e, opts));
		ok = ok && reports.back().ok();
	}
	out << format_reports(reports);
	return ok ? Ok : ParseFailure;
}

int cmd_grammar(const std::string& action, const std::string& path, std::ostream& out, std::ostream& err) {
	const std::string text = read_file(path);
	if (action == "fmt") {
		try {
			out << format_grammar(load_grammar(text));
			return Ok;
		} catch (const GrammarSyntaxError& e) {
			err << path << ":" << e.what() << '\n';
			return ParseFailure;
		} catch (const GrammarError& e) {
			err << path << ": " << e.what() << '\n';
			return ParseFailure;
		}
	}
	if (action != "validate")
		throw UsageError("usage: grammar fmt|validate <file>");
	// Validation problems are reported, not thrown, so warnings show too.
	try {
		load_grammar(text);
	} catch (const GrammarSyntaxError& e) {
		err << path << ":" << e.what() << '\n';
		return ParseFailure;
	} catch (const GrammarError& e) {
		for (const auto& issue : e.issues())
			out << to_string(issue.severity) << ": " << to_string(issue.code) << ": " << issue.message << '\n';
		return ParseFailure;
	}
	const Grammar g = load_grammar(text);
	for (const auto& issue : g.issues())
		out << to_string(issue.severity) << ": " << to_string(issue.code) << ": " << issue.message << '\n';
	out << "ok: " << g.rule_count() << " rules, start " << g.name(g.start()) << '\n';
	return Ok;
}

} // namespace

std::vector<std::size_t> parse_sizes(std::string_view spec) {
	std::vector<std::size_t> out;
	if (spec.empty())
		throw UsageError("empty size list");
	for (const auto& part : split(spec, ',')) {
		const auto dots = part.find("..");
		if (dots == std::string::npos) {
			out.push_back(parse_count(part, "size"));
			continue;
		}
		std::string_view rest = std::string_view(part).substr(dots + 2);
		std::string_view step;
		if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
			step = rest.substr(colon + 1);
			rest = rest.substr(0, colon);
		}
		const std::size_t lo = parse_count(std::string_view(part).substr(0, dots), "size");
		const std::size_t hi = parse_count(rest, "size");
		if (lo > hi)
			throw UsageError("empty size range '" + part + "'");
		bool doubling = hi - lo >= 64;
		std::size_t factor = 2, increment = 1;
		if (!step.empty()) {
			if (step.size() < 2 || (step[0] != 'x' && step[0] != '+'))
				throw UsageError("bad size step '" + std::string(step) + "'");
			const std::size_t v = parse_count(step.substr(1), "size step");
			doubling = step[0] == 'x';
			if ((doubling && v < 2) || (!doubling && v < 1))
				throw UsageError("bad size step '" + std::string(step) + "'");
			(doubling ? factor : increment) = v;
		}
		if (doubling && lo == 0)
			throw UsageError("a multiplicative range cannot start at 0");
		for (std::size_t v = lo; v <= hi; v = doubling ? v * factor : v + increment)
			out.push_back(v);
	}
	if (out.empty())
		throw UsageError("empty size list");
	return out;
}

std::u32string generate_input(std::string_view family, std::size_t n) {
	if (family == "aN_b")
		return blowup_input(n);
	if (family == "nested-parens") {
		const std::size_t depth = n == 0 ? 0 : (n - 1) / 2;
		return std::u32string(depth, U'(') + U'1' + std::u32string(depth, U')');
	}
	if (family.starts_with("repeat-")) {
		const std::u32string unit = decode_utf8(family.substr(7));
		if (unit.empty())
			throw UsageError("repeat-<unit> needs a non-empty unit");
		const std::size_t period = unit.size() - border(unit);
		std::u32string s = unit;
		while (s.size() + period <= n)
			s.append(unit, unit.size() - period, period);
		return s;
	}
	throw UsageError("unknown generator '" + std::string(family) + "'");
}

std::string csv_row(const BenchRecord& r) {
	std::ostringstream out;
	out << r.grammar << ',' << r.engine << ',' << r.input_len << ',' << r.verdict << ',' << r.cells_evaluated << ','
	    << r.calls << ',' << r.duration_ns << ',' << r.memo_bytes_estimate;
	return out.str();
}

BenchRecord bench_once(const std::string& grammar_name, const Grammar& g, std::string_view engine,
	std::u32string_view input, const EngineLimits& limits) {
	BenchRecord rec;
	rec.grammar = grammar_name;
	rec.engine = std::string(engine);
	rec.input_len = input.size();
	const auto n = static_cast<Pos>(input.size());
	const auto t0 = std::chrono::steady_clock::now();
	try {
		if (engine == "packrat") {
			ParseSession s(g, std::u32string(input), SessionOptions{limits.depth_limit});
			const Outcome o = s.apply(g.start(), 0);
			rec.verdict = o.success && o.end == n ? "accept" : "reject";
			const Stats st = s.stats();
			rec.cells_evaluated = st.cells_evaluated;
			rec.calls = st.rule_invocations;
			rec.memo_bytes_estimate = st.memo_bytes_estimate;
		} else if (engine == "naive") {
			NaiveOptions opts;
			opts.call_budget = limits.call_budget;
			if (limits.naive_depth_limit)
				opts.depth_limit = *limits.naive_depth_limit;
			const NaiveReport r = naive_parse(g, g.start(), 0, input, opts);
			rec.verdict = r.verdict.success && r.verdict.end == n ? "accept" : "reject";
			rec.calls = r.calls;
		} else if (engine == "tabular") {
			const TabularMatrix m = tabular_parse(g, input);
			const Verdict v = m.at(g.start(), 0);
			rec.verdict = v.success && v.end == n ? "accept" : "reject";
			rec.cells_evaluated = m.fill_order.size();
			rec.calls = m.fill_order.size();
			rec.memo_bytes_estimate = m.cells.size() * sizeof(Verdict);
		} else {
			throw UsageError("unknown engine '" + std::string(engine) + "'");
		}
	} catch (const UsageError&) {
		throw;
	} catch (const std::exception&) {
		rec.verdict = "error";
	}
	rec.duration_ns = static_cast<std::uint64_t>(
		std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
	return rec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
	CLI::App app{"Packrat parsing toolkit: evaluate, inspect, check and benchmark PEGs.", "packrat"};
	app.require_subcommand(1);
	app.fallthrough();

	Globals g;
	app.add_option("--grammar-file", g.grammar_file, "Load the grammar from a file instead of the catalog");
	app.add_option("--depth-limit", g.depth_limit, "Maximum nesting of active rule applications");
	app.add_option("--call-budget", g.call_budget, "Maximum rule calls for the naive interpreter");
	app.add_option("--seed", g.seed, "Seed for randomized checks");

	std::vector<std::string> pos;
	auto* eval = app.add_subcommand("eval", "Parse an input completely and print its value");
	eval->add_option("args", pos, "<grammar> <input>");

	bool lazy = false;
	auto* matrix = app.add_subcommand("matrix", "Print the memo matrix for an input");
	matrix->add_option("args", pos, "<grammar> <input>");
	matrix->add_flag("--lazy", lazy, "Only evaluate what parsing from the start rule needs");

	auto* bench = app.add_subcommand("bench", "Time engines over a generated input family and write CSV");
	bench->add_option("args", pos, "<grammar> <generator> <sizes> <engines> <out.csv|->");

	std::string alphabet;
	auto* check = app.add_subcommand("check", "Differential check against the oracles");
	check->add_option("args", pos, "<grammar|all> <max_len> <exhaustive|N>");
	check->add_option("--alphabet", alphabet, "Input characters (default: the catalog entry's)");

	std::string action, file;
	auto* grammar = app.add_subcommand("grammar", "Format or validate a grammar file");
	grammar->add_option("action", action, "fmt | validate")->required();
	grammar->add_option("file", file, "Grammar file")->required();

	std::vector<const char*> argv;
	for (const auto& a : args)
		argv.push_back(a.c_str());
	try {
		app.parse(static_cast<int>(argv.size()), argv.data());
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? Ok : Usage;
	}

	try {
		if (*eval)
			return cmd_eval(g, pos, out, err);
		if (*matrix)
			return cmd_matrix(g, pos, lazy, out, err);
		if (*bench)
			return cmd_bench(g, pos, out, err);
		if (*check)
			return cmd_check(g, pos, alphabet, out, err);
		return cmd_grammar(action, file, out, err);
	} catch (const UsageError& e) {
		err << "error: " << e.what() << '\n';
		return Usage;
	} catch (const GrammarError& e) {
		err << "error: " << e.what() << '\n';
		return Usage;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << '\n';
		return ParseFailure;
	}
}

int run_with_big_stack(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
	struct Job {
		const std::vector<std::string>* args;
		std::ostream* out;
		std::ostream* err;
		int code = Usage;
	} job{&args, &out, &err};

	pthread_attr_t attr;
	pthread_attr_init(&attr);
	pthread_attr_setstacksize(&attr, std::size_t{512} << 20);
	pthread_t thread;
	const int rc = pthread_create(&thread, &attr, [](void* p) -> void* {
		auto* j = static_cast<Job*>(p);
		j->code = run(*j->args, *j->out, *j->err);
		return nullptr;
	}, &job);
	pthread_attr_destroy(&attr);
	if (rc != 0)
		return run(args, out, err);
	pthread_join(thread, nullptr);
	return job.code;
}

} // namespace packrat::cli
