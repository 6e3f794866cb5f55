#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "packrat/catalog.hpp"

namespace packrat::cli {

enum ExitCode : int { Ok = 0, ParseFailure = 1, Usage = 2 };

class UsageError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// "4..14", "1000..64000", "1,2,8", "4..14:+2", "1000..64000:x2". A range
/// without a step counts by one when it has at most 64 values and doubles
/// otherwise. Throws UsageError on malformed or empty lists.
std::vector<std::size_t> parse_sizes(std::string_view spec);

/// Named input families: "aN_b" (a^N b), "repeat-<unit>" (unit repeated,
/// overlapping on its longest border, as long as possible without
/// exceeding N characters), "nested-parens" (N/2 nested parentheses
/// around 1). Throws UsageError for an unknown family.
std::u32string generate_input(std::string_view family, std::size_t n);

struct BenchRecord {
	std::string grammar;
	std::string engine;
	std::size_t input_len = 0;
	std::string verdict; // accept | reject | error
	std::uint64_t cells_evaluated = 0;
	std::uint64_t calls = 0;
	std::uint64_t duration_ns = 0;
	std::uint64_t memo_bytes_estimate = 0;
};

inline constexpr std::string_view kBenchHeader =
	"grammar,engine,input_len,verdict,cells_evaluated,calls,duration_ns,memo_bytes_estimate";

std::string csv_row(const BenchRecord& r);

struct EngineLimits {
	std::size_t depth_limit = 100'000;
	std::uint64_t call_budget = 100'000'000;
	std::optional<std::size_t> naive_depth_limit;
};

/// One run of `engine` (packrat | naive | tabular) on `input` from the
/// start rule; complete-input acceptance decides the verdict.
BenchRecord bench_once(const std::string& grammar_name, const Grammar& g, std::string_view engine,
	std::u32string_view input, const EngineLimits& limits);

/// Full command line (argv[0] included). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// run() on a thread with a large stack, for deep trees and deep naive
/// recursion.
int run_with_big_stack(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace packrat::cli
