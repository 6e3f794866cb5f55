// Microbenchmarks for the packrat engine and the oracles. Counters report
// the deterministic work measures next to wall-clock time.

#include <benchmark/benchmark.h>

#include <string>

#include "packrat/catalog.hpp"
#include "packrat/engine.hpp"
#include "packrat/oracles.hpp"

using namespace packrat;

namespace {

std::u32string repeat_sum(std::size_t n) {
	std::u32string s = U"1";
	while (s.size() + 2 <= n)
		s += U"+1";
	return s;
}

std::u32string nested(std::size_t depth) {
	return std::u32string(depth, U'(') + U"1" + std::u32string(depth, U')');
}

void BM_PackratLexedSum(benchmark::State& state) {
	const Grammar g = arith_lexed().grammar;
	const std::u32string in = repeat_sum(static_cast<std::size_t>(state.range(0)));
	Stats st;
	for (auto _ : state) {
		ParseSession s(g, in);
		benchmark::DoNotOptimize(s.parse_complete().end());
		st = s.stats();
	}
	state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * in.size()));
	state.counters["cells"] = static_cast<double>(st.cells_evaluated);
	state.counters["memo_bytes_per_char"] = static_cast<double>(st.memo_bytes_estimate) / static_cast<double>(in.size());
}
BENCHMARK(BM_PackratLexedSum)->RangeMultiplier(2)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMicrosecond);

void BM_PackratNestedParens(benchmark::State& state) {
	const Grammar g = arith_basic().grammar;
	const std::u32string in = nested(static_cast<std::size_t>(state.range(0)));
	for (auto _ : state) {
		ParseSession s(g, in);
		benchmark::DoNotOptimize(s.parse_complete().end());
	}
	state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * in.size()));
}
BENCHMARK(BM_PackratNestedParens)->RangeMultiplier(4)->Range(16, 1 << 14)->Unit(benchmark::kMicrosecond);

void BM_PackratBlowup(benchmark::State& state) {
	const Grammar g = blowup_family().grammar;
	const std::u32string in = blowup_input(static_cast<std::size_t>(state.range(0)));
	std::uint64_t cells = 0;
	for (auto _ : state) {
		ParseSession s(g, in);
		benchmark::DoNotOptimize(s.apply(g.start(), 0).end);
		cells = s.stats().cells_evaluated;
	}
	state.counters["cells"] = static_cast<double>(cells);
}
BENCHMARK(BM_PackratBlowup)->DenseRange(4, 20, 4);

void BM_NaiveBlowup(benchmark::State& state) {
	const Grammar g = blowup_family().grammar;
	const std::u32string in = blowup_input(static_cast<std::size_t>(state.range(0)));
	NaiveOracle naive(g);
	std::uint64_t calls = 0;
	for (auto _ : state) {
		const NaiveReport r = naive.parse(g.start(), 0, in);
		benchmark::DoNotOptimize(r.verdict.end);
		calls = r.calls;
	}
	state.counters["calls"] = static_cast<double>(calls);
}
BENCHMARK(BM_NaiveBlowup)->DenseRange(4, 20, 4)->Unit(benchmark::kMicrosecond);

void BM_TabularArith(benchmark::State& state) {
	const TabularOracle t(arith_basic().grammar);
	const std::u32string in = nested(static_cast<std::size_t>(state.range(0)));
	for (auto _ : state)
		benchmark::DoNotOptimize(t.parse(in).cells.size());
	state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * in.size()));
}
BENCHMARK(BM_TabularArith)->RangeMultiplier(4)->Range(16, 1 << 12)->Unit(benchmark::kMicrosecond);

void BM_CfgPegLimitation(benchmark::State& state) {
	const Grammar g = peg_limitation().grammar;
	const std::u32string in(static_cast<std::size_t>(state.range(0)), U'x');
	for (auto _ : state)
		benchmark::DoNotOptimize(CfgRecognizer(g, in).accepts());
}
BENCHMARK(BM_CfgPegLimitation)->Arg(15)->Arg(63)->Arg(255)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
