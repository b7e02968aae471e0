// Brute-force oracle: OpenMP enumeration against the serial reference.

#include <benchmark/benchmark.h>

#include <string>

#include "tracesolve/oracle.hpp"

#ifndef TRACESOLVE_CORPUS_DIR
#define TRACESOLVE_CORPUS_DIR "corpus"
#endif

namespace {

const ts::Instance& instance() {
  static const ts::Instance inst = ts::load_instance(std::string(TRACESOLVE_CORPUS_DIR) + "/toy4.json");
  return inst;
}

void BM_OracleSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(ts::enumerate_bruteforce_serial(instance(), static_cast<int>(st.range(0))));
}

void BM_OracleParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(ts::enumerate_bruteforce(instance(), static_cast<int>(st.range(0))));
}

BENCHMARK(BM_OracleSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
