// Brute-force ground truth: all solution tuples with every component of
// length at most L, found by exhaustive substitution.
#pragma once

#include <cstddef>
#include <set>

#include "tracesolve/instance.hpp"

namespace ts {

struct OracleOptions {
  int jobs = 0;  // 0: OpenMP default
  // Abort threshold on the number of candidate tuples.
  std::size_t max_candidates = 20'000'000;
};

// Canonical words of length <= L usable for variable `var`: letters with
// rho inside rho(X), the right constraint, and reduced in group mode.
std::vector<Word> oracle_candidates(const Instance& inst, int var, int L);

// Whether a tuple satisfies the instance (equation, constraints, and
// reducedness in group mode).
bool oracle_accepts(const Instance& inst, const Tuple& t);

// Free cancellation of factors a abar in a trace.
Word group_reduce(const Word& w, const SymbolTable& t);

std::set<Tuple> enumerate_bruteforce(const Instance& inst, int L, const OracleOptions& opt = {});
std::set<Tuple> enumerate_bruteforce_serial(const Instance& inst, int L, const OracleOptions& opt = {});
long count_at_least(const Instance& inst, int L, const OracleOptions& opt = {});

}  // namespace ts
