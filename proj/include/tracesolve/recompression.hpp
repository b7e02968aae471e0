// Solution-guided construction of a path from the initial state to a final
// state: resource sets are processed in order, each by compressing its runs
// (blocks, quasi-blocks, pairs) and then lifting its letters away.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tracesolve/equation.hpp"
#include "tracesolve/transition.hpp"

namespace ts {

struct PathStep {
  TransitionLabel label;
  State to;
  Solution sol;  // solution of `to`
  std::string phase;
};

struct ForwardPath {
  State start;
  Solution start_sol;
  std::vector<PathStep> steps;
  // Events that do not produce a transition (rollbacks, fallbacks).
  std::vector<std::string> annotations;
};

struct EngineStats {
  long transitions = 0;
  long partition_calls = 0;
  long partition_shortfalls = 0;  // covered < ceil(k/16)
  long typed_loops = 0;
  long typed_rollbacks = 0;
  long fallbacks = 0;
  long max_length = 0;
  long max_var_occurrences = 0;
  std::vector<std::string> postcondition_failures;
  std::vector<std::string> budget_failures;

  void merge(const EngineStats& o);
};

// Expansion sigma(W) with provenance of every position.
struct Expansion {
  Word E;
  std::vector<int> src;     // position of W
  std::vector<int> off;     // -1: visible, else offset inside sigma(W[src])
  std::vector<int> e_of_w;  // first E position of each W position (-1 if empty)
  std::vector<int> iota;    // involution correspondence on positions of E
};
Expansion expand_state(const State& s, const Solution& sol);

// Occurrence classification of a set of positions of sigma(W).
struct OccurrenceClass {
  bool visible = false;
  bool crossing = false;
};
OccurrenceClass classify_occurrence(const Expansion& x, const std::vector<int>& positions);

// An arc (i, j) of sigma(W) is crossing if some arc equivalent to it under
// the involution and the correspondence between occurrences of a variable
// is visibly crossing.
bool arc_is_crossing(const State& s, const Expansion& x, std::pair<int, int> arc);

// Maximal S-runs of sigma(W) as lists of positions of E.
std::vector<std::vector<int>> s_runs(const State& s, const Expansion& x, Mask S);

struct PartitionResult {
  std::set<Sym> plus;
  long covered = 0;
  long k = 0;
};
// Involuting partition of a bar-closed letter set maximising the number of
// pair occurrences ab with a in S+ and b in S-. Pairs a abar never count.
PartitionResult choose_partition(const SymbolTable& t, const std::vector<Sym>& letters,
                                 const std::vector<std::pair<Sym, Sym>>& pair_occurrences, long k,
                                 std::uint64_t seed = 1);

// Resource sets in processing order: by size, then by mask value.
std::vector<Mask> resource_order(Mask full);

// Internal failure of a guided step (the step is rolled back or replaced by
// the substitution fallback).
class StepFailure : public Error {
 public:
  using Error::Error;
};

class GuidedContext {
 public:
  GuidedContext(State s, Solution sol, EngineStats* stats);

  State state;
  Solution sol;
  std::vector<PathStep> steps;
  std::vector<std::string> annotations;

  // Validates and follows one transition.
  void emit(const TransitionLabel& label, State to, Solution to_sol, const std::string& phase);

  void initial_transitions();
  void fixed_resources(Mask S);
  void remove_resource_set(Mask S);
  void remove_useless(const std::string& phase);
  void finalize();

  // Building blocks, public for tests.
  void substitute_away(const std::vector<Sym>& vars, const std::string& phase);
  bool typed_block_loop(Sym x, const std::string& phase);
  bool block_compression(Mask S);
  bool quasi_block_compression(Mask S);
  bool pair_compression(Mask S);
  bool merge_neighbours(Mask S);
  bool lift_letters(Mask S);
  // Contracts each marker occurrence with a neighbouring c, into the marker
  // itself or into a fresh letter.
  void absorb(Sym marker, Sym c, bool into_fresh, const std::string& phase);
  void fallback_all(const std::string& phase, const std::string& why);

  // Postcondition helpers.
  long longest_s_run(Mask S) const;
  bool has_s_variables(Mask S) const;
  bool has_s_letters(Mask S) const;

 private:
  EngineStats* stats_;
  EngineStats local_;
  EngineStats& stats() { return stats_ ? *stats_ : local_; }
};

ForwardPath forward_path(const State& init, const Solution& sol, EngineStats* stats = nullptr);

}  // namespace ts
