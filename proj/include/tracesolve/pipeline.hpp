// From an instance to an automaton: encoding into the engine's input form,
// solution-guided construction seeded by oracle solutions, and the verdicts
// used by the command line tool.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracesolve/equation.hpp"
#include "tracesolve/instance.hpp"
#include "tracesolve/nfa.hpp"
#include "tracesolve/recompression.hpp"

namespace ts {

// An equation in monoid form, over base letters only.
struct EngineSpec {
  ResourceAlphabet alphabet;
  FiniteMonoid monoid;
  std::vector<int> letter_mu;  // by letter id, marker ignored
  int k = 0;                   // reported variables come first
  std::vector<std::string> var_names;
  std::vector<Mask> var_rho;
  std::vector<int> var_mu;
  // Letters keep their id; variable i is alphabet.size() + 2i, its bar +1.
  Word u, v;
};

struct Task {
  std::shared_ptr<const Problem> problem;
  State initial;
};

// Adds the extra resource when a letter uses all resources, lifts the
// alphabet, adjoins the marker zero and builds the initial state.
Task make_task(const EngineSpec& spec, const Budgets& budgets);

// sigma on the variables of `task` (reported then auxiliary), bars added.
Solution task_solution(const Task& task, const std::vector<Word>& values);

struct Seed {
  int task = 0;
  Solution sol;
};

struct Encoding {
  std::vector<Task> tasks;
  std::vector<Seed> seeds;
  // Engine base letters -> instance letters, in normal form.
  std::function<Tuple(const Tuple&)> decode;
  // Engine words are at most this many times longer than decoded ones.
  int length_factor = 1;
  std::string description;
};

// Monoid mode without self-involuting letters.
Encoding encode_monoid(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets);
// Dispatches on the mode and the alphabet.
Encoding encode(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets);

struct SolveOptions {
  int bound = 4;
  int jobs = 0;
  Budgets budgets;
};

struct BuildResult {
  Encoding enc;
  EndoNFA full;     // every inserted state
  EndoNFA nfa;      // trimmed
  EngineStats stats;
  std::vector<std::string> errors;  // seeds whose guided path failed
  std::set<Tuple> oracle;           // seeding solutions
};

// Oracle at the bound, one guided path per solution (in parallel), merge.
BuildResult build_nfa(const Instance& inst, const SolveOptions& opt);
// Same, seeded with the given solutions.
BuildResult build_from(const Instance& inst, const std::set<Tuple>& sols, const SolveOptions& opt);

// Solutions read off the automaton, decoded, restricted to length <= L.
std::set<Tuple> nfa_solutions(const BuildResult& b, int L);

// Pulls the witness of every edge target back and checks it solves the
// source. Returns one message per failing edge.
std::vector<std::string> replay_edges(const EndoNFA& nfa);

struct FiniteVerdict {
  enum class Kind { Finite, Infinite, Unknown } kind = Kind::Unknown;
  std::size_t count = 0;
  std::optional<std::vector<int>> cycle;
  std::string line() const;       // human readable
  std::string verdict(int L) const;  // yes / no / unknown@L
};
FiniteVerdict finiteness(const Instance& inst, const BuildResult& b, int L, const SolveOptions& opt);

}  // namespace ts
