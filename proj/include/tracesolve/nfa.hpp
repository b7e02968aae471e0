// The automaton of extended equations: states merged by canonical form,
// edges labeled by transitions, trimming, verdicts and enumeration.
#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracesolve/equation.hpp"
#include "tracesolve/instance.hpp"
#include "tracesolve/recompression.hpp"
#include "tracesolve/transition.hpp"

namespace ts {

struct NfaEdge {
  int src = 0;
  int dst = 0;
  TransitionLabel label;
  bool operator==(const NfaEdge& o) const { return src == o.src && dst == o.dst && label == o.label; }
};

class EndoNFA {
 public:
  std::vector<std::shared_ptr<const Problem>> problems;
  std::vector<State> states;
  std::vector<Solution> witness;  // one known solution per state (may be empty)
  std::vector<NfaEdge> edges;
  std::set<int> initials;
  std::set<int> finals;

  int add_state(const State& canonical, const Solution* sol = nullptr);
  bool add_edge(int src, int dst, const TransitionLabel& label);
  // Canonicalizes every state of the path and inserts it with its edges.
  void insert_path(const ForwardPath& path);

  int find_state(const State& canonical) const;
  int problem_index(const State& s) const;
  EndoNFA trimmed() const;
  bool satisfiable() const;  // some initial reaches a final
  // A directed cycle as a list of states, if one exists.
  std::optional<std::vector<int>> find_cycle() const;
  std::vector<std::vector<int>> out_edges() const;

  std::string to_dot() const;
  nlohmann::json to_json() const;
  static EndoNFA from_json(const nlohmann::json& j, const std::vector<std::shared_ptr<const Problem>>& problems);
  bool operator==(const EndoNFA& o) const;

 private:
  std::map<std::string, int> index_;
};

// Key identifying a canonical state (word, symbol data, types, constraint).
std::string state_key(const State& s, int problem_index);

Solution rename_solution(const Solution& sol, const Renaming& ren);

// Tuples pi0(h(c_1)), ..., pi0(h(c_k)) over all accepting paths whose
// components all have length <= L (backward fixpoint; labels other than
// final ones never shorten words, so the pruning is exact).
std::set<Tuple> enumerate_bounded(const EndoNFA& nfa, int L);

struct AcceptingPath {
  std::vector<int> edges;
  Tuple tuple;  // over the engine's base letters
  int problem = 0;
};
// Accepting paths found by depth-first search with every state visited at
// most `visit_cap` times per path.
std::vector<AcceptingPath> enumerate_paths(const EndoNFA& nfa, std::size_t max_paths, std::size_t max_len = 400,
                                           int visit_cap = 2);

// Composed label h_1 ... h_n applied to the distinguished letters, then
// projected to base letters.
Tuple path_tuple(const EndoNFA& nfa, const std::vector<int>& edges);

}  // namespace ts
