#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/nfa.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"

using namespace ts;
using namespace ts::test;

namespace {

BuildResult build(const std::string& name, int bound) {
  SolveOptions opt;
  opt.bound = bound;
  return build_nfa(load_corpus(name), opt);
}

// States reachable from the initials and co-reachable from the finals.
std::set<int> useful(const EndoNFA& n) {
  auto reach = [&](const std::set<int>& start, bool fwd) {
    std::set<int> seen = start;
    std::vector<int> todo(start.begin(), start.end());
    while (!todo.empty()) {
      const int q = todo.back();
      todo.pop_back();
      for (const NfaEdge& e : n.edges) {
        const int from = fwd ? e.src : e.dst, to = fwd ? e.dst : e.src;
        if (from == q && seen.insert(to).second) todo.push_back(to);
      }
    }
    return seen;
  };
  const std::set<int> f = reach(n.initials, true), b = reach(n.finals, false);
  std::set<int> out;
  for (int q : f)
    if (b.count(q)) out.insert(q);
  return out;
}

}  // namespace

TEST_CASE("X = a: acyclic with one solution") {
  const BuildResult b = build("toy1", 3);
  CHECK(b.errors.empty());
  CHECK(b.nfa.satisfiable());  // [TRIVIAL]
  CHECK(b.nfa.initials.size() == 1);
  CHECK_FALSE(b.nfa.find_cycle().has_value());
  const Sym a = load_corpus("toy1").alphabet.find("a");
  // [DERIVED] the oracle has the single solution X = a.
  CHECK(nfa_solutions(b, 3) == std::set<Tuple>{{{a}}});
}

TEST_CASE("Xa = aX has a cycle") {
  const BuildResult b = build("toy2", 4);
  const auto cyc = b.nfa.find_cycle();
  REQUIRE(cyc.has_value());
  // [TRIVIAL] consecutive states of the cycle are joined by edges.
  const std::vector<int>& c = *cyc;
  REQUIRE(c.size() >= 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int s = c[i], d = c[(i + 1) % c.size()];
    bool found = false;
    for (const NfaEdge& e : b.nfa.edges) found = found || (e.src == s && e.dst == d);
    CHECK(found);
  }
}

TEST_CASE("trimmed keeps exactly the useful states") {
  for (const char* name : {"toy1", "toy3", "mix_two"}) {
    const BuildResult b = build(name, 3);
    // [DERIVED] reachability recomputed here.
    CHECK_MESSAGE(useful(b.full).size() == b.nfa.states.size(), name);
    CHECK_MESSAGE(useful(b.nfa).size() == b.nfa.states.size(), name);
    CHECK(b.nfa.trimmed() == b.nfa);  // idempotent
  }
}

TEST_CASE("json round trip") {
  const BuildResult b = build("toy3", 3);
  const nlohmann::json j = b.nfa.to_json();
  CHECK(j.at("schema") == "tracesolve-nfa/1");
  const EndoNFA back = EndoNFA::from_json(j, b.nfa.problems);
  CHECK(back == b.nfa);
  for (std::size_t i = 0; i < back.states.size(); ++i) CHECK(back.states[i].weight() == b.nfa.states[i].weight());
  CHECK(back.to_json() == j);
}

TEST_CASE("dot output names every state and edge") {
  const BuildResult b = build("toy1", 3);
  const std::string dot = b.nfa.to_dot();
  CHECK(dot.rfind("digraph", 0) == 0);  // [TRIVIAL]
  std::size_t edges = 0, starts = 0;
  std::istringstream in(dot);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("  q", 0) == 0 && line.find(" -> q") != std::string::npos) ++edges;
    if (line.rfind("  start", 0) == 0 && line.find(" -> q") != std::string::npos) ++starts;
  }
  CHECK(edges == b.nfa.edges.size());
  CHECK(starts == b.nfa.initials.size());
}

TEST_CASE("add_state merges canonical states") {
  const BuildResult b = build("toy1", 3);
  EndoNFA n = b.nfa;
  const std::size_t before = n.states.size();
  CHECK(n.add_state(n.states[0]) == 0);  // [TRIVIAL]
  CHECK(n.states.size() == before);
  CHECK(n.find_state(n.states.back()) == static_cast<int>(before) - 1);
  // [TRIVIAL] duplicate edges are not inserted twice.
  const NfaEdge e = n.edges.at(0);
  CHECK_FALSE(n.add_edge(e.src, e.dst, e.label));
}

TEST_CASE("property: enumerate_bounded equals the oracle") {
  for (const char* name : {"toy1", "toy2", "toy3", "toy4", "mix_two", "mix_sym", "mix_rho", "raag_abelian"}) {
    const Instance inst = load_corpus(name);
    const BuildResult b = build(name, 3);
    // [DERIVED] brute-force oracle at every bound up to the build bound.
    for (int L = 0; L <= 3; ++L) CHECK_MESSAGE(nfa_solutions(b, L) == enumerate_bruteforce(inst, L), name);
  }
}

TEST_CASE("property: accepting paths decode to oracle solutions") {
  for (const char* name : {"toy2", "toy3", "mix_sym", "raag_path"}) {
    const Instance inst = load_corpus(name);
    const BuildResult b = build(name, 3);
    const auto paths = enumerate_paths(b.nfa, 200);
    CHECK(!paths.empty());
    for (const AcceptingPath& p : paths) {
      CHECK(path_tuple(b.nfa, p.edges) == p.tuple);
      CHECK(b.nfa.initials.count(b.nfa.edges.at(static_cast<std::size_t>(p.edges.front())).src));
      CHECK(b.nfa.finals.count(b.nfa.edges.at(static_cast<std::size_t>(p.edges.back())).dst));
      CHECK_MESSAGE(oracle_accepts(inst, b.enc.decode(p.tuple)), name);
    }
  }
}

TEST_CASE("property: every edge replays its witness") {
  for (const char* name : {"toy1", "toy2", "toy4", "mix_shared", "raag_abelian"}) {
    const BuildResult b = build(name, 3);
    CHECK_MESSAGE(replay_edges(b.nfa).empty(), name);
  }
}

TEST_CASE("finiteness verdicts") {
  SolveOptions opt;
  opt.bound = 4;
  const Instance single = load_corpus("fin_single");
  const BuildResult bs = build_nfa(single, opt);
  const FiniteVerdict vs = finiteness(single, bs, 4, opt);
  CHECK(vs.verdict(4) == "yes");  // [DERIVED] brute-force oracle: one solution
  CHECK(vs.count == 1);

  const Instance two = load_corpus("toy2");
  CHECK(finiteness(two, build_nfa(two, opt), 4, opt).verdict(4) == "no");  // [TRIVIAL] X = a^n

  // [DERIVED] odd powers of a: a and aaa fit below the bound, the oracle
  // finds a^5 in the gap, so the verdict stays open.
  const Instance parity = load_corpus("mix_parity");
  const BuildResult bp = build_nfa(parity, opt);
  REQUIRE_FALSE(bp.nfa.find_cycle().has_value());
  const Sym a = parity.alphabet.find("a");
  CHECK(enumerate_bruteforce(parity, 5).count({Word(5, a)}) == 1);
  CHECK(finiteness(parity, bp, 4, opt).verdict(4) == "unknown@4");
}
