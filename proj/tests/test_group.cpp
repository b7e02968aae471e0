#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/group.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"
#include "tracesolve/trace.hpp"

using namespace ts;
using namespace ts::test;

namespace {

// Reported variable values of a seed, over the engine's base letters.
Tuple seed_values(const Encoding& enc, const Seed& s) {
  const Task& t = enc.tasks.at(static_cast<std::size_t>(s.task));
  Tuple out;
  for (Sym x : t.problem->vars) out.push_back(project_pi0(s.sol.sigma.at(x), t.problem->alphabet));
  return out;
}

const char* kGroup[] = {"raag_abelian", "raag_conj", "raag_free", "raag_inverse", "raag_path"};

}  // namespace

TEST_CASE("X = a^-1 in a free group") {
  const Instance inst = load_corpus("raag_inverse");
  const Sym a = inst.alphabet.find("a");
  // [DERIVED] the reduced form of a * abar is empty, so X = abar.
  CHECK(group_reduce({a, inst.alphabet.table().bar(a)}, inst.alphabet.table()).empty());
  SolveOptions opt;
  opt.bound = 3;
  const BuildResult b = build_nfa(inst, opt);
  CHECK(nfa_solutions(b, 3) == std::set<Tuple>{{{inst.alphabet.table().bar(a)}}});
}

TEST_CASE("conjugate generators of a free group: no solution") {
  SolveOptions opt;
  opt.bound = 3;
  const BuildResult b = build_nfa(load_corpus("raag_conj"), opt);
  // [DERIVED] a and b have different images in the abelianization.
  CHECK(b.oracle.empty());
  CHECK(nfa_solutions(b, 3).empty());
  CHECK_FALSE(b.nfa.satisfiable());
}

TEST_CASE("group encoding: seeds solve the triangulated equation") {
  for (const char* name : kGroup) {
    const Instance inst = load_corpus(name);
    const std::set<Tuple> sols = enumerate_bruteforce(inst, 2);
    const Encoding enc = encode_group(inst, sols, Budgets{});
    std::set<Tuple> back;
    for (const Seed& s : enc.seeds) {
      const Task& t = enc.tasks[static_cast<std::size_t>(s.task)];
      // [DERIVED] triangulation of the oracle solution.
      CHECK_MESSAGE(check_solution(t.initial, s.sol).ok, name);
      CHECK(t.problem->k == inst.k());
      back.insert(enc.decode(seed_values(enc, s)));
    }
    CHECK_MESSAGE(back == sols, name);
  }
}

TEST_CASE("self-involuting letter: split into a pair") {
  const Instance inst = load_corpus("mix_sym");
  const Sym s = inst.alphabet.find("s");
  REQUIRE(inst.alphabet.table().bar(s) == s);
  const std::set<Tuple> sols = enumerate_bruteforce(inst, 3);
  const Encoding enc = encode_self_involuting(inst, sols, Budgets{});
  REQUIRE_FALSE(enc.tasks.empty());
  const Problem& p = *enc.tasks[0].problem;
  const Sym plus = p.alphabet.find("s+"), minus = p.alphabet.find("s-");
  REQUIRE(plus != kNone);
  CHECK(p.alphabet.table().bar(plus) == minus);  // [TRIVIAL]
  CHECK(enc.length_factor == 2);

  // [DERIVED] the pairing factor (last in the product, six elements for
  // one letter) maps s+ s- to the neutral pair and s+ s+ to zero.
  const FiniteMonoid& m = *p.monoid;
  const int mp = p.letter_mu[static_cast<std::size_t>(plus)], mm = p.letter_mu[static_cast<std::size_t>(minus)];
  CHECK(m.mul(mp, mm) % 6 == 2);
  CHECK(m.mul(mp, mp) % 6 == 1);
  CHECK(m.mul(mm, mp) % 6 != 1);

  std::set<Tuple> back;
  for (const Seed& sd : enc.seeds) {
    CHECK(check_solution(enc.tasks[static_cast<std::size_t>(sd.task)].initial, sd.sol).ok);
    back.insert(enc.decode(seed_values(enc, sd)));
  }
  CHECK(back == sols);
}

TEST_CASE("property: group instances match the oracle with reduced solutions") {
  for (const char* name : kGroup) {
    const Instance inst = load_corpus(name);
    SolveOptions opt;
    opt.bound = 3;
    const BuildResult b = build_nfa(inst, opt);
    const std::set<Tuple> got = nfa_solutions(b, 3);
    CHECK_MESSAGE(got == enumerate_bruteforce(inst, 3), name);
    for (const Tuple& t : got)
      for (const Word& w : t) CHECK_MESSAGE(brute_reduced(w, inst.alphabet.table()), name);
  }
}

TEST_CASE("property: self-involuting instances match the oracle") {
  for (const char* name : {"mix_sym", "mix_sym2"}) {
    const Instance inst = load_corpus(name);
    SolveOptions opt;
    opt.bound = 3;
    const BuildResult b = build_nfa(inst, opt);
    CHECK_MESSAGE(nfa_solutions(b, 3) == enumerate_bruteforce(inst, 3), name);
  }
}
