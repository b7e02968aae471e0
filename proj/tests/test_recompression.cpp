#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"
#include "tracesolve/recompression.hpp"
#include "tracesolve/trace.hpp"

using namespace ts;
using namespace ts::test;

namespace {

// Guided context positioned after the initial transitions for one solution.
struct Guided {
  Encoding enc;
  GuidedContext ctx;
};

Guided after_initial(const Instance& inst, const Tuple& sol) {
  Encoding enc = encode(inst, {sol}, Budgets{});
  GuidedContext ctx(enc.tasks.at(0).initial, enc.seeds.at(0).sol, nullptr);
  ctx.initial_transitions();
  return {std::move(enc), std::move(ctx)};
}

bool has_factor(const Word& w, const Word& f) { return std::search(w.begin(), w.end(), f.begin(), f.end()) != w.end(); }

const char* kSample[] = {"toy1", "toy2", "toy3", "toy4", "mix_two", "mix_sym", "mix_sym2", "mix_rho", "mix_shared",
                         "raag_abelian", "raag_path"};

}  // namespace

TEST_CASE("resource_order extends the size order") {
  const std::vector<Mask> o = resource_order(7);
  // [TRIVIAL] by size, then by value; the full set is never processed.
  CHECK(o == std::vector<Mask>{1, 2, 4, 3, 5, 6});
  for (std::size_t i = 0; i < o.size(); ++i)
    for (std::size_t j = i + 1; j < o.size(); ++j) CHECK_FALSE(subset(o[j], o[i]));
}

TEST_CASE("occurrence classification on Xa = aX") {
  const Instance inst = load_corpus("toy2");
  const Sym a = inst.alphabet.find("a");
  const Encoding enc = encode(inst, {{{a}}}, Budgets{});
  const State& s = enc.tasks[0].initial;
  const Expansion x = expand_state(s, enc.seeds[0].sol);
  // W = # X # X a # a X # ...; W[3] = X, W[4] = a.
  REQUIRE(s.W[4] == a);
  const int in_x = x.e_of_w[3], vis = x.e_of_w[4];
  const OccurrenceClass c1 = classify_occurrence(x, {vis});
  CHECK(c1.visible);  // [TRIVIAL]
  CHECK_FALSE(c1.crossing);
  CHECK_FALSE(classify_occurrence(x, {in_x}).visible);  // [TRIVIAL]
  // [DERIVED] the factor a a spans the right end of sigma(X).
  CHECK(classify_occurrence(x, {in_x, vis}).crossing);
  CHECK(arc_is_crossing(s, x, {in_x, vis}));
  // [TRIVIAL] # -> first letter of sigma(X) crosses the left border.
  CHECK(arc_is_crossing(s, x, {x.e_of_w[2], in_x}));
  // [DERIVED] a -> # is visible, but the involution pairs it with the arc
  // # -> abar whose end lies in sigma(Xbar) (the first letter of Vbar).
  REQUIRE(x.iota[static_cast<std::size_t>(vis)] == x.e_of_w[12]);
  CHECK(x.off[static_cast<std::size_t>(x.e_of_w[12])] >= 0);
  CHECK(arc_is_crossing(s, x, {vis, x.e_of_w[5]}));

  // [TRIVIAL] without variables every arc is free.
  const ForwardPath p = forward_path(s, enc.seeds[0].sol);
  for (const PathStep& st : p.steps) {
    if (st.to.has_variables()) continue;
    const Expansion y = expand_state(st.to, st.sol);
    for (auto arc : hasse_arcs(y.E, st.to.syms)) CHECK_FALSE(arc_is_crossing(st.to, y, arc));
    break;
  }
}

TEST_CASE("choose_partition: exhaustive search on (ab)^4") {
  const Abc x = make_abc(R1, R1);
  const std::vector<Sym> ls{x.a, x.A(), x.b, x.B()};
  std::vector<std::pair<Sym, Sym>> occ;
  const Word w{x.a, x.b, x.a, x.b, x.a, x.b, x.a, x.b};
  for (std::size_t i = 0; i + 1 < w.size(); ++i) occ.push_back({w[i], w[i + 1]});
  const long k = static_cast<long>(w.size());
  const PartitionResult r = choose_partition(x.t(), ls, occ, k);
  // [DERIVED] brute force over the four involuting partitions.
  long best = 0;
  for (int m = 0; m < 4; ++m) {
    std::set<Sym> plus{(m & 1) ? x.a : x.A(), (m & 2) ? x.b : x.B()};
    long c = 0;
    for (auto [p, q] : occ) c += plus.count(p) && !plus.count(q) && q != x.t().bar(p);
    best = std::max(best, c);
  }
  CHECK(best == 4);
  CHECK(r.covered == best);
  CHECK(r.covered >= (k + 15) / 16);
  for (Sym s : ls) CHECK(r.plus.count(s) != r.plus.count(x.t().bar(s)));

  // [TRIVIAL] a single pair: a a-bar occurrences never count.
  const PartitionResult z = choose_partition(x.t(), {x.a, x.A()}, {{x.a, x.A()}}, 0);
  CHECK(z.covered == 0);
  CHECK(z.plus.size() == 1);
}

TEST_CASE("block compression collapses a visible a^3") {
  // a a a X = a a a b with sigma(X) = b: the initial substitution leaves
  // visible a-blocks and no variables.
  const Instance inst = make_instance({letter("a", "A", {"r1"}), letter("b", "B", {"r1"})}, {variable("X")},
                                      {"a", "a", "a", "X"}, {"a", "a", "a", "b"});
  const Sym a = inst.alphabet.find("a");
  Guided g = after_initial(inst, {{inst.alphabet.find("b")}});
  REQUIRE_FALSE(g.ctx.state.has_variables());
  const std::size_t before = g.ctx.state.W.size();
  REQUIRE(has_factor(g.ctx.state.W, {a, a, a}));
  g.ctx.block_compression(R1);
  // [DERIVED] no factor c c remains for any constant.
  const Word& w = g.ctx.state.W;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] != 0) CHECK(w[i] != w[i + 1]);
  // [DERIVED] two blocks a^3 and two blocks abar^3 became one letter each.
  CHECK(w.size() == before - 8);
}

TEST_CASE("quasi-block compression removes a abar a") {
  const Instance inst = make_instance({letter("a", "A", {"r1"}), letter("b", "B", {"r1"})}, {variable("X")},
                                      {"a", "A", "a", "A", "X"}, {"a", "A", "a", "A", "b"});
  const Sym a = inst.alphabet.find("a"), A = a + 1;
  Guided g = after_initial(inst, {{inst.alphabet.find("b")}});
  REQUIRE_FALSE(g.ctx.state.has_variables());
  REQUIRE(has_factor(g.ctx.state.W, {a, A, a}));
  g.ctx.block_compression(R1);
  g.ctx.quasi_block_compression(R1);
  // [DERIVED] no factor c cbar c remains.
  const State& s = g.ctx.state;
  for (std::size_t i = 0; i + 2 < s.W.size(); ++i) {
    const Sym c = s.W[i];
    if (c == 0 || !s.syms.is_constant(c)) continue;
    CHECK_FALSE((s.W[i + 1] == s.syms.bar(c) && s.W[i + 2] == c));
  }
  // No self-involuting letters were created.
  for (Sym c : s.constants())
    if (!s.problem().in_a(c)) CHECK(s.syms.bar(c) != c);
}

TEST_CASE("fixed_resources on Xa = aX with sigma(X) = aaaa") {
  const Instance inst = load_corpus("toy2");
  const Sym a = inst.alphabet.find("a");
  Guided g = after_initial(inst, {{a, a, a, a}});
  EngineStats st;
  GuidedContext ctx(g.ctx.state, g.ctx.sol, &st);
  ctx.fixed_resources(R1);
  // [DERIVED] postcondition of the fixed-resource phase.
  CHECK(ctx.longest_s_run(R1) <= 2);
  CHECK_FALSE(ctx.has_s_variables(R1));
  CHECK(st.postcondition_failures.empty());
}

TEST_CASE("forward path of X = a") {
  const Instance inst = load_corpus("toy1");
  const Sym a = inst.alphabet.find("a");
  const Encoding enc = encode(inst, {{{a}}}, Budgets{});
  const ForwardPath p = forward_path(enc.tasks[0].initial, enc.seeds[0].sol);
  // [DERIVED] replayed: initial substitution, one lift, the final compression.
  CHECK(p.steps.size() <= 10);
  CHECK(is_final(p.steps.back().to));
  std::vector<const TransitionLabel*> ls;
  for (const PathStep& s : p.steps) ls.push_back(&s.label);
  const auto img = apply_to_distinguished(ls, enc.tasks[0].problem->distinguished);
  CHECK(project_pi0(img.at(0), enc.tasks[0].problem->alphabet) == Word{a});
}

TEST_CASE("property: composed labels reproduce the seed solution") {
  for (const char* name : kSample) {
    const Instance inst = load_corpus(name);
    const std::set<Tuple> sols = enumerate_bruteforce(inst, 3);
    const Encoding enc = encode(inst, sols, Budgets{});
    std::set<Tuple> got;
    for (const Seed& s : enc.seeds) {
      const Task& task = enc.tasks[static_cast<std::size_t>(s.task)];
      EngineStats st;
      const ForwardPath p = forward_path(task.initial, s.sol, &st);
      CHECK_MESSAGE(st.postcondition_failures.empty(), name);
      CHECK_MESSAGE(st.budget_failures.empty(), name);
      CHECK_MESSAGE(st.partition_shortfalls == 0, name);
      std::vector<const TransitionLabel*> ls;
      Tuple t;
      for (const PathStep& step : p.steps) {
        ls.push_back(&step.label);
        // Pair compression never compresses a abar.
        if (step.phase.find("pair") != std::string::npos)
          for (const auto& [c, w] : step.label.endo)
            if (w.size() == 2) CHECK(w[1] != step.to.syms.bar(w[0]));
      }
      for (const Word& w : apply_to_distinguished(ls, task.problem->distinguished))
        t.push_back(project_pi0(w, task.problem->alphabet));
      got.insert(enc.decode(t));
    }
    CHECK_MESSAGE(got == sols, name);
  }
}
