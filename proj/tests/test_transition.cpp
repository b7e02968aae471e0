#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"
#include "tracesolve/recompression.hpp"
#include "tracesolve/trace.hpp"
#include "tracesolve/transition.hpp"

using namespace ts;
using namespace ts::test;

namespace {

struct Toy {
  Instance inst;
  Encoding enc;
  const Task& task() const { return enc.tasks.at(0); }
  Sym letter(const char* n) const { return task().problem->alphabet.find(n); }
  Sym var(int i) const { return task().problem->vars.at(static_cast<std::size_t>(i)); }
};

Toy toy(const std::string& name, const std::set<Tuple>& sols = {}) {
  Toy t{load_corpus(name), {}};
  t.enc = encode(t.inst, sols, Budgets{});
  return t;
}

ForwardPath seed_path(const Toy& t, std::size_t i = 0) {
  const Seed& s = t.enc.seeds.at(i);
  return forward_path(t.enc.tasks[static_cast<std::size_t>(s.task)].initial, s.sol);
}

// All steps of the guided paths for every oracle solution at bound 2.
template <class F>
void for_each_step(const std::string& name, F f) {
  const Instance inst = load_corpus(name);
  const Encoding enc = encode(inst, enumerate_bruteforce(inst, 2), Budgets{});
  for (const Seed& s : enc.seeds) {
    const ForwardPath p = forward_path(enc.tasks[static_cast<std::size_t>(s.task)].initial, s.sol);
    const State* prev = &p.start;
    const Solution* prev_sol = &p.start_sol;
    for (const PathStep& st : p.steps) {
      f(*prev, *prev_sol, st);
      prev = &st.to;
      prev_sol = &st.sol;
    }
  }
}

const char* kCorpusSample[] = {"toy1", "toy2", "toy3", "toy4", "mix_two", "mix_sym", "mix_rho", "raag_abelian"};

}  // namespace

TEST_CASE("substitution: pop a letter") {
  const Toy t = toy("toy2");
  const State& from = t.task().initial;
  const Sym x = t.var(0), a = t.letter("a");
  // [PAPER] tau(X) = a X.
  const auto tau = close_tau(from, {{x, {a, x}}});
  const State to = make_substitution_target(from, from, tau);
  TransitionLabel l;
  l.kind = LabelKind::Substitution;
  l.tau = tau;
  CHECK(validate_substitution(from, to, l).empty());
  // [DERIVED] X and Xbar occur three times each in W_init.
  CHECK(to.W.size() == from.W.size() + 6);
}

TEST_CASE("substitution: identity and variable-only images are rejected") {
  const Toy t = toy("toy2");
  const State& from = t.task().initial;
  const Sym x = t.var(0);
  TransitionLabel l;
  l.kind = LabelKind::Substitution;
  // [TRIVIAL] W' = W.
  l.tau = close_tau(from, {{x, {x}}});
  CHECK_FALSE(validate_substitution(from, from, l).empty());

  // [TRIVIAL] tau(X) = Y has no constant.
  State work = from;
  const Sym y = work.add_variable_pair(work.syms.rho(x), work.mu.image(x));
  l.tau = close_tau(work, {{x, {y}}});
  const State to = make_substitution_target(from, work, l.tau);
  CHECK_FALSE(validate_substitution(from, to, l).empty());
}

TEST_CASE("initial transition of X = a") {
  const Toy t = toy("toy1", {{{load_corpus("toy1").alphabet.find("a")}}});
  const ForwardPath p = seed_path(t);
  REQUIRE_FALSE(p.steps.empty());
  const PathStep& st = p.steps.front();
  // [DERIVED] the whole solution is substituted and X disappears.
  CHECK(st.label.kind == LabelKind::Substitution);
  CHECK(st.label.tau.at(t.var(0)) == Word{t.letter("a")});
  CHECK_FALSE(st.to.has_variables());
}

TEST_CASE("compression: renaming and pair compression validate and shrink the weight") {
  int renames = 0, pairs = 0;
  for (const char* name : kCorpusSample) {
    for_each_step(name, [&](const State& from, const Solution&, const PathStep& st) {
      if (st.label.kind != LabelKind::Compression) return;
      CHECK(validate_compression(from, st.to, st.label).empty());
      CHECK(st.to.weight() < from.weight());
      for (const auto& [c, w] : st.label.endo) {
        if (from.problem().in_a(c)) continue;
        if (w.size() == 1 && from.syms.rho(w[0]) != st.to.syms.rho(c)) ++renames;
        if (w.size() == 2) {
          ++pairs;
          CHECK(st.to.W.size() < from.W.size());
        }
      }
    });
  }
  CHECK(renames > 0);
  CHECK(pairs > 0);
}

TEST_CASE("compression: an image a abar is rejected") {
  const Instance inst = make_instance({letter("a", "A", {"r1"})}, {variable("X")}, {"X"}, {"a", "A"});
  const Sym a = inst.alphabet.find("a");
  const Toy t{inst, encode(inst, {{{a, a + 1}}}, Budgets{})};
  const ForwardPath p = seed_path(t);
  // First state without variables that still contains a A.
  const State* found = nullptr;
  for (const PathStep& st : p.steps) {
    if (st.to.has_variables()) continue;
    for (std::size_t i = 0; i + 1 < st.to.W.size() && !found; ++i)
      if (st.to.W[i] == a && st.to.W[i + 1] == a + 1) found = &st.to;
    if (found) break;
  }
  REQUIRE(found != nullptr);
  const State& from = *found;
  State to = from;
  const Sym c = to.add_constant_pair(R1, to.mu.target().mul(to.mu.image(a), to.mu.image(a + 1)));
  Word w;
  for (std::size_t i = 0; i < from.W.size(); ++i) {
    if (i + 1 < from.W.size() && from.W[i] == a && from.W[i + 1] == a + 1) {
      w.push_back(c);
      ++i;
    } else {
      w.push_back(from.W[i]);
    }
  }
  to.W = w;
  TransitionLabel l;
  l.kind = LabelKind::Compression;
  l.endo = {{c, {a, a + 1}}, {c + 1, {a, a + 1}}};
  // [TRIVIAL] c and cbar would have the same image.
  CHECK_FALSE(validate_compression(from, to, l).empty());
}

TEST_CASE("remove_useless drops a letter pair absent from sigma(W)") {
  const Toy t = toy("toy1", {{{load_corpus("toy1").alphabet.find("a")}}});
  State s = t.task().initial;
  const Sym d = s.add_constant_pair(R12, s.mu.target().unit());
  GuidedContext ctx(s, t.enc.seeds[0].sol, nullptr);
  const std::size_t before = s.constants().size();
  ctx.remove_useless("test");
  // [TRIVIAL] the letter and its bar go.
  CHECK(ctx.state.constants().size() == before - 2);
  CHECK_FALSE(ctx.state.syms.in_use(d));
  REQUIRE(ctx.steps.size() == 1);
  CHECK(validate_transition(s, ctx.steps[0].to, ctx.steps[0].label).empty());
}

TEST_CASE("final transition") {
  const Toy t = toy("toy1", {{{load_corpus("toy1").alphabet.find("a")}}});
  const ForwardPath p = seed_path(t);
  const State& q1 = p.steps.front().to;  // # a # a # a # A # A # A #
  const Sym a = t.letter("a");
  REQUIRE(q1.W == Word{0, a, 0, a, 0, a, 0, a + 1, 0, a + 1, 0, a + 1, 0});
  const FinalResult f = final_transition(q1);
  const Sym c1 = t.task().problem->distinguished.at(0);
  // [DERIVED] h(c1) = a; W = # c1 # a # a # A # A # C1 #.
  CHECK(f.label.endo.at(c1) == Word{a});
  CHECK(f.state.W == Word{0, c1, 0, a, 0, a, 0, a + 1, 0, a + 1, 0, c1 + 1, 0});
  CHECK(is_final(f.state));
  CHECK(validate_transition(q1, f.state, f.label).empty());

  // [PAPER] an empty block gives h(c1) = 1.
  const Toy e = toy("fin_empty", {{{}}});
  const ForwardPath pe = seed_path(e);
  const PathStep& last = pe.steps.back();
  CHECK(last.label.kind == LabelKind::FinalCompression);
  CHECK(last.label.endo.at(e.task().problem->distinguished.at(0)).empty());
}

TEST_CASE("apply_to_distinguished") {
  const Sym c1 = 40;
  CHECK(apply_to_distinguished({}, {c1}) == std::vector<Word>{{c1}});  // [TRIVIAL]
  TransitionLabel h;
  h.kind = LabelKind::FinalCompression;
  h.endo[c1] = {1};
  CHECK(apply_to_distinguished({&h}, {c1}) == std::vector<Word>{{1}});  // [TRIVIAL]

  // [DERIVED] the composed path of Xa = aX for sigma(X) = a a yields a a.
  const Instance inst = load_corpus("toy2");
  const Sym a = inst.alphabet.find("a");
  const Toy t{inst, encode(inst, {{{a, a}}}, Budgets{})};
  const ForwardPath p = seed_path(t);
  std::vector<const TransitionLabel*> ls;
  for (const PathStep& st : p.steps) ls.push_back(&st.label);
  const auto imgs = apply_to_distinguished(ls, t.task().problem->distinguished);
  CHECK(project_pi0(imgs.at(0), t.task().problem->alphabet) == Word{a, a});
}

TEST_CASE("property: pulled back solutions solve the source") {
  for (const char* name : kCorpusSample) {
    for_each_step(name, [&](const State& from, const Solution&, const PathStep& st) {
      const Solution back = pull_back(from, st.label, st.sol);
      CHECK_MESSAGE(check_solution(from, back, true).ok, name);
    });
  }
}

TEST_CASE("property: compression labels respect the involution") {
  for (const char* name : kCorpusSample) {
    for_each_step(name, [&](const State& from, const Solution&, const PathStep& st) {
      if (st.label.kind == LabelKind::Substitution) return;
      for (const auto& [c, w] : st.label.endo) {
        const Sym cb = st.to.syms.bar(c);
        auto it = st.label.endo.find(cb);
        if (it == st.label.endo.end()) continue;
        CHECK(trace_equal(it->second, involute_word(w, from.syms), from.syms));
      }
    });
  }
}
