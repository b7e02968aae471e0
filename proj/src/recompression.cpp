#include "tracesolve/recompression.hpp"


#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <queue>
#include <random>

#include "tracesolve/trace.hpp"

namespace ts {

void EngineStats::merge(const EngineStats& o) {
  transitions += o.transitions;
  partition_calls += o.partition_calls;
  partition_shortfalls += o.partition_shortfalls;
  typed_loops += o.typed_loops;
  typed_rollbacks += o.typed_rollbacks;
  fallbacks += o.fallbacks;
  max_length = std::max(max_length, o.max_length);
  max_var_occurrences = std::max(max_var_occurrences, o.max_var_occurrences);
  postcondition_failures.insert(postcondition_failures.end(), o.postcondition_failures.begin(),
                                o.postcondition_failures.end());
  budget_failures.insert(budget_failures.end(), o.budget_failures.begin(), o.budget_failures.end());
}

Expansion expand_state(const State& s, const Solution& sol) {
  Expansion x;
  x.e_of_w.assign(s.W.size(), -1);
  for (std::size_t i = 0; i < s.W.size(); ++i) {
    const Sym v = s.W[i];
    if (s.syms.is_variable(v)) {
      const Word img = sigma_image(sol, v);
      if (!img.empty()) x.e_of_w[i] = static_cast<int>(x.E.size());
      for (std::size_t k = 0; k < img.size(); ++k) {
        x.E.push_back(img[k]);
        x.src.push_back(static_cast<int>(i));
        x.off.push_back(static_cast<int>(k));
      }
    } else {
      x.e_of_w[i] = static_cast<int>(x.E.size());
      x.E.push_back(v);
      x.src.push_back(static_cast<int>(i));
      x.off.push_back(-1);
    }
  }
  std::map<Sym, std::vector<int>> occ;
  std::vector<int> rank(x.E.size());
  for (std::size_t e = 0; e < x.E.size(); ++e) {
    auto& v = occ[x.E[e]];
    rank[e] = static_cast<int>(v.size());
    v.push_back(static_cast<int>(e));
  }
  x.iota.assign(x.E.size(), -1);
  for (std::size_t e = 0; e < x.E.size(); ++e) {
    const Sym a = x.E[e];
    const auto& mine = occ[a];
    const auto& other = occ[s.syms.bar(a)];
    if (other.size() != mine.size()) throw StepFailure("sigma(W) is not closed under the involution");
    x.iota[e] = other[other.size() - 1 - static_cast<std::size_t>(rank[e])];
  }
  return x;
}

OccurrenceClass classify_occurrence(const Expansion& x, const std::vector<int>& positions) {
  OccurrenceClass c;
  bool invisible = false;
  std::set<int> sources;
  for (int e : positions) {
    if (x.off[static_cast<std::size_t>(e)] < 0) {
      c.visible = true;
    } else {
      invisible = true;
      sources.insert(x.src[static_cast<std::size_t>(e)]);
    }
  }
  c.crossing = (c.visible && invisible) || sources.size() > 1;
  return c;
}

bool arc_is_crossing(const State& s, const Expansion& x, std::pair<int, int> arc) {
  std::set<std::pair<int, int>> seen{arc};
  std::vector<std::pair<int, int>> todo{arc};
  auto visibly_crossing = [&](std::pair<int, int> a) {
    return classify_occurrence(x, {a.first, a.second}).crossing;
  };
  while (!todo.empty()) {
    const auto a = todo.back();
    todo.pop_back();
    if (visibly_crossing(a)) return true;
    std::vector<std::pair<int, int>> next;
    next.emplace_back(x.iota[static_cast<std::size_t>(a.second)], x.iota[static_cast<std::size_t>(a.first)]);
    const auto i = static_cast<std::size_t>(a.first), j = static_cast<std::size_t>(a.second);
    if (x.off[i] >= 0 && x.src[i] == x.src[j]) {
      // Same offsets inside every other occurrence of the variable.
      const Sym v = s.W[static_cast<std::size_t>(x.src[i])];
      for (std::size_t w = 0; w < s.W.size(); ++w) {
        if (s.W[w] != v || static_cast<int>(w) == x.src[i]) continue;
        const int base = x.e_of_w[w];
        next.emplace_back(base + x.off[i], base + x.off[j]);
      }
    }
    for (const auto& n : next)
      if (seen.insert(n).second) todo.push_back(n);
  }
  return false;
}

std::vector<std::vector<int>> s_runs(const State& s, const Expansion& x, Mask S) {
  const PositionOrder ord(x.E, s.syms);
  const std::set<std::pair<int, int>> arcs(ord.arcs().begin(), ord.arcs().end());
  std::vector<std::vector<int>> runs;
  int prev = -1;
  for (std::size_t e = 0; e < x.E.size(); ++e) {
    const Sym a = x.E[e];
    if (!s.syms.is_constant(a) || s.syms.rho(a) != S) continue;
    const int cur = static_cast<int>(e);
    if (prev >= 0 && arcs.count({prev, cur})) {
      runs.back().push_back(cur);
    } else {
      runs.push_back({cur});
    }
    prev = cur;
  }
  return runs;
}

PartitionResult choose_partition(const SymbolTable& t, const std::vector<Sym>& letters,
                                 const std::vector<std::pair<Sym, Sym>>& pair_occurrences, long k,
                                 std::uint64_t seed) {
  std::vector<Sym> reps;
  for (Sym a : letters)
    if (t.bar(a) != a && a < t.bar(a)) reps.push_back(a);
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  const std::size_t m = reps.size();

  auto score = [&](const std::vector<bool>& choice) {
    std::set<Sym> plus;
    for (std::size_t i = 0; i < m; ++i) plus.insert(choice[i] ? reps[i] : t.bar(reps[i]));
    long n = 0;
    for (auto [a, b] : pair_occurrences) {
      if (a == b || b == t.bar(a) || t.bar(a) == a || t.bar(b) == b) continue;
      if (plus.count(a) && !plus.count(b)) ++n;
    }
    return std::make_pair(n, plus);
  };

  PartitionResult best;
  best.k = k;
  best.covered = -1;
  auto consider = [&](const std::vector<bool>& c) {
    auto [n, plus] = score(c);
    if (n > best.covered) {
      best.covered = n;
      best.plus = std::move(plus);
    }
    return n;
  };
  if (m <= 12) {
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      std::vector<bool> c(m);
      for (std::size_t i = 0; i < m; ++i) c[i] = (bits >> i) & 1u;
      consider(c);
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int restart = 0; restart < 64; ++restart) {
      std::vector<bool> c(m);
      for (std::size_t i = 0; i < m; ++i) c[i] = rng() & 1u;
      long cur = consider(c);
      // Greedy single flips until no improvement.
      for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t i = 0; i < m; ++i) {
          c[i] = !c[i];
          const long n = consider(c);
          if (n > cur) {
            cur = n;
            improved = true;
          } else {
            c[i] = !c[i];
          }
        }
      }
    }
  }
  if (best.covered < 0) best.covered = 0;
  return best;
}

std::vector<Mask> resource_order(Mask full) {
  std::vector<Mask> out;
  for (unsigned m = 1; m < full; ++m)
    if (subset(static_cast<Mask>(m), full)) out.push_back(static_cast<Mask>(m));
  std::stable_sort(out.begin(), out.end(), [](Mask a, Mask b) {
    return popcount(a) != popcount(b) ? popcount(a) < popcount(b) : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool is_s_letter(const SymbolTable& t, Sym a, Mask S) {
  return t.in_use(a) && t.is_constant(a) && t.rho(a) == S;
}

Mask rho_word(const SymbolTable& t, const Word& w) {
  Mask r = 0;
  for (Sym a : w) r |= t.rho(a);
  return r;
}

Word alpha_word(const Problem& p, const std::map<Sym, Word>& alpha, const Word& w) {
  Word out;
  for (Sym s : w) {
    if (p.in_a(s)) {
      out.push_back(s);
      continue;
    }
    auto it = alpha.find(s);
    if (it == alpha.end()) throw StepFailure("no alpha image for a letter outside A");
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

void set_var(State& st, Sym x, Mask rho, int mu) {
  for (Sym y : {x, st.syms.bar(x)}) st.syms.info_mut(y).rho = rho;
  st.mu.set(x, mu);
  st.mu.set(st.syms.bar(x), st.mu.target().inv(mu));
}

Word power(Sym a, std::size_t n) { return Word(n, a); }

// Position of W mirrored by the involution, or -1 if that position is
// inside a variable.
int mirror_pos(const Expansion& x, int wpos) {
  const int e = x.e_of_w[static_cast<std::size_t>(wpos)];
  if (e < 0) return -1;
  const int ie = x.iota[static_cast<std::size_t>(e)];
  return x.off[static_cast<std::size_t>(ie)] < 0 ? x.src[static_cast<std::size_t>(ie)] : -1;
}

bool convex(const PositionOrder& ord, const std::vector<int>& group) {
  const std::set<int> in(group.begin(), group.end());
  for (int r = 0; r < ord.size(); ++r) {
    if (in.count(r)) continue;
    bool above = false, below = false;
    for (int p : group) {
      if (ord.less(p, r)) above = true;
      if (ord.less(r, p)) below = true;
    }
    if (above && below) return false;
  }
  return true;
}

struct Group {
  std::vector<int> pos;  // positions of W
  Sym letter;
};

// Contracts every group to one position carrying its letter. The order of
// the remaining positions is inherited from W.
Word contract(const Word& w, const SymbolTable& t, const std::vector<Group>& groups) {
  const int n = static_cast<int>(w.size());
  std::vector<int> node(static_cast<std::size_t>(n));
  std::iota(node.begin(), node.end(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int p : groups[g].pos) node[static_cast<std::size_t>(p)] = n + static_cast<int>(g);
  const int total = n + static_cast<int>(groups.size());
  std::vector<std::set<int>> succ(static_cast<std::size_t>(total));
  std::vector<int> indeg(static_cast<std::size_t>(total), 0), key(static_cast<std::size_t>(total), -1);
  std::vector<bool> live(static_cast<std::size_t>(total), false);
  for (int i = 0; i < n; ++i) {
    const int a = node[static_cast<std::size_t>(i)];
    live[static_cast<std::size_t>(a)] = true;
    if (key[static_cast<std::size_t>(a)] < 0) key[static_cast<std::size_t>(a)] = i;
    for (int j = i + 1; j < n; ++j) {
      const int b = node[static_cast<std::size_t>(j)];
      if (a == b || !t.dependent(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)])) continue;
      if (succ[static_cast<std::size_t>(a)].insert(b).second) ++indeg[static_cast<std::size_t>(b)];
    }
  }
  using Item = std::pair<int, int>;  // (key, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (int v = 0; v < total; ++v)
    if (live[static_cast<std::size_t>(v)] && indeg[static_cast<std::size_t>(v)] == 0)
      ready.emplace(key[static_cast<std::size_t>(v)], v);
  Word out;
  while (!ready.empty()) {
    const int v = ready.top().second;
    ready.pop();
    out.push_back(v < n ? w[static_cast<std::size_t>(v)] : groups[static_cast<std::size_t>(v - n)].letter);
    for (int u : succ[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(u)] == 0) ready.emplace(key[static_cast<std::size_t>(u)], u);
  }
  std::size_t expected = 0;
  for (int v = 0; v < total; ++v) expected += live[static_cast<std::size_t>(v)] ? 1 : 0;
  if (out.size() != expected) throw StepFailure("contracted group is not convex");
  return out;
}

// Linearization of a variable-free W with W = involution(W) that reads the
// same after reversing and barring.
Word palindromic_linearization(const State& s) {
  const Sym hash = s.problem().alphabet.marker();
  std::vector<Word> segs;
  Word cur;
  for (std::size_t i = 1; i < s.W.size(); ++i) {
    if (s.W[i] == hash) {
      segs.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(s.W[i]);
    }
  }
  const std::size_t m = segs.size();
  for (std::size_t i = 0; i < m / 2; ++i) segs[m - 1 - i] = involute_word(segs[i], s.syms);
  if (m % 2 == 1) return s.W;
  Word w{hash};
  for (const Word& sg : segs) {
    w.insert(w.end(), sg.begin(), sg.end());
    w.push_back(hash);
  }
  if (normal_form(w, s.syms) != s.W) return s.W;
  return w;
}

// Allocates letters for compressed words so that a word and its involution
// get partner letters.
class LetterPool {
 public:
  LetterPool(State& work, const SymbolTable& old, Mask fixed_rho = 0)
      : work_(work), old_(old), fixed_rho_(fixed_rho) {}

  Sym get(const Word& w) {
    auto it = by_word_.find(w);
    if (it != by_word_.end()) return it->second;
    // A word equal to its involution (a quasi-block half) gets a pair of
    // letters with the same image.
    const Word wb = involute_word(w, old_);
    const Mask rho = fixed_rho_ ? fixed_rho_ : rho_word(old_, w);
    const Sym c = work_.add_constant_pair(rho, work_.mu.eval(w));
    if (wb != w) by_word_[wb] = c + 1;
    by_word_[w] = c;
    endo_[c] = w;
    endo_[c + 1] = wb;
    return c;
  }
  const std::map<Sym, Word>& endo() const { return endo_; }

 private:
  State& work_;
  const SymbolTable& old_;
  Mask fixed_rho_;
  std::map<Word, Sym> by_word_;
  std::map<Sym, Word> endo_;
};

// Set TRACESOLVE_TRACE=1 to log every step of the guided search to stderr.
bool tracing() {
  static const bool on = std::getenv("TRACESOLVE_TRACE") != nullptr;
  return on;
}

void trace(const std::string& msg) {
  if (tracing()) std::cerr << msg << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

GuidedContext::GuidedContext(State s, Solution so, EngineStats* stats)
    : state(std::move(s)), sol(std::move(so)), stats_(stats) {}

void GuidedContext::emit(const TransitionLabel& label, State to, Solution to_sol, const std::string& phase) {
  const Problem& p = state.problem();
  if (static_cast<int>(steps.size()) >= p.budgets.max_steps) throw Error("guided search exceeded the step cap");
  const Report rep = validate_transition(state, to, label);
  if (!rep.empty()) throw StepFailure(phase + ": " + format_report(rep));

  // alpha on the constants of the target.
  std::map<Sym, Word> alpha;
  for (Sym c : to.constants()) {
    if (p.in_a(c)) continue;
    auto it = label.endo.find(c);
    if (label.kind != LabelKind::Substitution && it != label.endo.end()) {
      alpha[c] = alpha_word(p, sol.alpha, it->second);
    } else {
      auto jt = sol.alpha.find(c);
      if (jt == sol.alpha.end()) throw StepFailure(phase + ": constant without alpha image");
      alpha[c] = jt->second;
    }
  }
  to_sol.alpha = alpha;
  for (auto it = to_sol.sigma.begin(); it != to_sol.sigma.end();) {
    if (!to.syms.in_use(it->first) || !to.syms.is_variable(it->first)) {
      it = to_sol.sigma.erase(it);
    } else {
      ++it;
    }
  }
  const SolutionCheck chk = check_solution(to, to_sol, true);
  if (!chk.ok) throw StepFailure(phase + ": solution check failed (" + chk.clause + ")");

  // The projected solution word is preserved.
  const auto& base = p.alphabet;
  const Word before = project_pi0(alpha_word(p, sol.alpha, state.expand(state.W, sol)), base);
  const Word after = project_pi0(alpha_word(p, to_sol.alpha, to.expand(to.W, to_sol)), base);
  if (!trace_equal(before, after, base.table())) throw StepFailure(phase + ": projected solution changed");

  if (label.kind != LabelKind::FinalCompression) {
    const long sw0 = solution_weight(state, sol), sw1 = solution_weight(to, to_sol);
    const bool down = sw1 < sw0 || (sw1 == sw0 && to.weight() < state.weight());
    if (!down) throw StepFailure(phase + ": solution weight did not decrease");
  }

  EngineStats& st = stats();
  ++st.transitions;
  st.max_length = std::max(st.max_length, static_cast<long>(to.W.size()));
  long occ = 0;
  for (Sym s : to.W) occ += to.syms.is_variable(s) ? 1 : 0;
  st.max_var_occurrences = std::max(st.max_var_occurrences, occ);
  if (occ > p.c_budget()) st.budget_failures.push_back(phase + ": variable occurrences exceed the budget");
  if (static_cast<long>(to.W.size()) > p.c_budget()) st.budget_failures.push_back(phase + ": equation length exceeds the budget");

  if (tracing()) trace(phase + ": " + label_summary(state, to, label) + "\n    " + to.show(to.W) + "  w=" + to.weight().str());
  steps.push_back({label, to, to_sol, phase});
  state = std::move(to);
  sol = std::move(to_sol);
}

long GuidedContext::longest_s_run(Mask S) const {
  const Expansion x = expand_state(state, sol);
  long best = 0;
  for (const auto& r : s_runs(state, x, S)) best = std::max(best, static_cast<long>(r.size()));
  return best;
}

bool GuidedContext::has_s_variables(Mask S) const {
  for (Sym x : state.variables()) {
    if (state.syms.rho(x) == S) return true;
    for (Sym a : sigma_image(sol, x))
      if (is_s_letter(state.syms, a, S)) return true;
  }
  return false;
}

bool GuidedContext::has_s_letters(Mask S) const {
  for (Sym a : state.W)
    if (is_s_letter(state.syms, a, S)) return true;
  for (Sym x : state.variables())
    for (Sym a : sigma_image(sol, x))
      if (is_s_letter(state.syms, a, S)) return true;
  return false;
}

void GuidedContext::substitute_away(const std::vector<Sym>& vars, const std::string& phase) {
  std::map<Sym, Word> tau;
  for (Sym x : vars) {
    if (!state.syms.in_use(x) || !state.syms.is_variable(x)) continue;
    const Sym prim = std::min(x, state.syms.bar(x));
    tau[prim] = sigma_image(sol, prim);
  }
  if (tau.empty()) return;
  const State to = make_substitution_target(state, state, close_tau(state, tau));
  emit({LabelKind::Substitution, {}, close_tau(state, tau), "substitute"}, to, sol, phase + ":substitute");
}

void GuidedContext::initial_transitions() {
  State work = state;
  std::map<Sym, Word> tau;
  Solution next = sol;
  for (Sym x : state.variables()) {
    if (state.syms.bar(x) < x) continue;
    const Word sx = sigma_image(sol, x);
    if (sx.empty()) {
      tau[x] = {};
      continue;
    }
    const std::vector<int> mins = min_positions(sx, state.syms);
    const std::set<int> mset(mins.begin(), mins.end());
    Word u, rest;
    for (std::size_t i = 0; i < sx.size(); ++i) (mset.count(static_cast<int>(i)) ? u : rest).push_back(sx[i]);
    if (rest.empty()) {
      tau[x] = u;
      continue;
    }
    set_var(work, x, rho_word(state.syms, rest), state.mu.eval(rest));
    u.push_back(x);
    tau[x] = u;
    next.sigma[x] = rest;
    next.sigma[state.syms.bar(x)] = involute_word(rest, state.syms);
  }
  if (tau.empty()) return;
  const auto full = close_tau(work, tau);
  const State to = make_substitution_target(state, work, full);
  emit({LabelKind::Substitution, {}, full, "initial"}, to, next, "initial");
}

namespace {

// Every group must be mirrored by a group carrying the partner letter.
bool mirrors_consistent(const State& s, const Expansion& x, const std::vector<Group>& groups) {
  std::map<std::vector<int>, Sym> by_pos;
  for (const auto& g : groups) {
    std::vector<int> p = g.pos;
    std::sort(p.begin(), p.end());
    by_pos[p] = g.letter;
  }
  for (const auto& g : groups) {
    std::vector<int> m;
    for (int p : g.pos) {
      const int q = mirror_pos(x, p);
      if (q < 0) return false;
      m.push_back(q);
    }
    std::sort(m.begin(), m.end());
    auto it = by_pos.find(m);
    if (it == by_pos.end() || it->second != s.syms.bar(g.letter)) return false;
  }
  return true;
}

bool all_visible(const Expansion& x, const std::vector<int>& es) {
  for (int e : es)
    if (x.off[static_cast<std::size_t>(e)] >= 0) return false;
  return true;
}


void emit_groups(GuidedContext& ctx, State work, const std::map<Sym, Word>& endo,
                 const std::vector<Group>& groups, const std::string& phase) {
  work.W = contract(ctx.state.W, ctx.state.syms, groups);
  work.normalize();
  TransitionLabel l;
  l.kind = LabelKind::Compression;
  l.endo = endo;
  l.note = phase;
  ctx.emit(l, std::move(work), ctx.sol, phase);
}

}  // namespace

void GuidedContext::fallback_all(const std::string& phase, const std::string& why) {
  annotations.push_back(phase + ": substituting all variables (" + why + ")");
  ++stats().fallbacks;
  substitute_away(state.variables(), phase);
}

// Pairs each marker letter occurrence with a convex occurrence of c and
// contracts the pair, either into the marker itself (redefining it) or into
// a fresh untyped letter.
void GuidedContext::absorb(Sym cl, Sym c, bool into_fresh, const std::string& phase) {
  const Expansion ex = expand_state(state, sol);
  const PositionOrder ord(state.W, state.syms);
  std::set<int> used;
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < static_cast<int>(state.W.size()); ++p) {
    if (state.W[static_cast<std::size_t>(p)] != cl || used.count(p)) continue;
    int best = -1;
    for (int q = 0; q < static_cast<int>(state.W.size()); ++q) {
      if (state.W[static_cast<std::size_t>(q)] != c || used.count(q) || !convex(ord, {p, q})) continue;
      if (best < 0 || std::abs(q - p) < std::abs(best - p)) best = q;
    }
    if (best < 0) throw StepFailure("marker without an absorbable letter");
    const int mp = mirror_pos(ex, p), mq = mirror_pos(ex, best);
    if (mp < 0 || mq < 0 || used.count(mp) || used.count(mq)) throw StepFailure("absorbed pair has no visible mirror");
    used.insert({p, best, mp, mq});
    pairs.emplace_back(p, best);
    pairs.emplace_back(mp, mq);
  }
  if (pairs.empty()) throw StepFailure("no marker to absorb into");
  State work = state;
  Sym dst = cl;
  const Word img{cl, c};
  const int m = state.mu.eval(img);
  if (into_fresh) {
    dst = work.add_constant_pair(state.syms.rho(c), m);
    work.syms.clear_theta(cl);
    work.syms.clear_theta(cl + 1);
  } else {
    work.mu.set(cl, m);
    work.mu.set(cl + 1, work.mu.target().inv(m));
  }
  std::vector<Group> groups;
  for (auto [p, q] : pairs)
    groups.push_back({{p, q}, state.W[static_cast<std::size_t>(p)] == cl ? dst : dst + 1});
  std::map<Sym, Word> endo{{dst, img}, {dst + 1, involute_word(img, state.syms)}};
  emit_groups(*this, std::move(work), endo, groups, phase);
}

bool GuidedContext::typed_block_loop(Sym x, const std::string& phase) {
  const State st0 = state;
  const Solution sol0 = sol;
  const std::size_t n0 = steps.size();
  ++stats().typed_loops;
  try {
    const Word sx = sigma_image(sol, x);
    const Sym a = sx.at(0), ab = state.syms.bar(a), xb = state.syms.bar(x);
    const Mask S = state.syms.rho(a);
    const std::size_t j = sx.size();

    // Mark one visible position in every a-block next to an occurrence of x.
    const Expansion ex = expand_state(state, sol);
    const PositionOrder ord(ex.E, state.syms);
    const std::set<std::pair<int, int>> arcs(ord.arcs().begin(), ord.arcs().end());
    auto blocks_of = [&](Sym letter) {
      std::vector<std::vector<int>> out;
      int prev = -1;
      for (int e = 0; e < static_cast<int>(ex.E.size()); ++e) {
        if (ex.E[static_cast<std::size_t>(e)] != letter) continue;
        if (prev >= 0 && arcs.count({prev, e})) {
          out.back().push_back(e);
        } else {
          out.push_back({e});
        }
        prev = e;
      }
      return out;
    };
    auto touches = [&](const std::vector<int>& b, Sym v) {
      bool var = false, vis = false;
      for (int e : b) {
        if (ex.off[static_cast<std::size_t>(e)] < 0) {
          vis = true;
        } else if (state.W[static_cast<std::size_t>(ex.src[static_cast<std::size_t>(e)])] == v) {
          var = true;
        }
      }
      return var && vis;
    };
    std::set<int> lam, lam_bar;
    for (const auto& b : blocks_of(a)) {
      if (!touches(b, x)) continue;
      bool done = false;
      for (int e : b) {
        if (ex.off[static_cast<std::size_t>(e)] >= 0) continue;
        const int p = ex.src[static_cast<std::size_t>(e)];
        const int m = mirror_pos(ex, p);
        if (m < 0) continue;
        lam.insert(p);
        lam_bar.insert(m);
        done = true;
        break;
      }
      if (!done) throw StepFailure("block marker has no visible mirror");
    }
    for (const auto& b : blocks_of(ab)) {
      if (!touches(b, xb)) continue;
      bool hit = false;
      for (int e : b)
        if (ex.off[static_cast<std::size_t>(e)] < 0 && lam_bar.count(ex.src[static_cast<std::size_t>(e)])) hit = true;
      if (!hit) throw StepFailure("mirrored block without a marker");
    }
    if (lam.empty()) throw StepFailure("no visible block next to the variable");

    State work = state;
    const Sym c = work.add_constant_pair(S, state.mu.image(a));
    const Sym cl = work.add_constant_pair(S, state.mu.image(a));
    work.syms.set_theta(cl, c);
    work.syms.set_theta(cl + 1, c + 1);
    for (std::size_t i = 0; i < work.W.size(); ++i) {
      if (work.W[i] == a) work.W[i] = lam.count(static_cast<int>(i)) ? cl : c;
      else if (work.W[i] == ab) work.W[i] = lam_bar.count(static_cast<int>(i)) ? cl + 1 : c + 1;
    }
    work.normalize();
    TransitionLabel l1;
    l1.kind = LabelKind::Compression;
    l1.note = "typed-mark";
    l1.endo = {{c, {a}}, {c + 1, {ab}}, {cl, {a}}, {cl + 1, {ab}}};
    Solution s1 = sol;
    s1.sigma[x] = power(c, j);
    s1.sigma[xb] = power(c + 1, j);
    emit(l1, std::move(work), s1, phase + ":typed-mark");

    // Split off the first letter into a typed variable.
    std::size_t len = j - 1;
    Sym y = kNone;
    {
      State wk = state;
      y = wk.add_variable_pair(S, state.mu.eval(power(c, len)));
      wk.syms.set_theta(y, c);
      wk.syms.set_theta(y + 1, c + 1);
      const auto full = close_tau(wk, {{x, {c, y}}});
      State to = make_substitution_target(state, wk, full);
      Solution s2 = sol;
      s2.sigma[y] = power(c, len);
      s2.sigma[y + 1] = power(c + 1, len);
      emit({LabelKind::Substitution, {}, full, "typed-split"}, std::move(to), s2, phase + ":typed-split");
    }
    while (len >= 2) {
      State wk = state;
      set_var(wk, y, S, state.mu.eval(power(c, len - 1)));
      const auto full = close_tau(wk, {{y, {c, y}}});
      State to = make_substitution_target(state, wk, full);
      Solution s3 = sol;
      s3.sigma[y] = power(c, len - 1);
      s3.sigma[y + 1] = power(c + 1, len - 1);
      emit({LabelKind::Substitution, {}, full, "typed-pop"}, std::move(to), s3, phase + ":typed-pop");
      --len;
      absorb(cl, c, false, phase + ":typed-absorb");
    }
    {
      const auto full = close_tau(state, {{y, power(c, len)}});
      State to = make_substitution_target(state, state, full);
      emit({LabelKind::Substitution, {}, full, "typed-end"}, std::move(to), sol, phase + ":typed-end");
    }
    absorb(cl, c, true, phase + ":typed-close");
    remove_useless(phase + ":typed-clean");
    return true;
  } catch (const StepFailure& e) {
    state = st0;
    sol = sol0;
    steps.resize(n0);
    annotations.push_back(phase + ": typed loop rolled back (" + e.what() + ")");
    ++stats().typed_rollbacks;
    return false;
  }
}

bool GuidedContext::block_compression(Mask S) {
  const Expansion ex = expand_state(state, sol);
  State work = state;
  LetterPool pool(work, state.syms);
  std::vector<Group> groups;
  std::set<int> used;
  for (const auto& run : s_runs(state, ex, S)) {
    std::size_t i = 0;
    while (i < run.size()) {
      std::size_t k = i;
      const Sym a = ex.E[static_cast<std::size_t>(run[i])];
      while (k < run.size() && ex.E[static_cast<std::size_t>(run[k])] == a) ++k;
      const std::vector<int> seg(run.begin() + static_cast<long>(i), run.begin() + static_cast<long>(k));
      i = k;
      if (seg.size() < 2 || state.syms.bar(a) == a || !all_visible(ex, seg)) continue;
      std::vector<int> g, m;
      bool ok = true;
      for (int e : seg) {
        const int p = ex.src[static_cast<std::size_t>(e)];
        const int q = mirror_pos(ex, p);
        if (q < 0 || used.count(p) || used.count(q)) ok = false;
        g.push_back(p);
        m.push_back(q);
      }
      if (!ok) continue;
      const Sym c = pool.get(power(a, seg.size()));
      groups.push_back({g, c});
      groups.push_back({m, work.syms.bar(c)});
      used.insert(g.begin(), g.end());
      used.insert(m.begin(), m.end());
    }
  }
  if (groups.empty()) return false;
  if (!mirrors_consistent(work, ex, groups)) return false;
  emit_groups(*this, std::move(work), pool.endo(), groups, "block" + mask_string(S));
  return true;
}

bool GuidedContext::quasi_block_compression(Mask S) {
  const Expansion ex = expand_state(state, sol);
  State work = state;
  LetterPool pool(work, state.syms);
  std::vector<Group> groups;
  std::set<int> used;
  for (const auto& run : s_runs(state, ex, S)) {
    std::size_t i = 0;
    while (i < run.size()) {
      const Sym a = ex.E[static_cast<std::size_t>(run[i])];
      std::size_t k = i + 1;
      while (k < run.size() && a != state.syms.bar(a) &&
             ex.E[static_cast<std::size_t>(run[k])] == state.syms.bar(ex.E[static_cast<std::size_t>(run[k - 1])]))
        ++k;
      const std::size_t L = k - i;
      const std::size_t start = i;
      i = k;
      if (L < 3) continue;
      // An odd alternating factor becomes one letter; an even one becomes
      // c cbar with both halves mapped to (a abar)^(L/4) or its variants.
      const std::size_t h = L % 2 == 1 ? L : L / 2;
      std::vector<int> g1, g2;
      Word w1;
      bool ok = true;
      for (std::size_t t = 0; t < L; ++t) {
        const int e = run[start + t];
        if (ex.off[static_cast<std::size_t>(e)] >= 0) ok = false;
        const int p = ex.src[static_cast<std::size_t>(e)];
        if (used.count(p)) ok = false;
        if (t < h) {
          g1.push_back(p);
          w1.push_back(ex.E[static_cast<std::size_t>(e)]);
        } else {
          g2.push_back(p);
        }
      }
      if (!ok) continue;
      const Sym c = pool.get(w1);
      groups.push_back({g1, c});
      if (!g2.empty()) groups.push_back({g2, work.syms.bar(c)});
      used.insert(g1.begin(), g1.end());
      used.insert(g2.begin(), g2.end());
    }
  }
  if (groups.empty() || !mirrors_consistent(work, ex, groups)) return false;
  emit_groups(*this, std::move(work), pool.endo(), groups, "quasi" + mask_string(S));
  return true;
}

bool GuidedContext::pair_compression(Mask S) {
  const Expansion ex = expand_state(state, sol);
  std::vector<std::vector<int>> long_runs;
  for (auto& r : s_runs(state, ex, S))
    if (r.size() >= 3) long_runs.push_back(r);
  if (long_runs.empty()) return false;
  std::vector<Sym> letters;
  std::vector<std::pair<Sym, Sym>> occ;
  long k = 0;
  for (const auto& r : long_runs) {
    k += static_cast<long>(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) {
      const Sym a = ex.E[static_cast<std::size_t>(r[t])];
      letters.push_back(a);
      letters.push_back(state.syms.bar(a));
      if (t + 1 < r.size()) occ.emplace_back(a, ex.E[static_cast<std::size_t>(r[t + 1])]);
    }
  }
  const PartitionResult pr = choose_partition(state.syms, letters, occ, k);
  EngineStats& st = stats();
  ++st.partition_calls;
  if (pr.covered < (k + 15) / 16) ++st.partition_shortfalls;

  State work = state;
  LetterPool pool(work, state.syms);
  std::vector<Group> groups;
  for (const auto& r : long_runs) {
    if (!all_visible(ex, r)) continue;
    std::size_t t = 0;
    while (t + 1 < r.size()) {
      const Sym a = ex.E[static_cast<std::size_t>(r[t])], b = ex.E[static_cast<std::size_t>(r[t + 1])];
      if (pr.plus.count(a) && !pr.plus.count(b) && a != b && b != state.syms.bar(a) && state.syms.bar(b) != b) {
        groups.push_back({{ex.src[static_cast<std::size_t>(r[t])], ex.src[static_cast<std::size_t>(r[t + 1])]},
                          pool.get({a, b})});
        t += 2;
      } else {
        ++t;
      }
    }
  }
  if (groups.empty() || !mirrors_consistent(work, ex, groups)) return false;
  emit_groups(*this, std::move(work), pool.endo(), groups, "pair" + mask_string(S));
  return true;
}

bool GuidedContext::merge_neighbours(Mask S) {
  const Expansion ex = expand_state(state, sol);
  const PositionOrder ord(ex.E, state.syms);
  std::vector<std::vector<std::pair<int, bool>>> nb(ex.E.size());  // (other, other is after)
  for (auto [i, j] : ord.arcs()) {
    nb[static_cast<std::size_t>(i)].emplace_back(j, true);
    nb[static_cast<std::size_t>(j)].emplace_back(i, false);
  }
  const Sym hash = state.problem().alphabet.marker();
  State work = state;
  LetterPool pool(work, state.syms);
  std::vector<Group> groups;
  std::set<int> used;
  for (int p = 0; p < static_cast<int>(state.W.size()); ++p) {
    const Sym a = state.W[static_cast<std::size_t>(p)];
    if (!is_s_letter(state.syms, a, S) || used.count(p)) continue;
    const int e = ex.e_of_w[static_cast<std::size_t>(p)];
    for (auto [f, after] : nb[static_cast<std::size_t>(e)]) {
      if (ex.off[static_cast<std::size_t>(f)] >= 0) continue;
      const int q = ex.src[static_cast<std::size_t>(f)];
      const Sym b = state.W[static_cast<std::size_t>(q)];
      if (b == hash || state.syms.rho(b) == S || used.count(q)) continue;
      const int mp = mirror_pos(ex, p), mq = mirror_pos(ex, q);
      if (mp < 0 || mq < 0 || used.count(mp) || used.count(mq) || mp == q || mq == p || mp == p) continue;
      const Word w = after ? Word{a, b} : Word{b, a};
      const Sym c = pool.get(w);
      groups.push_back({{p, q}, c});
      groups.push_back({{mp, mq}, work.syms.bar(c)});
      used.insert({p, q, mp, mq});
      break;
    }
  }
  if (groups.empty() || !mirrors_consistent(work, ex, groups)) return false;
  emit_groups(*this, std::move(work), pool.endo(), groups, "merge" + mask_string(S));
  return true;
}

bool GuidedContext::lift_letters(Mask S) {
  const Mask full = state.problem().alphabet.full();
  State work = state;
  std::map<Sym, Sym> ren;
  TransitionLabel l;
  l.kind = LabelKind::Compression;
  l.note = "lift" + mask_string(S);
  for (Sym a : state.W) {
    if (!is_s_letter(state.syms, a, S) || ren.count(a)) continue;
    const Sym ab = state.syms.bar(a);
    if (ab == a) throw StepFailure("cannot lift a self-involuting letter");
    const Sym prim = std::min(a, ab);
    const Sym c = work.add_constant_pair(full, state.mu.image(prim));
    ren[prim] = c;
    ren[state.syms.bar(prim)] = c + 1;
    l.endo[c] = {prim};
    l.endo[c + 1] = {state.syms.bar(prim)};
  }
  if (ren.empty()) return false;
  Word w = state.has_variables() ? state.W : palindromic_linearization(state);
  for (Sym& s : w) {
    auto it = ren.find(s);
    if (it != ren.end()) s = it->second;
  }
  work.W = w;
  work.normalize();
  emit(l, std::move(work), sol, l.note);
  return true;
}

void GuidedContext::fixed_resources(Mask S) {
  const std::string phase = "fixed" + mask_string(S);
  std::vector<Sym> away, loop;
  std::set<Sym> loop_letters;
  for (Sym x : state.variables()) {
    if (state.syms.bar(x) < x) continue;
    const Word sx = sigma_image(sol, x);
    bool hit = false;
    for (Sym a : sx) hit = hit || is_s_letter(state.syms, a, S);
    if (!hit) continue;
    const Sym a = sx[0];
    bool power_of_one = sx.size() >= 2 && state.syms.bar(a) != a && state.syms.theta(x) == kNone &&
                        state.syms.theta(a) == kNone;
    for (Sym b : sx) power_of_one = power_of_one && b == a;
    const Sym key = std::min(a, state.syms.bar(a));
    if (power_of_one && !loop_letters.count(key)) {
      loop.push_back(x);
      loop_letters.insert(key);
    } else {
      away.push_back(x);
    }
  }
  substitute_away(away, phase);
  for (Sym x : loop) {
    if (!state.syms.in_use(x)) continue;
    if (!typed_block_loop(x, phase)) substitute_away({x}, phase);
  }
  const long cap = 4L * state.problem().c_budget();
  for (long guard = 0; longest_s_run(S) > 2; ++guard) {
    if (guard > cap) throw Error(phase + ": compression rounds do not terminate");
    try {
      if (block_compression(S) || quasi_block_compression(S) || pair_compression(S)) continue;
      throw StepFailure("no compression applies");
    } catch (const StepFailure& e) {
      trace(phase + ": step failed: " + e.what() + "\n    " + state.show(state.W));
      if (!state.has_variables()) throw Error(phase + ": " + e.what());
      fallback_all(phase, e.what());
    }
  }
  EngineStats& st = stats();
  if (has_s_variables(S)) st.postcondition_failures.push_back(phase + ": S-variables remain");
  if (longest_s_run(S) > 2) st.postcondition_failures.push_back(phase + ": an S-run longer than 2 remains");
}

void GuidedContext::remove_resource_set(Mask S) {
  const std::string phase = "remove" + mask_string(S);
  const long cap = 4L * state.problem().c_budget();
  for (long guard = 0; has_s_letters(S); ++guard) {
    if (guard > cap) throw Error(phase + ": letter removal does not terminate");
    try {
      std::vector<Sym> vs;
      for (Sym x : state.variables())
        for (Sym a : sigma_image(sol, x))
          if (is_s_letter(state.syms, a, S)) vs.push_back(x);
      substitute_away(vs, phase);
      if (!merge_neighbours(S) && !lift_letters(S)) throw StepFailure("no removal applies");
    } catch (const StepFailure& e) {
      trace(phase + ": step failed: " + e.what() + "\n    " + state.show(state.W));
      if (!state.has_variables()) throw Error(phase + ": " + e.what());
      fallback_all(phase, e.what());
    }
  }
  remove_useless(phase);
  EngineStats& st = stats();
  if (has_s_letters(S)) st.postcondition_failures.push_back(phase + ": S-letters remain");
  if (has_s_variables(S)) st.postcondition_failures.push_back(phase + ": S-variables remain");
}

void GuidedContext::remove_useless(const std::string& phase) {
  const Problem& p = state.problem();
  std::set<Sym> used(state.W.begin(), state.W.end());
  for (Sym x : state.variables())
    for (Sym a : sigma_image(sol, x)) used.insert(a);
  for (Sym s = 0; s < static_cast<Sym>(state.syms.size()); ++s)
    if (state.syms.in_use(s) && state.syms.theta(s) != kNone) {
      used.insert(state.syms.theta(s));
      used.insert(s);
    }
  State work = state;
  bool any = false;
  for (Sym c : state.constants()) {
    const Sym cb = state.syms.bar(c);
    if (p.in_a(c) || p.is_distinguished(c) || cb < c) continue;
    if (used.count(c) || used.count(cb)) continue;
    work.remove_pair(c);
    any = true;
  }
  if (!any) return;
  TransitionLabel l;
  l.kind = LabelKind::Compression;
  l.note = "clean";
  emit(l, std::move(work), sol, phase + ":clean");
}

void GuidedContext::finalize() {
  if (state.has_variables()) fallback_all("final", "variables left before the final step");
  remove_useless("final");
  // Without distinguished letters the final compression would be the identity.
  if (state.problem().k == 0 && is_final(state)) return;
  FinalResult fr = final_transition(state);
  emit(fr.label, std::move(fr.state), Solution{}, "final");
  if (!is_final(state)) throw Error("guided path does not end in a final state");
}

ForwardPath forward_path(const State& init, const Solution& sol, EngineStats* stats) {
  GuidedContext ctx(init, sol, stats);
  ctx.initial_transitions();
  for (Mask S : resource_order(init.problem().alphabet.full())) {
    if (!ctx.has_s_letters(S) && !ctx.has_s_variables(S)) continue;
    ctx.fixed_resources(S);
    ctx.remove_resource_set(S);
  }
  ctx.finalize();
  ForwardPath out;
  out.start = init;
  out.start_sol = sol;
  out.steps = std::move(ctx.steps);
  out.annotations = std::move(ctx.annotations);
  return out;
}

}  // namespace ts
