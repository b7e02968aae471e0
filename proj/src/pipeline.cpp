#include "tracesolve/pipeline.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "tracesolve/group.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/trace.hpp"

#ifdef TRACESOLVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace ts {

Task make_task(const EngineSpec& spec, const Budgets& budgets) {
  auto p = std::make_shared<Problem>();
  p->alphabet = spec.alphabet;
  const Sym a_base = spec.alphabet.size();
  bool full_letter = false;
  for (Sym a : spec.alphabet.base_letters())
    if (spec.alphabet.table().rho(a) == spec.alphabet.full()) full_letter = true;
  if (full_letter) p->alphabet.add_resource("#extra");
  p->alphabet.close_lifted();

  auto m = std::make_shared<FiniteMonoid>(adjoin_zero(spec.monoid));
  p->monoid = m;
  p->marker_zero = m->size() - 1;
  const Sym a = p->alphabet.size();
  p->letter_mu.assign(static_cast<std::size_t>(a), p->marker_zero);
  for (Sym x = 1; x < a; ++x) p->letter_mu[static_cast<std::size_t>(x)] = spec.letter_mu.at(static_cast<std::size_t>(p->alphabet.base(x)));

  const int kall = static_cast<int>(spec.var_names.size());
  if (spec.var_rho.size() != spec.var_names.size() || spec.var_mu.size() != spec.var_names.size() || spec.k > kall)
    throw Error("engine spec: variable data size mismatch");
  p->k = spec.k;
  for (int i = 0; i < kall; ++i) {
    if (i < spec.k) {
      p->vars.push_back(a + 2 * i);
      p->var_names.push_back(spec.var_names[static_cast<std::size_t>(i)]);
    } else {
      p->aux_vars.push_back(a + 2 * i);
      p->aux_names.push_back(spec.var_names[static_cast<std::size_t>(i)]);
    }
  }
  for (int i = 0; i < spec.k; ++i) p->distinguished.push_back(a + 2 * kall + 2 * i);
  p->fresh_base = a + 2 * kall + 2 * spec.k;

  auto map_word = [&](const Word& w) {
    Word out;
    for (Sym s : w) out.push_back(s >= a_base ? s - a_base + a : s);
    return out;
  };
  Word u = map_word(spec.u), v = map_word(spec.v);
  int inner_markers = 0;
  for (Sym s : u) inner_markers += s == 0;
  for (Sym s : v) inner_markers += s == 0;
  p->marker_total = 2 * spec.k + 5 + 2 * inner_markers;
  p->init_length = 4 * spec.k + 2 * static_cast<int>(u.size() + v.size()) + 5;
  p->budgets = budgets;
  std::shared_ptr<const Problem> cp = p;
  return {cp, build_initial(cp, u, v, spec.var_rho, spec.var_mu)};
}

Solution task_solution(const Task& task, const std::vector<Word>& values) {
  const Problem& p = *task.problem;
  std::map<Sym, Word> on_x;
  std::size_t i = 0;
  for (Sym x : p.vars) on_x[x] = values.at(i++);
  for (Sym x : p.aux_vars) on_x[x] = values.at(i++);
  return complete_bars(task.initial, on_x);
}

Encoding encode_monoid(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets) {
  EngineSpec spec;
  spec.alphabet = inst.alphabet;
  spec.monoid = FiniteMonoid(inst.n_elements, inst.mult, inst.inv, inst.unit,
                             inst.zero >= 0 ? std::optional<int>(inst.zero) : std::nullopt);
  spec.monoid.set_names(inst.element_names);
  spec.letter_mu = inst.letter_mu;
  spec.letter_mu[0] = inst.unit;
  spec.k = inst.k();
  for (const auto& v : inst.variables) {
    spec.var_names.push_back(v.name);
    spec.var_rho.push_back(v.rho);
    spec.var_mu.push_back(v.mu);
  }
  spec.u = inst.lhs;
  spec.v = inst.rhs;
  Encoding enc;
  enc.tasks.push_back(make_task(spec, budgets));
  for (const Tuple& t : sols) enc.seeds.push_back({0, task_solution(enc.tasks[0], t)});
  enc.decode = [table = inst.alphabet.table()](const Tuple& t) {
    Tuple out;
    for (const Word& w : t) out.push_back(normal_form(w, table));
    return out;
  };
  enc.description = "monoid";
  return enc;
}

Encoding encode(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets) {
  if (inst.mode == Mode::Group) return encode_group(inst, sols, budgets);
  for (Sym a : inst.alphabet.base_letters())
    if (inst.alphabet.table().bar(a) == a) return encode_self_involuting(inst, sols, budgets);
  return encode_monoid(inst, sols, budgets);
}

BuildResult build_from(const Instance& inst, const std::set<Tuple>& sols, const SolveOptions& opt) {
  BuildResult b;
  b.oracle = sols;
  b.enc = encode(inst, sols, opt.budgets);
  const std::size_t n = b.enc.seeds.size();
  std::vector<std::optional<ForwardPath>> paths(n);
  std::vector<std::string> errors(n);
  std::vector<EngineStats> stats(n);
#ifdef TRACESOLVE_HAVE_OPENMP
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    const Seed& s = b.enc.seeds[i];
    try {
      paths[i] = forward_path(b.enc.tasks[static_cast<std::size_t>(s.task)].initial, s.sol, &stats[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const Task& t : b.enc.tasks) b.full.problems.push_back(t.problem);
  for (std::size_t i = 0; i < n; ++i) {
    b.stats.merge(stats[i]);
    if (paths[i]) {
      b.full.insert_path(*paths[i]);
    } else {
      std::ostringstream os;
      os << "seed " << i << ": " << errors[i];
      b.errors.push_back(os.str());
    }
  }
  b.nfa = b.full.trimmed();
  return b;
}

BuildResult build_nfa(const Instance& inst, const SolveOptions& opt) {
  OracleOptions oo;
  oo.jobs = opt.jobs;
  return build_from(inst, enumerate_bruteforce(inst, opt.bound, oo), opt);
}

std::set<Tuple> nfa_solutions(const BuildResult& b, int L) {
  const long engine_bound = static_cast<long>(L) * b.enc.length_factor;
  std::set<Tuple> out;
  for (const Tuple& t : enumerate_bounded(b.nfa, static_cast<int>(std::min<long>(engine_bound, INT_MAX)))) {
    Tuple d = b.enc.decode(t);
    bool ok = true;
    for (const Word& w : d) ok = ok && static_cast<long>(w.size()) <= L;
    if (ok) out.insert(std::move(d));
  }
  return out;
}

std::vector<std::string> replay_edges(const EndoNFA& nfa) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nfa.edges.size(); ++i) {
    const NfaEdge& e = nfa.edges[i];
    const Solution& w = nfa.witness[static_cast<std::size_t>(e.dst)];
    const State& src = nfa.states[static_cast<std::size_t>(e.src)];
    const State& dst = nfa.states[static_cast<std::size_t>(e.dst)];
    std::ostringstream os;
    os << "edge " << i << " (q" << e.src << " -> q" << e.dst << "): ";
    const SolutionCheck wc = check_solution(dst, w, true);
    if (!wc.ok) {
      out.push_back(os.str() + "target witness violates " + wc.clause);
      continue;
    }
    try {
      Solution back = pull_back(src, e.label, w);
      SolutionCheck c = check_solution(src, back, true);
      if (!c.ok) out.push_back(os.str() + "pulled back solution violates " + c.clause);
    } catch (const std::exception& ex) {
      out.push_back(os.str() + ex.what());
    }
  }
  return out;
}

std::string FiniteVerdict::line() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Infinite: os << "infinite (cycle found)"; break;
    case Kind::Finite: os << "finite (" << count << " solution" << (count == 1 ? "" : "s") << ")"; break;
    case Kind::Unknown: os << "unknown (no cycle, solutions up to the bound only)"; break;
  }
  return os.str();
}

std::string FiniteVerdict::verdict(int L) const {
  switch (kind) {
    case Kind::Infinite: return "no";
    case Kind::Finite: return "yes";
    case Kind::Unknown: break;
  }
  return "unknown@" + std::to_string(L);
}

FiniteVerdict finiteness(const Instance& inst, const BuildResult& b, int L, const SolveOptions& opt) {
  FiniteVerdict v;
  v.cycle = b.nfa.find_cycle();
  if (v.cycle) {
    v.kind = FiniteVerdict::Kind::Infinite;
    return v;
  }
  // Without a cycle the automaton has finitely many paths.
  std::set<Tuple> all;
  for (const Tuple& t : enumerate_bounded(b.nfa, INT_MAX)) all.insert(b.enc.decode(t));
  std::size_t longest = 0;
  for (const Tuple& t : all)
    for (const Word& w : t) longest = std::max(longest, w.size());
  v.count = all.size();
  if (static_cast<int>(longest) >= L || all != b.oracle) return v;
  // Look for solutions in the gap above the longest one (for example odd
  // powers only) before calling the set finite.
  const int gap = std::max(L, 2 * static_cast<int>(longest) + 1);
  if (gap > L) {
    OracleOptions oo;
    oo.jobs = opt.jobs;
    try {
      if (enumerate_bruteforce(inst, gap, oo) != all) return v;
    } catch (const Error&) {
      return v;
    }
  }
  v.kind = FiniteVerdict::Kind::Finite;
  return v;
}

}  // namespace ts
