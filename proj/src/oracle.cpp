#include "tracesolve/oracle.hpp"

#include <string>

#include "tracesolve/trace.hpp"

#ifdef TRACESOLVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace ts {

namespace {

// All words of length <= L over `letters`, in length-lexicographic order.
std::vector<Word> all_words(const std::vector<Sym>& letters, int L) {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (int len = 1; len <= L; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (Sym a : letters) {
        Word x = w;
        x.push_back(a);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

Word substitute(const Instance& inst, const Word& side, const Tuple& t) {
  Word out;
  for (Sym s : side) {
    if (!inst.is_var(s)) {
      out.push_back(s);
      continue;
    }
    const Word& v = t[static_cast<std::size_t>(inst.var_index(s))];
    const Word img = inst.is_var_bar(s) ? involute_word(v, inst.alphabet.table()) : v;
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

std::size_t product_size(const std::vector<std::vector<Word>>& cands, std::size_t cap) {
  std::size_t n = 1;
  for (const auto& c : cands) {
    if (c.empty()) return 0;
    if (n > cap / c.size()) return cap + 1;
    n *= c.size();
  }
  return n;
}

Tuple tuple_at(const std::vector<std::vector<Word>>& cands, std::size_t idx) {
  Tuple t(cands.size());
  for (std::size_t i = cands.size(); i-- > 0;) {
    t[i] = cands[i][idx % cands[i].size()];
    idx /= cands[i].size();
  }
  return t;
}

std::vector<std::vector<Word>> all_candidates(const Instance& inst, int L, const OracleOptions& opt,
                                              std::size_t& total) {
  std::vector<std::vector<Word>> cands;
  for (int i = 0; i < inst.k(); ++i) cands.push_back(oracle_candidates(inst, i, L));
  total = product_size(cands, opt.max_candidates);
  if (total > opt.max_candidates)
    throw Error("oracle: more than " + std::to_string(opt.max_candidates) + " candidate tuples at bound " +
                std::to_string(L));
  return cands;
}

}  // namespace

Word group_reduce(const Word& w, const SymbolTable& t) {
  Word cur = normal_form(w, t);
  for (bool changed = true; changed;) {
    changed = false;
    const PositionOrder ord(cur, t);
    for (auto [i, j] : ord.arcs()) {
      if (cur[static_cast<std::size_t>(j)] != t.bar(cur[static_cast<std::size_t>(i)])) continue;
      Word next;
      for (int p = 0; p < static_cast<int>(cur.size()); ++p)
        if (p != i && p != j) next.push_back(cur[static_cast<std::size_t>(p)]);
      cur = normal_form(next, t);
      changed = true;
      break;
    }
  }
  return cur;
}

std::vector<Word> oracle_candidates(const Instance& inst, int var, int L) {
  const SymbolTable& t = inst.alphabet.table();
  std::vector<Word> out;
  for (Word& w : all_words(inst.letters_for(var), L)) {
    if (normal_form(w, t) != w) continue;
    if (inst.eval(w) != inst.variables[static_cast<std::size_t>(var)].mu) continue;
    if (inst.mode == Mode::Group && !is_reduced(w, t)) continue;
    out.push_back(std::move(w));
  }
  return out;
}

bool oracle_accepts(const Instance& inst, const Tuple& tup) {
  const SymbolTable& t = inst.alphabet.table();
  if (static_cast<int>(tup.size()) != inst.k()) return false;
  for (int i = 0; i < inst.k(); ++i) {
    const Word& w = tup[static_cast<std::size_t>(i)];
    for (Sym a : w)
      if (a <= 0 || a >= inst.alphabet.size() ||
          !subset(t.rho(a), inst.variables[static_cast<std::size_t>(i)].rho))
        return false;
    if (inst.eval(w) != inst.variables[static_cast<std::size_t>(i)].mu) return false;
    if (inst.mode == Mode::Group && !is_reduced(w, t)) return false;
  }
  const Word l = substitute(inst, inst.lhs, tup), r = substitute(inst, inst.rhs, tup);
  if (inst.mode == Mode::Group) return group_reduce(l, t) == group_reduce(r, t);
  return trace_equal(l, r, t);
}

std::set<Tuple> enumerate_bruteforce_serial(const Instance& inst, int L, const OracleOptions& opt) {
  std::size_t total = 0;
  const auto cands = all_candidates(inst, L, opt, total);
  std::set<Tuple> out;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Tuple t = tuple_at(cands, idx);
    if (oracle_accepts(inst, t)) out.insert(std::move(t));
  }
  return out;
}

std::set<Tuple> enumerate_bruteforce(const Instance& inst, int L, const OracleOptions& opt) {
#ifdef TRACESOLVE_HAVE_OPENMP
  std::size_t total = 0;
  const auto cands = all_candidates(inst, L, opt, total);
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
  std::vector<std::vector<Tuple>> found(static_cast<std::size_t>(threads));
  const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (long long idx = 0; idx < n; ++idx) {
    Tuple t = tuple_at(cands, static_cast<std::size_t>(idx));
    if (oracle_accepts(inst, t)) found[static_cast<std::size_t>(omp_get_thread_num())].push_back(std::move(t));
  }
  std::set<Tuple> out;
  for (auto& v : found)
    for (auto& t : v) out.insert(std::move(t));
  return out;
#else
  return enumerate_bruteforce_serial(inst, L, opt);
#endif
}

long count_at_least(const Instance& inst, int L, const OracleOptions& opt) {
  return static_cast<long>(enumerate_bruteforce(inst, L, opt).size());
}

}  // namespace ts
