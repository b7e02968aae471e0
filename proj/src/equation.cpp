#include "tracesolve/equation.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "tracesolve/trace.hpp"

namespace ts {

bool Problem::is_initial_var(Sym s) const {
  for (Sym x : vars)
    if (s == x || s == x + 1) return true;
  for (Sym x : aux_vars)
    if (s == x || s == x + 1) return true;
  return false;
}

bool Problem::is_distinguished(Sym s) const {
  for (Sym c : distinguished)
    if (s == c || s == c + 1) return true;
  return false;
}

long Weight5::max_norm() const { return *std::max_element(v.begin(), v.end()); }

std::string Weight5::str() const {
  std::ostringstream os;
  os << "(" << v[0] << "," << v[1] << "," << v[2] << "," << v[3] << "," << v[4] << ")";
  return os.str();
}

State::State(std::shared_ptr<const Problem> p) : problem_(std::move(p)) {
  syms = problem_->alphabet.table();
  mu = ConstraintMorphism(problem_->monoid);
  for (Sym a = 0; a < problem_->a_size(); ++a) mu.set(a, problem_->letter_mu[static_cast<std::size_t>(a)]);
}

std::vector<Sym> State::constants() const {
  std::vector<Sym> out;
  for (Sym s = 0; s < static_cast<Sym>(syms.size()); ++s)
    if (syms.in_use(s) && syms.is_constant(s)) out.push_back(s);
  return out;
}

std::vector<Sym> State::variables() const {
  std::vector<Sym> out;
  for (Sym s = 0; s < static_cast<Sym>(syms.size()); ++s)
    if (syms.in_use(s) && syms.is_variable(s)) out.push_back(s);
  return out;
}

bool State::has_variables() const {
  for (Sym s = 0; s < static_cast<Sym>(syms.size()); ++s)
    if (syms.in_use(s) && syms.is_variable(s)) return true;
  return false;
}

int State::marker_count() const {
  return static_cast<int>(std::count(W.begin(), W.end(), problem_->alphabet.marker()));
}

namespace {

Sym add_pair(State& st, Kind kind, Mask rho, int mu_s) {
  const Sym s = st.syms.fresh_pair(st.problem().fresh_base);
  SymInfo si;
  si.kind = kind;
  si.rho = rho;
  si.bar = s + 1;
  st.syms.set(s, si);
  si.bar = s;
  st.syms.set(s + 1, si);
  st.mu.set(s, mu_s);
  st.mu.set(s + 1, st.mu.target().inv(mu_s));
  return s;
}

}  // namespace

Sym State::add_constant_pair(Mask rho, int mu_s) { return add_pair(*this, Kind::Constant, rho, mu_s); }
Sym State::add_variable_pair(Mask rho, int mu_s) { return add_pair(*this, Kind::Variable, rho, mu_s); }

void State::remove_pair(Sym s) {
  const Sym b = syms.bar(s);
  for (Sym x : {s, b}) {
    mu.erase(x);
    syms.erase(x);
  }
  // Drop types pointing at removed symbols.
  for (Sym x = 0; x < static_cast<Sym>(syms.size()); ++x)
    if (syms.theta(x) == s || syms.theta(x) == b) syms.clear_theta(x);
}

void State::normalize() { W = normal_form(W, syms); }

Word State::expand(const Word& w, const Solution& sol) const {
  Word out;
  for (Sym s : w) {
    if (syms.in_use(s) && syms.is_variable(s)) {
      const Word img = sigma_image(sol, s);
      out.insert(out.end(), img.begin(), img.end());
    } else {
      out.push_back(s);
    }
  }
  return out;
}

int State::theta_size() const {
  int n = 0;
  for (Sym s = 0; s < static_cast<Sym>(syms.size()); ++s)
    if (syms.in_use(s) && syms.theta(s) != kNone) ++n;
  return n;
}

Weight5 State::weight() const {
  Weight5 w;
  const long len = static_cast<long>(W.size());
  const int r = problem_->alphabet.resource_count();
  long omega = 0;
  std::set<Sym> distinct;
  for (Sym s : W) {
    if (!syms.is_constant(s)) continue;
    omega += r - popcount(syms.rho(s));
    distinct.insert(s);
  }
  w.v[0] = len;
  w.v[1] = omega;
  w.v[2] = len - static_cast<long>(distinct.size());
  w.v[3] = len - theta_size();
  w.v[4] = static_cast<long>(constants().size());
  return w;
}

std::string State::check_well_formed() const {
  const Sym hash = problem_->alphabet.marker();
  if (static_cast<long>(W.size()) >= problem_->c_budget()) return "length-budget";
  if (W.empty() || W.front() != hash || W.back() != hash) return "marker-ends";
  const int markers = problem_->marker_total > 0 ? problem_->marker_total : 2 * problem_->k + 5;
  if (marker_count() != markers) return "marker-count";
  for (Sym s : W)
    if (!syms.in_use(s)) return "unknown-symbol";
  for (Sym s = 0; s < static_cast<Sym>(syms.size()); ++s) {
    if (!syms.in_use(s)) continue;
    if (!mu.has(s)) return "mu-missing";
    const bool zero = mu.target().is_zero(mu.image(s));
    if (zero != (s == hash)) return "mu-zero";
    if (syms.bar(syms.bar(s)) != s || syms.rho(syms.bar(s)) != syms.rho(s)) return "involution";
    if (mu.image(syms.bar(s)) != mu.target().inv(mu.image(s))) return "mu-involution";
  }
  // #-free segments and closure under involution.
  std::vector<Word> segs;
  Word cur;
  for (std::size_t i = 1; i < W.size(); ++i) {
    if (W[i] == hash) {
      segs.push_back(normal_form(cur, syms));
      cur.clear();
    } else {
      cur.push_back(W[i]);
    }
  }
  for (const Word& s : segs)
    if (mu.target().is_zero(mu.eval(s))) return "mu-segment";
  std::set<Word> seg_set(segs.begin(), segs.end());
  for (const Word& s : segs) {
    const Word inv = involute(s, syms);
    if (seg_set.count(inv)) continue;
    bool found = false;
    for (const Word& t : segs)
      if (factor_of(inv, t, syms)) {
        found = true;
        break;
      }
    if (!found) return "segment-involution";
  }
  return "";
}

std::string State::name(Sym s) const {
  const Problem& p = *problem_;
  if (p.in_a(s)) return p.alphabet.name(s);
  for (std::size_t i = 0; i < p.distinguished.size(); ++i) {
    if (s == p.distinguished[i]) return "c" + std::to_string(i + 1);
    if (s == p.distinguished[i] + 1) return "c" + std::to_string(i + 1) + "~";
  }
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    if (s == p.vars[i]) return p.var_names[i];
    if (s == p.vars[i] + 1) return p.var_names[i] + "~";
  }
  for (std::size_t i = 0; i < p.aux_vars.size(); ++i) {
    if (s == p.aux_vars[i]) return p.aux_names[i];
    if (s == p.aux_vars[i] + 1) return p.aux_names[i] + "~";
  }
  const bool var = syms.in_use(s) && syms.is_variable(s);
  const bool primary = !syms.in_use(s) || syms.bar(s) > s;
  const Sym base = primary ? s : syms.bar(s);
  return std::string(var ? "Y" : "k") + std::to_string(base) + (primary ? "" : "~");
}

std::string State::show(const Word& w) const {
  std::string out;
  for (Sym s : w) {
    if (!out.empty()) out += ' ';
    out += name(s);
  }
  return out.empty() ? "1" : out;
}

std::string State::dump() const {
  std::ostringstream os;
  os << "W: " << show(W) << "\n";
  for (Sym s = problem_->a_size(); s < static_cast<Sym>(syms.size()); ++s) {
    if (!syms.in_use(s)) continue;
    os << (syms.is_variable(s) ? "var " : "const ") << name(s) << " rho=" << mask_string(syms.rho(s))
       << " mu=" << mu.target().name(mu.image(s));
    if (syms.theta(s) != kNone) os << " theta=" << name(syms.theta(s));
    os << "\n";
  }
  os << "weight: " << weight().str() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Canonical renaming.

namespace {

struct Attr {
  int kind;
  int rho;
  int mu;
  auto operator<=>(const Attr&) const = default;
};

struct CanonSearch {
  const State& st;
  const Problem& p;
  Word w;
  std::vector<std::vector<int>> succ;
  std::vector<int> indeg0;
  std::size_t nodes = 0;
  static constexpr std::size_t kNodeCap = 20000;

  bool fixed(Sym s) const { return p.in_a(s) || p.is_distinguished(s) || p.is_initial_var(s); }
  Attr attr(Sym s) const {
    return {st.syms.is_variable(s) ? 1 : 0, st.syms.rho(s), st.mu.image(s)};
  }

  // Encoding element: (tag, label-or-id, attr).
  using Elem = std::tuple<int, int, int, int, int>;
  struct Result {
    std::vector<Elem> enc;
    std::map<Sym, int> label;
    bool valid = false;
  };
  Result best;

  CanonSearch(const State& s) : st(s), p(s.problem()), w(s.W) {
    const int n = static_cast<int>(w.size());
    succ.resize(static_cast<std::size_t>(n));
    indeg0.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (st.syms.dependent(w[i], w[j])) {
          succ[i].push_back(j);
          ++indeg0[j];
        }
  }

  Elem elem_for(Sym s, const std::map<Sym, int>& label, int next) const {
    if (fixed(s)) return {0, s, 0, 0, 0};
    auto it = label.find(s);
    const Attr a = attr(s);
    const int l = it == label.end() ? next : it->second;
    return {1, l, a.kind, a.rho, a.mu};
  }

  void finish(std::vector<Elem> enc, std::map<Sym, int> label, int next) {
    // Symbols outside W: by id order.
    for (Sym s = 0; s < static_cast<Sym>(st.syms.size()); ++s) {
      if (!st.syms.in_use(s) || fixed(s) || label.count(s)) continue;
      const Sym b = st.syms.bar(s);
      label[s] = next;
      label[b] = next + 1;
      next += 2;
    }
    std::vector<std::pair<int, Sym>> order;
    for (auto& [s, l] : label) order.push_back({l, s});
    std::sort(order.begin(), order.end());
    enc.push_back({9, 0, 0, 0, 0});
    for (auto& [l, s] : order) {
      const Attr a = attr(s);
      const Sym t = st.syms.theta(s);
      int tl = -1;
      if (t != kNone) tl = fixed(t) ? t : 100000 + label.at(t);
      enc.push_back({l, a.kind, a.rho, a.mu, tl});
    }
    if (!best.valid || enc < best.enc) {
      best.enc = std::move(enc);
      best.label = std::move(label);
      best.valid = true;
    }
  }

  void dfs(std::vector<int>& indeg, std::vector<char>& done, std::vector<Elem>& enc,
           std::map<Sym, int>& label, int next, int placed) {
    if (best.valid && nodes > kNodeCap) return;
    ++nodes;
    const int n = static_cast<int>(w.size());
    if (placed == n) {
      finish(enc, label, next);
      return;
    }
    // Prune: prefix already worse than the best complete encoding.
    if (best.valid) {
      const std::size_t m = std::min(enc.size(), best.enc.size());
      if (std::lexicographical_compare(best.enc.begin(), best.enc.begin() + static_cast<long>(m), enc.begin(),
                                       enc.begin() + static_cast<long>(m)))
        return;
    }
    Elem least{};
    std::vector<int> cands;
    for (int i = 0; i < n; ++i) {
      if (done[i] || indeg[i] != 0) continue;
      const Elem e = elem_for(w[i], label, next);
      if (cands.empty() || e < least) {
        least = e;
        cands.assign(1, i);
      } else if (e == least) {
        cands.push_back(i);
      }
    }
    for (int i : cands) {
      const Sym s = w[i];
      const bool fresh = !fixed(s) && !label.count(s);
      if (fresh) {
        label[s] = next;
        label[st.syms.bar(s)] = next + 1;
      }
      done[i] = 1;
      for (int j : succ[i]) --indeg[j];
      enc.push_back(least);
      dfs(indeg, done, enc, label, fresh ? next + 2 : next, placed + 1);
      enc.pop_back();
      for (int j : succ[i]) ++indeg[j];
      done[i] = 0;
      if (fresh) {
        label.erase(s);
        label.erase(st.syms.bar(s));
      }
    }
  }
};

}  // namespace

CanonicalResult canonical_state(const State& s) {
  CanonSearch search(s);
  std::vector<int> indeg = search.indeg0;
  std::vector<char> done(s.W.size(), 0);
  std::vector<CanonSearch::Elem> enc;
  std::map<Sym, int> label;
  search.dfs(indeg, done, enc, label, 0, 0);
  const Problem& p = s.problem();
  Renaming ren;
  for (auto& [sym, l] : search.best.label) ren[sym] = p.fresh_base + l;
  CanonicalResult out{State(s.problem_ptr()), ren};
  State& t = out.state;
  auto map_sym = [&](Sym x) {
    auto it = ren.find(x);
    return it == ren.end() ? x : it->second;
  };
  t.syms = SymbolTable();
  t.mu = ConstraintMorphism(s.mu.target_ptr());
  for (Sym x = 0; x < static_cast<Sym>(s.syms.size()); ++x) {
    if (!s.syms.in_use(x)) continue;
    SymInfo si = s.syms.info(x);
    si.bar = map_sym(si.bar);
    t.syms.set(map_sym(x), si);
    t.mu.set(map_sym(x), s.mu.image(x));
  }
  for (Sym x = 0; x < static_cast<Sym>(s.syms.size()); ++x)
    if (s.syms.in_use(x) && s.syms.theta(x) != kNone) t.syms.set_theta(map_sym(x), map_sym(s.syms.theta(x)));
  t.W.clear();
  for (Sym x : s.W) t.W.push_back(map_sym(x));
  t.normalize();
  return out;
}

// ---------------------------------------------------------------------------

State build_initial(std::shared_ptr<const Problem> p, const Word& u, const Word& v,
                    const std::vector<Mask>& var_rho, const std::vector<int>& var_mu) {
  State st(p);
  const FiniteMonoid& m = *p->monoid;
  std::vector<Sym> all = p->vars;
  all.insert(all.end(), p->aux_vars.begin(), p->aux_vars.end());
  if (var_rho.size() != all.size() || var_mu.size() != all.size())
    throw Error("initial state: one resource set and constraint per variable expected");
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Sym x = all[i];
    SymInfo si;
    si.kind = Kind::Variable;
    si.rho = var_rho[i];
    si.bar = x + 1;
    st.syms.set(x, si);
    si.bar = x;
    st.syms.set(x + 1, si);
    st.mu.set(x, var_mu[i]);
    st.mu.set(x + 1, m.inv(var_mu[i]));
  }
  const Sym hash = p->alphabet.marker();
  Word w{hash};
  for (Sym x : p->vars) {
    w.push_back(x);
    w.push_back(hash);
  }
  auto append = [&](const Word& z) {
    w.insert(w.end(), z.begin(), z.end());
    w.push_back(hash);
  };
  append(u);
  append(v);
  append(involute_word(u, st.syms));
  append(involute_word(v, st.syms));
  for (auto it = p->vars.rbegin(); it != p->vars.rend(); ++it) {
    w.push_back(*it + 1);
    w.push_back(hash);
  }
  st.W = w;
  st.normalize();
  const std::string bad = st.check_well_formed();
  if (!bad.empty()) throw Error("initial state is not well formed: " + bad);
  return st;
}

Word sigma_image(const Solution& sol, Sym x) {
  auto it = sol.sigma.find(x);
  if (it == sol.sigma.end()) throw Error("solution has no image for variable " + std::to_string(x));
  return it->second;
}

Solution complete_bars(const State& s, const std::map<Sym, Word>& sigma_on_x) {
  Solution sol;
  for (auto& [x, w] : sigma_on_x) {
    sol.sigma[x] = normal_form(w, s.syms);
    sol.sigma[s.syms.bar(x)] = involute(w, s.syms);
  }
  return sol;
}

SolutionCheck check_solution(const State& s, const Solution& sol, bool check_alpha) {
  for (Sym x : s.variables()) {
    auto it = sol.sigma.find(x);
    if (it == sol.sigma.end()) return {false, "sigma-total"};
    const Word& img = it->second;
    Mask r = 0;
    for (Sym a : img) {
      if (!s.syms.in_use(a) || !s.syms.is_constant(a)) return {false, "sigma-alphabet"};
      r |= s.syms.rho(a);
    }
    if (!subset(r, s.syms.rho(x))) return {false, "sigma-resources"};
    if (s.mu.eval(img) != s.mu.image(x)) return {false, "sigma-constraint"};
    const Sym y = s.syms.theta(x);
    if (y != kNone)
      for (Sym a : img)
        if (a != y) return {false, "sigma-type"};
    auto jt = sol.sigma.find(s.syms.bar(x));
    if (jt == sol.sigma.end() || !trace_equal(jt->second, involute_word(img, s.syms), s.syms))
      return {false, "sigma-involution"};
  }
  const Word lhs = s.expand(s.W, sol);
  const Word rhs = s.expand(involute_word(s.W, s.syms), sol);
  if (!trace_equal(lhs, rhs, s.syms)) return {false, "sigma-equation"};
  if (check_alpha) {
    const Problem& p = s.problem();
    for (auto& [c, img] : sol.alpha) {
      Mask r = 0;
      for (Sym a : img) {
        if (!p.in_a(a)) return {false, "alpha-alphabet"};
        r |= p.alphabet.table().rho(a);
      }
      if (!subset(r, s.syms.rho(c))) return {false, "alpha-resources"};
      int m = p.monoid->unit();
      for (Sym a : img) m = p.monoid->mul(m, p.letter_mu[static_cast<std::size_t>(a)]);
      if (m != s.mu.image(c)) return {false, "alpha-constraint"};
    }
  }
  return {};
}

long solution_weight(const State& s, const Solution& sol) {
  long total = 0;
  for (Sym x : s.variables()) {
    if (s.syms.bar(x) < x) continue;
    for (Sym a : sigma_image(sol, x)) {
      auto it = sol.alpha.find(a);
      total += it == sol.alpha.end() ? 1 : static_cast<long>(it->second.size());
    }
  }
  return total;
}

bool is_final(const State& s) {
  if (s.has_variables() || s.syms.has_types()) return false;
  if (involute(s.W, s.syms) != s.W) return false;
  const Problem& p = s.problem();
  const Sym hash = p.alphabet.marker();
  std::size_t i = 0;
  if (s.W.empty() || s.W[i++] != hash) return false;
  for (Sym c : p.distinguished) {
    if (i + 1 >= s.W.size() || s.W[i] != c || s.W[i + 1] != hash) return false;
    i += 2;
  }
  return true;
}

}  // namespace ts
