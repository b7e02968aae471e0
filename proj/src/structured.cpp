#include "tracesolve/structured.hpp"

#include <algorithm>
#include <deque>

#include "tracesolve/trace.hpp"

namespace ts {

void TypeRelation::apply_to(SymbolTable& t) const {
  for (const auto& [x, y] : pairs)
    if (x.size() == 1 && y.size() == 1) t.set_theta(x[0], y[0]);
}

bool TypeRelation::has_quasi() const {
  return std::any_of(pairs.begin(), pairs.end(),
                     [](const auto& p) { return p.first.size() != 1 || p.second.size() != 1; });
}

namespace {

// One-step rewrites of w by the defining relations.
template <class F>
void for_each_neighbour(const Word& w, const SymbolTable& t, const TypeRelation& theta, F&& f) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (w[i] != w[i + 1] && t.independent(w[i], w[i + 1])) {
      Word u = w;
      std::swap(u[i], u[i + 1]);
      f(u);
    }
  }
  for (const auto& [x, y] : theta.pairs) {
    const std::size_t len = x.size() + y.size();
    for (std::size_t i = 0; i + len <= n; ++i) {
      auto try_swap = [&](const Word& first, const Word& second) {
        if (!std::equal(first.begin(), first.end(), w.begin() + static_cast<long>(i))) return;
        if (!std::equal(second.begin(), second.end(), w.begin() + static_cast<long>(i + first.size()))) return;
        Word u(w.begin(), w.begin() + static_cast<long>(i));
        u.insert(u.end(), second.begin(), second.end());
        u.insert(u.end(), first.begin(), first.end());
        u.insert(u.end(), w.begin() + static_cast<long>(i + len), w.end());
        if (u != w) f(u);
      };
      try_swap(x, y);
      try_swap(y, x);
    }
  }
}

}  // namespace

std::set<Word> homogeneous_class(const Word& w, const SymbolTable& t, const TypeRelation& theta,
                                 std::size_t budget) {
  std::set<Word> seen{w};
  std::deque<Word> queue{w};
  while (!queue.empty()) {
    Word cur = std::move(queue.front());
    queue.pop_front();
    for_each_neighbour(cur, t, theta, [&](const Word& u) {
      if (seen.insert(u).second) {
        if (seen.size() > budget) throw Error("rewriting search exceeded its node budget");
        queue.push_back(u);
      }
    });
  }
  return seen;
}

bool homogeneous_equal(const Word& u, const Word& v, const SymbolTable& t, const TypeRelation& theta,
                       std::size_t budget) {
  if (u.size() != v.size()) return false;
  {
    Word su = u, sv = v;
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    if (su != sv) return false;
  }
  if (!theta.has_quasi()) {
    SymbolTable typed = t;
    theta.apply_to(typed);
    return normal_form(u, typed) == normal_form(v, typed);
  }
  return homogeneous_class(u, t, theta, budget).count(v) > 0;
}

bool homogeneous_factor(const Word& u, const Word& v, const SymbolTable& t, const TypeRelation& theta,
                        std::size_t budget) {
  if (u.size() > v.size()) return false;
  // Letter-count dominance is necessary.
  {
    Word su = u, sv = v;
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    if (!std::includes(sv.begin(), sv.end(), su.begin(), su.end())) return false;
  }
  if (u.empty()) return true;
  const std::set<Word> target = homogeneous_class(u, t, theta, budget);
  const std::set<Word> words = homogeneous_class(v, t, theta, budget);
  const std::size_t k = u.size();
  for (const Word& w : words)
    for (std::size_t i = 0; i + k <= w.size(); ++i)
      if (target.count(Word(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i + k)))) return true;
  return false;
}

std::vector<TypeViolation> validate_type(const TypeRelation& theta, const SymbolTable& t) {
  std::vector<TypeViolation> out;
  auto show = [](const Word& w) {
    std::string s;
    for (Sym x : w) s += (s.empty() ? "" : " ") + std::to_string(x);
    return "[" + s + "]";
  };
  auto bar_word = [&](const Word& w) { return involute_word(w, t); };
  auto is_quasi = [&](const Word& w) { return w.size() == 2 && t.is_constant(w[0]) && w[1] == t.bar(w[0]); };
  auto in_a = [&](Sym s) { return t.is_constant(s) && t.info(s).base != kNone; };
  std::map<Word, Word> image;
  for (const auto& [x, y] : theta.pairs) {
    for (Sym s : x)
      if (!t.in_use(s)) out.push_back({"unknown-symbol", show(x)});
    for (Sym s : y)
      if (!t.in_use(s)) out.push_back({"unknown-symbol", show(y)});
    if (!out.empty() && out.back().clause == "unknown-symbol") continue;
    auto [it, fresh] = image.emplace(x, y);
    if (!fresh && it->second != y) out.push_back({"functional", show(x) + " has two types"});
    if (!theta.related(bar_word(x), bar_word(y)))
      out.push_back({"involution-closure", show(x) + " -> " + show(y) + " lacks its involution"});
    const bool x_var = x.size() == 1 && t.is_variable(x[0]);
    if (!x_var) {
      const bool shape = (x.size() == 1 && t.is_constant(x[0])) || is_quasi(x);
      if (!shape || x.size() != y.size())
        out.push_back({"key-shape", show(x) + " is not a, abar or a abar of the type's length"});
      for (Sym s : x)
        if (in_a(s)) out.push_back({"key-in-A", show(x) + " uses a letter of A"});
      if (x.size() == y.size()) {
        for (std::size_t i = 0; i < x.size(); ++i)
          if (t.rho(x[i]) != t.rho(y[i])) out.push_back({"resources", show(x) + " and its type differ in resources"});
      }
    }
    const bool y_shape = (y.size() == 1 && t.is_constant(y[0])) || is_quasi(y);
    if (!y_shape) out.push_back({"range-shape", show(y) + " is not a constant or quasi-letter"});
    for (Sym s : y)
      if (in_a(s) || t.is_variable(s)) out.push_back({"range", show(y) + " involves A or a variable"});
  }
  return out;
}

}  // namespace ts
