#include "tracesolve/trace.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace ts {

Word normal_form(const Word& w, const SymbolTable& t) {
  const int n = static_cast<int>(w.size());
  if (n <= 1) return w;
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (t.dependent(w[i], w[j])) {
        succ[i].push_back(j);
        ++indeg[j];
      }
    }
  }
  // Least letter first; ties between equal letters go to the earlier position.
  using Item = std::pair<Sym, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push({w[i], i});
  Word out;
  out.reserve(w.size());
  while (!ready.empty()) {
    auto [s, i] = ready.top();
    ready.pop();
    out.push_back(s);
    for (int j : succ[i])
      if (--indeg[j] == 0) ready.push({w[j], j});
  }
  return out;
}

bool trace_equal(const Word& u, const Word& v, const SymbolTable& t) {
  if (u.size() != v.size()) return false;
  return normal_form(u, t) == normal_form(v, t);
}

PositionOrder::PositionOrder(const Word& w, const SymbolTable& t)
    : n_(static_cast<int>(w.size())), words_((w.size() + 63) / 64) {
  bits_.assign(static_cast<std::size_t>(n_) * words_, 0);
  auto row = [&](int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; };
  for (int i = n_ - 1; i >= 0; --i) {
    std::uint64_t* ri = row(i);
    // Dependent successors in increasing order; one that is already reached
    // through an earlier dependent successor is not immediate.
    std::vector<int> direct;
    for (int j = i + 1; j < n_; ++j)
      if (t.dependent(w[i], w[j])) direct.push_back(j);
    for (int j : direct) {
      const bool reached = (ri[static_cast<std::size_t>(j) / 64] >> (static_cast<unsigned>(j) % 64)) & 1u;
      if (!reached) arcs_.push_back({i, j});
      ri[static_cast<std::size_t>(j) / 64] |= std::uint64_t{1} << (static_cast<unsigned>(j) % 64);
      const std::uint64_t* rj = row(j);
      for (std::size_t k = 0; k < words_; ++k) ri[k] |= rj[k];
    }
  }
  std::sort(arcs_.begin(), arcs_.end());
}

std::vector<std::pair<int, int>> hasse_arcs(const Word& w, const SymbolTable& t) {
  return PositionOrder(w, t).arcs();
}

std::vector<int> min_positions(const Word& w, const SymbolTable& t) {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(w.size()); ++j) {
    bool minimal = true;
    for (int i = 0; i < j && minimal; ++i)
      if (t.dependent(w[i], w[j])) minimal = false;
    if (minimal) out.push_back(j);
  }
  return out;
}

std::vector<int> max_positions(const Word& w, const SymbolTable& t) {
  std::vector<int> out;
  const int n = static_cast<int>(w.size());
  for (int i = 0; i < n; ++i) {
    bool maximal = true;
    for (int j = i + 1; j < n && maximal; ++j)
      if (t.dependent(w[i], w[j])) maximal = false;
    if (maximal) out.push_back(i);
  }
  return out;
}

std::set<Sym> min_elements(const Word& w, const SymbolTable& t) {
  std::set<Sym> out;
  for (int p : min_positions(w, t)) out.insert(w[p]);
  return out;
}

std::set<Sym> max_elements(const Word& w, const SymbolTable& t) {
  std::set<Sym> out;
  for (int p : max_positions(w, t)) out.insert(w[p]);
  return out;
}

Word involute_word(const Word& w, const SymbolTable& t) {
  Word out(w.rbegin(), w.rend());
  for (Sym& s : out) s = t.bar(s);
  return out;
}

Word involute(const Word& w, const SymbolTable& t) { return normal_form(involute_word(w, t), t); }

bool is_reduced(const Word& w, const SymbolTable& t) {
  // a abar is a factor of some representative iff it labels a Hasse arc.
  for (auto [i, j] : hasse_arcs(w, t))
    if (w[j] == t.bar(w[i])) return false;
  return true;
}

bool factor_of(const Word& v, const Word& w, const SymbolTable& t) {
  if (v.size() > w.size()) return false;
  if (v.empty()) return true;
  // Occurrences of one letter form a chain, so an occurrence of v as a
  // factor takes a consecutive run of occurrences of each letter.
  std::map<Sym, int> need;
  for (Sym s : v) ++need[s];
  std::map<Sym, std::vector<int>> occ;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) occ[w[i]].push_back(i);
  std::vector<Sym> letters;
  for (auto& [s, k] : need) {
    if (static_cast<int>(occ[s].size()) < k) return false;
    letters.push_back(s);
  }
  const PositionOrder order(w, t);
  const Word vn = normal_form(v, t);
  std::vector<int> start(letters.size(), 0);
  while (true) {
    std::vector<char> in(w.size(), 0);
    for (std::size_t l = 0; l < letters.size(); ++l) {
      const auto& o = occ[letters[l]];
      for (int k = 0; k < need[letters[l]]; ++k) in[static_cast<std::size_t>(o[start[l] + k])] = 1;
    }
    bool convex = true;
    const int n = static_cast<int>(w.size());
    for (int q = 0; q < n && convex; ++q) {
      if (in[q]) continue;
      bool below = false, above = false;
      for (int p = 0; p < n; ++p) {
        if (!in[p]) continue;
        if (order.less(p, q)) below = true;
        if (order.less(q, p)) above = true;
      }
      if (below && above) convex = false;
    }
    if (convex) {
      Word sub;
      for (int p = 0; p < n; ++p)
        if (in[p]) sub.push_back(w[p]);
      if (normal_form(sub, t) == vn) return true;
    }
    std::size_t l = 0;
    for (; l < letters.size(); ++l) {
      const int limit = static_cast<int>(occ[letters[l]].size()) - need[letters[l]];
      if (start[l] < limit) {
        ++start[l];
        break;
      }
      start[l] = 0;
    }
    if (l == letters.size()) return false;
  }
}

Word project_pi0(const Word& w, const ResourceAlphabet& a) {
  Word out;
  out.reserve(w.size());
  for (Sym s : w) {
    if (s < 0 || s >= a.size()) throw Error("projection applied to a non-alphabet letter");
    out.push_back(a.base(s));
  }
  return out;
}

bool Trace::operator==(const Trace& o) const { return word_ == o.word_; }

Trace Trace::operator*(const Trace& o) const {
  Word w = word_;
  w.insert(w.end(), o.word_.begin(), o.word_.end());
  return Trace(w, *table_);
}

}  // namespace ts
