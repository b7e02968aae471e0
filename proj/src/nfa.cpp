#include "tracesolve/nfa.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "tracesolve/trace.hpp"

namespace ts {

namespace {

Sym rename_sym(const Renaming& ren, Sym s) {
  auto it = ren.find(s);
  return it == ren.end() ? s : it->second;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

nlohmann::json map_to_json(const std::map<Sym, Word>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (auto& [k, w] : m) out.push_back({k, w});
  return out;
}

std::map<Sym, Word> map_from_json(const nlohmann::json& j) {
  std::map<Sym, Word> out;
  for (auto& e : j) out[e.at(0).get<Sym>()] = e.at(1).get<Word>();
  return out;
}

LabelKind kind_from_name(const std::string& s) {
  for (LabelKind k : {LabelKind::Substitution, LabelKind::Compression, LabelKind::FinalCompression})
    if (s == kind_name(k)) return k;
  throw Error("nfa json: unknown edge kind '" + s + "'");
}

}  // namespace

std::string state_key(const State& s, int problem_index) {
  std::ostringstream os;
  os << problem_index << '|';
  for (Sym x : s.W) os << x << ',';
  os << '|';
  for (Sym x = 0; x < static_cast<Sym>(s.syms.size()); ++x) {
    if (!s.syms.in_use(x)) continue;
    const SymInfo& i = s.syms.info(x);
    os << x << ':' << static_cast<int>(i.kind) << ':' << i.bar << ':' << i.rho << ':' << i.base << ':'
       << s.syms.theta(x) << ':' << (s.mu.has(x) ? s.mu.image(x) : -1) << ';';
  }
  return os.str();
}

Solution rename_solution(const Solution& sol, const Renaming& ren) {
  Solution out;
  for (auto& [x, w] : sol.sigma) {
    Word& img = out.sigma[rename_sym(ren, x)];
    for (Sym a : w) img.push_back(rename_sym(ren, a));
  }
  for (auto& [c, w] : sol.alpha) out.alpha[rename_sym(ren, c)] = w;
  return out;
}

int EndoNFA::problem_index(const State& s) const {
  for (std::size_t i = 0; i < problems.size(); ++i)
    if (problems[i] == s.problem_ptr()) return static_cast<int>(i);
  return -1;
}

int EndoNFA::find_state(const State& canonical) const {
  auto it = index_.find(state_key(canonical, problem_index(canonical)));
  return it == index_.end() ? -1 : it->second;
}

int EndoNFA::add_state(const State& canonical, const Solution* sol) {
  int pi = problem_index(canonical);
  if (pi < 0) {
    problems.push_back(canonical.problem_ptr());
    pi = static_cast<int>(problems.size()) - 1;
  }
  std::string key = state_key(canonical, pi);
  auto it = index_.find(key);
  if (it != index_.end()) {
    if (sol && witness[static_cast<std::size_t>(it->second)].sigma.empty() &&
        witness[static_cast<std::size_t>(it->second)].alpha.empty())
      witness[static_cast<std::size_t>(it->second)] = *sol;
    return it->second;
  }
  int id = static_cast<int>(states.size());
  states.push_back(canonical);
  witness.push_back(sol ? *sol : Solution{});
  index_.emplace(std::move(key), id);
  if (is_final(canonical)) finals.insert(id);
  return id;
}

bool EndoNFA::add_edge(int src, int dst, const TransitionLabel& label) {
  NfaEdge e{src, dst, label};
  for (const NfaEdge& o : edges)
    if (o == e) return false;
  edges.push_back(std::move(e));
  return true;
}

void EndoNFA::insert_path(const ForwardPath& path) {
  const State* prev_raw = &path.start;
  CanonicalResult prev = canonical_state(path.start);
  Solution prev_sol = rename_solution(path.start_sol, prev.renaming);
  int prev_id = add_state(prev.state, &prev_sol);
  initials.insert(prev_id);
  for (const PathStep& st : path.steps) {
    CanonicalResult cur = canonical_state(st.to);
    Solution cur_sol = rename_solution(st.sol, cur.renaming);
    int id = add_state(cur.state, &cur_sol);
    add_edge(prev_id, id, conjugate_label(st.label, *prev_raw, prev.renaming, st.to, cur.renaming));
    prev_raw = &st.to;
    prev = std::move(cur);
    prev_id = id;
  }
}

std::vector<std::vector<int>> EndoNFA::out_edges() const {
  std::vector<std::vector<int>> out(states.size());
  for (std::size_t i = 0; i < edges.size(); ++i) out[static_cast<std::size_t>(edges[i].src)].push_back(static_cast<int>(i));
  return out;
}

EndoNFA EndoNFA::trimmed() const {
  const std::size_t n = states.size();
  std::vector<char> fwd(n, 0), bwd(n, 0);
  std::vector<std::vector<int>> succ(n), pred(n);
  for (const NfaEdge& e : edges) {
    succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
    pred[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  auto sweep = [](std::vector<char>& mark, const std::vector<std::vector<int>>& adj, const std::set<int>& from) {
    std::vector<int> stack(from.begin(), from.end());
    for (int s : from) mark[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int t : adj[static_cast<std::size_t>(s)])
        if (!mark[static_cast<std::size_t>(t)]) {
          mark[static_cast<std::size_t>(t)] = 1;
          stack.push_back(t);
        }
    }
  };
  sweep(fwd, succ, initials);
  sweep(bwd, pred, finals);

  EndoNFA out;
  out.problems = problems;
  std::vector<int> remap(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i]) continue;
    remap[i] = static_cast<int>(out.states.size());
    out.states.push_back(states[i]);
    out.witness.push_back(witness[i]);
    out.index_.emplace(state_key(states[i], problem_index(states[i])), remap[i]);
  }
  for (int s : initials)
    if (remap[static_cast<std::size_t>(s)] >= 0) out.initials.insert(remap[static_cast<std::size_t>(s)]);
  for (int s : finals)
    if (remap[static_cast<std::size_t>(s)] >= 0) out.finals.insert(remap[static_cast<std::size_t>(s)]);
  for (const NfaEdge& e : edges) {
    int a = remap[static_cast<std::size_t>(e.src)], b = remap[static_cast<std::size_t>(e.dst)];
    if (a >= 0 && b >= 0) out.edges.push_back({a, b, e.label});
  }
  return out;
}

bool EndoNFA::satisfiable() const { return !trimmed().initials.empty(); }

std::optional<std::vector<int>> EndoNFA::find_cycle() const {
  const std::size_t n = states.size();
  std::vector<std::vector<int>> succ(n);
  for (const NfaEdge& e : edges) succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
  std::vector<int> color(n, 0);
  std::vector<int> stack;
  std::optional<std::vector<int>> found;
  std::function<void(int)> dfs = [&](int s) {
    color[static_cast<std::size_t>(s)] = 1;
    stack.push_back(s);
    for (int t : succ[static_cast<std::size_t>(s)]) {
      if (found) break;
      if (color[static_cast<std::size_t>(t)] == 1) {
        auto it = std::find(stack.begin(), stack.end(), t);
        found = std::vector<int>(it, stack.end());
      } else if (color[static_cast<std::size_t>(t)] == 0) {
        dfs(t);
      }
    }
    stack.pop_back();
    color[static_cast<std::size_t>(s)] = 2;
  };
  for (std::size_t s = 0; s < n && !found; ++s)
    if (color[s] == 0) dfs(static_cast<int>(s));
  return found;
}

std::string EndoNFA::to_dot() const {
  std::ostringstream os;
  os << "digraph endo_nfa {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State& s = states[i];
    os << "  q" << i << " [label=\"q" << i << "\\n" << dot_escape(s.show(s.W)) << "\"";
    if (finals.count(static_cast<int>(i))) os << ", peripheries=2";
    os << "];\n";
  }
  for (int s : initials) os << "  start" << s << " [shape=point];\n  start" << s << " -> q" << s << ";\n";
  for (const NfaEdge& e : edges) {
    os << "  q" << e.src << " -> q" << e.dst << " [label=\""
       << dot_escape(label_summary(states[static_cast<std::size_t>(e.src)], states[static_cast<std::size_t>(e.dst)], e.label))
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

nlohmann::json EndoNFA::to_json() const {
  nlohmann::json j;
  j["schema"] = "tracesolve-nfa/1";
  j["problems"] = problems.size();
  j["states"] = nlohmann::json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State& s = states[i];
    nlohmann::json syms = nlohmann::json::array();
    for (Sym x = 0; x < static_cast<Sym>(s.syms.size()); ++x) {
      if (!s.syms.in_use(x)) continue;
      const SymInfo& si = s.syms.info(x);
      syms.push_back({x, static_cast<int>(si.kind), si.bar, si.rho, si.base, s.syms.theta(x),
                      s.mu.has(x) ? s.mu.image(x) : -1});
    }
    j["states"].push_back({{"id", i},
                           {"problem", problem_index(s)},
                           {"W", s.W},
                           {"text", s.show(s.W)},
                           {"symbols", syms},
                           {"initial", initials.count(static_cast<int>(i)) > 0},
                           {"final", finals.count(static_cast<int>(i)) > 0}});
  }
  j["edges"] = nlohmann::json::array();
  for (const NfaEdge& e : edges) {
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"kind", kind_name(e.label.kind)},
                          {"endo", map_to_json(e.label.endo)},
                          {"tau", map_to_json(e.label.tau)},
                          {"note", e.label.note}});
  }
  return j;
}

EndoNFA EndoNFA::from_json(const nlohmann::json& j, const std::vector<std::shared_ptr<const Problem>>& problems) {
  if (j.value("schema", "") != "tracesolve-nfa/1") throw Error("nfa json: unexpected schema");
  if (j.at("problems").get<std::size_t>() != problems.size())
    throw Error("nfa json: problem count does not match the instance");
  EndoNFA out;
  out.problems = problems;
  for (const auto& js : j.at("states")) {
    int pi = js.at("problem").get<int>();
    if (pi < 0 || static_cast<std::size_t>(pi) >= problems.size()) throw Error("nfa json: bad problem index");
    State s(problems[static_cast<std::size_t>(pi)]);
    s.W = js.at("W").get<Word>();
    s.syms = SymbolTable();
    s.mu = ConstraintMorphism(problems[static_cast<std::size_t>(pi)]->monoid);
    for (const auto& e : js.at("symbols")) {
      Sym x = e.at(0).get<Sym>();
      SymInfo si;
      si.kind = static_cast<Kind>(e.at(1).get<int>());
      si.bar = e.at(2).get<Sym>();
      si.rho = e.at(3).get<Mask>();
      si.base = e.at(4).get<Sym>();
      s.syms.set(x, si);
      Sym th = e.at(5).get<Sym>();
      if (th != kNone) s.syms.set_theta(x, th);
      int m = e.at(6).get<int>();
      if (m >= 0) s.mu.set(x, m);
    }
    int id = static_cast<int>(out.states.size());
    out.states.push_back(s);
    out.witness.emplace_back();
    out.index_.emplace(state_key(s, pi), id);
    if (js.at("initial").get<bool>()) out.initials.insert(id);
    if (js.at("final").get<bool>()) out.finals.insert(id);
  }
  for (const auto& je : j.at("edges")) {
    TransitionLabel l;
    l.kind = kind_from_name(je.at("kind").get<std::string>());
    l.endo = map_from_json(je.at("endo"));
    l.tau = map_from_json(je.at("tau"));
    l.note = je.value("note", "");
    int a = je.at("src").get<int>(), b = je.at("dst").get<int>();
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= out.states.size() ||
        static_cast<std::size_t>(b) >= out.states.size())
      throw Error("nfa json: edge endpoint out of range");
    out.edges.push_back({a, b, std::move(l)});
  }
  return out;
}

bool EndoNFA::operator==(const EndoNFA& o) const {
  if (states.size() != o.states.size() || edges != o.edges || initials != o.initials || finals != o.finals)
    return false;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (problem_index(states[i]) != o.problem_index(o.states[i])) return false;
    if (state_key(states[i], 0) != state_key(o.states[i], 0)) return false;
  }
  return true;
}

std::set<Tuple> enumerate_bounded(const EndoNFA& nfa, int L) {
  const std::size_t n = nfa.states.size();
  std::vector<std::vector<int>> in(n);
  for (std::size_t i = 0; i < nfa.edges.size(); ++i) in[static_cast<std::size_t>(nfa.edges[i].dst)].push_back(static_cast<int>(i));
  std::vector<std::set<Tuple>> values(n);
  std::vector<std::pair<int, Tuple>> work;
  for (int f : nfa.finals) {
    const Problem& p = nfa.states[static_cast<std::size_t>(f)].problem();
    Tuple t;
    for (Sym c : p.distinguished) t.push_back(Word{c});
    if (values[static_cast<std::size_t>(f)].insert(t).second) work.emplace_back(f, t);
  }
  while (!work.empty()) {
    auto [s, t] = std::move(work.back());
    work.pop_back();
    for (int ei : in[static_cast<std::size_t>(s)]) {
      const NfaEdge& e = nfa.edges[static_cast<std::size_t>(ei)];
      Tuple u;
      bool ok = true;
      for (const Word& w : t) {
        Word img = apply_map(e.label.endo, w);
        if (static_cast<int>(img.size()) > L) {
          ok = false;
          break;
        }
        u.push_back(std::move(img));
      }
      if (ok && values[static_cast<std::size_t>(e.src)].insert(u).second) work.emplace_back(e.src, std::move(u));
    }
  }
  std::set<Tuple> out;
  for (int s : nfa.initials) {
    const ResourceAlphabet& a = nfa.states[static_cast<std::size_t>(s)].problem().alphabet;
    for (const Tuple& t : values[static_cast<std::size_t>(s)]) {
      Tuple u;
      for (const Word& w : t) u.push_back(project_pi0(w, a));
      out.insert(std::move(u));
    }
  }
  return out;
}

Tuple path_tuple(const EndoNFA& nfa, const std::vector<int>& edge_ids) {
  if (edge_ids.empty()) throw Error("path_tuple: empty path");
  const NfaEdge& last = nfa.edges[static_cast<std::size_t>(edge_ids.back())];
  const Problem& p = nfa.states[static_cast<std::size_t>(last.dst)].problem();
  Tuple t;
  for (Sym c : p.distinguished) t.push_back(Word{c});
  for (auto it = edge_ids.rbegin(); it != edge_ids.rend(); ++it) {
    const NfaEdge& e = nfa.edges[static_cast<std::size_t>(*it)];
    for (Word& w : t) w = apply_map(e.label.endo, w);
  }
  for (Word& w : t) w = project_pi0(w, p.alphabet);
  return t;
}

std::vector<AcceptingPath> enumerate_paths(const EndoNFA& nfa, std::size_t max_paths, std::size_t max_len,
                                           int visit_cap) {
  std::vector<AcceptingPath> out;
  auto succ = nfa.out_edges();
  std::vector<int> visits(nfa.states.size(), 0);
  std::vector<int> path;
  std::function<void(int, int)> dfs = [&](int s, int problem) {
    if (out.size() >= max_paths) return;
    if (nfa.finals.count(s) && !path.empty()) out.push_back({path, path_tuple(nfa, path), problem});
    if (path.size() >= max_len) return;
    for (int ei : succ[static_cast<std::size_t>(s)]) {
      int t = nfa.edges[static_cast<std::size_t>(ei)].dst;
      if (visits[static_cast<std::size_t>(t)] >= visit_cap) continue;
      ++visits[static_cast<std::size_t>(t)];
      path.push_back(ei);
      dfs(t, problem);
      path.pop_back();
      --visits[static_cast<std::size_t>(t)];
      if (out.size() >= max_paths) return;
    }
  };
  for (int s : nfa.initials) {
    ++visits[static_cast<std::size_t>(s)];
    dfs(s, nfa.problem_index(nfa.states[static_cast<std::size_t>(s)]));
    --visits[static_cast<std::size_t>(s)];
  }
  return out;
}

}  // namespace ts
