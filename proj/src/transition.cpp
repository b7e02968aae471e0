#include "tracesolve/transition.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tracesolve/structured.hpp"
#include "tracesolve/trace.hpp"

namespace ts {

const char* kind_name(LabelKind k) {
  switch (k) {
    case LabelKind::Substitution: return "substitution";
    case LabelKind::Compression: return "compression";
    case LabelKind::FinalCompression: return "final";
  }
  return "?";
}

std::string format_report(const Report& r) {
  std::string out;
  for (const auto& v : r) out += (out.empty() ? "" : "; ") + v.clause + ": " + v.detail;
  return out;
}

Word apply_map(const std::map<Sym, Word>& m, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Sym s : w) {
    auto it = m.find(s);
    if (it == m.end()) {
      out.push_back(s);
    } else {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

namespace {

Mask rho_of(const SymbolTable& t, const Word& w) {
  Mask r = 0;
  for (Sym s : w) r |= t.rho(s);
  return r;
}

bool same_info(const SymbolTable& a, const SymbolTable& b, Sym s) {
  return a.in_use(s) && b.in_use(s) && a.info(s).kind == b.info(s).kind && a.bar(s) == b.bar(s) &&
         a.rho(s) == b.rho(s);
}

std::set<Sym> symbols_of(const State& s, Kind k) {
  std::set<Sym> out;
  for (Sym x = 0; x < static_cast<Sym>(s.syms.size()); ++x)
    if (s.syms.in_use(x) && s.syms.info(x).kind == k) out.insert(x);
  return out;
}

// Commutation of two words in the monoid of a state (single-letter types are
// in the symbol table).
bool words_commute(const Word& x, const Word& y, const SymbolTable& t) {
  Word xy = x, yx = y;
  xy.insert(xy.end(), y.begin(), y.end());
  yx.insert(yx.end(), x.begin(), x.end());
  return trace_equal(xy, yx, t);
}

}  // namespace

Report validate_substitution(const State& from, const State& to, const TransitionLabel& label) {
  Report r;
  auto fail = [&](const std::string& c, const std::string& d) { r.push_back({c, d}); };
  if (label.kind != LabelKind::Substitution) fail("kind", "label is not a substitution");
  if (!label.endo.empty()) fail("endo", "substitutions carry the identity label");
  // Constants unchanged.
  const auto bf = symbols_of(from, Kind::Constant), bt = symbols_of(to, Kind::Constant);
  if (bf != bt) fail("constants", "B' differs from B");
  for (Sym c : bf) {
    if (!bt.count(c)) continue;
    if (!same_info(from.syms, to.syms, c) || from.mu.image(c) != to.mu.image(c))
      fail("constants", "letter " + from.name(c) + " changed");
    if (from.syms.theta(c) != to.syms.theta(c)) fail("types", "type of " + from.name(c) + " changed");
  }
  const auto xf = symbols_of(from, Kind::Variable), xt = symbols_of(to, Kind::Variable);
  long norm = 0;
  std::set<Sym> used_vars;
  for (Sym x : xf) {
    auto it = label.tau.find(x);
    Word img = it == label.tau.end() ? Word{x} : it->second;
    norm += static_cast<long>(img.size());
    for (Sym s : img) {
      if (!to.syms.in_use(s)) {
        fail("tau-alphabet", "image of " + from.name(x) + " uses an unknown symbol");
        return r;
      }
      if (to.syms.is_variable(s)) used_vars.insert(s);
    }
    if (it == label.tau.end()) {
      if (!xt.count(x) || !same_info(from.syms, to.syms, x) || from.mu.image(x) != to.mu.image(x) ||
          from.syms.theta(x) != to.syms.theta(x))
        fail("tau-identity", "unlisted variable " + from.name(x) + " changed");
      continue;
    }
    // Shape: empty or X* B+ X*.
    if (!img.empty()) {
      std::size_t i = 0;
      while (i < img.size() && to.syms.is_variable(img[i])) ++i;
      std::size_t j = i;
      while (j < img.size() && to.syms.is_constant(img[j])) ++j;
      std::size_t k = j;
      while (k < img.size() && to.syms.is_variable(img[k])) ++k;
      if (j == i || k != img.size()) fail("tau-shape", "image of " + from.name(x) + " is not in X*B+X*");
    }
    const Sym xb = from.syms.bar(x);
    auto jt = label.tau.find(xb);
    if (jt == label.tau.end() || jt->second != involute_word(img, to.syms))
      fail("tau-involution", "image of " + from.name(xb) + " is not the involution");
    if (!subset(rho_of(to.syms, img), from.syms.rho(x)))
      fail("tau-resources", "rho(tau(" + from.name(x) + ")) is not inside rho(" + from.name(x) + ")");
    if (to.mu.eval(img) != from.mu.image(x)) fail("tau-constraint", "mu(tau(" + from.name(x) + ")) differs");
    const Sym y = from.syms.theta(x);
    if (y != kNone) {
      for (Sym s : img)
        if (s != y && !(to.syms.is_variable(s) && to.syms.theta(s) == y))
          fail("tau-type", "image of typed " + from.name(x) + " leaves y*");
      if (!words_commute(img, Word{y}, to.syms)) fail("tau-type", "image of typed variable does not commute");
    }
  }
  for (Sym x : xt)
    if (!used_vars.count(x)) fail("variables", "variable " + to.name(x) + " does not come from tau");
  if (norm > from.problem().c_budget()) fail("norm-budget", "norm of tau exceeds the budget");
  Word tw;
  for (Sym s : from.W) {
    auto it = label.tau.find(s);
    if (it == label.tau.end()) {
      tw.push_back(s);
    } else {
      tw.insert(tw.end(), it->second.begin(), it->second.end());
    }
  }
  if (!trace_equal(tw, to.W, to.syms)) fail("equation", "W' is not tau(W)");
  if (to.W == from.W && to.syms == from.syms) fail("nontrivial", "tau is the identity");
  const std::string wf = to.check_well_formed();
  if (!wf.empty()) fail("well-formed", wf);
  return r;
}

Report validate_compression(const State& from, const State& to, const TransitionLabel& label) {
  Report r;
  auto fail = [&](const std::string& c, const std::string& d) { r.push_back({c, d}); };
  const bool final = label.kind == LabelKind::FinalCompression;
  if (label.kind == LabelKind::Substitution) fail("kind", "label is a substitution");
  if (!label.tau.empty()) fail("tau", "compressions carry no variable map");
  const Problem& p = from.problem();
  const auto bf = symbols_of(from, Kind::Constant), bt = symbols_of(to, Kind::Constant);
  const bool grow = std::includes(bt.begin(), bt.end(), bf.begin(), bf.end());
  const bool shrink = std::includes(bf.begin(), bf.end(), bt.begin(), bt.end());
  if (!grow && !shrink) fail("alphabet", "neither B <= B' nor B' <= B");
  for (auto& [c, img] : label.endo) {
    if (!bt.count(c)) fail("endo-domain", "h is defined on a symbol outside B'");
    if (p.in_a(c)) fail("endo-fixes-A", "h moves a letter of A");
    if (img.empty() && !(final && p.is_distinguished(c))) fail("endo-erasing", "h erases " + to.name(c));
    for (Sym s : img)
      if (!bf.count(s)) fail("endo-range", "image of " + to.name(c) + " leaves B");
  }
  if (!r.empty()) return r;
  for (Sym c : bt) {
    auto it = label.endo.find(c);
    if (it == label.endo.end()) {
      if (!bf.count(c)) {
        fail("endo-domain", "new letter " + to.name(c) + " has no image");
        continue;
      }
      if (!same_info(from.syms, to.syms, c) || from.mu.image(c) != to.mu.image(c))
        fail("endo-identity", "letter " + to.name(c) + " fixed by h changed");
      continue;
    }
    const Word& img = it->second;
    const Sym cb = to.syms.bar(c);
    if (cb == c && !p.in_a(c)) fail("self-involuting", "letter " + to.name(c) + " is self-involuting");
    auto jt = label.endo.find(cb);
    const Word bimg = jt == label.endo.end() ? Word{cb} : jt->second;
    if (!trace_equal(bimg, involute_word(img, from.syms), from.syms))
      fail("endo-involution", "h(bar " + to.name(c) + ") is not the involution");
    if (!subset(rho_of(from.syms, img), to.syms.rho(c))) fail("endo-resources", "rho(h(" + to.name(c) + ")) too large");
    if (from.mu.eval(img) != to.mu.image(c)) fail("endo-constraint", "mu'(" + to.name(c) + ") != mu(h)");
  }
  // Variables and their data are preserved.
  const auto xf = symbols_of(from, Kind::Variable), xt = symbols_of(to, Kind::Variable);
  if (xf != xt) fail("variables", "compression changed the variables");
  for (Sym x : xf) {
    if (!xt.count(x)) continue;
    if (!same_info(from.syms, to.syms, x) || from.mu.image(x) != to.mu.image(x) ||
        from.syms.theta(x) != to.syms.theta(x))
      fail("variables", "variable " + from.name(x) + " changed");
    const Sym y = to.syms.theta(x);
    if (y != kNone) {
      const Word hy = apply_map(label.endo, Word{y});
      for (Sym s : hy)
        if (s != y) fail("type-image", "h(" + to.name(y) + ") is not a power of itself");
    }
  }
  // Types in the target map to commuting images.
  for (Sym c = 0; c < static_cast<Sym>(to.syms.size()); ++c) {
    if (!to.syms.in_use(c) || to.syms.theta(c) == kNone) continue;
    const Sym y = to.syms.theta(c);
    if (!words_commute(apply_map(label.endo, Word{c}), apply_map(label.endo, Word{y}), from.syms))
      fail("type-morphism", "images of " + to.name(c) + " and its type do not commute");
  }
  {
    TypeRelation th;
    for (Sym c = 0; c < static_cast<Sym>(to.syms.size()); ++c)
      if (to.syms.in_use(c) && to.syms.is_constant(c) && to.syms.theta(c) != kNone)
        th.add(Word{c}, Word{to.syms.theta(c)});
    SymbolTable marked = to.syms;
    for (Sym c = 0; c < static_cast<Sym>(marked.size()); ++c)
      if (marked.in_use(c) && !p.in_a(c)) marked.info_mut(c).base = kNone;
    for (const auto& v : validate_type(th, marked)) fail("type-" + v.clause, v.detail);
  }
  if (!trace_equal(apply_map(label.endo, to.W), from.W, from.syms)) fail("equation", "W is not h(W')");
  if (to.W == from.W && to.syms == from.syms && to.mu == from.mu) fail("nontrivial", "h is the identity");
  long norm = 0;
  for (auto& [c, img] : label.endo) norm += static_cast<long>(img.size());
  if (norm > p.c_budget()) fail("norm-budget", "norm of h exceeds the budget");
  if (!final && !(to.weight() < from.weight()))
    fail("weight", from.weight().str() + " -> " + to.weight().str() + " is not decreasing");
  const std::string wf = to.check_well_formed();
  if (!wf.empty()) fail("well-formed", wf);
  return r;
}

Report validate_transition(const State& from, const State& to, const TransitionLabel& label) {
  return label.kind == LabelKind::Substitution ? validate_substitution(from, to, label)
                                               : validate_compression(from, to, label);
}

Solution pull_back(const State& from, const TransitionLabel& label, const Solution& target_sol) {
  Solution out;
  for (Sym x : from.variables()) {
    auto it = label.tau.find(x);
    const Word img = it == label.tau.end() ? Word{x} : it->second;
    Word w;
    for (Sym s : img) {
      auto jt = target_sol.sigma.find(s);
      if (jt != target_sol.sigma.end()) {
        w.insert(w.end(), jt->second.begin(), jt->second.end());
      } else {
        w.push_back(s);
      }
    }
    out.sigma[x] = apply_map(label.endo, w);
  }
  // alpha of a source constant is read off a target letter mapped onto it.
  const Problem& p = from.problem();
  for (Sym c : from.constants()) {
    if (p.in_a(c)) continue;
    auto jt = target_sol.alpha.find(c);
    if (!label.endo.count(c) && jt != target_sol.alpha.end()) out.alpha[c] = jt->second;
  }
  for (auto& [d, img] : label.endo) {
    auto jt = target_sol.alpha.find(d);
    if (img.size() == 1 && !p.in_a(img[0]) && jt != target_sol.alpha.end()) out.alpha[img[0]] = jt->second;
  }
  return out;
}

std::map<Sym, Word> close_tau(const State& work, const std::map<Sym, Word>& tau) {
  std::map<Sym, Word> out = tau;
  for (auto& [x, img] : tau) out[work.syms.bar(x)] = involute_word(img, work.syms);
  return out;
}

State make_substitution_target(const State& from, State work, const std::map<Sym, Word>& tau) {
  Word w;
  for (Sym s : from.W) {
    auto it = tau.find(s);
    if (it == tau.end()) {
      w.push_back(s);
    } else {
      w.insert(w.end(), it->second.begin(), it->second.end());
    }
  }
  std::set<Sym> kept;
  for (Sym s : w)
    if (work.syms.is_variable(s)) kept.insert(s);
  for (auto& [x, img] : tau) {
    (void)img;
    if (!kept.count(x) && work.syms.in_use(x) && x < work.syms.bar(x)) work.remove_pair(x);
  }
  work.W = w;
  work.normalize();
  return work;
}

FinalResult final_transition(const State& s) {
  const Problem& p = s.problem();
  if (s.has_variables()) throw Error("final transition needs a variable-free state");
  const Sym hash = p.alphabet.marker();
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
  State t = s;
  TransitionLabel label;
  label.kind = LabelKind::FinalCompression;
  label.note = "final";
  for (int i = 0; i < p.k; ++i) {
    const Sym c = p.distinguished[static_cast<std::size_t>(i)];
    const Word& blk = segs[static_cast<std::size_t>(i)];
    Mask rho = 0;
    for (Sym a : blk) rho |= s.syms.rho(a);
    if (rho == 0) rho = p.alphabet.full();
    SymInfo si;
    si.kind = Kind::Constant;
    si.rho = rho;
    si.bar = c + 1;
    t.syms.set(c, si);
    si.bar = c;
    t.syms.set(c + 1, si);
    const int mv = s.mu.eval(blk);
    t.mu.set(c, mv);
    t.mu.set(c + 1, s.mu.target().inv(mv));
    label.endo[c] = blk;
    label.endo[c + 1] = involute_word(blk, s.syms);
    segs[static_cast<std::size_t>(i)] = Word{c};
    segs[m - 1 - static_cast<std::size_t>(i)] = Word{c + 1};
  }
  Word w{hash};
  for (const Word& sg : segs) {
    w.insert(w.end(), sg.begin(), sg.end());
    w.push_back(hash);
  }
  t.W = w;
  t.normalize();
  return {t, label};
}

std::vector<Word> apply_to_distinguished(const std::vector<const TransitionLabel*>& path,
                                         const std::vector<Sym>& letters) {
  std::vector<Word> out;
  for (Sym c : letters) {
    Word w{c};
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      if ((*it)->kind != LabelKind::Substitution) w = apply_map((*it)->endo, w);
    out.push_back(w);
  }
  return out;
}

TransitionLabel conjugate_label(const TransitionLabel& l, const State& from, const Renaming& src, const State& to,
                                const Renaming& dst) {
  auto ms = [&](Sym x) {
    auto it = src.find(x);
    return it == src.end() ? x : it->second;
  };
  auto md = [&](Sym x) {
    auto it = dst.find(x);
    return it == dst.end() ? x : it->second;
  };
  TransitionLabel out;
  out.kind = l.kind;
  out.note = l.note;
  for (auto& [c, img] : l.endo) {
    Word w;
    for (Sym s : img) w.push_back(ms(s));
    out.endo[md(c)] = w;
  }
  for (auto& [x, img] : l.tau) {
    Word w;
    for (Sym s : img) w.push_back(md(s));
    out.tau[ms(x)] = w;
  }
  // Implicit identities become explicit where the two renamings disagree.
  for (Sym c : to.constants())
    if (!l.endo.count(c) && md(c) != ms(c)) out.endo[md(c)] = {ms(c)};
  for (Sym x : from.variables())
    if (!l.tau.count(x) && to.syms.in_use(x) && ms(x) != md(x)) out.tau[ms(x)] = {md(x)};
  return out;
}

std::string label_summary(const State& from, const State& to, const TransitionLabel& l) {
  std::ostringstream os;
  os << kind_name(l.kind);
  if (!l.note.empty()) os << "[" << l.note << "]";
  bool first = true;
  for (auto& [x, img] : l.tau) {
    if (from.syms.bar(x) < x) continue;
    os << (first ? " " : ", ") << from.name(x) << "->" << to.show(img);
    first = false;
  }
  for (auto& [c, img] : l.endo) {
    if (to.syms.bar(c) < c && to.syms.bar(c) != kNone && l.endo.count(to.syms.bar(c))) continue;
    os << (first ? " " : ", ") << to.name(c) << "->" << from.show(img);
    first = false;
  }
  return os.str();
}

}  // namespace ts
