#include "tracesolve/group.hpp"

#include <algorithm>
#include <map>

#include "tracesolve/trace.hpp"

namespace ts {

namespace {

constexpr std::size_t kMaxTasks = 4096;

FiniteMonoid instance_monoid(const Instance& inst) {
  FiniteMonoid m(inst.n_elements, inst.mult, inst.inv, inst.unit,
                 inst.zero >= 0 ? std::optional<int>(inst.zero) : std::nullopt);
  m.set_names(inst.element_names);
  return m;
}

int eval(const FiniteMonoid& m, const std::vector<int>& image, const Word& w) {
  int x = m.unit();
  for (Sym a : w) x = m.mul(x, image.at(static_cast<std::size_t>(a)));
  return x;
}

Word substitute(const Word& w, Sym var_base, const std::vector<Word>& values, const SymbolTable& t) {
  Word out;
  for (Sym s : w) {
    if (s < var_base) {
      out.push_back(s);
      continue;
    }
    const Word& v = values.at(static_cast<std::size_t>((s - var_base) / 2));
    const Word img = (s - var_base) % 2 == 0 ? v : involute_word(v, t);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

// Groups seeds by the constraint values of all their variables; each group
// becomes one task.
Encoding finish(EngineSpec spec, const std::vector<std::vector<Word>>& values, const Budgets& budgets) {
  std::map<std::vector<int>, std::vector<std::size_t>> by_key;
  const int n = static_cast<int>(spec.var_names.size());
  for (std::size_t s = 0; s < values.size(); ++s) {
    std::vector<int> key;
    for (int i = 0; i < n; ++i) key.push_back(eval(spec.monoid, spec.letter_mu, values[s][static_cast<std::size_t>(i)]));
    by_key[key].push_back(s);
  }
  if (by_key.size() > kMaxTasks) throw Error("too many candidate constraint vectors (cap 4096)");
  Encoding enc;
  for (auto& [key, seeds] : by_key) {
    spec.var_mu = key;
    enc.tasks.push_back(make_task(spec, budgets));
    const int t = static_cast<int>(enc.tasks.size()) - 1;
    for (std::size_t s : seeds) enc.seeds.push_back({t, task_solution(enc.tasks.back(), values[s])});
  }
  return enc;
}

// Splits u v (both reduced) into u = P Q, v = Qbar R with P R the reduced
// form of u v.
void cancel(const Word& u, const Word& v, const SymbolTable& t, Word& p, Word& q, Word& r) {
  std::vector<char> gone_u(u.size(), 0), gone_v(v.size(), 0);
  auto rest = [](const Word& w, const std::vector<char>& gone, bool keep_gone) {
    Word out;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (static_cast<bool>(gone[i]) == keep_gone) out.push_back(w[i]);
    return out;
  };
  auto index_map = [](const std::vector<char>& gone) {
    std::vector<int> m;
    for (std::size_t i = 0; i < gone.size(); ++i)
      if (!gone[i]) m.push_back(static_cast<int>(i));
    return m;
  };
  for (bool changed = true; changed;) {
    changed = false;
    const Word pu = rest(u, gone_u, false), rv = rest(v, gone_v, false);
    const auto mu = index_map(gone_u), mv = index_map(gone_v);
    for (int i : max_positions(pu, t)) {
      for (int k : min_positions(rv, t)) {
        if (rv[static_cast<std::size_t>(k)] != t.bar(pu[static_cast<std::size_t>(i)])) continue;
        gone_u[static_cast<std::size_t>(mu[static_cast<std::size_t>(i)])] = 1;
        gone_v[static_cast<std::size_t>(mv[static_cast<std::size_t>(k)])] = 1;
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
  p = rest(u, gone_u, false);
  q = rest(u, gone_u, true);
  r = rest(v, gone_v, false);
}

}  // namespace

Encoding encode_group(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets) {
  const SymbolTable& lt = inst.alphabet.table();
  std::vector<Sym> letters;
  for (Sym a = 1; a < inst.alphabet.size(); ++a) letters.push_back(a);
  const ReductionMonoid red = build_reduction_monoid(lt, letters);

  EngineSpec spec;
  spec.alphabet = inst.alphabet;
  const FiniteMonoid n = instance_monoid(inst);
  spec.monoid = product_monoid(n, red.monoid);
  const int nb = red.monoid.size();
  spec.letter_mu.assign(static_cast<std::size_t>(inst.alphabet.size()), spec.monoid.unit());
  for (Sym a : letters)
    spec.letter_mu[static_cast<std::size_t>(a)] = inst.letter_mu[static_cast<std::size_t>(a)] * nb +
                                                  red.image[static_cast<std::size_t>(a)];

  // y_1 ... y_n = 1 with y = U Vbar, triangulated through the prefixes
  // Z_j = P_j R_j:  y_j = Qbar_j R_j  and  P_{j-1} R_{j-1} = P_j Q_j.
  const Word y = [&] {
    Word w = inst.lhs;
    const Word vb = involute_word(inst.rhs, inst.table);
    w.insert(w.end(), vb.begin(), vb.end());
    return w;
  }();
  const int len = static_cast<int>(y.size());
  const Sym base = inst.alphabet.size();
  spec.k = inst.k();
  for (const auto& v : inst.variables) {
    spec.var_names.push_back(v.name);
    spec.var_rho.push_back(v.rho);
  }
  std::map<std::string, int> aux;  // "P3" -> variable index
  auto aux_var = [&](char kind, int j) {
    const std::string name = std::string(1, kind) + std::to_string(j);
    auto it = aux.find(name);
    if (it != aux.end()) return it->second;
    const int idx = static_cast<int>(spec.var_names.size());
    spec.var_names.push_back("_" + name);
    spec.var_rho.push_back(inst.alphabet.full());
    aux[name] = idx;
    return idx;
  };
  auto vsym = [&](int idx, bool bar) { return base + 2 * idx + (bar ? 1 : 0); };
  // P_1 = Q_1 = 1 and P_n = R_n = 1.
  auto has_p = [&](int j) { return j > 1 && j < len; };
  auto has_q = [&](int j) { return j > 1; };
  auto has_r = [&](int j) { return j < len; };
  Word u, v;
  auto sep = [&] {
    if (!u.empty() || !v.empty()) {
      u.push_back(0);
      v.push_back(0);
    }
  };
  for (int j = 1; j <= len; ++j) {
    sep();
    u.push_back(y[static_cast<std::size_t>(j - 1)]);
    if (has_q(j)) v.push_back(vsym(aux_var('Q', j), true));
    if (has_r(j)) v.push_back(vsym(aux_var('R', j), false));
  }
  for (int j = 2; j <= len; ++j) {
    sep();
    if (has_p(j - 1)) u.push_back(vsym(aux_var('P', j - 1), false));
    if (has_r(j - 1)) u.push_back(vsym(aux_var('R', j - 1), false));
    if (has_p(j)) v.push_back(vsym(aux_var('P', j), false));
    if (has_q(j)) v.push_back(vsym(aux_var('Q', j), false));
  }
  spec.u = u;
  spec.v = v;

  std::vector<std::vector<Word>> values;
  for (const Tuple& t : sols) {
    std::vector<Word> val(spec.var_names.size());
    for (int i = 0; i < inst.k(); ++i) val[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)];
    Word z;
    for (int j = 1; j <= len; ++j) {
      const Word yj = normal_form(substitute({y[static_cast<std::size_t>(j - 1)]}, base, t, inst.table), lt);
      Word p, q, r;
      cancel(z, yj, lt, p, q, r);
      if (has_p(j)) val[static_cast<std::size_t>(aux.at("P" + std::to_string(j)))] = p;
      if (has_q(j)) val[static_cast<std::size_t>(aux.at("Q" + std::to_string(j)))] = q;
      if (has_r(j)) val[static_cast<std::size_t>(aux.at("R" + std::to_string(j)))] = r;
      z = p;
      z.insert(z.end(), r.begin(), r.end());
      z = normal_form(z, lt);
    }
    if (!z.empty()) throw Error("group encoding: seed tuple does not solve the equation");
    values.push_back(std::move(val));
  }
  Encoding enc = finish(std::move(spec), values, budgets);
  enc.decode = [lt](const Tuple& t) {
    Tuple out;
    for (const Word& w : t) out.push_back(normal_form(w, lt));
    return out;
  };
  enc.description = "group: " + std::to_string(aux.size()) + " auxiliary variables, " +
                    std::to_string(enc.tasks.size()) + " candidate(s)";
  return enc;
}

namespace {

// Constraint recognizing, on one resource, the projections of images of
// iota: every s+ is directly followed by s- and every s- directly preceded
// by s+. Elements: 0 unit, 1 zero, 2 + p * (m + 1) + s for a word starting
// with the s_p- (p > 0) and ending with s_s+ (s > 0).
FiniteMonoid pairing_monoid(int m) {
  const int side = m + 1;
  const int n = 2 + side * side;
  auto pair_id = [&](int p, int s) { return 2 + p * side + s; };
  std::vector<int> mult(static_cast<std::size_t>(n) * n, 1), inv(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    mult[static_cast<std::size_t>(x)] = x;
    mult[static_cast<std::size_t>(x) * n] = x;
  }
  for (int p1 = 0; p1 < side; ++p1)
    for (int s1 = 0; s1 < side; ++s1)
      for (int p2 = 0; p2 < side; ++p2)
        for (int s2 = 0; s2 < side; ++s2)
          if (s1 == p2) mult[static_cast<std::size_t>(pair_id(p1, s1)) * n + pair_id(p2, s2)] = pair_id(p1, s2);
  inv[0] = 0;
  inv[1] = 1;
  for (int p = 0; p < side; ++p)
    for (int s = 0; s < side; ++s) inv[static_cast<std::size_t>(pair_id(p, s))] = pair_id(s, p);
  FiniteMonoid out(n, std::move(mult), std::move(inv), 0, 1);
  std::vector<std::string> names{"1", "0"};
  for (int p = 0; p < side; ++p)
    for (int s = 0; s < side; ++s) names.push_back("[" + std::to_string(p) + "|" + std::to_string(s) + "]");
  out.set_names(std::move(names));
  return out;
}

}  // namespace

Encoding encode_self_involuting(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets) {
  const SymbolTable& ot = inst.alphabet.table();
  ResourceAlphabet na(inst.resources);
  std::vector<Word> iota(static_cast<std::size_t>(inst.alphabet.size()));
  std::vector<Sym> self;  // original self-involuting letters
  std::vector<Sym> back(1, kNone);
  for (Sym a : inst.alphabet.base_letters()) {
    const Sym ab = ot.bar(a);
    if (ab < a) continue;
    if (ab == a) {
      const Sym c = na.add_base_pair(inst.alphabet.name(a) + "+", inst.alphabet.name(a) + "-", ot.rho(a));
      iota[static_cast<std::size_t>(a)] = {c, c + 1};
      self.push_back(a);
    } else {
      const Sym c = na.add_base_pair(inst.alphabet.name(a), inst.alphabet.name(ab), ot.rho(a));
      iota[static_cast<std::size_t>(a)] = {c};
      iota[static_cast<std::size_t>(ab)] = {c + 1};
    }
  }
  const Sym new_size = na.size();
  back.assign(static_cast<std::size_t>(new_size), kNone);
  std::vector<int> nu(static_cast<std::size_t>(new_size), inst.unit);
  for (Sym a = 1; a < inst.alphabet.size(); ++a) {
    const Word& w = iota[static_cast<std::size_t>(a)];
    back[static_cast<std::size_t>(w[0])] = a;
    nu[static_cast<std::size_t>(w[0])] = inst.letter_mu[static_cast<std::size_t>(a)];
  }

  // N x N^T carries the constraint; one pairing factor per resource used
  // by a self-involuting letter.
  const FiniteMonoid n = instance_monoid(inst);
  const int k = n.size();
  FiniteMonoid m = dual_product(n);
  std::vector<int> image(static_cast<std::size_t>(new_size), m.unit());
  for (Sym x = 1; x < new_size; ++x)
    image[static_cast<std::size_t>(x)] =
        nu[static_cast<std::size_t>(x)] * k + nu[static_cast<std::size_t>(na.table().bar(x))];
  for (int r = 0; r < na.resource_count(); ++r) {
    std::vector<Sym> here;
    for (Sym s : self)
      if (ot.rho(s) & (Mask{1} << r)) here.push_back(s);
    if (here.empty()) continue;
    const FiniteMonoid pm = pairing_monoid(static_cast<int>(here.size()));
    const int side = static_cast<int>(here.size()) + 1, np = pm.size();
    for (Sym x = 1; x < new_size; ++x) {
      int e = 0;
      if (na.table().rho(x) & (Mask{1} << r)) {
        e = 2;  // (none, none)
        for (std::size_t i = 0; i < here.size(); ++i) {
          const Sym plus = iota[static_cast<std::size_t>(here[i])][0];
          if (x == plus) e = 2 + static_cast<int>(i + 1);
          if (x == plus + 1) e = 2 + static_cast<int>(i + 1) * side;
        }
      }
      image[static_cast<std::size_t>(x)] = image[static_cast<std::size_t>(x)] * np + e;
    }
    m = product_monoid(m, pm);
  }

  EngineSpec spec;
  spec.alphabet = na;
  spec.monoid = m;
  spec.letter_mu = image;
  spec.k = inst.k();
  for (const auto& v : inst.variables) {
    spec.var_names.push_back(v.name);
    spec.var_rho.push_back(v.rho);
  }
  auto map_word = [&](const Word& w) {
    Word out;
    for (Sym s : w) {
      if (inst.is_var(s)) {
        out.push_back(s - inst.alphabet.size() + new_size);
      } else {
        const Word& i = iota[static_cast<std::size_t>(s)];
        out.insert(out.end(), i.begin(), i.end());
      }
    }
    return out;
  };
  spec.u = map_word(inst.lhs);
  spec.v = map_word(inst.rhs);

  std::vector<std::vector<Word>> values;
  for (const Tuple& t : sols) {
    std::vector<Word> val;
    for (const Word& w : t) val.push_back(normal_form(map_word(w), na.table()));
    values.push_back(std::move(val));
  }
  Encoding enc = finish(std::move(spec), values, budgets);
  enc.length_factor = 2;
  enc.decode = [back, ot](const Tuple& t) {
    Tuple out;
    for (const Word& w : t) {
      Word d;
      for (Sym x : w)
        if (back.at(static_cast<std::size_t>(x)) != kNone) d.push_back(back[static_cast<std::size_t>(x)]);
      out.push_back(normal_form(d, ot));
    }
    return out;
  };
  enc.description = "self-involuting letters split; " + std::to_string(enc.tasks.size()) + " candidate(s)";
  return enc;
}

}  // namespace ts
