#include "tracesolve/monoid.hpp"

#include <map>
#include <queue>
#include <tuple>

namespace ts {

FiniteMonoid::FiniteMonoid(int size, std::vector<int> mult, std::vector<int> inv, int unit,
                           std::optional<int> zero)
    : n_(size), mult_(std::move(mult)), inv_(std::move(inv)), unit_(unit), zero_(zero) {
  if (n_ <= 0) throw Error("monoid must have at least one element");
  if (mult_.size() != static_cast<std::size_t>(n_) * n_) throw Error("multiplication table has wrong size");
  if (inv_.size() != static_cast<std::size_t>(n_)) throw Error("involution table has wrong size");
  for (int v : mult_)
    if (v < 0 || v >= n_) throw Error("multiplication table entry out of range");
  for (int v : inv_)
    if (v < 0 || v >= n_) throw Error("involution table entry out of range");
  if (unit_ < 0 || unit_ >= n_) throw Error("unit out of range");
  if (zero_ && (*zero_ < 0 || *zero_ >= n_)) throw Error("zero out of range");
  factor_sizes_ = {n_};
  factor_zeros_ = {zero_};
}

FiniteMonoid FiniteMonoid::trivial() { return FiniteMonoid(1, {0}, {0}, 0); }

std::string FiniteMonoid::name(int x) const {
  if (static_cast<std::size_t>(x) < names_.size()) return names_[x];
  return std::to_string(x);
}

int FiniteMonoid::component(int x, std::size_t factor) const {
  int rest = x;
  for (std::size_t f = factor_sizes_.size(); f-- > 0;) {
    const int c = rest % factor_sizes_[f];
    rest /= factor_sizes_[f];
    if (f == factor) return c;
  }
  return -1;
}

bool FiniteMonoid::is_zero_like(int x) const {
  if (is_zero(x)) return true;
  for (std::size_t f = 0; f < factor_sizes_.size(); ++f)
    if (factor_zeros_[f] && component(x, f) == *factor_zeros_[f]) return true;
  return false;
}

void FiniteMonoid::validate() const {
  for (int x = 0; x < n_; ++x) {
    if (mul(unit_, x) != x || mul(x, unit_) != x)
      throw Error("unit is not neutral for element " + name(x));
    if (inv(inv(x)) != x) throw Error("involution is not involutive at " + name(x));
  }
  if (inv(unit_) != unit_) throw Error("involution does not fix the unit");
  if (zero_) {
    for (int x = 0; x < n_; ++x)
      if (mul(*zero_, x) != *zero_ || mul(x, *zero_) != *zero_)
        throw Error("zero is not absorbing for element " + name(x));
  }
  if (n_ <= 256) {
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y) {
        const int xy = mul(x, y);
        if (inv(xy) != mul(inv(y), inv(x)))
          throw Error("involution is not an anti-automorphism at (" + name(x) + "," + name(y) + ")");
        for (int z = 0; z < n_; ++z)
          if (mul(xy, z) != mul(x, mul(y, z)))
            throw Error("multiplication is not associative at (" + name(x) + "," + name(y) + "," +
                        name(z) + ")");
      }
  }
}

FiniteMonoid product_monoid(const FiniteMonoid& a, const FiniteMonoid& b) {
  const int na = a.size(), nb = b.size();
  const int n = na * nb;
  std::vector<int> mult(static_cast<std::size_t>(n) * n), inv(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    const int xa = x / nb, xb = x % nb;
    inv[x] = a.inv(xa) * nb + b.inv(xb);
    for (int y = 0; y < n; ++y) mult[static_cast<std::size_t>(x) * n + y] = a.mul(xa, y / nb) * nb + b.mul(xb, y % nb);
  }
  std::optional<int> zero;
  if (a.zero() && b.zero()) zero = *a.zero() * nb + *b.zero();
  FiniteMonoid out(n, std::move(mult), std::move(inv), a.unit() * nb + b.unit(), zero);
  out.factor_sizes_.clear();
  out.factor_zeros_.clear();
  for (std::size_t f = 0; f < a.factor_sizes_.size(); ++f) {
    out.factor_sizes_.push_back(a.factor_sizes_[f]);
    out.factor_zeros_.push_back(a.factor_zeros_[f]);
  }
  for (std::size_t f = 0; f < b.factor_sizes_.size(); ++f) {
    out.factor_sizes_.push_back(b.factor_sizes_[f]);
    out.factor_zeros_.push_back(b.factor_zeros_[f]);
  }
  std::vector<std::string> names(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) names[x] = "(" + a.name(x / nb) + "," + b.name(x % nb) + ")";
  out.set_names(std::move(names));
  return out;
}

FiniteMonoid dual_product(const FiniteMonoid& m, int budget) {
  const int k = m.size();
  if (static_cast<long>(k) * k > budget) throw Error("dual product exceeds the element budget");
  const int n = k * k;
  std::vector<int> mult(static_cast<std::size_t>(n) * n), inv(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    const int x = p / k, y = p % k;
    inv[p] = y * k + x;
    for (int q = 0; q < n; ++q) {
      const int x2 = q / k, y2 = q % k;
      mult[static_cast<std::size_t>(p) * n + q] = m.mul(x, x2) * k + m.mul(y2, y);
    }
  }
  std::optional<int> zero;
  if (m.zero()) zero = *m.zero() * k + *m.zero();
  FiniteMonoid out(n, std::move(mult), std::move(inv), m.unit() * k + m.unit(), zero);
  std::vector<std::string> names(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) names[p] = "(" + m.name(p / k) + "," + m.name(p % k) + "^T)";
  out.set_names(std::move(names));
  return out;
}

FiniteMonoid adjoin_zero(const FiniteMonoid& m) {
  const int k = m.size();
  const int n = k + 1;
  std::vector<int> mult(static_cast<std::size_t>(n) * n, k), inv(static_cast<std::size_t>(n));
  for (int x = 0; x < k; ++x) {
    inv[x] = m.inv(x);
    for (int y = 0; y < k; ++y) mult[static_cast<std::size_t>(x) * n + y] = m.mul(x, y);
  }
  inv[k] = k;
  FiniteMonoid out(n, std::move(mult), std::move(inv), m.unit(), k);
  std::vector<std::string> names;
  for (int x = 0; x < k; ++x) names.push_back(m.name(x));
  names.push_back("0#");
  out.set_names(std::move(names));
  return out;
}

std::pair<FiniteMonoid, std::vector<int>> generated_submonoid(const FiniteMonoid& m,
                                                              const std::vector<int>& gens) {
  std::vector<int> map(static_cast<std::size_t>(m.size()), -1);
  std::vector<int> elems;
  auto add = [&](int x) {
    if (map[x] < 0) {
      map[x] = static_cast<int>(elems.size());
      elems.push_back(x);
    }
  };
  add(m.unit());
  if (m.zero()) add(*m.zero());
  std::vector<int> g;
  for (int x : gens) {
    g.push_back(x);
    g.push_back(m.inv(x));
  }
  for (int x : g) add(x);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (int y : g) {
      add(m.mul(elems[i], y));
      add(m.mul(y, elems[i]));
    }
  const int n = static_cast<int>(elems.size());
  std::vector<int> mult(static_cast<std::size_t>(n) * n), inv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    inv[i] = map[m.inv(elems[i])];
    for (int j = 0; j < n; ++j) {
      const int p = map[m.mul(elems[i], elems[j])];
      if (p < 0) throw Error("generated submonoid is not closed");
      mult[static_cast<std::size_t>(i) * n + j] = p;
    }
  }
  std::optional<int> zero;
  if (m.zero()) zero = map[*m.zero()];
  FiniteMonoid out(n, std::move(mult), std::move(inv), map[m.unit()], zero);
  std::vector<std::string> names;
  for (int x : elems) names.push_back(m.name(x));
  out.set_names(std::move(names));
  return {std::move(out), std::move(map)};
}

int ConstraintMorphism::image(Sym s) const {
  if (!has(s)) throw Error("symbol " + std::to_string(s) + " has no constraint image");
  return image_[static_cast<std::size_t>(s)];
}

void ConstraintMorphism::set(Sym s, int e) {
  if (s < 0) throw Error("negative symbol");
  if (e < 0 || e >= target_->size()) throw Error("constraint image out of range");
  if (static_cast<std::size_t>(s) >= image_.size()) image_.resize(static_cast<std::size_t>(s) + 1, -1);
  image_[static_cast<std::size_t>(s)] = e;
}

void ConstraintMorphism::erase(Sym s) {
  if (static_cast<std::size_t>(s) < image_.size()) image_[static_cast<std::size_t>(s)] = -1;
  while (!image_.empty() && image_.back() < 0) image_.pop_back();
}

int ConstraintMorphism::eval(const Word& w) const {
  int acc = target_->unit();
  for (Sym s : w) acc = target_->mul(acc, image(s));
  return acc;
}

void ConstraintMorphism::validate(const SymbolTable& t) const {
  std::vector<Sym> syms;
  for (Sym s = 0; s < static_cast<Sym>(t.size()); ++s)
    if (t.in_use(s)) syms.push_back(s);
  for (Sym s : syms) {
    if (!has(s)) throw Error("symbol " + std::to_string(s) + " has no constraint image");
    if (image(t.bar(s)) != target_->inv(image(s)))
      throw Error("constraint does not respect the involution at symbol " + std::to_string(s));
  }
  for (Sym x : syms)
    for (Sym y : syms) {
      if (y <= x || !t.independent(x, y)) continue;
      const int ix = image(x), iy = image(y);
      if (target_->mul(ix, iy) != target_->mul(iy, ix))
        throw Error("images of commuting symbols " + std::to_string(x) + " and " + std::to_string(y) +
                    " do not commute");
    }
}

ReductionMonoid build_reduction_monoid(const SymbolTable& t, const std::vector<Sym>& letters,
                                       int budget) {
  if (letters.size() > 64) throw Error("reduction monoid supports at most 64 letters");
  std::map<Sym, int> idx;
  for (std::size_t i = 0; i < letters.size(); ++i) idx[letters[i]] = static_cast<int>(i);
  for (Sym a : letters)
    if (!idx.count(t.bar(a))) throw Error("letter set for the reduction monoid is not closed under bar");
  using Elem = std::tuple<std::uint64_t, Mask, std::uint64_t>;
  std::vector<Elem> elems;
  std::map<Elem, int> id;
  // id 0: unit, id 1: zero.
  elems.push_back({0, 0, 0});
  id[elems[0]] = 0;
  elems.push_back({~std::uint64_t{0}, 0, ~std::uint64_t{0}});
  const int zero = 1;
  auto letter_mask = [&](std::uint64_t m, Mask s) {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < letters.size(); ++i)
      if (((m >> i) & 1u) && (t.rho(letters[i]) & s) == 0) out |= std::uint64_t{1} << i;
    return out;
  };
  auto barred = [&](std::uint64_t m) {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < letters.size(); ++i)
      if ((m >> i) & 1u) out |= std::uint64_t{1} << idx[t.bar(letters[i])];
    return out;
  };
  auto product = [&](const Elem& x, const Elem& y) -> std::optional<Elem> {
    const auto& [p, s, r] = x;
    const auto& [p2, s2, r2] = y;
    if (barred(r) & p2) return std::nullopt;
    return Elem{p | letter_mask(p2, s), static_cast<Mask>(s | s2), r2 | letter_mask(r, s2)};
  };
  auto intern = [&](const Elem& e) {
    auto it = id.find(e);
    if (it != id.end()) return it->second;
    const int k = static_cast<int>(elems.size());
    if (k >= budget) throw Error("reduction monoid exceeds the element budget");
    elems.push_back(e);
    id[e] = k;
    return k;
  };
  std::vector<int> gens;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    gens.push_back(intern(Elem{bit, t.rho(letters[i]), bit}));
  }
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (static_cast<int>(i) == zero) continue;
    for (int g : gens) {
      if (auto e = product(elems[i], elems[g])) intern(*e);
      if (auto e = product(elems[g], elems[i])) intern(*e);
    }
  }
  const int n = static_cast<int>(elems.size());
  std::vector<int> mult(static_cast<std::size_t>(n) * n, zero), inv(static_cast<std::size_t>(n), zero);
  for (int x = 0; x < n; ++x) {
    if (x == zero) continue;
    const auto& [p, s, r] = elems[x];
    auto it = id.find(Elem{barred(r), s, barred(p)});
    if (it == id.end()) throw Error("reduction monoid is not closed under the involution");
    inv[x] = it->second;
    for (int y = 0; y < n; ++y) {
      if (y == zero) continue;
      auto e = product(elems[x], elems[y]);
      if (!e) continue;
      auto jt = id.find(*e);
      if (jt == id.end()) throw Error("reduction monoid closure is incomplete");
      mult[static_cast<std::size_t>(x) * n + y] = jt->second;
    }
  }
  ReductionMonoid out{FiniteMonoid(n, std::move(mult), std::move(inv), 0, zero), {}};
  std::vector<std::string> names(static_cast<std::size_t>(n));
  names[0] = "1";
  names[1] = "0";
  for (int x = 2; x < n; ++x) names[x] = "L" + std::to_string(x);
  out.monoid.set_names(std::move(names));
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const Sym a = letters[i];
    if (static_cast<std::size_t>(a) >= out.image.size()) out.image.resize(static_cast<std::size_t>(a) + 1, -1);
    out.image[a] = gens[i];
  }
  return out;
}

}  // namespace ts
