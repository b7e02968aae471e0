#include "tracesolve/alphabet.hpp"

#include <algorithm>

namespace ts {

void SymbolTable::ensure(Sym s) {
  if (s < 0) throw Error("negative symbol id");
  if (static_cast<std::size_t>(s) >= info_.size()) info_.resize(static_cast<std::size_t>(s) + 1);
}

void SymbolTable::set(Sym s, const SymInfo& si) {
  ensure(s);
  info_[static_cast<std::size_t>(s)] = si;
}

void SymbolTable::erase(Sym s) {
  if (!in_use(s)) return;
  info_[static_cast<std::size_t>(s)] = SymInfo{};
  clear_theta(s);
  while (!info_.empty() && info_.back().kind == Kind::Unused) info_.pop_back();
  if (theta_.size() > info_.size()) theta_.resize(info_.size());
}

void SymbolTable::set_theta(Sym x, Sym y) {
  if (static_cast<std::size_t>(x) >= theta_.size()) theta_.resize(static_cast<std::size_t>(x) + 1, kNone);
  theta_[static_cast<std::size_t>(x)] = y;
}

void SymbolTable::clear_theta(Sym x) {
  if (static_cast<std::size_t>(x) < theta_.size()) theta_[static_cast<std::size_t>(x)] = kNone;
  while (!theta_.empty() && theta_.back() == kNone) theta_.pop_back();
}

bool SymbolTable::has_types() const {
  return std::any_of(theta_.begin(), theta_.end(), [](Sym t) { return t != kNone; });
}

Sym SymbolTable::fresh_pair(Sym from) const {
  Sym s = from;
  while (in_use(s) || in_use(s + 1)) ++s;
  return s;
}

ResourceAlphabet::ResourceAlphabet(std::vector<std::string> resources)
    : resources_(std::move(resources)) {
  if (resources_.empty()) throw Error("at least one resource is required");
  if (static_cast<int>(resources_.size()) > kMaxUserResources + 1)
    throw Error("too many resources (cap is 8)");
  full_ = static_cast<Mask>((1u << resources_.size()) - 1u);
  SymInfo hash;
  hash.kind = Kind::Constant;
  hash.bar = 0;
  hash.rho = full_;
  hash.base = 0;
  table_.set(0, hash);
  names_.push_back("#");
  by_name_["#"] = 0;
}

void ResourceAlphabet::add_resource(const std::string& name) {
  if (!lifted_.empty()) throw Error("resources must be fixed before lifting");
  resources_.push_back(name);
  if (static_cast<int>(resources_.size()) > kMaxUserResources + 1)
    throw Error("too many resources (cap is 8)");
  full_ = static_cast<Mask>((1u << resources_.size()) - 1u);
  table_.info_mut(0).rho = full_;
}

Sym ResourceAlphabet::add_base_pair(const std::string& name, const std::string& bar_name, Mask rho) {
  if (!lifted_.empty()) throw Error("letters must be added before lifting");
  if (by_name_.count(name) || (bar_name != name && by_name_.count(bar_name)))
    throw Error("duplicate letter name '" + name + "'");
  if (rho == 0) throw Error("letter '" + name + "' has an empty resource set");
  if (!subset(rho, full_)) throw Error("letter '" + name + "' uses an unknown resource");
  const Sym a = size();
  SymInfo si;
  si.kind = Kind::Constant;
  si.rho = rho;
  if (bar_name == name) {
    si.bar = a;
    si.base = a;
    table_.set(a, si);
    names_.push_back(name);
    by_name_[name] = a;
    base_letters_.push_back(a);
    return a;
  }
  si.bar = a + 1;
  si.base = a;
  table_.set(a, si);
  si.bar = a;
  si.base = a + 1;
  table_.set(a + 1, si);
  names_.push_back(name);
  names_.push_back(bar_name);
  by_name_[name] = a;
  by_name_[bar_name] = a + 1;
  base_letters_.push_back(a);
  base_letters_.push_back(a + 1);
  return a;
}

void ResourceAlphabet::close_lifted() {
  if (!lifted_.empty()) return;
  const std::vector<Sym> bases = base_letters_;
  for (Sym a : bases) {
    const Sym abar = table_.bar(a);
    if (abar < a) continue;  // handled together with its partner
    const Mask ra = table_.rho(a);
    for (unsigned s = 1; s <= full_; ++s) {
      const Mask S = static_cast<Mask>(s);
      if (S == ra || !subset(ra, S)) continue;
      const Sym x = size();
      SymInfo si;
      si.kind = Kind::Constant;
      si.rho = S;
      si.base = a;
      if (abar == a) {
        si.bar = x;
        table_.set(x, si);
        names_.push_back("(" + names_[a] + "," + mask_string(S) + ")");
        lifted_[{a, S}] = x;
        continue;
      }
      si.bar = x + 1;
      table_.set(x, si);
      si.bar = x;
      si.base = abar;
      table_.set(x + 1, si);
      names_.push_back("(" + names_[a] + "," + mask_string(S) + ")");
      names_.push_back("(" + names_[abar] + "," + mask_string(S) + ")");
      lifted_[{a, S}] = x;
      lifted_[{abar, S}] = x + 1;
    }
  }
  for (Sym s = 0; s < size(); ++s) by_name_.emplace(names_[s], s);
}

Sym ResourceAlphabet::lifted(Sym a, Mask s) const {
  if (a < 0 || a >= size()) return kNone;
  const Sym b = base(a);
  if (table_.rho(b) == s) return b;
  auto it = lifted_.find({b, s});
  return it == lifted_.end() ? kNone : it->second;
}

Sym ResourceAlphabet::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? kNone : it->second;
}

std::string mask_string(Mask m) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < 16; ++i) {
    if (m & (1u << i)) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  }
  return out + "}";
}

}  // namespace ts
