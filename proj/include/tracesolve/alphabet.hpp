// Symbols, resource sets and the base alphabet with its lifted copies.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ts {

using Sym = std::int32_t;
using Mask = std::uint16_t;
using Word = std::vector<Sym>;

inline constexpr Sym kNone = -1;
inline constexpr int kMaxUserResources = 8;

enum class Kind : std::uint8_t { Unused, Constant, Variable };

struct SymInfo {
  Kind kind = Kind::Unused;
  Sym bar = kNone;
  Mask rho = 0;
  // Base letter of an A-letter ((a,S) has base a, a has base a). kNone for
  // letters created during the search and for variables.
  Sym base = kNone;

  bool operator==(const SymInfo&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int popcount(Mask m) { return __builtin_popcount(static_cast<unsigned>(m)); }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

// Dense symbol table. Holds resources, the involution and the type relation
// for every symbol id in use; this is all a trace computation needs.
class SymbolTable {
 public:
  const SymInfo& info(Sym s) const { return info_[static_cast<std::size_t>(s)]; }
  SymInfo& info_mut(Sym s) { return info_[static_cast<std::size_t>(s)]; }
  bool in_use(Sym s) const {
    return s >= 0 && static_cast<std::size_t>(s) < info_.size() && info_[s].kind != Kind::Unused;
  }
  bool is_constant(Sym s) const { return info(s).kind == Kind::Constant; }
  bool is_variable(Sym s) const { return info(s).kind == Kind::Variable; }
  Sym bar(Sym s) const { return info(s).bar; }
  Mask rho(Sym s) const { return info(s).rho; }
  Sym theta(Sym s) const {
    return static_cast<std::size_t>(s) < theta_.size() ? theta_[s] : kNone;
  }
  void set_theta(Sym x, Sym y);
  void clear_theta(Sym x);
  bool has_types() const;

  bool independent(Sym x, Sym y) const {
    if ((rho(x) & rho(y)) == 0) return true;
    return theta(x) == y || theta(y) == x;
  }
  bool dependent(Sym x, Sym y) const { return !independent(x, y); }

  std::size_t size() const { return info_.size(); }
  void ensure(Sym s);
  void set(Sym s, const SymInfo& si);
  void erase(Sym s);
  // Lowest id >= from that is unused and whose successor is unused as well.
  Sym fresh_pair(Sym from) const;

  bool operator==(const SymbolTable&) const = default;

 private:
  std::vector<SymInfo> info_;
  std::vector<Sym> theta_;
};

// The constants A: marker #, base letters and lifted copies (a,S).
class ResourceAlphabet {
 public:
  ResourceAlphabet() = default;
  // resources: names of the resources; full set R is all of them.
  explicit ResourceAlphabet(std::vector<std::string> resources);

  // Adds a base letter together with its partner (pass the same name twice
  // for a self-involuting letter). Returns the id of the first letter.
  Sym add_base_pair(const std::string& name, const std::string& bar_name, Mask rho);
  // Materializes all lifted copies (a,S) with rho(a) strictly inside S.
  void close_lifted();

  const SymbolTable& table() const { return table_; }
  Sym marker() const { return 0; }
  Mask full() const { return full_; }
  int resource_count() const { return static_cast<int>(resources_.size()); }
  const std::vector<std::string>& resources() const { return resources_; }
  // Appends a resource (used for the internal extra resource).
  void add_resource(const std::string& name);

  Sym size() const { return static_cast<Sym>(table_.size()); }
  Sym lifted(Sym a, Mask s) const;
  Sym base(Sym a) const { return table_.info(a).base; }
  const std::vector<Sym>& base_letters() const { return base_letters_; }
  Sym find(const std::string& name) const;
  const std::string& name(Sym s) const { return names_.at(static_cast<std::size_t>(s)); }

 private:
  std::vector<std::string> resources_;
  Mask full_ = 0;
  SymbolTable table_;
  std::vector<std::string> names_;
  std::vector<Sym> base_letters_;
  std::map<std::pair<Sym, Mask>, Sym> lifted_;
  std::map<std::string, Sym> by_name_;
};

std::string mask_string(Mask m);

}  // namespace ts
