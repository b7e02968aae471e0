// Resource monoids extended by a type relation: equality, the uniform
// factor problem and validity of type relations.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tracesolve/alphabet.hpp"

namespace ts {

// Pairs (x, y): x is a constant, a variable or a quasi-letter a abar; y is a
// constant or a quasi-letter. Keys and values are words of length 1 or 2.
struct TypeRelation {
  std::set<std::pair<Word, Word>> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  void add(const Word& x, const Word& y) { pairs.insert({x, y}); }
  bool related(const Word& x, const Word& y) const { return pairs.count({x, y}) > 0; }
  // Loads the single-letter pairs into the table's type slots.
  void apply_to(SymbolTable& t) const;
  bool has_quasi() const;
};

struct TypeViolation {
  std::string clause;
  std::string detail;
};

// Node budget for the rewriting searches below.
inline constexpr std::size_t kDefaultNodeBudget = 200000;

// Equality in M(Gamma, rho, theta). Single-letter types go through the
// canonical form; quasi-letter types use breadth-first rewriting.
bool homogeneous_equal(const Word& u, const Word& v, const SymbolTable& t, const TypeRelation& theta,
                       std::size_t budget = kDefaultNodeBudget);

// All words of the class of w (breadth-first over the defining relations).
std::set<Word> homogeneous_class(const Word& w, const SymbolTable& t, const TypeRelation& theta,
                                 std::size_t budget = kDefaultNodeBudget);

// True iff p U q = V in M(Gamma, rho, theta) for some p, q.
bool homogeneous_factor(const Word& u, const Word& v, const SymbolTable& t, const TypeRelation& theta,
                        std::size_t budget = kDefaultNodeBudget);

// Checks involution closure, functionality, the shape of constant keys, and
// equal resources for typed constants. Returns all violations found.
std::vector<TypeViolation> validate_type(const TypeRelation& theta, const SymbolTable& t);

}  // namespace ts
