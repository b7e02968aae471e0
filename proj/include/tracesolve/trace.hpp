// Trace arithmetic over a symbol table: canonical forms, Hasse diagrams,
// minimal and maximal letters, involution, reducedness, factors.
#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "tracesolve/alphabet.hpp"

namespace ts {

// Canonical representative: the lexicographically least linearization
// (letters ordered by id), obtained by repeatedly taking the least minimal
// position.
Word normal_form(const Word& w, const SymbolTable& t);

bool trace_equal(const Word& u, const Word& v, const SymbolTable& t);

// Hasse arcs (i, j) of the dependence order on the positions of w, with
// 0-based positions, sorted.
std::vector<std::pair<int, int>> hasse_arcs(const Word& w, const SymbolTable& t);

// Letters a such that w = a y (min) or w = y a (max) for some trace y.
std::set<Sym> min_elements(const Word& w, const SymbolTable& t);
std::set<Sym> max_elements(const Word& w, const SymbolTable& t);

// Positions realizing the minimal (maximal) letters.
std::vector<int> min_positions(const Word& w, const SymbolTable& t);
std::vector<int> max_positions(const Word& w, const SymbolTable& t);

// Reverse and bar every letter (not normalized).
Word involute_word(const Word& w, const SymbolTable& t);
// Canonical form of the involution.
Word involute(const Word& w, const SymbolTable& t);

bool is_reduced(const Word& w, const SymbolTable& t);

// True iff w = p v q in the trace monoid for some p, q.
bool factor_of(const Word& v, const Word& w, const SymbolTable& t);

// Length-preserving projection of lifted letters (a,S) to a.
Word project_pi0(const Word& w, const ResourceAlphabet& a);

// Strict dependence order on positions of w: reach[i] holds j iff i < j in
// the trace order.
class PositionOrder {
 public:
  PositionOrder(const Word& w, const SymbolTable& t);
  bool less(int i, int j) const {
    return (bits_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j) / 64] >>
            (static_cast<unsigned>(j) % 64)) & 1u;
  }
  int size() const { return n_; }
  // Immediate successor relation.
  const std::vector<std::pair<int, int>>& arcs() const { return arcs_; }

 private:
  int n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::pair<int, int>> arcs_;
};

// Value type pairing a canonical word with the table it lives in.
class Trace {
 public:
  Trace(const Word& w, const SymbolTable& t) : word_(normal_form(w, t)), table_(&t) {}
  const Word& word() const { return word_; }
  const SymbolTable& table() const { return *table_; }
  bool operator==(const Trace& o) const;
  Trace operator*(const Trace& o) const;

 private:
  Word word_;
  const SymbolTable* table_;
};

}  // namespace ts
