// Instance files ("tracesolve-instance/1"): loading, validation and
// printing of words and solution tuples.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracesolve/alphabet.hpp"

namespace ts {

enum class Mode { Monoid, Group };

using Tuple = std::vector<Word>;

struct Instance {
  std::string source;
  Mode mode = Mode::Monoid;
  std::vector<std::string> resources;

  // Base alphabet (marker and the declared letters, no lifted copies).
  ResourceAlphabet alphabet;

  // Raw constraint monoid N, kept as plain tables so that the oracle does
  // not depend on the constraint library.
  int n_elements = 1;
  std::vector<std::string> element_names{"1"};
  std::vector<int> mult{0};
  std::vector<int> inv{0};
  int unit = 0;
  int zero = -1;
  std::vector<int> letter_mu;  // indexed by letter id; marker gets -1

  struct Variable {
    std::string name;
    std::string bar;
    Mask rho = 0;
    int mu = 0;
  };
  std::vector<Variable> variables;  // in distinguished order

  // Symbols of the equation: letters keep their alphabet id, variable i is
  // alphabet.size() + 2i and its bar alphabet.size() + 2i + 1.
  SymbolTable table;
  Word lhs, rhs;

  int k() const { return static_cast<int>(variables.size()); }
  Sym var_sym(int i) const { return alphabet.size() + 2 * i; }
  bool is_var(Sym s) const { return s >= alphabet.size(); }
  int var_index(Sym s) const { return (s - alphabet.size()) / 2; }
  bool is_var_bar(Sym s) const { return is_var(s) && (s - alphabet.size()) % 2 == 1; }
  // Letters a variable may take (non-marker letters with rho inside rho(X)).
  std::vector<Sym> letters_for(int var) const;
  int mul(int x, int y) const { return mult[static_cast<std::size_t>(x * n_elements + y)]; }
  int eval(const Word& w) const;
  std::string symbol_name(Sym s) const;
};

// Throws Error with a message naming the file and the offending field.
Instance load_instance(const std::string& path);
Instance parse_instance(const nlohmann::json& j, const std::string& source = "<json>");

// Words over the base letters, printed by concatenating names (a dot
// separates names longer than one character).
std::string format_word(const Instance& inst, const Word& w);
std::string format_tuple(const Instance& inst, const Tuple& t);
// Inverse of format_word for a JSON string or array of names.
Word parse_word(const Instance& inst, const nlohmann::json& j);

}  // namespace ts
