// Extended equations (the NFA states), their weights, solutions, and the
// canonical renaming used to merge states.
#pragma once

#include <array>
#include <compare>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tracesolve/alphabet.hpp"
#include "tracesolve/monoid.hpp"

namespace ts {

struct Budgets {
  // Multiplier standing in for the unspecified linear constants.
  int factor = 64;
  // Guided search step cap (per forward path).
  int max_steps = 20000;
  // Cap on the max-norm of states in exhaustive mode.
  int max_norm = 0;  // 0: factor * |W_init|
};

// Instance-wide data shared by all states of one equation.
struct Problem {
  ResourceAlphabet alphabet;
  std::shared_ptr<const FiniteMonoid> monoid;
  int marker_zero = 0;
  std::vector<int> letter_mu;  // constraint on A, indexed by Sym
  int k = 0;
  std::vector<Sym> vars;  // X_1..X_k; bar(X_i) = vars[i] + 1
  std::vector<std::string> var_names;
  // Variables of the equation that are not reported (no #X# block).
  std::vector<Sym> aux_vars;
  std::vector<std::string> aux_names;
  // Number of markers in every state (2k + 5 plus markers inside U and V).
  int marker_total = 0;
  std::vector<Sym> distinguished;  // c_1..c_k; bar(c_i) = c_i + 1
  Sym fresh_base = 0;
  int init_length = 0;
  Budgets budgets;

  Sym a_size() const { return alphabet.size(); }
  bool in_a(Sym s) const { return s >= 0 && s < alphabet.size(); }
  bool is_initial_var(Sym s) const;
  bool is_distinguished(Sym s) const;
  int c_budget() const { return budgets.factor * std::max(init_length, 1); }
  int max_norm_budget() const {
    return budgets.max_norm > 0 ? budgets.max_norm : budgets.factor * std::max(init_length, 1);
  }
};

struct Weight5 {
  std::array<long, 5> v{};
  auto operator<=>(const Weight5&) const = default;
  long max_norm() const;
  std::string str() const;
};

// sigma on variables (both X and bar X are stored) and optionally alpha on
// constants outside A.
struct Solution {
  std::map<Sym, Word> sigma;
  std::map<Sym, Word> alpha;
  bool operator==(const Solution&) const = default;
};

class State {
 public:
  State() = default;
  explicit State(std::shared_ptr<const Problem> p);

  const Problem& problem() const { return *problem_; }
  std::shared_ptr<const Problem> problem_ptr() const { return problem_; }

  Word W;
  SymbolTable syms;
  ConstraintMorphism mu;

  std::vector<Sym> constants() const;
  std::vector<Sym> variables() const;
  bool has_variables() const;
  int marker_count() const;

  // Adds a fresh constant pair (s, s+1) with the given resources and
  // constraint on s; returns s.
  Sym add_constant_pair(Mask rho, int mu_s);
  Sym add_variable_pair(Mask rho, int mu_s);
  void remove_pair(Sym s);

  void normalize();  // W to canonical form under the current table
  Word expand(const Word& w, const Solution& sol) const;

  Weight5 weight() const;
  int theta_size() const;

  // Well-formedness; returns an empty string if fine, otherwise the clause.
  std::string check_well_formed() const;

  std::string name(Sym s) const;
  std::string show(const Word& w) const;
  std::string dump() const;

  bool same_as(const State& o) const { return W == o.W && syms == o.syms && mu == o.mu; }

 private:
  std::shared_ptr<const Problem> problem_;
};

// Renaming produced by canonicalization: old id -> new id (identity on A,
// the distinguished letters and the initial variables).
using Renaming = std::map<Sym, Sym>;

struct CanonicalResult {
  State state;
  Renaming renaming;
};
CanonicalResult canonical_state(const State& s);

// Builds W_init = #X_1#...#X_k#U#V#Ubar#Vbar#Xbar_k#...#Xbar_1#. var_rho and
// var_mu list the reported variables followed by the auxiliary ones.
State build_initial(std::shared_ptr<const Problem> p, const Word& u, const Word& v,
                    const std::vector<Mask>& var_rho, const std::vector<int>& var_mu);

struct SolutionCheck {
  bool ok = true;
  std::string clause;
};
SolutionCheck check_solution(const State& s, const Solution& sol, bool check_alpha = false);

long solution_weight(const State& s, const Solution& sol);

bool is_final(const State& s);

// Solution helpers.
Word sigma_image(const Solution& sol, Sym x);
Solution complete_bars(const State& s, const std::map<Sym, Word>& sigma_on_x);

}  // namespace ts
