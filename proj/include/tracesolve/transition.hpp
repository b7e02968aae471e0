// Transitions between extended equations: substitutions (label epsilon plus
// the variable map tau) and compressions (label h with W = h(W')).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tracesolve/equation.hpp"

namespace ts {

enum class LabelKind { Substitution, Compression, FinalCompression };

const char* kind_name(LabelKind k);

struct TransitionLabel {
  LabelKind kind = LabelKind::Substitution;
  // h: destination letter -> word over source letters. Letters without an
  // entry are mapped to themselves.
  std::map<Sym, Word> endo;
  // tau: source variable -> word over destination symbols.
  std::map<Sym, Word> tau;
  std::string note;

  bool operator==(const TransitionLabel& o) const {
    return kind == o.kind && endo == o.endo && tau == o.tau;
  }
};

struct Violation {
  std::string clause;
  std::string detail;
};
using Report = std::vector<Violation>;

std::string format_report(const Report& r);

// Image of a word under an endomorphism given as a partial map.
Word apply_map(const std::map<Sym, Word>& m, const Word& w);

Report validate_substitution(const State& from, const State& to, const TransitionLabel& label);
Report validate_compression(const State& from, const State& to, const TransitionLabel& label);
Report validate_transition(const State& from, const State& to, const TransitionLabel& label);

// Pulls a solution of the target back along the transition.
Solution pull_back(const State& from, const TransitionLabel& label, const Solution& target_sol);

// Finishes a substitution: `work` is `from` with any new variables already
// added (and rho, mu, theta adjusted). Computes W' = tau(W), drops replaced
// variables that no longer occur, and normalizes. tau must list both X and
// bar X.
State make_substitution_target(const State& from, State work, const std::map<Sym, Word>& tau);

// Completes tau with the involuted images of the listed variables.
std::map<Sym, Word> close_tau(const State& work, const std::map<Sym, Word>& tau);

// The final transition: introduces c_1..c_k for the first k blocks.
struct FinalResult {
  State state;
  TransitionLabel label;
};
FinalResult final_transition(const State& s);

// h_1 o ... o h_t applied to the distinguished letters.
std::vector<Word> apply_to_distinguished(const std::vector<const TransitionLabel*>& path, const std::vector<Sym>& letters);

// Conjugates a label by canonical renamings of its endpoints (`from` and
// `to` are the states before renaming).
TransitionLabel conjugate_label(const TransitionLabel& l, const State& from, const Renaming& src, const State& to,
                                const Renaming& dst);

std::string label_summary(const State& from, const State& to, const TransitionLabel& l);

}  // namespace ts
