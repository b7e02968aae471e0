// Reductions to the monoid case: equations over a graph group become
// triangulated equations whose solutions are reduced (checked by a
// constraint), and self-involuting letters are split into pairs.
#pragma once

#include <set>

#include "tracesolve/pipeline.hpp"

namespace ts {

// Group mode. One task per distinct constraint vector of the triangulated
// solutions of `sols`.
Encoding encode_group(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets);

// Monoid mode with self-involuting letters: a -> a+ a- with bar(a+) = a-.
Encoding encode_self_involuting(const Instance& inst, const std::set<Tuple>& sols, const Budgets& budgets);

}  // namespace ts
