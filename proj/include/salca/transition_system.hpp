#pragma once
/* Finite transition systems with output maps, behavior enumeration, and
 * decision procedures for (alternating) simulation relations. */

#include <utility>
#include <vector>

#include "salca/lsequence.hpp"
#include "salca/symbols.hpp"

namespace salca {

struct FiniteTS {
    Alphabet inputs;
    Alphabet outputs;
    std::vector<Symbol> output_of;           // state -> output symbol
    std::vector<int> initial;                // sorted, unique
    // succ[x][u] = sorted successor states (possibly empty)
    std::vector<std::vector<std::vector<int>>> succ;

    int num_states() const { return static_cast<int>(output_of.size()); }

    static FiniteTS make(Alphabet ins, Alphabet outs, std::vector<Symbol> output_of,
                         std::vector<int> initial);
    void add_transition(int x, Symbol u, int x2);

    const std::vector<int>& successors(int x, Symbol u) const {
        return succ[static_cast<std::size_t>(x)][static_cast<std::size_t>(u)];
    }
    // inputs with at least one successor at x
    std::vector<Symbol> inputs_at(int x) const;
    bool nonblocking() const;   // every state admits some input
    bool free_input() const;    // every (state, input) has a successor
    std::size_t num_transitions() const;
};

// All external behaviors from x0 under the fixed input word (one per
// nondeterministic resolution; empty if some prefix blocks).  Sorted, unique.
std::vector<ExternalBehavior> ts_behaviors(const FiniteTS& ts, int x0,
                                           std::span<const Symbol> ins);

using Relation = std::vector<std::pair<int, int>>;  // (state of a, state of b)

// Is R a simulation relation from `a` to `b`?  Requires matching alphabets
// and non-blocking systems.  Conditions: every initial a-state is related to
// an initial b-state; related states agree on outputs; and for related
// (xa, xb) the inputs enabled at xa are enabled at xb and every a-successor
// is matched by a related b-successor under the same input.
bool check_sr(const FiniteTS& a, const FiniteTS& b, const Relation& r);

// Is Z an alternating simulation relation from `b` to `a`?  Same alphabet
// and non-blocking preconditions.  Conditions: every initial b-state is
// related to an initial a-state; related states agree on outputs; and for
// related (xb, xa) the inputs enabled at xb are enabled at xa and, for each
// such input, every a-successor is matched by some related b-successor.
bool check_asr(const FiniteTS& b, const FiniteTS& a, const Relation& z);

}  // namespace salca
