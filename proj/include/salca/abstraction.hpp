#pragma once
/* Data-driven window sets and the finite-state abstractions built on them.
 *
 * The window set (all order-(l+1) windows seen in the data) is the source of
 * truth.  Abstract states are the order-l prefixes/suffixes of its members,
 * the transition (z, u, z') exists iff the overlap-concatenation of z and z'
 * through (u, last output of z') is itself a member, and the initial states
 * are the fully padded time-0 windows.  Everything else (trackers, behavior
 * membership, controllers) is derived from membership queries. */

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "salca/lsequence.hpp"
#include "salca/sampler.hpp"
#include "salca/transition_system.hpp"

namespace salca {

inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

// Open-addressing index over an externally owned vector of windows.
struct WindowIndex {
    std::vector<std::uint32_t> table;  // ids, kNoId = empty
    std::size_t mask = 0;

    void rebuild(const std::vector<LSequence>& items);
    std::uint32_t find(const std::vector<LSequence>& items, const LSequence& w) const;
};

struct WindowSet {
    int m = 0;        // window order (= ell+1 when backing an abstraction)
    int horizon = 0;  // horizon of the source behaviors
    Alphabet input_labels;
    Alphabet output_labels;
    std::vector<LSequence> members;  // canonically sorted, unique
    WindowIndex index;
    // provenance: per source record, the sorted unique member ids it witnessed
    std::vector<std::uint64_t> rec_offsets;  // size N+1 (empty when no provenance)
    std::vector<std::uint32_t> rec_members;

    std::size_t size() const { return members.size(); }
    std::size_t record_count() const { return rec_offsets.empty() ? 0 : rec_offsets.size() - 1; }
    bool has_provenance() const { return !rec_offsets.empty(); }
    std::uint32_t id_of(const LSequence& w) const { return index.find(members, w); }
    bool contains(const LSequence& w) const { return id_of(w) != kNoId; }
    std::span<const std::uint32_t> record_members(std::size_t i) const {
        return {rec_members.data() + rec_offsets[i],
                static_cast<std::size_t>(rec_offsets[i + 1] - rec_offsets[i])};
    }
    // window id -> contributing record ids (materialized inverted index)
    std::vector<std::vector<std::uint32_t>> contributors() const;
};

// Union of the order-(ell+1) windows of every record, with provenance.
// Requires 0 <= ell < horizon.
WindowSet collect_windows(const Dataset& d, int ell);

// Streaming variant: records produced on demand (gen(i) must be pure).
WindowSet collect_windows_stream(std::size_t count,
                                 const std::function<ExternalBehavior(std::size_t)>& gen,
                                 int ell, int horizon, const Alphabet& input_labels,
                                 const Alphabet& output_labels);

struct Salca {
    int ell = 0;
    int horizon = 0;
    Alphabet input_labels;
    Alphabet output_labels;
    WindowSet windows;
    std::vector<LSequence> states;  // canonically sorted order-ell windows
    WindowIndex state_index;
    std::vector<Symbol> state_output;      // last output of each state
    std::vector<std::uint32_t> initial;    // sorted state ids
    std::vector<std::uint64_t> tr_offsets; // size num_states*|U|+1
    std::vector<std::uint32_t> tr_succ;    // sorted successor ids per (state, input)

    std::size_t num_states() const { return states.size(); }
    std::size_t num_transitions() const { return tr_succ.size(); }
    std::uint32_t state_id(const LSequence& z) const { return state_index.find(states, z); }
    std::span<const std::uint32_t> successors(std::uint32_t s, Symbol u) const {
        const std::size_t slot = static_cast<std::size_t>(s) * static_cast<std::size_t>(input_labels.size()) +
                                 static_cast<std::size_t>(u);
        return {tr_succ.data() + tr_offsets[slot],
                static_cast<std::size_t>(tr_offsets[slot + 1] - tr_offsets[slot])};
    }
    bool is_initial(std::uint32_t s) const;
    FiniteTS to_finite_ts() const;
};

// States, transitions and initial states derived from the window set.
Salca build_salca(WindowSet w);

// True iff every order-(ell+1) window of gamma (including the padded time-0
// window) is a member; equivalent to an accepting path from an initial state.
// Requires gamma.horizon() >= ell.
bool contains_behavior(const Salca& a, const ExternalBehavior& gamma);

// Online membership tracking along a run.  A violation is raised when the
// concatenated window of a step is not a member (or the start was unseen);
// the flag sticks and the window keeps shifting afterwards.
struct AbstractTracker {
    const Salca* a = nullptr;
    LSequence window;  // order ell, ends at the current time
    bool violated = false;
};

AbstractTracker tracker_init(const Salca& a, Symbol y0);
void tracker_step(AbstractTracker& t, Symbol u, Symbol y);

// Exhaustive construction from a finite transition system: the window set of
// all length-H behaviors (every initial state, every input resolution).
// Rejects H < ell+1.
Salca exact_salca(const FiniteTS& ts, int ell, int H);

// Saturated variant: windows of behaviors of every finite length (fixpoint).
Salca exact_salca_saturated(const FiniteTS& ts, int ell);

// All (state, order-ell window) pairs reachable within H steps (H < 0 for
// the fixpoint).  This is the exact abstraction relation used by the
// simulation-relation oracles.
std::vector<std::pair<int, LSequence>> reachable_window_pairs(const FiniteTS& ts, int ell, int H);

}  // namespace salca
