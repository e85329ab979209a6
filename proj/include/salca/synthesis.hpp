#pragma once
/* Reach-avoid games on the abstraction and refinement of the winning
 * strategy to the concrete system.
 *
 * The fixpoint treats the abstraction's nondeterminism adversarially: an
 * input is allowed at a state only when it has at least one successor and
 * every successor is already winning.  That is exactly what the alternating
 * simulation refines: as long as the run stays inside the certified window
 * set, the concrete successor's window is one of the abstract successors,
 * so the rank strictly drops each macro step and the goal is reached within
 * rank steps.  Leaving the window set is the violation event the
 * certificate bounds. */

#include <cstdint>
#include <string>
#include <vector>

#include "salca/abstraction.hpp"
#include "salca/systems.hpp"

namespace salca {

struct ReachAvoidSpec {
    std::vector<std::string> goal;
    std::vector<std::string> avoid;
    int max_steps = -1;  // fixpoint iteration cap; -1 = the abstraction's horizon
};

struct AbstractController {
    std::vector<std::string> goal;
    std::vector<std::string> avoid;
    std::vector<Symbol> goal_syms;   // sorted
    std::vector<Symbol> avoid_syms;  // sorted
    int max_rank = 0;
    std::vector<std::int32_t> rank;          // per state; -1 = losing
    std::vector<std::vector<Symbol>> allowed;  // inputs witnessing the rank inclusion
    std::vector<std::uint32_t> winning_initial;  // sorted

    bool winning(std::uint32_t s) const { return rank[s] >= 0; }
    std::size_t num_winning() const;
};

AbstractController solve_reach_avoid(const Salca& a, const ReachAvoidSpec& spec);

enum class RunOutcome { success, violation, cap, lost_start };

const char* to_string(RunOutcome o);

struct RunReport {
    RunOutcome outcome = RunOutcome::lost_start;
    int macro_steps = 0;
    int concrete_steps = 0;
    std::vector<Symbol> outs;  // outputs at macro boundaries, starting with y0
    std::vector<Symbol> ins;   // abstract input chosen per macro step
    StateVec final_state;
};

// Execute the abstract strategy on the concrete system: at each macro step
// pick the allowed input with the smallest worst-case successor rank (ties:
// lowest input index), hold it for hold_t concrete steps (stopping the hold
// early if the domain is left, exactly like the sampled held system), then
// re-observe.  Terminates on goal output, window-set violation, losing or
// unknown start, or the concrete step cap.
RunReport refine_and_run(const ControlSystem& sys, const Salca& a, const AbstractController& c,
                         const StateVec& x0, int hold_t, int step_cap);

}  // namespace salca
