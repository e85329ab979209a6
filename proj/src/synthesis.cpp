#include "salca/synthesis.hpp"

#include <algorithm>
#include <stdexcept>

namespace salca {
namespace {

std::vector<Symbol> to_symbols(const Alphabet& outputs, const std::vector<std::string>& labels) {
    std::vector<Symbol> syms;
    syms.reserve(labels.size());
    for (const auto& l : labels) syms.push_back(outputs.index_of(l));
    std::sort(syms.begin(), syms.end());
    syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
    return syms;
}

bool has(const std::vector<Symbol>& sorted, Symbol s) {
    return std::binary_search(sorted.begin(), sorted.end(), s);
}

}  // namespace

std::size_t AbstractController::num_winning() const {
    std::size_t n = 0;
    for (auto r : rank)
        if (r >= 0) ++n;
    return n;
}

AbstractController solve_reach_avoid(const Salca& a, const ReachAvoidSpec& spec) {
    AbstractController c;
    c.goal = spec.goal;
    c.avoid = spec.avoid;
    c.goal_syms = to_symbols(a.output_labels, spec.goal);
    c.avoid_syms = to_symbols(a.output_labels, spec.avoid);
    for (Symbol g : c.goal_syms)
        if (has(c.avoid_syms, g))
            throw std::invalid_argument("solve_reach_avoid: goal and avoid labels overlap");
    const int cap = spec.max_steps >= 0 ? spec.max_steps : a.horizon;
    if (cap < 0) throw std::invalid_argument("solve_reach_avoid: no iteration cap available");

    const std::size_t ns = a.num_states();
    const Symbol nu = a.input_labels.size();
    c.rank.assign(ns, -1);
    c.allowed.assign(ns, {});
    for (std::uint32_t s = 0; s < ns; ++s)
        if (has(c.goal_syms, a.state_output[s]) && !has(c.avoid_syms, a.state_output[s])) c.rank[s] = 0;

    // level-synchronous fixpoint: round i adds exactly the rank-i states
    for (int round = 1; round <= cap; ++round) {
        std::vector<std::uint32_t> added;
        for (std::uint32_t s = 0; s < ns; ++s) {
            if (c.rank[s] >= 0 || has(c.avoid_syms, a.state_output[s])) continue;
            for (Symbol u = 0; u < nu; ++u) {
                const auto post = a.successors(s, u);
                if (post.empty()) continue;
                const bool all_won = std::all_of(post.begin(), post.end(), [&](std::uint32_t s2) {
                    return c.rank[s2] >= 0 && c.rank[s2] < round;
                });
                if (all_won) {
                    if (c.rank[s] < 0) {
                        added.push_back(s);
                        c.rank[s] = round;
                        c.max_rank = round;
                    }
                    c.allowed[s].push_back(u);
                }
            }
        }
        if (added.empty()) break;
    }

    for (std::uint32_t s : a.initial)
        if (c.rank[s] >= 0) c.winning_initial.push_back(s);
    return c;
}

const char* to_string(RunOutcome o) {
    switch (o) {
        case RunOutcome::success: return "success";
        case RunOutcome::violation: return "violation";
        case RunOutcome::cap: return "cap";
        case RunOutcome::lost_start: return "lost_start";
    }
    return "?";
}

RunReport refine_and_run(const ControlSystem& sys, const Salca& a, const AbstractController& c,
                         const StateVec& x0, int hold_t, int step_cap) {
    if (hold_t < 1 || step_cap < 0) throw std::invalid_argument("refine_and_run: bad hold/cap");
    if (!(sys.inputs.labels == a.input_labels))
        throw std::invalid_argument("refine_and_run: input alphabet mismatch");
    RunReport rep;
    rep.final_state = x0;
    const Symbol y0 = sys.output(x0);
    rep.outs.push_back(y0);
    if (has(c.goal_syms, y0)) {  // goal holds before any input
        rep.outcome = RunOutcome::success;
        return rep;
    }
    AbstractTracker tracker = tracker_init(a, y0);
    std::uint32_t s = a.state_id(tracker.window);
    if (tracker.violated || s == kNoId || !c.winning(s)) {
        rep.outcome = RunOutcome::lost_start;
        return rep;
    }

    StateVec x = x0;
    while (rep.concrete_steps + hold_t <= step_cap) {
        // smallest worst-case successor rank, ties to the lowest input index
        Symbol best_u = -1;
        std::int32_t best_worst = -1;
        for (Symbol u : c.allowed[s]) {
            std::int32_t worst = 0;
            for (std::uint32_t s2 : a.successors(s, u)) worst = std::max(worst, c.rank[s2]);
            if (best_u < 0 || worst < best_worst) {
                best_u = u;
                best_worst = worst;
            }
        }
        if (best_u < 0) {  // rank > 0 states always have a witness; defensive
            rep.outcome = RunOutcome::cap;
            return rep;
        }
        for (int i = 0; i < hold_t; ++i) {  // mirrors the held system's early stop
            x = sys.step(x, best_u);
            ++rep.concrete_steps;
            if (!sys.domain.contains(x)) break;
        }
        const Symbol y = sys.output(x);
        tracker_step(tracker, best_u, y);
        ++rep.macro_steps;
        rep.ins.push_back(best_u);
        rep.outs.push_back(y);
        rep.final_state = x;
        if (tracker.violated) {
            rep.outcome = RunOutcome::violation;
            return rep;
        }
        if (has(c.goal_syms, y)) {
            rep.outcome = RunOutcome::success;
            return rep;
        }
        s = a.state_id(tracker.window);  // a real state: the step's window is a member
    }
    rep.outcome = RunOutcome::cap;
    return rep;
}

}  // namespace salca
