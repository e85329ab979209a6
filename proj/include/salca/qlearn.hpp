#pragma once
/* Tabular Q-learning baseline on mountain car and scenario verification of
 * the resulting closed loop.  The learned greedy policy turns the plant into
 * an autonomous system (one pseudo-input), whose window set is certified
 * with u_card = 1, so the certificate's bound needs no input inflation. */

#include <cstdint>
#include <functional>

#include "salca/pac.hpp"
#include "salca/systems.hpp"

namespace salca {

struct QLearnConfig {
    int cells_x = 32;
    int cells_v = 32;
    Box grid{{-1.2, -0.07}, {0.5, 0.07}};
    double alpha = 0.1;      // learning rate
    double explore = 0.01;   // epsilon-greedy exploration rate
    double discount = 1.0;   // undiscounted shortest-path objective
    double goal_position = 0.5;
    std::int64_t episodes = 50000;
    int episode_cap = 250;
};

struct QTable {
    int cells_x = 0;
    int cells_v = 0;
    int actions = 0;
    Box grid;
    double goal_position = 0.5;
    std::vector<double> q;  // cell-major: q[cell * actions + a]

    int cell_of(const StateVec& x) const;  // clamped into the grid
    int greedy(int cell) const;            // argmax, ties to the lowest action
    double value(int cell, int a) const { return q[static_cast<std::size_t>(cell) * actions + a]; }
};

// Episodic epsilon-greedy TD learning, -1 per step, terminal at the goal
// position, bootstrapped at the episode cap.  Episode i draws from its own
// counter-based stream, so the result is a pure function of (cfg, seed).
QTable train(const ControlSystem& mc, const QLearnConfig& cfg, std::uint64_t seed);

Policy greedy_policy(const QTable& q);

// Sample m closed-loop episodes (uniform starts over the Q grid), collect
// the order-(ell+1) windows of their label traces under the given labeler,
// and certify with u_card = 1.  Streaming: behaviors are not materialized.
PacCertificate verify_closed_loop(const ControlSystem& mc, const QTable& q,
                                  const GridLabeler& labeler, std::size_t m_episodes, int ell,
                                  int horizon, double beta, std::uint64_t seed,
                                  std::size_t* out_windows = nullptr);

// Steps to goal from x0, or -1 when the run fails (cap / violation / lost).
using StepsRunner = std::function<int(const StateVec&)>;

StepsRunner make_q_runner(const ControlSystem& mc, const QTable& q, int cap);

struct CompareRow {
    std::size_t trial = 0;
    int steps_a = -1;  // first runner (abstraction-based controller)
    int steps_b = -1;  // second runner (RL policy)
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::size_t a_success = 0;
    std::size_t b_success = 0;
    std::size_t both_success = 0;
    double mean_diff = 0.0;  // mean of (steps_a - steps_b) over shared successes
};

// Both runners from the same per-trial random start (uniform over `starts`).
CompareResult compare_controllers(const Box& starts, const StepsRunner& a, const StepsRunner& b,
                                  std::size_t trials, std::uint64_t seed);

}  // namespace salca
