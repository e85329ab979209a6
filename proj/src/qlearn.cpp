#include "salca/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "salca/abstraction.hpp"
#include "salca/rng.hpp"

namespace salca {

int QTable::cell_of(const StateVec& x) const {
    int idx[2];
    const int cells[2] = {cells_x, cells_v};
    for (int d = 0; d < 2; ++d) {
        const double lo = grid.lo[static_cast<std::size_t>(d)];
        const double hi = grid.hi[static_cast<std::size_t>(d)];
        const double t = (x[d] - lo) / (hi - lo) * cells[d];
        idx[d] = std::clamp(static_cast<int>(t), 0, cells[d] - 1);  // past-goal states clamp
    }
    return idx[0] * cells_v + idx[1];
}

int QTable::greedy(int cell) const {
    int best = 0;
    for (int a = 1; a < actions; ++a)
        if (value(cell, a) > value(cell, best)) best = a;
    return best;
}

QTable train(const ControlSystem& mc, const QLearnConfig& cfg, std::uint64_t seed) {
    if (!(cfg.alpha >= 0.0) || cfg.alpha > 1.0 || !(cfg.explore >= 0.0) || cfg.explore > 1.0)
        throw std::invalid_argument("train: rates must be in [0,1]");
    if (cfg.cells_x < 1 || cfg.cells_v < 1 || cfg.episodes < 0 || cfg.episode_cap < 1)
        throw std::invalid_argument("train: bad grid or episode settings");
    QTable q;
    q.cells_x = cfg.cells_x;
    q.cells_v = cfg.cells_v;
    q.actions = static_cast<int>(mc.inputs.values.size());
    q.grid = cfg.grid;
    q.goal_position = cfg.goal_position;
    q.q.assign(static_cast<std::size_t>(q.cells_x) * q.cells_v * q.actions, 0.0);

    for (std::int64_t ep = 0; ep < cfg.episodes; ++ep) {
        RecordRng rng(seed, static_cast<std::uint64_t>(ep));
        StateVec x = cfg.grid.sample(rng);
        for (int step = 0; step < cfg.episode_cap; ++step) {
            const int cell = q.cell_of(x);
            const int a = rng.uniform() < cfg.explore ? rng.uniform_index(q.actions)
                                                      : q.greedy(cell);
            const StateVec x2 = mc.step(x, static_cast<Symbol>(a));
            const double reward = -1.0;
            const bool terminal = x2[0] >= cfg.goal_position;
            double target = reward;
            if (!terminal)  // bootstrapped continuation (also at the cap cutoff)
                target += cfg.discount * q.value(q.cell_of(x2), q.greedy(q.cell_of(x2)));
            double& qv = q.q[static_cast<std::size_t>(cell) * q.actions + a];
            qv += cfg.alpha * (target - qv);
            if (terminal) break;
            x = x2;
        }
    }
    return q;
}

Policy greedy_policy(const QTable& q) {
    return [q](const StateVec& x) { return static_cast<Symbol>(q.greedy(q.cell_of(x))); };
}

PacCertificate verify_closed_loop(const ControlSystem& mc, const QTable& q,
                                  const GridLabeler& labeler, std::size_t m_episodes, int ell,
                                  int horizon, double beta, std::uint64_t seed,
                                  std::size_t* out_windows) {
    const ControlSystem cl = closed_loop(mc, greedy_policy(q), labeler);
    const std::vector<Symbol> word(static_cast<std::size_t>(horizon), Symbol{0});
    auto gen = [&](std::size_t i) {
        RecordRng rng(seed, i);
        const StateVec x0 = q.grid.sample(rng);  // the measure the policy was trained under
        return simulate(cl, x0, word);
    };
    WindowSet w =
        collect_windows_stream(m_episodes, gen, ell, horizon, cl.inputs.labels, cl.labeler.labels);
    if (out_windows) *out_windows = w.size();
    return certify(w, m_episodes, beta, 1, horizon);
}

StepsRunner make_q_runner(const ControlSystem& mc, const QTable& q, int cap) {
    return [&mc, q, cap](const StateVec& x0) {
        StateVec x = x0;
        for (int step = 0; step <= cap; ++step) {
            if (x[0] >= q.goal_position) return step;
            if (step == cap) break;
            x = mc.step(x, static_cast<Symbol>(q.greedy(q.cell_of(x))));
        }
        return -1;
    };
}

CompareResult compare_controllers(const Box& starts, const StepsRunner& a, const StepsRunner& b,
                                  std::size_t trials, std::uint64_t seed) {
    CompareResult res;
    res.rows.reserve(trials);
    double diff_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        RecordRng rng(seed, t);
        const StateVec x0 = starts.sample(rng);
        CompareRow row{t, a(x0), b(x0)};
        if (row.steps_a >= 0) ++res.a_success;
        if (row.steps_b >= 0) ++res.b_success;
        if (row.steps_a >= 0 && row.steps_b >= 0) {
            ++res.both_success;
            diff_sum += row.steps_a - row.steps_b;
        }
        res.rows.push_back(row);
    }
    if (res.both_success) res.mean_diff = diff_sum / static_cast<double>(res.both_success);
    return res;
}

}  // namespace salca
