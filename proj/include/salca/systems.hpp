#pragma once
/* Concrete control systems: box domains, grid output labelers, benchmark
 * dynamics, zero-order-hold and closed-loop wrappers, and the simulator
 * that turns (x0, input word) into an external behavior.  Trajectories
 * that leave the domain emit the absorbing output from that point on. */

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "salca/lsequence.hpp"
#include "salca/rng.hpp"
#include "salca/symbols.hpp"

namespace salca {

inline constexpr int kMaxStateDim = 4;

struct StateVec {
    std::array<double, kMaxStateDim> c{};
    int n = 0;

    static StateVec of(std::initializer_list<double> xs) {
        StateVec v;
        for (double x : xs) v.c[static_cast<std::size_t>(v.n++)] = x;
        return v;
    }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    bool operator==(const StateVec& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n; ++i) if (c[static_cast<std::size_t>(i)] != o.c[static_cast<std::size_t>(i)]) return false;
        return true;
    }
};

struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const StateVec& x) const {
        if (x.n != dim()) return false;
        for (int i = 0; i < x.n; ++i)
            if (x[i] < lo[static_cast<std::size_t>(i)] || x[i] > hi[static_cast<std::size_t>(i)]) return false;
        return true;
    }
    StateVec sample(RecordRng& rng) const {
        StateVec x;
        x.n = dim();
        for (int i = 0; i < x.n; ++i)
            x[i] = lo[static_cast<std::size_t>(i)] +
                   rng.uniform() * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
        return x;
    }
};

/* Axis-aligned grid labeler.  Cell j on an axis is [cut_j, cut_{j+1}), the
 * last cell is closed; points outside the grid map to kAbs unless the goal
 * override box (checked first) claims them. */
struct GridLabeler {
    std::vector<std::vector<double>> cuts;  // per axis, ascending, >= 2 entries
    Alphabet labels;                        // row-major over axis cell indices
    std::optional<std::pair<Box, Symbol>> goal_override;

    static GridLabeler make(std::vector<std::vector<double>> cuts, Alphabet labels);
    static GridLabeler uniform(const Box& box, const std::vector<int>& cells, Alphabet labels);

    Symbol operator()(const StateVec& x) const;
    Box grid_box() const;
};

class Dynamics {
  public:
    virtual ~Dynamics() = default;
    virtual int dim() const = 0;
    virtual StateVec step(const StateVec& x, const std::vector<double>& u) const = 0;
};

struct InputAlphabet {
    Alphabet labels;
    std::vector<std::vector<double>> values;  // one vector per label

    int size() const { return labels.size(); }
};

struct ControlSystem {
    std::string name;
    std::shared_ptr<const Dynamics> dyn;
    Box domain;  // absorption boundary and initial-state sampling region
    InputAlphabet inputs;
    GridLabeler labeler;

    Symbol output(const StateVec& x) const { return domain.contains(x) ? labeler(x) : kAbs; }
    StateVec step(const StateVec& x, Symbol u) const {
        return dyn->step(x, inputs.values[static_cast<std::size_t>(u)]);
    }
};

// Simulate from x0 under the input word; rejects x0 outside the domain.
// Once an absorbing output appears, stepping stops and the remaining
// outputs are absorbing.
ExternalBehavior simulate(const ControlSystem& sys, const StateVec& x0,
                          std::span<const Symbol> ins);

// Same dynamics at a coarser time scale: each step applies the input for
// T consecutive inner steps (stopping early if the domain is left).
ControlSystem zero_order_hold(const ControlSystem& sys, int T);

// Autonomous closed loop: a single pseudo-input, the policy picks the inner
// input from the current state each inner step; outputs via a new labeler.
using Policy = std::function<Symbol(const StateVec&)>;
ControlSystem closed_loop(const ControlSystem& sys, Policy policy, GridLabeler labeler);

// x+ = A x + B u with A = (1/4)[[1,2],[-1.8,1]], B = [0,1]^T on [-3,3]^2,
// inputs {-0.3, 0, 0.3}, 3x3 uniform grid labels c00..c22.
ControlSystem make_linear_benchmark();

// Adapted mountain car: v+ = clamp(v + 0.001 a - 0.0025 cos(3x), +/-0.07),
// x+ = clamp(x + v+, [-1.2, 0.6]) with v zeroed at the left wall; inputs
// {-1, +1}; position bands R1..R5 over [-1.2, 0.5) and G on [0.5, 0.6].
ControlSystem make_mountain_car();

// 32x32 grid labels R1..R1024 over [-1.2, 0.5] x [-0.07, 0.07] with goal
// override G on [0.5, 0.6]; used by the closed-loop verification scheme.
GridLabeler make_mountain_car_fine_labeler();

}  // namespace salca
