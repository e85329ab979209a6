#include "salca/systems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace salca {

GridLabeler GridLabeler::make(std::vector<std::vector<double>> cuts, Alphabet labels) {
    std::size_t cells = 1;
    for (const auto& axis : cuts) {
        if (axis.size() < 2 || !std::is_sorted(axis.begin(), axis.end()))
            throw std::invalid_argument("grid_labeler: need ascending cuts per axis");
        cells *= axis.size() - 1;
    }
    if (cuts.empty() || cuts.size() > kMaxStateDim)
        throw std::invalid_argument("grid_labeler: bad dimension");
    if (cells != static_cast<std::size_t>(labels.size()) &&
        cells + 1 != static_cast<std::size_t>(labels.size()))
        throw std::invalid_argument("grid_labeler: label count does not match cell count");
    GridLabeler g;
    g.cuts = std::move(cuts);
    g.labels = std::move(labels);
    return g;
}

GridLabeler GridLabeler::uniform(const Box& box, const std::vector<int>& cells, Alphabet labels) {
    if (static_cast<int>(cells.size()) != box.dim())
        throw std::invalid_argument("grid_labeler: cell spec dimension mismatch");
    std::vector<std::vector<double>> cuts(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] < 1) throw std::invalid_argument("grid_labeler: need >= 1 cell per axis");
        for (int j = 0; j <= cells[i]; ++j)
            cuts[i].push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * j / cells[i]);
        cuts[i].back() = box.hi[i];  // avoid round-off at the closed upper edge
    }
    return make(std::move(cuts), std::move(labels));
}

Symbol GridLabeler::operator()(const StateVec& x) const {
    if (goal_override && goal_override->first.contains(x)) return goal_override->second;
    if (x.n != static_cast<int>(cuts.size())) return kAbs;
    int flat = 0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const auto& axis = cuts[i];
        const double v = x[static_cast<int>(i)];
        if (v < axis.front() || v > axis.back()) return kAbs;
        auto it = std::upper_bound(axis.begin(), axis.end(), v);
        int cell = static_cast<int>(it - axis.begin()) - 1;
        const int ncells = static_cast<int>(axis.size()) - 1;
        if (cell >= ncells) cell = ncells - 1;  // closed upper edge
        flat = flat * ncells + cell;
    }
    return static_cast<Symbol>(flat);
}

Box GridLabeler::grid_box() const {
    Box b;
    for (const auto& axis : cuts) {
        b.lo.push_back(axis.front());
        b.hi.push_back(axis.back());
    }
    return b;
}

ExternalBehavior simulate(const ControlSystem& sys, const StateVec& x0,
                          std::span<const Symbol> ins) {
    if (!sys.domain.contains(x0))
        throw std::invalid_argument("simulate: initial state outside the domain");
    for (Symbol u : ins)
        if (u < 0 || u >= sys.inputs.size())
            throw std::invalid_argument("simulate: input index out of range");
    ExternalBehavior b;
    b.ins.assign(ins.begin(), ins.end());
    b.outs.reserve(ins.size() + 1);
    StateVec x = x0;
    Symbol y = sys.output(x0);
    b.outs.push_back(y);
    for (Symbol u : ins) {
        if (y == kAbs) {
            b.outs.push_back(kAbs);  // absorbing: no further stepping
            continue;
        }
        x = sys.step(x, u);
        y = sys.output(x);
        b.outs.push_back(y);
    }
    return b;
}

namespace {

class MatrixDynamics final : public Dynamics {
  public:
    MatrixDynamics(int n, int m, std::vector<double> a, std::vector<double> b)
        : n_(n), m_(m), a_(std::move(a)), b_(std::move(b)) {}
    int dim() const override { return n_; }
    StateVec step(const StateVec& x, const std::vector<double>& u) const override {
        StateVec y;
        y.n = n_;
        for (int i = 0; i < n_; ++i) {
            double s = 0;
            for (int j = 0; j < n_; ++j) s += a_[static_cast<std::size_t>(i * n_ + j)] * x[j];
            for (int j = 0; j < m_; ++j) s += b_[static_cast<std::size_t>(i * m_ + j)] * u[static_cast<std::size_t>(j)];
            y[i] = s;
        }
        return y;
    }

  private:
    int n_, m_;
    std::vector<double> a_, b_;
};

class MountainCarDynamics final : public Dynamics {
  public:
    int dim() const override { return 2; }
    StateVec step(const StateVec& x, const std::vector<double>& u) const override {
        double v = x[1] + 0.001 * u[0] - 0.0025 * std::cos(3.0 * x[0]);
        v = std::clamp(v, -0.07, 0.07);
        double p = x[0] + v;
        if (p < -1.2) { p = -1.2; v = 0.0; }
        if (p > 0.6) p = 0.6;
        return StateVec::of({p, v});
    }
};

class ZohDynamics final : public Dynamics {
  public:
    ZohDynamics(std::shared_ptr<const Dynamics> inner, int hold, Box box)
        : inner_(std::move(inner)), hold_(hold), box_(std::move(box)) {}
    int dim() const override { return inner_->dim(); }
    StateVec step(const StateVec& x0, const std::vector<double>& u) const override {
        StateVec x = x0;
        for (int i = 0; i < hold_; ++i) {
            x = inner_->step(x, u);
            if (!box_.contains(x)) return x;  // absorbed mid-hold
        }
        return x;
    }

  private:
    std::shared_ptr<const Dynamics> inner_;
    int hold_;
    Box box_;
};

class ClosedLoopDynamics final : public Dynamics {
  public:
    ClosedLoopDynamics(const ControlSystem& sys, Policy policy)
        : dyn_(sys.dyn), values_(sys.inputs.values), policy_(std::move(policy)) {}
    int dim() const override { return dyn_->dim(); }
    StateVec step(const StateVec& x, const std::vector<double>&) const override {
        const Symbol u = policy_(x);
        return dyn_->step(x, values_[static_cast<std::size_t>(u)]);
    }

  private:
    std::shared_ptr<const Dynamics> dyn_;
    std::vector<std::vector<double>> values_;
    Policy policy_;
};

}  // namespace

ControlSystem zero_order_hold(const ControlSystem& sys, int T) {
    if (T < 1) throw std::invalid_argument("zero_order_hold: T must be >= 1");
    ControlSystem held = sys;
    held.name = sys.name + "_hold" + std::to_string(T);
    held.dyn = std::make_shared<ZohDynamics>(sys.dyn, T, sys.domain);
    return held;
}

ControlSystem closed_loop(const ControlSystem& sys, Policy policy, GridLabeler labeler) {
    ControlSystem cl;
    cl.name = sys.name + "_cl";
    cl.dyn = std::make_shared<ClosedLoopDynamics>(sys, std::move(policy));
    cl.domain = sys.domain;
    cl.inputs.labels = Alphabet({"cl"});
    cl.inputs.values = {{}};
    cl.labeler = std::move(labeler);
    return cl;
}

ControlSystem make_linear_benchmark() {
    ControlSystem sys;
    sys.name = "linear";
    sys.dyn = std::make_shared<MatrixDynamics>(
        2, 1, std::vector<double>{0.25, 0.5, -0.45, 0.25}, std::vector<double>{0.0, 1.0});
    sys.domain = Box{{-3.0, -3.0}, {3.0, 3.0}};
    sys.inputs.labels = Alphabet({"-0.3", "0", "0.3"});
    sys.inputs.values = {{-0.3}, {0.0}, {0.3}};
    std::vector<std::string> cells;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            cells.push_back("c" + std::to_string(i) + std::to_string(j));
    sys.labeler = GridLabeler::uniform(sys.domain, {3, 3}, Alphabet(cells));
    return sys;
}

ControlSystem make_mountain_car() {
    ControlSystem sys;
    sys.name = "mountain_car";
    sys.dyn = std::make_shared<MountainCarDynamics>();
    sys.domain = Box{{-1.2, -0.07}, {0.6, 0.07}};
    sys.inputs.labels = Alphabet({"-1", "+1"});
    sys.inputs.values = {{-1.0}, {1.0}};
    sys.labeler = GridLabeler::make(
        {{-1.2, -0.86, -0.52, -0.18, 0.16, 0.5, 0.6}, {-0.07, 0.07}},
        Alphabet({"R1", "R2", "R3", "R4", "R5", "G"}));
    return sys;
}

GridLabeler make_mountain_car_fine_labeler() {
    std::vector<std::string> names;
    names.reserve(1025);
    for (int i = 1; i <= 1024; ++i) names.push_back("R" + std::to_string(i));
    names.push_back("G");
    Box grid{{-1.2, -0.07}, {0.5, 0.07}};
    GridLabeler g = GridLabeler::uniform(grid, {32, 32}, Alphabet(std::move(names)));
    g.goal_override = {Box{{0.5, -0.07}, {0.6, 0.07}}, static_cast<Symbol>(1024)};
    return g;
}

}  // namespace salca
