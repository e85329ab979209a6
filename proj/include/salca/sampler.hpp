#pragma once
/* Drawing i.i.d. trajectory records: uniform initial state over the domain
 * box, uniform inputs over the input alphabet.  Storage is columnar so large
 * datasets stay compact; record i is fully determined by (seed, i), so the
 * worker count never changes the bits and shorter datasets are prefixes of
 * longer ones. */

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "salca/systems.hpp"

namespace salca {

struct SampleConfig {
    std::uint64_t seed = 0;
    std::size_t count = 0;
    int horizon = 1;
    int workers = 1;
};

struct Dataset {
    std::string system;
    std::uint64_t seed = 0;
    int horizon = 0;
    int state_dim = 0;
    Alphabet input_labels;
    std::vector<std::vector<double>> input_values;
    Alphabet output_labels;
    std::vector<double> x0;    // count * state_dim
    std::vector<Symbol> ins;   // count * horizon
    std::vector<Symbol> outs;  // count * (horizon+1)

    std::size_t size() const {
        return state_dim ? x0.size() / static_cast<std::size_t>(state_dim) : 0;
    }
    StateVec initial_state(std::size_t i) const;
    ExternalBehavior behavior(std::size_t i) const;
    bool operator==(const Dataset& o) const;
};

// Per record: draw the initial state (one uniform per axis), then the input
// word (one uniform index per step), then simulate.
Dataset sample_dataset(const ControlSystem& sys, const SampleConfig& cfg);

// Deterministic split: the first size-m records stay in the build half, the
// last m records form the holdout.
std::pair<Dataset, Dataset> holdout_split(const Dataset& d, std::size_t holdout);

}  // namespace salca
