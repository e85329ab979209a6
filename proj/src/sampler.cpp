#include "salca/sampler.hpp"

#include <stdexcept>
#include <thread>

namespace salca {

StateVec Dataset::initial_state(std::size_t i) const {
    StateVec x;
    x.n = state_dim;
    for (int j = 0; j < state_dim; ++j)
        x[j] = x0[i * static_cast<std::size_t>(state_dim) + static_cast<std::size_t>(j)];
    return x;
}

ExternalBehavior Dataset::behavior(std::size_t i) const {
    ExternalBehavior b;
    const std::size_t h = static_cast<std::size_t>(horizon);
    b.ins.assign(ins.begin() + static_cast<std::ptrdiff_t>(i * h),
                 ins.begin() + static_cast<std::ptrdiff_t>((i + 1) * h));
    b.outs.assign(outs.begin() + static_cast<std::ptrdiff_t>(i * (h + 1)),
                  outs.begin() + static_cast<std::ptrdiff_t>((i + 1) * (h + 1)));
    return b;
}

bool Dataset::operator==(const Dataset& o) const {
    return system == o.system && seed == o.seed && horizon == o.horizon &&
           state_dim == o.state_dim && input_labels == o.input_labels &&
           input_values == o.input_values && output_labels == o.output_labels &&
           x0 == o.x0 && ins == o.ins && outs == o.outs;
}

Dataset sample_dataset(const ControlSystem& sys, const SampleConfig& cfg) {
    if (cfg.horizon < 1) throw std::invalid_argument("sample_dataset: horizon must be >= 1");
    if (cfg.workers < 1) throw std::invalid_argument("sample_dataset: workers must be >= 1");
    Dataset d;
    d.system = sys.name;
    d.seed = cfg.seed;
    d.horizon = cfg.horizon;
    d.state_dim = sys.domain.dim();
    d.input_labels = sys.inputs.labels;
    d.input_values = sys.inputs.values;
    d.output_labels = sys.labeler.labels;
    const std::size_t n = cfg.count;
    const std::size_t dim = static_cast<std::size_t>(d.state_dim);
    const std::size_t h = static_cast<std::size_t>(cfg.horizon);
    d.x0.resize(n * dim);
    d.ins.resize(n * h);
    d.outs.resize(n * (h + 1));

    auto fill = [&](std::size_t lo, std::size_t hi) {
        std::vector<Symbol> word(h);
        for (std::size_t i = lo; i < hi; ++i) {
            RecordRng rng(cfg.seed, i);
            const StateVec x = sys.domain.sample(rng);
            for (std::size_t k = 0; k < h; ++k)
                word[k] = static_cast<Symbol>(rng.uniform_index(sys.inputs.size()));
            const ExternalBehavior b = simulate(sys, x, word);
            for (std::size_t j = 0; j < dim; ++j) d.x0[i * dim + j] = x[static_cast<int>(j)];
            for (std::size_t k = 0; k < h; ++k) d.ins[i * h + k] = word[k];
            for (std::size_t k = 0; k <= h; ++k) d.outs[i * (h + 1) + k] = b.outs[k];
        }
    };

    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n ? n : 1));
    if (workers <= 1) {
        fill(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(fill, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return d;
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& d, std::size_t holdout) {
    if (holdout > d.size()) throw std::invalid_argument("holdout_split: holdout exceeds dataset");
    const std::size_t keep = d.size() - holdout;
    const std::size_t dim = static_cast<std::size_t>(d.state_dim);
    const std::size_t h = static_cast<std::size_t>(d.horizon);
    auto slice = [&](std::size_t lo, std::size_t hi) {
        Dataset s = d;
        s.x0.assign(d.x0.begin() + static_cast<std::ptrdiff_t>(lo * dim),
                    d.x0.begin() + static_cast<std::ptrdiff_t>(hi * dim));
        s.ins.assign(d.ins.begin() + static_cast<std::ptrdiff_t>(lo * h),
                     d.ins.begin() + static_cast<std::ptrdiff_t>(hi * h));
        s.outs.assign(d.outs.begin() + static_cast<std::ptrdiff_t>(lo * (h + 1)),
                      d.outs.begin() + static_cast<std::ptrdiff_t>(hi * (h + 1)));
        return s;
    };
    return {slice(0, keep), slice(keep, d.size())};
}

}  // namespace salca
