#include "salca/abstraction.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace salca {
namespace {

std::uint64_t hash_of(const LSequence& w) {
    return fnv1a64(w.data.data(), w.data.size() * sizeof(Symbol));
}

std::size_t table_size_for(std::size_t n) {
    std::size_t cap = 16;
    while (cap * 7 < (n + 1) * 10) cap <<= 1;  // load factor <= ~0.7
    return cap;
}

// Insert-only dedup pool; ids are insertion order until canonicalized.
struct InternPool {
    std::vector<LSequence> items;
    std::vector<std::uint64_t> hashes;
    std::vector<std::uint32_t> table = std::vector<std::uint32_t>(16, kNoId);
    std::size_t mask = 15;

    void grow() {
        std::vector<std::uint32_t> bigger(table.size() * 2, kNoId);
        const std::size_t m2 = bigger.size() - 1;
        for (std::uint32_t id : table) {
            if (id == kNoId) continue;
            std::size_t slot = static_cast<std::size_t>(hashes[id]) & m2;
            while (bigger[slot] != kNoId) slot = (slot + 1) & m2;
            bigger[slot] = id;
        }
        table = std::move(bigger);
        mask = m2;
    }

    std::uint32_t intern(LSequence&& w) {
        const std::uint64_t h = hash_of(w);
        std::size_t slot = static_cast<std::size_t>(h) & mask;
        while (table[slot] != kNoId) {
            const std::uint32_t id = table[slot];
            if (hashes[id] == h && items[id] == w) return id;
            slot = (slot + 1) & mask;
        }
        const auto id = static_cast<std::uint32_t>(items.size());
        items.push_back(std::move(w));
        hashes.push_back(h);
        table[slot] = id;
        if (items.size() * 10 > table.size() * 7) grow();
        return id;
    }
};

// Sort the pool canonically; returns perm with perm[old_id] = new_id.
std::vector<std::uint32_t> canonicalize(std::vector<LSequence>& items) {
    std::vector<std::uint32_t> order(items.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return items[a].data < items[b].data;
    });
    std::vector<std::uint32_t> perm(items.size());
    std::vector<LSequence> sorted(items.size());
    for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
        perm[order[pos]] = pos;
        sorted[pos] = std::move(items[order[pos]]);
    }
    items = std::move(sorted);
    return perm;
}

LSequence prefix_window(const LSequence& w) {  // drop the newest dyad
    const int m = w.ell();
    return {w.outs().subspan(0, static_cast<std::size_t>(m)),
            w.ins().subspan(0, static_cast<std::size_t>(m - 1))};
}

LSequence suffix_window(const LSequence& w) {  // drop the oldest dyad
    const int m = w.ell();
    return {w.outs().subspan(1, static_cast<std::size_t>(m)),
            w.ins().subspan(1, static_cast<std::size_t>(m - 1))};
}

}  // namespace

void WindowIndex::rebuild(const std::vector<LSequence>& items) {
    table.assign(table_size_for(items.size()), kNoId);
    mask = table.size() - 1;
    for (std::uint32_t id = 0; id < items.size(); ++id) {
        std::size_t slot = static_cast<std::size_t>(hash_of(items[id])) & mask;
        while (table[slot] != kNoId) slot = (slot + 1) & mask;
        table[slot] = id;
    }
}

std::uint32_t WindowIndex::find(const std::vector<LSequence>& items, const LSequence& w) const {
    if (table.empty()) return kNoId;
    std::size_t slot = static_cast<std::size_t>(hash_of(w)) & mask;
    while (table[slot] != kNoId) {
        if (items[table[slot]] == w) return table[slot];
        slot = (slot + 1) & mask;
    }
    return kNoId;
}

std::vector<std::vector<std::uint32_t>> WindowSet::contributors() const {
    std::vector<std::vector<std::uint32_t>> inv(members.size());
    for (std::size_t r = 0; r < record_count(); ++r)
        for (std::uint32_t w : record_members(r)) inv[w].push_back(static_cast<std::uint32_t>(r));
    return inv;
}

WindowSet collect_windows_stream(std::size_t count,
                                 const std::function<ExternalBehavior(std::size_t)>& gen,
                                 int ell, int horizon, const Alphabet& input_labels,
                                 const Alphabet& output_labels) {
    if (ell < 0 || ell >= horizon)
        throw std::invalid_argument("collect_windows: need 0 <= ell < horizon");
    const int m = ell + 1;

    WindowSet w;
    w.m = m;
    w.horizon = horizon;
    w.input_labels = input_labels;
    w.output_labels = output_labels;
    w.rec_offsets.reserve(count + 1);
    w.rec_offsets.push_back(0);

    InternPool pool;
    std::vector<std::uint32_t> ids;  // scratch, per record
    for (std::size_t r = 0; r < count; ++r) {
        const ExternalBehavior gamma = gen(r);
        if (gamma.horizon() != horizon)
            throw std::invalid_argument("collect_windows: record horizon mismatch");
        ids.clear();
        for (int k = 0; k <= horizon; ++k) ids.push_back(pool.intern(window_at(gamma, m, k)));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        w.rec_members.insert(w.rec_members.end(), ids.begin(), ids.end());
        w.rec_offsets.push_back(w.rec_members.size());
    }

    const std::vector<std::uint32_t> perm = canonicalize(pool.items);
    w.members = std::move(pool.items);
    for (auto& id : w.rec_members) id = perm[id];
    for (std::size_t r = 0; r < count; ++r)  // remap broke the per-record order
        std::sort(w.rec_members.begin() + static_cast<std::ptrdiff_t>(w.rec_offsets[r]),
                  w.rec_members.begin() + static_cast<std::ptrdiff_t>(w.rec_offsets[r + 1]));
    w.index.rebuild(w.members);
    return w;
}

WindowSet collect_windows(const Dataset& d, int ell) {
    return collect_windows_stream(
        d.size(), [&d](std::size_t i) { return d.behavior(i); }, ell, d.horizon, d.input_labels,
        d.output_labels);
}

bool Salca::is_initial(std::uint32_t s) const {
    return std::binary_search(initial.begin(), initial.end(), s);
}

FiniteTS Salca::to_finite_ts() const {
    std::vector<int> init(initial.begin(), initial.end());
    FiniteTS ts = FiniteTS::make(input_labels, output_labels, state_output, std::move(init));
    for (std::uint32_t s = 0; s < num_states(); ++s)
        for (Symbol u = 0; u < input_labels.size(); ++u)
            for (std::uint32_t s2 : successors(s, u))
                ts.add_transition(static_cast<int>(s), u, static_cast<int>(s2));
    return ts;
}

Salca build_salca(WindowSet w) {
    Salca a;
    a.ell = w.m - 1;
    a.horizon = w.horizon;
    a.input_labels = w.input_labels;
    a.output_labels = w.output_labels;

    InternPool pool;
    struct Edge {
        std::uint32_t from;
        Symbol in;
        std::uint32_t to;
    };
    std::vector<Edge> edges;
    edges.reserve(w.members.size());
    std::vector<std::uint32_t> init;
    for (const LSequence& mem : w.members) {
        const std::uint32_t to = pool.intern(suffix_window(mem));
        if (mem.fully_padded()) {
            init.push_back(to);
        } else {
            const std::uint32_t from = pool.intern(prefix_window(mem));
            edges.push_back({from, mem.in(w.m - 1), to});
        }
    }

    const std::vector<std::uint32_t> perm = canonicalize(pool.items);
    a.states = std::move(pool.items);
    a.state_index.rebuild(a.states);
    a.state_output.resize(a.states.size());
    for (std::size_t s = 0; s < a.states.size(); ++s) a.state_output[s] = a.states[s].last_out();

    for (auto& s : init) s = perm[s];
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    a.initial = std::move(init);

    const std::size_t nu = static_cast<std::size_t>(a.input_labels.size());
    a.tr_offsets.assign(a.states.size() * nu + 1, 0);
    for (auto& e : edges) {
        e.from = perm[e.from];
        e.to = perm[e.to];
        ++a.tr_offsets[static_cast<std::size_t>(e.from) * nu + static_cast<std::size_t>(e.in) + 1];
    }
    for (std::size_t i = 1; i < a.tr_offsets.size(); ++i) a.tr_offsets[i] += a.tr_offsets[i - 1];
    a.tr_succ.resize(edges.size());
    {
        std::vector<std::uint64_t> cursor(a.tr_offsets.begin(), a.tr_offsets.end() - 1);
        for (const auto& e : edges) {
            const std::size_t slot =
                static_cast<std::size_t>(e.from) * nu + static_cast<std::size_t>(e.in);
            a.tr_succ[cursor[slot]++] = e.to;
        }
    }
    for (std::size_t slot = 0; slot + 1 < a.tr_offsets.size(); ++slot) {
        const auto b = a.tr_succ.begin() + static_cast<std::ptrdiff_t>(a.tr_offsets[slot]);
        const auto e = a.tr_succ.begin() + static_cast<std::ptrdiff_t>(a.tr_offsets[slot + 1]);
        std::sort(b, e);
        assert(std::adjacent_find(b, e) == e);  // members are distinct, so edges are too
    }

    a.windows = std::move(w);
    return a;
}

bool contains_behavior(const Salca& a, const ExternalBehavior& gamma) {
    if (!gamma.valid()) throw std::invalid_argument("contains_behavior: malformed behavior");
    if (gamma.horizon() < a.ell)
        throw std::invalid_argument("contains_behavior: behavior shorter than window order");
    for (int k = 0; k <= gamma.horizon(); ++k)
        if (!a.windows.contains(window_at(gamma, a.ell + 1, k))) return false;
    return true;
}

AbstractTracker tracker_init(const Salca& a, Symbol y0) {
    AbstractTracker t;
    t.a = &a;
    t.window = LSequence::padded_initial(a.ell, y0);
    const std::uint32_t s = a.state_id(t.window);
    t.violated = s == kNoId || !a.is_initial(s);
    return t;
}

void tracker_step(AbstractTracker& t, Symbol u, Symbol y) {
    if (!t.a->windows.contains(domino_concat(t.window, u, y))) t.violated = true;
    t.window = domino_step(t.window, u, y);
}

namespace {

// BFS over (state, order-m window) pairs; depth-limited when H >= 0.
// Returns the discovered windows (pool) and, via out param, the pairs.
InternPool window_bfs(const FiniteTS& ts, int m, int H,
                      std::vector<std::pair<int, std::uint32_t>>* pairs_out) {
    InternPool pool;
    std::vector<std::pair<int, std::uint32_t>> frontier;
    std::vector<std::pair<int, std::uint32_t>> seen;  // sorted set of (state, window id)
    auto discover = [&](int x, std::uint32_t wid, std::vector<std::pair<int, std::uint32_t>>& next) {
        const std::pair<int, std::uint32_t> key{x, wid};
        const auto it = std::lower_bound(seen.begin(), seen.end(), key);
        if (it != seen.end() && *it == key) return;
        seen.insert(it, key);
        next.push_back(key);
    };
    for (int x0 : ts.initial)
        discover(x0, pool.intern(LSequence::padded_initial(m, ts.output_of[static_cast<std::size_t>(x0)])),
                 frontier);
    for (int depth = 0; H < 0 || depth < H; ++depth) {
        std::vector<std::pair<int, std::uint32_t>> next;
        for (const auto& [x, wid] : frontier) {
            for (Symbol u = 0; u < ts.inputs.size(); ++u) {
                for (int x2 : ts.successors(x, u)) {
                    LSequence w2 = domino_step(pool.items[wid], u,
                                               ts.output_of[static_cast<std::size_t>(x2)]);
                    discover(x2, pool.intern(std::move(w2)), next);
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    if (pairs_out) *pairs_out = std::move(seen);
    return pool;
}

Salca exact_from_pool(const FiniteTS& ts, int ell, int H, InternPool pool) {
    WindowSet w;
    w.m = ell + 1;
    w.horizon = H;
    w.input_labels = ts.inputs;
    w.output_labels = ts.outputs;
    canonicalize(pool.items);
    w.members = std::move(pool.items);
    w.index.rebuild(w.members);
    return build_salca(std::move(w));
}

}  // namespace

Salca exact_salca(const FiniteTS& ts, int ell, int H) {
    if (ell < 0 || H < ell + 1)
        throw std::invalid_argument("exact_salca: need 0 <= ell < H");
    return exact_from_pool(ts, ell, H, window_bfs(ts, ell + 1, H, nullptr));
}

Salca exact_salca_saturated(const FiniteTS& ts, int ell) {
    if (ell < 0) throw std::invalid_argument("exact_salca: negative window order");
    return exact_from_pool(ts, ell, -1, window_bfs(ts, ell + 1, -1, nullptr));
}

std::vector<std::pair<int, LSequence>> reachable_window_pairs(const FiniteTS& ts, int ell, int H) {
    if (ell < 0) throw std::invalid_argument("reachable_window_pairs: negative window order");
    std::vector<std::pair<int, std::uint32_t>> pairs;
    InternPool pool = window_bfs(ts, ell, H, &pairs);
    std::vector<std::pair<int, LSequence>> out;
    out.reserve(pairs.size());
    for (const auto& [x, wid] : pairs) out.emplace_back(x, pool.items[wid]);
    return out;
}

}  // namespace salca
