#include "salca/transition_system.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace salca {

FiniteTS FiniteTS::make(Alphabet ins, Alphabet outs, std::vector<Symbol> output_of,
                        std::vector<int> initial) {
    FiniteTS ts;
    ts.inputs = std::move(ins);
    ts.outputs = std::move(outs);
    ts.output_of = std::move(output_of);
    for (Symbol y : ts.output_of)  // kAbs is a legal output (left-the-domain states)
        if ((y < 0 && y != kAbs) || y >= ts.outputs.size())
            throw std::invalid_argument("finite_ts: state output outside alphabet");
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    for (int x : initial)
        if (x < 0 || x >= ts.num_states())
            throw std::invalid_argument("finite_ts: initial state out of range");
    if (initial.empty()) throw std::invalid_argument("finite_ts: no initial states");
    ts.initial = std::move(initial);
    ts.succ.assign(ts.output_of.size(),
                   std::vector<std::vector<int>>(static_cast<std::size_t>(ts.inputs.size())));
    return ts;
}

void FiniteTS::add_transition(int x, Symbol u, int x2) {
    if (x < 0 || x >= num_states() || x2 < 0 || x2 >= num_states() || u < 0 || u >= inputs.size())
        throw std::invalid_argument("finite_ts: transition out of range");
    auto& v = succ[static_cast<std::size_t>(x)][static_cast<std::size_t>(u)];
    auto it = std::lower_bound(v.begin(), v.end(), x2);
    if (it == v.end() || *it != x2) v.insert(it, x2);
}

std::vector<Symbol> FiniteTS::inputs_at(int x) const {
    std::vector<Symbol> us;
    for (Symbol u = 0; u < inputs.size(); ++u)
        if (!successors(x, u).empty()) us.push_back(u);
    return us;
}

bool FiniteTS::nonblocking() const {
    for (int x = 0; x < num_states(); ++x)
        if (inputs_at(x).empty()) return false;
    return true;
}

bool FiniteTS::free_input() const {
    for (int x = 0; x < num_states(); ++x)
        for (Symbol u = 0; u < inputs.size(); ++u)
            if (successors(x, u).empty()) return false;
    return true;
}

std::size_t FiniteTS::num_transitions() const {
    std::size_t n = 0;
    for (const auto& per_state : succ)
        for (const auto& v : per_state) n += v.size();
    return n;
}

std::vector<ExternalBehavior> ts_behaviors(const FiniteTS& ts, int x0,
                                           std::span<const Symbol> ins) {
    if (x0 < 0 || x0 >= ts.num_states())
        throw std::invalid_argument("ts_behaviors: state out of range");
    for (Symbol u : ins)
        if (u < 0 || u >= ts.inputs.size())
            throw std::invalid_argument("ts_behaviors: input out of range");
    // frontier of (state, output word so far)
    std::set<std::pair<int, std::vector<Symbol>>> frontier;
    frontier.insert({x0, {ts.output_of[static_cast<std::size_t>(x0)]}});
    for (Symbol u : ins) {
        std::set<std::pair<int, std::vector<Symbol>>> next;
        for (const auto& [x, word] : frontier) {
            for (int x2 : ts.successors(x, u)) {
                auto w = word;
                w.push_back(ts.output_of[static_cast<std::size_t>(x2)]);
                next.insert({x2, std::move(w)});
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) return {};
    }
    std::set<ExternalBehavior> out;
    for (auto& [x, word] : frontier) {
        ExternalBehavior b;
        b.outs = word;
        b.ins.assign(ins.begin(), ins.end());
        out.insert(std::move(b));
    }
    return {out.begin(), out.end()};
}

namespace {

void require_comparable(const FiniteTS& a, const FiniteTS& b, const Relation& r) {
    if (a.inputs != b.inputs || a.outputs != b.outputs)
        throw std::invalid_argument("relation check: alphabet mismatch");
    if (!a.nonblocking() || !b.nonblocking())
        throw std::invalid_argument("relation check: blocking system");
    for (auto [x, y] : r)
        if (x < 0 || x >= a.num_states() || y < 0 || y >= b.num_states())
            throw std::invalid_argument("relation check: pair out of range");
}

std::vector<std::vector<int>> related_lists(const Relation& r, int na) {
    std::vector<std::vector<int>> rel(static_cast<std::size_t>(na));
    for (auto [x, y] : r) rel[static_cast<std::size_t>(x)].push_back(y);
    for (auto& v : rel) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return rel;
}

bool contains(const std::vector<int>& sorted, int x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

bool check_sr(const FiniteTS& a, const FiniteTS& b, const Relation& r) {
    require_comparable(a, b, r);
    auto rel = related_lists(r, a.num_states());

    for (int xa0 : a.initial) {
        bool ok = false;
        for (int xb0 : rel[static_cast<std::size_t>(xa0)])
            if (contains(b.initial, xb0)) { ok = true; break; }
        if (!ok) return false;
    }
    for (auto [xa, xb] : r) {
        if (a.output_of[static_cast<std::size_t>(xa)] != b.output_of[static_cast<std::size_t>(xb)])
            return false;
        for (Symbol u = 0; u < a.inputs.size(); ++u) {
            const auto& sa = a.successors(xa, u);
            if (sa.empty()) continue;
            const auto& sb = b.successors(xb, u);
            if (sb.empty()) return false;  // input enabled at xa but not at xb
            for (int xa2 : sa) {
                bool matched = false;
                for (int xb2 : sb)
                    if (contains(rel[static_cast<std::size_t>(xa2)], xb2)) { matched = true; break; }
                if (!matched) return false;
            }
        }
    }
    return true;
}

bool check_asr(const FiniteTS& b, const FiniteTS& a, const Relation& z) {
    require_comparable(b, a, z);
    auto rel = related_lists(z, b.num_states());
    // inverse view for the successor-matching condition
    std::vector<std::vector<int>> rel_inv(static_cast<std::size_t>(a.num_states()));
    for (auto [xb, xa] : z) rel_inv[static_cast<std::size_t>(xa)].push_back(xb);
    for (auto& v : rel_inv) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    for (int xb0 : b.initial) {
        bool ok = false;
        for (int xa0 : rel[static_cast<std::size_t>(xb0)])
            if (contains(a.initial, xa0)) { ok = true; break; }
        if (!ok) return false;
    }
    for (auto [xb, xa] : z) {
        if (b.output_of[static_cast<std::size_t>(xb)] != a.output_of[static_cast<std::size_t>(xa)])
            return false;
        for (Symbol u = 0; u < b.inputs.size(); ++u) {
            const auto& sb = b.successors(xb, u);
            if (sb.empty()) continue;
            const auto& sa = a.successors(xa, u);
            if (sa.empty()) return false;  // input enabled at xb but not at xa
            for (int xa2 : sa) {
                bool matched = false;
                for (int xb2 : sb)
                    if (contains(rel[static_cast<std::size_t>(xb2)], xa2)) { matched = true; break; }
                if (!matched) return false;
            }
        }
    }
    return true;
}

}  // namespace salca
