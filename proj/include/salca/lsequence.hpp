#pragma once
/* l-sequences (windows over external behaviors) and the domino operations
 * that stitch them together.
 *
 * An order-l window holds l+1 outputs and l inputs:
 *     y[0] u[0] y[1] ... u[l-1] y[l]
 * Windows taken near the start of a behavior are padded on the left: the
 * first j outputs and first j inputs equal kPad, everything after them is
 * real, and the final output is never padding.  Windows are stored packed
 * (outputs first, then inputs), so the default lexicographic order on the
 * backing vector is the canonical order: outputs first, then inputs, with
 * padding sorting below every real symbol. */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "salca/symbols.hpp"

namespace salca {

struct LSequence {
    std::vector<Symbol> data;  // outs (ell+1 entries) followed by ins (ell entries)

    LSequence() = default;
    LSequence(std::span<const Symbol> outs, std::span<const Symbol> ins);

    // fully padded window  # ... # y0  (the state a behavior starts in)
    static LSequence padded_initial(int ell, Symbol y0);

    int ell() const { return static_cast<int>(data.size() / 2); }
    std::span<const Symbol> outs() const { return {data.data(), data.size() / 2 + 1}; }
    std::span<const Symbol> ins() const { return {data.data() + data.size() / 2 + 1, data.size() / 2}; }
    Symbol out(int i) const { return data[static_cast<std::size_t>(i)]; }
    Symbol in(int i) const { return data[data.size() / 2 + 1 + static_cast<std::size_t>(i)]; }
    Symbol last_out() const { return data[data.size() / 2]; }

    int pad_count() const;        // leading padded positions (outputs == inputs count)
    bool fully_padded() const { return pad_count() == ell(); }
    bool valid() const;           // structural invariants listed above

    std::string display(const Alphabet& outputs, const Alphabet& inputs) const;

    bool operator==(const LSequence& o) const { return data == o.data; }
    auto operator<=>(const LSequence& o) const { return data <=> o.data; }
};

struct LSeqHash {
    std::size_t operator()(const LSequence& s) const {
        return static_cast<std::size_t>(fnv1a64(s.data.data(), s.data.size() * sizeof(Symbol)));
    }
};

// External behavior y0 u0 y1 ... u_{H-1} y_H.  No padding symbols; kAbs
// outputs are allowed (trajectories that left the domain).
struct ExternalBehavior {
    std::vector<Symbol> outs;  // H+1
    std::vector<Symbol> ins;   // H

    int horizon() const { return static_cast<int>(ins.size()); }
    bool valid() const;

    bool operator==(const ExternalBehavior& o) const = default;
    auto operator<=>(const ExternalBehavior& o) const = default;
};

// The order-m window of gamma ending at position k (0 <= k <= H); positions
// before time 0 are padded.  Well defined for any m >= 0.
LSequence window_at(const ExternalBehavior& gamma, int m, int k);

// All order-m windows of gamma, one per position k = 0..H (duplicates kept;
// callers wanting the set dedup).  Rejects m < 0 and m > H.
std::vector<LSequence> split_windows(const ExternalBehavior& gamma, int m);

// Shift z one step: drop the oldest dyad, append (u, y).  Order preserved.
LSequence domino_step(const LSequence& z, Symbol u, Symbol y);

// Extend z by (u, y) without dropping: order grows by one.  The result is
// the overlap-concatenation whose membership in the window set decides the
// abstract transition relation.
LSequence domino_concat(const LSequence& z, Symbol u, Symbol y);

}  // namespace salca
