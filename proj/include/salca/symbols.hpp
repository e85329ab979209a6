#pragma once
/* Symbol indices and alphabet tables shared by behaviors, windows and
 * transition systems.  Two reserved values live outside every alphabet:
 * kPad marks pre-initial padding positions and kAbs is the absorbing
 * output emitted once a trajectory leaves the system domain. */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace salca {

using Symbol = std::int16_t;

inline constexpr Symbol kPad = -1;  // pre-initial padding, never part of an alphabet
inline constexpr Symbol kAbs = -2;  // absorbing out-of-domain output

inline constexpr const char* kPadName = "#";
inline constexpr const char* kAbsName = "abs";

inline bool is_real(Symbol s) { return s >= 0; }

// Label table.  Indices are dense and stable; labels must be unique,
// non-empty, whitespace-free and must not shadow the reserved names.
struct Alphabet {
    std::vector<std::string> labels;
    std::unordered_map<std::string, Symbol> lookup;

    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names) : labels(std::move(names)) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const std::string& l = labels[i];
            if (l.empty() || l == kPadName || l == kAbsName)
                throw std::invalid_argument("alphabet: reserved or empty label '" + l + "'");
            for (char c : l)
                if (c == ' ' || c == '\t' || c == '\n' || c == ',' || c == '|')
                    throw std::invalid_argument("alphabet: label contains separator: '" + l + "'");
            if (!lookup.emplace(l, static_cast<Symbol>(i)).second)
                throw std::invalid_argument("alphabet: duplicate label '" + l + "'");
        }
        if (labels.size() > 32000)
            throw std::invalid_argument("alphabet: too many labels");
    }

    int size() const { return static_cast<int>(labels.size()); }

    Symbol index_of(const std::string& label) const {
        auto it = lookup.find(label);
        if (it == lookup.end())
            throw std::invalid_argument("alphabet: unknown label '" + label + "'");
        return it->second;
    }

    const std::string& name(Symbol s) const {
        static const std::string pad = kPadName, abs = kAbsName;
        if (s == kPad) return pad;
        if (s == kAbs) return abs;
        if (s < 0 || s >= size())
            throw std::out_of_range("alphabet: symbol index out of range");
        return labels[static_cast<std::size_t>(s)];
    }

    bool operator==(const Alphabet& o) const { return labels == o.labels; }
    bool operator!=(const Alphabet& o) const { return !(*this == o); }
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace salca
