#include "salca/lsequence.hpp"

#include <stdexcept>

namespace salca {

LSequence::LSequence(std::span<const Symbol> o, std::span<const Symbol> i) {
    if (o.size() != i.size() + 1)
        throw std::invalid_argument("lsequence: need one more output than inputs");
    data.reserve(o.size() + i.size());
    data.insert(data.end(), o.begin(), o.end());
    data.insert(data.end(), i.begin(), i.end());
}

LSequence LSequence::padded_initial(int ell, Symbol y0) {
    if (ell < 0 || (!is_real(y0) && y0 != kAbs))
        throw std::invalid_argument("lsequence: bad padded_initial arguments");
    LSequence z;
    z.data.assign(static_cast<std::size_t>(2 * ell + 1), kPad);
    z.data[static_cast<std::size_t>(ell)] = y0;
    return z;
}

int LSequence::pad_count() const {
    const int l = ell();
    int j = 0;
    while (j < l && out(j) == kPad) ++j;
    return j;
}

bool LSequence::valid() const {
    if (data.size() % 2 == 0) return false;
    const int l = ell();
    const int j = pad_count();
    if (last_out() == kPad) return false;
    for (int i = 0; i <= l; ++i)
        if ((out(i) == kPad) != (i < j)) return false;
    for (int i = 0; i < l; ++i) {
        if ((in(i) == kPad) != (i < j)) return false;
        if (in(i) == kAbs) return false;
    }
    return true;
}

std::string LSequence::display(const Alphabet& outputs, const Alphabet& inputs) const {
    std::string s;
    const int l = ell();
    for (int i = 0; i <= l; ++i) {
        if (i > 0) s += ' ';
        s += outputs.name(out(i));
        if (i < l) {
            s += ' ';
            s += inputs.name(in(i));
        }
    }
    return s;
}

bool ExternalBehavior::valid() const {
    if (outs.size() != ins.size() + 1) return false;
    for (Symbol y : outs)
        if (y == kPad || (!is_real(y) && y != kAbs)) return false;
    for (Symbol u : ins)
        if (!is_real(u)) return false;
    return true;
}

LSequence window_at(const ExternalBehavior& gamma, int m, int k) {
    const int H = gamma.horizon();
    if (m < 0) throw std::invalid_argument("window_at: negative order");
    if (k < 0 || k > H) throw std::invalid_argument("window_at: position out of range");
    LSequence z;
    z.data.assign(static_cast<std::size_t>(2 * m + 1), kPad);
    for (int i = 0; i <= m; ++i) {
        const int t = k - m + i;
        if (t >= 0) z.data[static_cast<std::size_t>(i)] = gamma.outs[static_cast<std::size_t>(t)];
    }
    for (int i = 0; i < m; ++i) {
        const int t = k - m + i;
        if (t >= 0) z.data[static_cast<std::size_t>(m + 1 + i)] = gamma.ins[static_cast<std::size_t>(t)];
    }
    return z;
}

std::vector<LSequence> split_windows(const ExternalBehavior& gamma, int m) {
    const int H = gamma.horizon();
    if (m < 0 || m > H)
        throw std::invalid_argument("split_windows: window order must be in [0, H]");
    std::vector<LSequence> ws;
    ws.reserve(static_cast<std::size_t>(H + 1));
    for (int k = 0; k <= H; ++k) ws.push_back(window_at(gamma, m, k));
    return ws;
}

LSequence domino_step(const LSequence& z, Symbol u, Symbol y) {
    if (!is_real(u)) throw std::invalid_argument("domino_step: input must be a real symbol");
    if (!is_real(y) && y != kAbs) throw std::invalid_argument("domino_step: bad output symbol");
    const int l = z.ell();
    LSequence r;
    r.data.reserve(z.data.size());
    for (int i = 1; i <= l; ++i) r.data.push_back(z.out(i));
    r.data.push_back(y);
    for (int i = 1; i < l; ++i) r.data.push_back(z.in(i));
    if (l > 0) r.data.push_back(u);
    return r;
}

LSequence domino_concat(const LSequence& z, Symbol u, Symbol y) {
    if (!is_real(u)) throw std::invalid_argument("domino_concat: input must be a real symbol");
    if (!is_real(y) && y != kAbs) throw std::invalid_argument("domino_concat: bad output symbol");
    const int l = z.ell();
    LSequence r;
    r.data.reserve(z.data.size() + 2);
    for (int i = 0; i <= l; ++i) r.data.push_back(z.out(i));
    r.data.push_back(y);
    for (int i = 0; i < l; ++i) r.data.push_back(z.in(i));
    r.data.push_back(u);
    return r;
}

}  // namespace salca
