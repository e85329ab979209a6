#include "salca/pac.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace salca {
namespace {

// log sum_{i=lo}^{hi} exp(phi(i)) with phi(i) = log C(i,k) - log C(N,k)
// + (i-N) log t.  phi is discretely concave in i (the step difference
// log((i+1)/(i+1-k)) + log t decreases), so: locate the peak analytically,
// scale everything by exp(-phi(peak)), and walk outward with the term-ratio
// recurrence until terms stop mattering.  No per-term lgamma.
double log_sum(long long lo, long long hi, long long k, long long n, double log_t) {
    if (lo > hi) return -HUGE_VAL;
    // peak: first i with phi(i+1) <= phi(i), i.e. log((i+1)/(i+1-k)) <= -log_t
    long long pk = hi;
    if (log_t < 0) {
        // (i+1)/(i+1-k) <= exp(-log_t)  <=>  i+1 >= k/(1-exp(log_t))
        const double denom = -std::expm1(log_t);  // 1 - t
        const double ip = k / denom;              // peak near k/eps
        if (ip < static_cast<double>(hi)) pk = std::max(lo, static_cast<long long>(std::ceil(ip)) - 1);
        while (pk + 1 <= hi && std::log(static_cast<double>(pk + 1) / static_cast<double>(pk + 1 - k)) + log_t > 0)
            ++pk;  // guard against rounding in the analytic peak
        while (pk - 1 >= lo && std::log(static_cast<double>(pk) / static_cast<double>(pk - k)) + log_t < 0)
            --pk;
    }
    const double lgn = std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(n - k + 1));
    auto phi = [&](long long i) {
        return std::lgamma(static_cast<double>(i + 1)) - std::lgamma(static_cast<double>(i - k + 1)) - lgn +
               static_cast<double>(i - n) * log_t;
    };
    const double peak = phi(pk);
    const double t = std::exp(log_t);
    long double acc = 1.0L;  // the peak term, scaled to 1
    long double term = 1.0L;
    for (long long i = pk + 1; i <= hi; ++i) {  // upward: ratio (i/(i-k)) * t
        term *= static_cast<long double>(i) / static_cast<long double>(i - k) * t;
        acc += term;
        if (term < 1e-18L * acc) break;
    }
    term = 1.0L;
    for (long long i = pk - 1; i >= lo; --i) {  // downward: ratio ((i+1-k)/(i+1)) / t
        term *= static_cast<long double>(i + 1 - k) / static_cast<long double>(i + 1) / t;
        acc += term;
        if (term < 1e-18L * acc) break;
    }
    return peak + static_cast<double>(std::log(acc));
}

}  // namespace

double epsilon(int k, double beta, long long n) {
    if (n < 1 || k < 0 || k > n) throw std::invalid_argument("epsilon: need 0 <= k <= N, N >= 1");
    if (!(beta > 0.0) || !(beta < 1.0)) throw std::invalid_argument("epsilon: need 0 < beta < 1");
    if (k == n) return 1.0;  // every sample in the support: no generalization

    const double bound = std::log1p(beta / (2.0 * static_cast<double>(n)));
    const double log_b2 = std::log(beta / (2.0 * static_cast<double>(n)));
    const double log_b6 = std::log(beta / (6.0 * static_cast<double>(n)));
    // residual > 0 at eps  <=>  the polynomial is positive at t = 1-eps
    auto feasible = [&](double eps) {
        const double log_t = std::log1p(-eps);
        const double la = log_b2 + log_sum(k, n, k, n, log_t);
        const double lb = log_b6 + log_sum(n + 1, 4 * n, k, n, log_t);
        const double hi = std::max(la, lb);
        return hi + std::log1p(std::exp(std::min(la, lb) - hi)) < bound;
    };

    double pos = -1.0;  // some feasible eps (the root lies above it)
    for (double cand : {static_cast<double>(k) / static_cast<double>(n), 0.5, 0.9}) {
        if (cand > 0.0 && cand < 1.0 && feasible(cand)) {
            pos = cand;
            break;
        }
    }
    if (pos < 0.0) {
        // ternary search for the most feasible point (the residual's log-gap
        // is concave in eps, inherited from the concavity of the polynomial)
        double lo = 1e-15, hi = 1.0 - 1e-15;
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            const bool f1 = feasible(m1);
            if (f1) {
                pos = m1;
                break;
            }
            if (feasible(m2)) {
                pos = m2;
                break;
            }
            // neither feasible: move toward the smaller log-sum side blindly
            const double lt1 = std::log1p(-m1), lt2 = std::log1p(-m2);
            const double g1 = log_b2 + log_sum(k, n, k, n, lt1);
            const double g2 = log_b2 + log_sum(k, n, k, n, lt2);
            if (g1 < g2)
                hi = m2;
            else
                lo = m1;
        }
        if (pos < 0.0) throw NumericError("epsilon: no feasible point found for k=" + std::to_string(k));
    }

    double lo = pos, hi = 1.0;  // feasible at lo, infeasible at 1 (sums blow up)
    int it = 0;
    while (hi - lo > 1e-9 * lo + 1e-15) {
        if (++it > 200) throw NumericError("epsilon: bisection failed to converge");
        const double mid = lo + (hi - lo) / 2.0;
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return hi;  // conservative side of the root
}

std::vector<std::uint32_t> greedy_cover(const WindowSet& w) {
    if (!w.has_provenance()) throw std::invalid_argument("greedy_cover: window set has no provenance");
    const std::size_t n = w.record_count();
    std::vector<bool> covered(w.size(), false);
    std::size_t remaining = w.size();

    // lazy greedy: stale gains are re-evaluated on pop; a popped record is
    // taken only if its fresh gain still beats the best *queued* claim, which
    // reproduces the eager max-gain / lowest-id rule exactly.
    struct Entry {
        std::uint32_t gain;
        std::uint32_t id;
        bool operator<(const Entry& o) const {  // max-heap: gain desc, id asc
            return gain != o.gain ? gain < o.gain : id > o.id;
        }
    };
    std::priority_queue<Entry> heap;
    for (std::size_t r = 0; r < n; ++r)
        heap.push({static_cast<std::uint32_t>(w.record_members(r).size()), static_cast<std::uint32_t>(r)});

    std::vector<std::uint32_t> picked;
    while (remaining > 0) {
        if (heap.empty()) throw std::logic_error("greedy_cover: ran out of records with windows uncovered");
        const Entry e = heap.top();
        heap.pop();
        std::uint32_t gain = 0;
        for (std::uint32_t wid : w.record_members(e.id))
            if (!covered[wid]) ++gain;
        const bool take = heap.empty() || gain > heap.top().gain ||
                          (gain == heap.top().gain && e.id < heap.top().id);
        if (!take) {
            heap.push({gain, e.id});
            continue;
        }
        if (gain == 0) continue;  // nothing left in this record; never picked
        for (std::uint32_t wid : w.record_members(e.id)) {
            if (!covered[wid]) {
                covered[wid] = true;
                --remaining;
            }
        }
        picked.push_back(e.id);
    }
    return picked;
}

int complexity_greedy(const WindowSet& w, std::size_t n) {
    if (n != w.record_count())
        throw std::invalid_argument("complexity_greedy: record count does not match provenance");
    return static_cast<int>(greedy_cover(w).size());
}

std::uint64_t ipow_sat(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > (std::uint64_t{1} << 63) / base) return std::uint64_t{1} << 63;
        out *= base;
    }
    return out;
}

double eps_bar_of(double eps, std::uint64_t u_card, int horizon) {
    const double inflated = eps * static_cast<double>(ipow_sat(u_card, horizon));
    return inflated < 1.0 ? inflated : 1.0;
}

PacCertificate certify(const WindowSet& w, std::size_t n, double beta, std::uint64_t u_card,
                       int horizon) {
    if (horizon != w.horizon) throw std::invalid_argument("certify: horizon does not match window set");
    if (u_card == 0) throw std::invalid_argument("certify: empty input alphabet");
    PacCertificate c;
    c.n = n;
    c.beta = beta;
    c.ell = w.m - 1;
    c.horizon = horizon;
    c.u_card = u_card;
    c.s_star = complexity_greedy(w, n);
    c.eps = epsilon(c.s_star, beta, static_cast<long long>(n));
    c.eps_bar = eps_bar_of(c.eps, u_card, horizon);
    return c;
}

EmpiricalViolation empirical_violation(const Salca& a, const Dataset& fresh) {
    if (!(fresh.input_labels == a.input_labels) || !(fresh.output_labels == a.output_labels))
        throw std::invalid_argument("empirical_violation: alphabet mismatch");
    EmpiricalViolation ev;
    ev.total = fresh.size();
    for (std::size_t i = 0; i < fresh.size(); ++i)
        if (!contains_behavior(a, fresh.behavior(i))) ++ev.violations;
    return ev;
}

double lambda_of(const LipschitzConstants& k, std::uint64_t u_card) {
    if (!(k.m_x > 0.0)) throw std::invalid_argument("lambda_of: need m_x > 0");
    return static_cast<double>(u_card) * std::pow(k.c * k.q / k.m_x, k.n);
}

double nu_factor(double lambda, int horizon, int extra) {
    if (!(lambda > 0.0) || horizon < 1 || extra < 1)
        throw std::invalid_argument("nu_factor: need lambda > 0, H >= 1, T >= 1");
    const int tau = static_cast<int>((horizon + extra + 1 + horizon) / (horizon + 1)) - 1;  // ceil div
    double sum = 0.0;
    if (lambda >= 1.0) {
        for (int i = 0; i < tau; ++i) sum += std::pow(lambda, -static_cast<double>(i) * (horizon + 1));
        return 1.0 + std::pow(lambda, extra) * sum;
    }
    for (int i = 0; i < tau; ++i) sum += std::pow(lambda, static_cast<double>(i) * (horizon + 1));
    return std::pow(lambda, extra) + sum;
}

int contracting_horizon(double l_x, double l_u, double psi, double r, double u_sup) {
    if (!(l_x > 0.0) || !(l_x < 1.0)) throw std::invalid_argument("contracting_horizon: need 0 < l_x < 1");
    if (!(psi > 0.0)) throw std::invalid_argument("contracting_horizon: need psi > 0");
    const double rho = l_u * u_sup / (1.0 - l_x);
    if (!(r > rho))
        throw std::invalid_argument("contracting_horizon: ball radius too small (r <= l_u*u_sup/(1-l_x))");
    if (r - rho >= psi) return 0;  // already inside the ball
    // smallest integer k with psi * l_x^k <= r - rho (1e-9 slack so exact
    // ratios like log_0.5(1/4) = 2 do not round up)
    const double x = (std::log(r - rho) - std::log(psi)) / std::log(l_x);
    const long long k = static_cast<long long>(std::ceil(x - 1e-9));
    return static_cast<int>(std::max(k, 0LL));
}

std::pair<double, double> singular_values_2x2(const std::vector<double>& a) {
    if (a.size() != 4) throw std::invalid_argument("singular_values_2x2: need 4 entries");
    // eigenvalues of A^T A = [[p, q], [q, s]]
    const double p = a[0] * a[0] + a[2] * a[2];
    const double q = a[0] * a[1] + a[2] * a[3];
    const double s = a[1] * a[1] + a[3] * a[3];
    const double mean = 0.5 * (p + s);
    const double disc = std::sqrt(0.25 * (p - s) * (p - s) + q * q);
    const double hi = std::max(mean + disc, 0.0);
    const double lo = std::max(mean - disc, 0.0);
    return {std::sqrt(hi), std::sqrt(lo)};
}

}  // namespace salca
