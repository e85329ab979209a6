#pragma once
/* Scenario-theory certificates.
 *
 * The violation level eps(k, beta, N) is the root in (0,1] of the degenerate
 * risk/complexity polynomial equation
 *
 *   C(N,k) t^{N-k} - beta/(2N) sum_{i=k}^{N-1} C(i,k) t^{i-k}
 *                  - beta/(6N) sum_{i=N+1}^{4N} C(i,k) t^{i-k} = 0,  t = 1-eps,
 *
 * evaluated in log space (binomials overflow far below these N).  Dividing by
 * C(N,k) t^{N-k} and moving terms, eps is feasible (the residual is positive)
 * iff logaddexp(la, lb) < log1p(beta/2N) where la/lb are the log of the two
 * normalized sums; that predicate is monotone past the peak, so bisection on
 * it converges to the root.  The decision complexity k = s* is upper-bounded
 * by a deterministic greedy set cover of the window set by records. */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "salca/abstraction.hpp"

namespace salca {

// Root-finding / numeric-evaluation failure (CLI maps this to exit code 4).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violation level at complexity k, confidence 1-beta, sample count N.
// Relative tolerance 1e-9; eps(N, beta, N) == 1.  Throws NumericError if no
// feasible point or no sign change is found (never clamps silently).
double epsilon(int k, double beta, long long n);

// Size of a greedy cover of the member windows by records: at every step
// pick the record covering the most uncovered windows, ties to the lowest
// record id.  Returns the selected record ids in pick order.
std::vector<std::uint32_t> greedy_cover(const WindowSet& w);

// Cover size only; n must equal the record count backing w.
int complexity_greedy(const WindowSet& w, std::size_t n);

struct PacCertificate {
    std::size_t n = 0;           // records the abstraction was built from
    double beta = 0;
    int ell = 0;
    int horizon = 0;
    std::uint64_t u_card = 0;    // |U| of the sampled input alphabet
    int s_star = 0;
    double eps = 0;
    double eps_bar = 0;          // min(1, eps * u_card^horizon)
};

// u_card^h as a saturating integer (anything past 2^63 clamps; the product
// with eps <= 1 is far above the eps_bar clamp long before that).
std::uint64_t ipow_sat(std::uint64_t base, int exp);

double eps_bar_of(double eps, std::uint64_t u_card, int horizon);

// s_star -> eps -> eps_bar for the window set; n and horizon must match the
// provenance of w (defensive cross-checks, not trusted inputs).
PacCertificate certify(const WindowSet& w, std::size_t n, double beta, std::uint64_t u_card,
                       int horizon);

struct EmpiricalViolation {
    std::size_t violations = 0;
    std::size_t total = 0;
    double rate() const { return total ? static_cast<double>(violations) / static_cast<double>(total) : 0.0; }
};

// Fraction of fresh records whose behavior is not contained in a.
EmpiricalViolation empirical_violation(const Salca& a, const Dataset& fresh);

// Constants of the concrete dynamics used by the horizon-extension results.
// m_x bounds the one-step map from below (inverse Lipschitz), l_x/l_u are the
// contraction moduli in state/input, c and q relate the chosen p-norm to the
// 2-norm (c = q = 1 for p = 2), n is the state dimension.
struct LipschitzConstants {
    double m_x = 0;
    double l_x = 0;
    double l_u = 0;
    double c = 1;
    double q = 1;
    int n = 0;
};

// lambda = u_card * (c*q/m_x)^n
double lambda_of(const LipschitzConstants& k, std::uint64_t u_card);

// Growth factor nu(lambda) when a horizon-H certificate is stretched to H+T.
double nu_factor(double lambda, int horizon, int extra);

// Smallest k such that psi * l_x^k <= r - rho with rho = l_u*u_sup/(1-l_x):
// after k steps every trajectory stays inside the radius-r ball around the
// equilibrium, so behaviors of any length repeat the ball's output beyond k.
// Requires 0 < l_x < 1 and r > rho.
int contracting_horizon(double l_x, double l_u, double psi, double r, double u_sup);

// (sigma_max, sigma_min) of a row-major 2x2 matrix, analytically.
std::pair<double, double> singular_values_2x2(const std::vector<double>& a);

}  // namespace salca
