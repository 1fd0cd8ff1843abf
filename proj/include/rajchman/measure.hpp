#ifndef RAJCHMAN_MEASURE_HPP
#define RAJCHMAN_MEASURE_HPP

#include "rajchman/bignum.hpp"
#include "rajchman/schedule.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace rajchman {

// mu[K, eps] is fully determined by its schedule.
struct MeasureSpec {
    ParamSchedule sched;
};

// Name of the sampling generator, embedded in reports for reproducibility.
extern const char* const kRngName;

struct FourierValue {
    Int eta;
    double re = 0, im = 0;
    double err = 0;  // rigorous bound: product truncation + accumulated rounding
    unsigned blocks_used = 0;
    double abs() const;
};

struct SampleStream {
    std::uint64_t seed = 0;
    Nat X;                     // digits d_1..d_depth; d_k = bit (depth - k) of X
    unsigned long depth = 0;
    std::set<std::size_t> forced_zero_blocks;
    int digit_at(unsigned long k) const;  // 1-based fractional position
};

// Exact mass of the dyadic cylinder {x : d_k(x) = prefix[k-1]}.
Rat cylinder_mass(const MeasureSpec& spec, const std::vector<int>& prefix);

// Mass m_i of the generation-ell interval indexed by (i_1, ..., i_ell),
// 0 <= i_j < 2^{K_j - K_{j-1}}, as the product of per-generation ratios.
Rat interval_mass(const MeasureSpec& spec, std::size_t ell,
                  const std::vector<Nat>& index);

// Blockwise draw: with probability eps_l the zero block, else fair bits.
// Deterministic given seed; per-block substreams derived from (seed, ell) so
// forced blocks do not shift downstream randomness.
SampleStream sample(const MeasureSpec& spec, std::uint64_t seed,
                    unsigned long depth,
                    const std::set<std::size_t>& forced_zero_blocks = {});

struct EBlockValue {
    double re = 0, im = 0;
    double err = 0;  // rounding bound
};

// E_l(eta) = prod_{k in B_l} (1 + e(eta 2^{-k})) / 2, evaluated from exact
// fractional parts {eta/2^k} at the given working precision (bits).
EBlockValue E_block(const MeasureSpec& spec, std::size_t ell, const Int& eta,
                    long prec = 96);

// muhat(eta) = prod_l [eps_l + (1-eps_l) E_l(eta)], truncated once the
// rigorous tail bound drops below tol/2; err carries tail + rounding <= tol.
// Negative eta via conjugation.
FourierValue mu_hat(const MeasureSpec& spec, const Int& eta, double tol);

struct McEstimate {
    Int eta;
    double re = 0, im = 0;
    double sigma_re = 0, sigma_im = 0;  // standard error of the mean
    double radius4 = 0;                 // 4 sigma, max of the two coordinates
    double trunc_err = 0;               // depth-truncation bound
    unsigned long depth = 0;
    std::uint64_t n = 0;
};

// Independent Monte Carlo oracle: empirical mean of e(x eta) over sampled x.
McEstimate mu_hat_mc(const MeasureSpec& spec, const Int& eta,
                     std::uint64_t n_samples, std::uint64_t seed);

// Lemma-style bound eps_l eps_{l-1} + eps_l + eps_{l-1} + 2^{-(K_{l-1}-K_{l-2})}
// for |n| in [2^{K_{l-1}-1}, 2^{K_l-1}), capped at 1.
double lyons_bound(const MeasureSpec& spec, const Int& n);

// (log log |n|)^{-1+kappa}, natural logs; |n| >= 16.
double decay_envelope(const Int& n, double kappa);

// log|n| for huge n, via mantissa + exponent.
double log_abs(const Int& n);

// y/2^depth as a double from the top 64 bits of y; |error| < 2^-63.
double frac_to_double(const Nat& y, unsigned long depth);

}  // namespace rajchman

#endif
