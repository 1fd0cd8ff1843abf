#ifndef RAJCHMAN_DYADIC_HPP
#define RAJCHMAN_DYADIC_HPP

#include "rajchman/bignum.hpp"
#include "rajchman/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rajchman {

// k-th binary digit of eta >= 0, k = 0 least significant.
inline int digit(const Nat& eta, unsigned long k) {
    return mpz_tstbit(eta.get_mpz_t(), k);
}

// {eta / 2^k} as an exact rational with denominator 2^k.
Rat frac_part_scaled(const Nat& eta, unsigned long k);

// eta mod 2^R; keeps digits below position R.
Nat reduce_mod_pow2(const Nat& eta, unsigned long R);

// #{k in [a,b] : (d_{k-1}(xi), d_k(xi)) is (0,1) or (1,0)}, a >= 1.
std::uint64_t digit_change_count(const Nat& xi, std::uint64_t a, std::uint64_t b);

struct DigitChangeRow {
    std::size_t ell = 0;
    std::uint64_t count = 0;   // N_l(xi) over the shifted block Bbar_l
    Rat threshold;             // alpha * #Bbar_l
    bool below = false;        // count < threshold
};

struct DigitChangeProfile {
    Nat xi;
    std::vector<DigitChangeRow> per_block;
    std::string to_csv() const;  // rows: ell,count,threshold_num,threshold_den,below
};

// Validates the sufficient condition 2^{1/8} > (2a)^a (1-2a)^{1/2-a} for
// alpha in (0, 1/4); throws if it fails.
void check_alpha(double alpha);
bool alpha_valid(double alpha);

// Per-block change counts of xi over Bbar_l for ell in [ell_lo, ell_hi],
// flagged against the threshold alpha * #Bbar_l.
DigitChangeProfile profile(const Nat& xi, const ParamSchedule& s,
                           std::size_t ell_lo, std::size_t ell_hi,
                           const Rat& alpha);

// Number of binary strings of length k with at most m adjacent changes:
// 2 * sum_{j=0}^{m} C(k-1, j).
Nat count_low_change_strings(std::uint64_t k, std::uint64_t m);
// Brute-force enumeration over all 2^k strings, k <= 24.
Nat count_low_change_strings_brute(unsigned k, unsigned m);

struct V2Split {
    unsigned long e = 0;  // 2-adic valuation of |n|
    Nat pow2;             // 2^e
    Int odd;              // n / 2^e, carries the sign of n
};

// Largest e with 2^e | n, plus the split n = 2^e * odd. Throws on n = 0.
V2Split v2(const Int& n);

}  // namespace rajchman

#endif
