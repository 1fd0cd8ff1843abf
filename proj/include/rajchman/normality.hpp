#ifndef RAJCHMAN_NORMALITY_HPP
#define RAJCHMAN_NORMALITY_HPP

#include "rajchman/bignum.hpp"
#include "rajchman/cache.hpp"
#include "rajchman/measure.hpp"
#include "rajchman/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rajchman {

// Truncated real x = X / 2^P.
struct DyadicApprox {
    Nat X;
    unsigned long P = 0;  // precision in bits; 0 <= X < 2^P
};

DyadicApprox to_dyadic(const SampleStream& x);

struct WeylTerm {
    unsigned long n = 0;
    double re = 0, im = 0;
};

struct WeylReport {
    unsigned long b = 2;
    Int h;
    unsigned long N = 0;
    double re = 0, im = 0;   // (1/N) sum_{n=1}^N e(h x b^n)
    double abs = 0;
    double arith_err = 0;    // 2 pi |h| b^N 2^{-P}
    std::vector<WeylTerm> terms;
    std::string to_csv() const;  // n,re,im
};

// Exponential-sum average with exact modular fractional parts; requires
// P >= N ceil(log2 b) + 40 so the truncation error stays controlled.
WeylReport weyl_sum(const DyadicApprox& x, unsigned long b, const Int& h,
                    unsigned long N);

struct BaseDigits {
    unsigned long b = 2;
    std::vector<unsigned long> digits;
    unsigned long valid_horizon = 0;  // digits unaffected by the 2^-P truncation
};

BaseDigits base_digits(const DyadicApprox& x, unsigned long b, unsigned long count);

struct BlockFreq {
    unsigned long b = 2;
    unsigned k = 1;
    unsigned long depth = 0;
    std::vector<std::uint64_t> counts;  // index = sum digit_i b^i over the window
    double max_dev = 0;                 // max |freq - b^{-k}|
};

BlockFreq block_freq(const DyadicApprox& x, unsigned long b, unsigned k,
                     unsigned long depth);

// Derived quantities of the even-base non-normality construction: b = 2^M B
// with B odd, alpha the midpoint M/(2 log2 b), c = b^{alpha/M}/2 = 2^{-1/2},
// N = 1 + floor((alpha/M) K_ell), N' = 1 + floor(K_{ell-1}/M).
struct NonNormalSchedule {
    unsigned long b = 2;
    unsigned M = 1;
    unsigned long B = 1;
    double alpha = 0;
    std::size_t ell = 0;
    std::uint64_t K_ell = 0, K_prev = 0;
    std::uint64_t N = 0, Nprime = 0;
    double c = 0;
    double log2_bcK = 0;  // log2(b c^{K_ell}) = log2 b - K_ell/2
    std::string to_json() const;
};

NonNormalSchedule nonnormal_schedule(unsigned long b, const ParamSchedule& s,
                                     std::size_t ell);

struct Certificate {
    NonNormalSchedule ns;
    bool hypothesis_ok = false;  // digits vanish on the conditioned block
    bool frac_ok = false;        // {x b^n} <= b c^{K_ell} for all n in (N', N]
    bool quarter_ok = false;     // b c^{K_ell} < 1/4, exact
    std::uint64_t frac_checked = 0;
    double reS_over_N = 0;       // full sum n = 1..N
    double reS2_over_N = 0;      // tail sum n in (N', N]
    double lower_bound = 0;      // (1 - N'/N) cos(2 pi b c^{K}) - N'/N
    bool pass = false;
    std::string to_json() const;
};

// Finite instance of the S2 chain: exact big-integer fractional-part checks,
// then the certified Re S/N lower bound. The zero-block hypothesis is
// verified, never assumed.
Certificate certify_nonnormal(const SampleStream& x, unsigned long b,
                              const ParamSchedule& s, std::size_t ell);

// R from 2^{R-1} < N <= 2^R, with R = 1 at the N = 1 boundary.
std::uint64_t R_of_N(std::uint64_t N);

struct V1Report {
    std::uint64_t r = 0, N = 0, R = 0, R0 = 0;
    Nat ord;  // ord_{2^{R0}}(r)
    std::vector<std::uint64_t> members;
    Rat c0_hat;       // min ord ratio over the scan
    double bound = 0; // (2/c0_hat) N 2^{-sqrt R}
    bool scan_agrees = false;  // direct divisibility cross-check
};

V1Report set_V1(std::uint64_t r, std::uint64_t N, unsigned k_scan = 20);

// U1(v, ell): u in [1, N] whose xi = h r^u (r^v - 1) mod 2^R has fewer than
// alpha #(Bbar_ell) digit changes over Bbar_ell.
std::vector<std::uint64_t> set_U1(std::uint64_t v, std::size_t ell, const Int& h,
                                  std::uint64_t r, std::uint64_t N,
                                  const ParamSchedule& s, const Rat& alpha);

// Dense table of g(u, v) = |muhat(h r^u (r^v - 1))| for u, v in [1, N_max],
// built once and shared by the decomposition and the series trace.
class DelGrid {
public:
    DelGrid(const Int& h, std::uint64_t r, std::uint64_t N_max,
            const ParamSchedule& s, double tol, FourierCache* cache,
            unsigned threads = 1);
    double g(std::uint64_t u, std::uint64_t v) const {
        return vals_[(u - 1) * N_max_ + (v - 1)];
    }
    std::uint64_t n_max() const { return N_max_; }
    double tol() const { return tol_; }

private:
    std::uint64_t N_max_;
    double tol_;
    std::vector<double> vals_;
};

struct DelDecomposition {
    Int h;
    std::uint64_t r = 0, N = 0, R = 0, R0 = 0;
    std::size_t t = 0, T = 0;
    std::vector<std::uint64_t> V1;
    double I = 0, I1 = 0, I21 = 0, I22 = 0;
    double J0 = 0, J1 = 0;
    double sum_err = 0;          // N^2 * evaluator tol
    std::uint64_t gamma_count = 0;  // #Gamma
    Rat eps_prod;                // prod_{t < l < T} eps_l
    Rat c0_hat;
    double bound_I1 = 0, bound_I21 = 0, bound_J0 = 0, bound_J1 = 0;
    bool el_bound_ok = true;  // |E_l(xi)| <= (sqrt2/2)^{alpha(K_l - K_{l-1})} + tol on Gamma
    std::string to_csv_row() const;
    static std::string csv_header();
};

DelDecomposition del_decompose(const Int& h, std::uint64_t r, std::uint64_t N,
                               const ParamSchedule& s, const DelGrid& grid,
                               const Rat& alpha, const Rat& gamma);

struct DelSeriesRow {
    std::uint64_t N = 0;
    double I = 0;        // I(h; r, N)
    double partial = 0;  // sum_{n <= N} n^{-3} I(h; r, n)
    double increment = 0;
};

struct DelSeries {
    std::vector<DelSeriesRow> rows;  // N = 2, 4, ..., N_max
    bool monotone = false;           // I non-decreasing in N
    bool tail_decreasing = false;    // last three increments strictly decrease
    std::string to_csv() const;
};

DelSeries del_series(const Int& h, std::uint64_t r, const ParamSchedule& s,
                     const DelGrid& grid);

}  // namespace rajchman

#endif
