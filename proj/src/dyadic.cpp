#include "rajchman/dyadic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rajchman {

Rat frac_part_scaled(const Nat& eta, unsigned long k) {
    if (eta < 0) throw std::invalid_argument("frac_part_scaled: eta must be >= 0");
    Nat num;
    mpz_fdiv_r_2exp(num.get_mpz_t(), eta.get_mpz_t(), k);
    Rat q(num, pow2(k));
    q.canonicalize();
    return q;
}

Nat reduce_mod_pow2(const Nat& eta, unsigned long R) {
    Nat r;
    mpz_fdiv_r_2exp(r.get_mpz_t(), eta.get_mpz_t(), R);
    return r;
}

std::uint64_t digit_change_count(const Nat& xi, std::uint64_t a, std::uint64_t b) {
    if (a < 1 || a > b) throw std::invalid_argument("digit_change_count: need 1 <= a <= b");
    // changes of adjacent bits = popcount of (xi ^ (xi >> 1)) restricted to the window
    std::uint64_t count = 0;
    int prev = digit(xi, a - 1);
    for (std::uint64_t k = a; k <= b; ++k) {
        int cur = digit(xi, k);
        if (cur != prev) ++count;
        prev = cur;
    }
    return count;
}

bool alpha_valid(double alpha) {
    if (!(alpha > 0 && alpha < 0.25)) return false;
    // 2^{1/8} > (2a)^a (1-2a)^{1/2-a}, compared in logs
    double lhs = 0.125 * std::log(2.0);
    double rhs = alpha * std::log(2 * alpha) + (0.5 - alpha) * std::log(1 - 2 * alpha);
    return lhs > rhs;
}

void check_alpha(double alpha) {
    if (!alpha_valid(alpha))
        throw std::invalid_argument(
            "alpha fails the digit-counting inequality 2^{1/8} > (2a)^a (1-2a)^{1/2-a}");
}

DigitChangeProfile profile(const Nat& xi, const ParamSchedule& s,
                           std::size_t ell_lo, std::size_t ell_hi,
                           const Rat& alpha) {
    if (!(alpha > 0 && alpha < Rat(1, 4)))
        throw std::invalid_argument("profile: alpha must lie in (0, 1/4)");
    check_alpha(alpha.get_d());
    DigitChangeProfile p;
    p.xi = xi;
    for (std::size_t ell = ell_lo; ell <= ell_hi; ++ell) {
        BlockRange bb = shifted_block(s, ell);
        DigitChangeRow row;
        row.ell = ell;
        // pairs (d_{k-1}, d_k) for k in [K_{l-1}, K_l - 1]; the pair index
        // starts one past the window's left edge
        std::uint64_t a = bb.lo + 1;
        row.count = a <= bb.hi ? digit_change_count(xi, a, bb.hi) : 0;
        row.threshold = alpha * Rat((unsigned long)bb.size());
        row.below = Rat((unsigned long)row.count) < row.threshold;
        p.per_block.push_back(row);
    }
    return p;
}

std::string DigitChangeProfile::to_csv() const {
    std::ostringstream os;
    os << "ell,count,threshold_num,threshold_den,below\n";
    for (const auto& r : per_block)
        os << r.ell << "," << r.count << "," << dec(r.threshold.get_num()) << ","
           << dec(r.threshold.get_den()) << "," << (r.below ? 1 : 0) << "\n";
    return os.str();
}

Nat count_low_change_strings(std::uint64_t k, std::uint64_t m) {
    if (k < 1) throw std::invalid_argument("count_low_change_strings: k >= 1");
    if (m > k - 1) m = k - 1;
    Nat total = 0;
    for (std::uint64_t j = 0; j <= m; ++j) {
        Nat c;
        mpz_bin_uiui(c.get_mpz_t(), k - 1, j);
        total += c;
    }
    return 2 * total;
}

Nat count_low_change_strings_brute(unsigned k, unsigned m) {
    if (k > 24) throw std::invalid_argument("brute enumerator limited to k <= 24");
    std::uint64_t total = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t(1) << k); ++s) {
        // adjacent-change mask restricted to the k-1 pairs inside the string
        std::uint64_t pairs = (s ^ (s >> 1)) & ((std::uint64_t(1) << (k - 1)) - 1);
        if ((unsigned)__builtin_popcountll(pairs) <= m) ++total;
    }
    return Nat((unsigned long)total);
}

V2Split v2(const Int& n) {
    if (n == 0) throw std::invalid_argument("v2(0) undefined");
    V2Split r;
    r.e = mpz_scan1(n.get_mpz_t(), 0);
    r.pow2 = pow2(r.e);
    mpz_fdiv_q_2exp(r.odd.get_mpz_t(), n.get_mpz_t(), r.e);
    return r;
}

}  // namespace rajchman
