#ifndef RAJCHMAN_ORDER_HPP
#define RAJCHMAN_ORDER_HPP

#include "rajchman/bignum.hpp"

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

namespace rajchman {

// a^e mod m by square-and-multiply; a may be negative (reduced first).
Nat pow_mod(const Int& a, const Nat& e, const Nat& m);
// Naive repeated multiplication, for cross-checks; e must fit in uint64.
Nat pow_mod_naive(const Int& a, std::uint64_t e, const Nat& m);

struct OrderRecord {
    std::uint64_t r = 0;
    unsigned k = 0;
    Nat ord;     // ord_{2^k}(r)
    Rat ratio;   // ord / 2^k
};

// Multiplicative order of odd r >= 3 modulo 2^k. The search walks powers of
// two (ord | 2^{k-1} by Lagrange) and verifies minimality directly.
OrderRecord ord_pow2(std::uint64_t r, unsigned k);

struct OrderRatioScan {
    std::uint64_t r = 0;
    std::vector<OrderRecord> rows;   // k = 1 .. k_max
    Rat min_ratio;                   // empirical lower bound for c_0(r)
    std::string to_csv() const;      // r,k,ord,ratio_num,ratio_den
};

OrderRatioScan order_ratio_scan(std::uint64_t r, unsigned k_max);

// #{m in [0, 2^k) : rho * r^m = sigma mod 2^k}, counted along one period of
// the orbit. |rho| <= 1 rejected; negative rho reduced mod 2^k.
std::uint64_t residue_hit_count(const Int& rho, std::uint64_t r, unsigned k,
                                const Nat& sigma);

// All residue hit counts at once (index = sigma); same orbit walk.
std::vector<std::uint64_t> residue_hit_table(const Int& rho, std::uint64_t r,
                                             unsigned k);

// Memo table for OrderRecord keyed by (r, k); concurrent read/insert safe.
class OrderCache {
public:
    OrderRecord get(std::uint64_t r, unsigned k);

private:
    std::map<std::pair<std::uint64_t, unsigned>, OrderRecord> map_;
    std::shared_mutex mu_;
};

}  // namespace rajchman

#endif
