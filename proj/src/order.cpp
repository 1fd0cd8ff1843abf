#include "rajchman/order.hpp"

#include <mutex>
#include <sstream>
#include <stdexcept>

namespace rajchman {

Nat pow_mod(const Int& a, const Nat& e, const Nat& m) {
    if (m < 1) throw std::invalid_argument("pow_mod: modulus must be >= 1");
    if (e < 0) throw std::invalid_argument("pow_mod: exponent must be >= 0");
    Nat r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

Nat pow_mod_naive(const Int& a, std::uint64_t e, const Nat& m) {
    Nat base = a % m;
    if (base < 0) base += m;
    Nat acc = 1 % m;
    for (std::uint64_t i = 0; i < e; ++i) acc = acc * base % m;
    return acc;
}

OrderRecord ord_pow2(std::uint64_t r, unsigned k) {
    if (r < 3 || r % 2 == 0)
        throw std::invalid_argument("ord_pow2: r must be odd and >= 3");
    if (k < 1) throw std::invalid_argument("ord_pow2: k must be >= 1");
    OrderRecord rec;
    rec.r = r;
    rec.k = k;
    Nat m = pow2(k);
    // ord divides phi(2^k) = 2^{k-1}, hence is a power of two; walk successive
    // squares until the residue hits 1
    Nat x = Nat(r) % m;
    Nat ord = 1;
    while (x != 1) {
        x = x * x % m;
        ord *= 2;
        if (ord > m) throw std::logic_error("ord_pow2: order search overran 2^k");
    }
    // minimality: 2 is the only prime divisor of ord
    if (ord > 1 && pow_mod(Nat(r), ord / 2, m) == 1)
        throw std::logic_error("ord_pow2: minimality violated");
    if (pow_mod(Nat(r), ord, m) != 1)
        throw std::logic_error("ord_pow2: r^ord != 1");
    rec.ord = ord;
    rec.ratio = Rat(ord, m);
    rec.ratio.canonicalize();
    return rec;
}

OrderRatioScan order_ratio_scan(std::uint64_t r, unsigned k_max) {
    if (k_max > 40) throw std::invalid_argument("order_ratio_scan: k_max <= 40");
    OrderRatioScan scan;
    scan.r = r;
    for (unsigned k = 1; k <= k_max; ++k) {
        OrderRecord rec = ord_pow2(r, k);
        if (k == 1 || rec.ratio < scan.min_ratio) scan.min_ratio = rec.ratio;
        scan.rows.push_back(std::move(rec));
    }
    return scan;
}

std::string OrderRatioScan::to_csv() const {
    std::ostringstream os;
    os << "r,k,ord,ratio_num,ratio_den\n";
    for (const auto& rec : rows)
        os << rec.r << "," << rec.k << "," << dec(rec.ord) << ","
           << dec(rec.ratio.get_num()) << "," << dec(rec.ratio.get_den()) << "\n";
    return os.str();
}

std::vector<std::uint64_t> residue_hit_table(const Int& rho, std::uint64_t r,
                                             unsigned k) {
    if (abs(rho) <= 1)
        throw std::invalid_argument("residue_hit_count: |rho| must be >= 2");
    if (k < 1 || k > 30) throw std::invalid_argument("residue_hit_table: k in [1,30]");
    Nat m = pow2(k);
    Nat ord = ord_pow2(r, k).ord;
    std::uint64_t period = ord.get_ui();
    std::uint64_t reps = (std::uint64_t(1) << k) / period;  // orbit repeats
    std::vector<std::uint64_t> table(std::uint64_t(1) << k, 0);
    Nat x = rho % m;
    if (x < 0) x += m;
    for (std::uint64_t i = 0; i < period; ++i) {
        table[x.get_ui()] += reps;
        x = x * r % m;
    }
    return table;
}

std::uint64_t residue_hit_count(const Int& rho, std::uint64_t r, unsigned k,
                                const Nat& sigma) {
    if (sigma < 0 || sigma >= pow2(k))
        throw std::invalid_argument("residue_hit_count: sigma out of range");
    return residue_hit_table(rho, r, k)[sigma.get_ui()];
}

OrderRecord OrderCache::get(std::uint64_t r, unsigned k) {
    {
        std::shared_lock lk(mu_);
        auto it = map_.find({r, k});
        if (it != map_.end()) return it->second;
    }
    OrderRecord rec = ord_pow2(r, k);
    std::unique_lock lk(mu_);
    return map_.emplace(std::make_pair(r, k), std::move(rec)).first->second;
}

}  // namespace rajchman
