#ifndef RAJCHMAN_BIGNUM_HPP
#define RAJCHMAN_BIGNUM_HPP

#include <gmpxx.h>
#include <charconv>
#include <cstdint>
#include <string>
#include <stdexcept>

namespace rajchman {

using Nat = mpz_class;  // nonnegative by convention
using Int = mpz_class;
using Rat = mpq_class;

inline Nat pow2(unsigned long k) {
    Nat r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
    return r;
}

inline unsigned long bitlength(const Int& n) {
    if (n == 0) return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

// floor(sqrt(n)) for n >= 0
inline Nat isqrt(const Nat& n) {
    Nat r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline std::string dec(const Int& n) { return n.get_str(10); }

inline std::string rat_str(const Rat& q) {
    return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

inline Rat parse_rat(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational: " + s);
    q.canonicalize();
    return q;
}

// Shortest decimal that round-trips to the same double.
inline std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// FNV-1a over a byte string; used for content ids and config hashes.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    static const char* d = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) { s[i] = d[h & 0xf]; h >>= 4; }
    return s;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace rajchman

#endif
