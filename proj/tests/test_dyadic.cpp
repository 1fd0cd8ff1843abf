#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rajchman/dyadic.hpp"

#include <random>

using namespace rajchman;

TEST_CASE("digit extraction") {
    CHECK(digit(6, 1) == 1);
    CHECK(digit(6, 0) == 0);
    CHECK(digit(pow2(100), 100) == 1);
    CHECK(digit(pow2(100), 99) == 0);
}

TEST_CASE("frac_part_scaled") {
    CHECK(frac_part_scaled(5, 2) == Rat(1, 4));
    CHECK(frac_part_scaled(8, 3) == 0);
    CHECK(frac_part_scaled(12345, 7) == Rat(57, 128));
}

TEST_CASE("reduce_mod_pow2") {
    CHECK(reduce_mod_pow2(6, 2) == 2);
    CHECK(reduce_mod_pow2(pow2(8), 8) == 0);
    Nat n = 487;  // 3^5 * 2 + 1
    CHECK(reduce_mod_pow2(n, 8) == 231);
    // digits agree below R
    for (unsigned long k = 0; k < 8; ++k)
        CHECK(digit(reduce_mod_pow2(n, 8), k) == digit(n, k));
}

TEST_CASE("digit_change_count") {
    CHECK(digit_change_count(6, 1, 3) == 2);  // pairs (0,1),(1,1),(1,0)
    CHECK(digit_change_count(0, 1, 10) == 0);
    CHECK(digit_change_count(pow2(10) - 1, 1, 9) == 0);
    CHECK_THROWS(digit_change_count(6, 0, 3));
    // complement invariance inside the window
    std::mt19937_64 eng(7);
    for (int i = 0; i < 200; ++i) {
        Nat xi((unsigned long)eng());
        Nat comp = pow2(64) - 1 - xi;
        CHECK(digit_change_count(xi, 1, 62) == digit_change_count(comp, 1, 62));
    }
}

TEST_CASE("alpha validation") {
    CHECK(alpha_valid(0.1));
    CHECK(alpha_valid(0.24));  // the explicit inequality holds on all of (0, 1/4)
    CHECK_FALSE(alpha_valid(0.4));
    CHECK_FALSE(alpha_valid(0.25));
    CHECK_FALSE(alpha_valid(0.0));
    CHECK_THROWS(check_alpha(0.4));
}

TEST_CASE("profile against a direct scan") {
    auto s = ParamSchedule::explicit_list({0, 4, 16, 64},
                                          {Rat(1, 2), Rat(1, 2), Rat(1, 2)});
    SUBCASE("xi = 0 is below threshold everywhere") {
        DigitChangeProfile p = profile(Nat(0), s, 2, 3, Rat(1, 10));
        for (const auto& r : p.per_block) {
            CHECK(r.count == 0);
            CHECK(r.below);
        }
    }
    SUBCASE("alternating bits are never below") {
        Nat xi = 0;
        for (unsigned long k = 0; k < 64; k += 2) mpz_setbit(xi.get_mpz_t(), k);
        DigitChangeProfile p = profile(xi, s, 2, 3, Rat(1, 10));
        for (const auto& r : p.per_block) {
            CHECK(r.count == (std::uint64_t)(shifted_block(s, r.ell).size() - 1));
            CHECK_FALSE(r.below);
        }
    }
    SUBCASE("random xi matches an independent digit scan") {
        std::mt19937_64 eng(11);
        for (int i = 0; i < 100; ++i) {
            Nat xi((unsigned long)eng());
            DigitChangeProfile p = profile(xi, s, 2, 3, Rat(1, 10));
            for (const auto& r : p.per_block) {
                BlockRange bb = shifted_block(s, r.ell);
                std::uint64_t cnt = 0;
                for (std::uint64_t k = bb.lo + 1; k <= bb.hi; ++k)
                    if (digit(xi, k) != digit(xi, k - 1)) ++cnt;
                CHECK(r.count == cnt);
                CHECK(r.below == (Rat(cnt) < Rat(1, 10) * Rat((unsigned long)bb.size())));
            }
        }
    }
}

TEST_CASE("low-change string counts") {
    CHECK(count_low_change_strings(4, 1) == 8);
    CHECK(count_low_change_strings(5, 0) == 2);
    CHECK(count_low_change_strings(20, 2) == 382);
    for (unsigned k = 1; k <= 16; ++k)
        for (unsigned m = 0; m + 1 <= k; ++m)
            CHECK(count_low_change_strings(k, m) == count_low_change_strings_brute(k, m));
    // cap 2^{ceil(3k/4)} at alpha = 0.1
    for (std::uint64_t k = 8; k <= 64; ++k) {
        Nat cnt = count_low_change_strings(k, k / 10);
        CHECK(cnt <= pow2((unsigned long)((3 * k + 3) / 4)));
    }
}

TEST_CASE("v2 splits") {
    V2Split a = v2(Int(12));
    CHECK(a.e == 2);
    CHECK(a.pow2 == 4);
    CHECK(a.odd == 3);
    V2Split b = v2(Int(7));
    CHECK(b.e == 0);
    CHECK(b.odd == 7);
    V2Split c = v2(Int(80));  // 3^4 - 1
    CHECK(c.e == 4);
    CHECK(c.pow2 == 16);
    CHECK(c.odd == 5);
    V2Split d = v2(Int(-12));
    CHECK(d.e == 2);
    CHECK(d.odd == -3);
    CHECK_THROWS(v2(Int(0)));
}
