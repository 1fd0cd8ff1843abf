// Desk-scale acceptance: nine criteria, one PASS/FAIL line each.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rajchman/cache.hpp"
#include "rajchman/commands.hpp"
#include "rajchman/dyadic.hpp"
#include "rajchman/measure.hpp"
#include "rajchman/normality.hpp"
#include "rajchman/order.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

using namespace rajchman;
namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void report(int idx, const char* name, bool ok, double secs) {
    std::printf("%s: criterion %d (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", idx, name,
                secs);
    std::fflush(stdout);
    CHECK(ok);
}

ParamSchedule crit_schedule() {
    return ParamSchedule::explicit_list(
        {0, 4, 16, 64, 256}, {Rat(1, 1), Rat(1, 2), Rat(1, 3), Rat(1, 4)});
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: fourier oracle equivalence") {
    Timer tm;
    MeasureSpec spec{crit_schedule()};
    bool ok = true;
    for (long e : {1L, 3L, 7L, 100L, 12345L}) {
        FourierValue v = mu_hat(spec, Int(e), 1e-12);
        McEstimate m = mu_hat_mc(spec, Int(e), 1000000, 2024);
        double slack = m.radius4 + m.trunc_err + v.err;
        ok = ok && std::fabs(v.re - m.re) <= slack && std::fabs(v.im - m.im) <= slack;
    }
    double s = tm.secs();
    report(1, "fourier oracle equivalence, 4 sigma at 1e6 samples", ok && s < 60.0, s);
}

TEST_CASE("criterion 2: multiplicative decay bound") {
    Timer tm;
    MeasureSpec spec{crit_schedule()};
    std::mt19937_64 eng(271828);
    bool ok = true;
    auto rand_bits = [&](unsigned long bits) {
        Nat x = 0;
        for (unsigned long got = 0; got < bits; got += 64) x = (x << 64) | Nat(eng());
        Nat r;
        mpz_fdiv_r_2exp(r.get_mpz_t(), x.get_mpz_t(), bits);
        return r;
    };
    // eta in [2^{K_{l-1}-1}, 2^{K_l-1}) for l = 3 (bits 16..63) and l = 4 (64..255)
    for (int range = 0; range < 2; ++range) {
        unsigned long lo = range == 0 ? 15 : 63, hi = range == 0 ? 63 : 255;
        for (int i = 0; i < 200; ++i) {
            Nat eta;
            do {
                eta = rand_bits(hi);
            } while (eta < pow2(lo));
            FourierValue v = mu_hat(spec, Int(eta), 1e-12);
            if (v.abs() > lyons_bound(spec, Int(eta)) + 1e-9) ok = false;
        }
    }
    double s = tm.secs();
    report(2, "decay bound on 400 random frequencies, tol 1e-9", ok, s);
}

TEST_CASE("criterion 3: low-change string counts") {
    Timer tm;
    bool ok = true;
    for (unsigned k = 1; k <= 16; ++k)
        for (unsigned m = 0; m + 1 <= k; ++m)
            if (count_low_change_strings(k, m) != count_low_change_strings_brute(k, m))
                ok = false;
    for (std::uint64_t k = 8; k <= 64; ++k)
        if (count_low_change_strings(k, k / 10) > pow2((unsigned long)((3 * k + 3) / 4)))
            ok = false;
    double s = tm.secs();
    report(3, "closed-form counts vs brute force and the 2^(3k/4) cap", ok && s < 10.0,
           s);
}

TEST_CASE("criterion 4: orders and residue hits mod 2^k") {
    Timer tm;
    bool ok = true;
    for (unsigned k = 3; k <= 30; ++k) {
        if (ord_pow2(3, k).ord != pow2(k - 2)) ok = false;
        if (order_ratio_scan(3, k).rows.back().ratio != Rat(1, 4)) ok = false;
    }
    // nonzero hit counts equal 2^k / ord_{2^{k-e}}(r), e = v2(rho); the
    // maximum is rho_2 / c0(r), which is 4 rho_2 for r in {3,5} and
    // 8 rho_2 for r in {7,9}
    for (std::uint64_t r : {3, 5, 7, 9}) {
        Rat c0 = order_ratio_scan(r, 14).min_ratio;
        if (c0 != (r >= 7 ? Rat(1, 8) : Rat(1, 4))) ok = false;
        for (unsigned k = 2; k <= 14; ++k)
            for (long rho : {-3L, -2L, 2L, 3L, 6L, 12L}) {
                unsigned long e = std::min<unsigned long>(v2(Int(rho)).e, k);
                std::uint64_t rho2 = std::uint64_t(1) << e;
                std::uint64_t step =
                    e == k ? (std::uint64_t(1) << k)
                           : Nat(pow2(k) / ord_pow2(r, k - (unsigned)e).ord).get_ui();
                std::uint64_t mx = 0;
                for (std::uint64_t c : residue_hit_table(Int(rho), r, k)) {
                    if (c != 0 && c != step) ok = false;
                    mx = std::max(mx, c);
                }
                if (Rat((unsigned long)mx) * c0 > rho2) ok = false;
            }
    }
    double s = tm.secs();
    report(4, "ord_{2^k}(3) = 2^(k-2) and residue hit counts", ok, s);
}

TEST_CASE("criterion 5: non-normality certificate") {
    Timer tm;
    std::vector<std::uint64_t> K = {0};
    std::vector<Rat> eps;
    for (std::uint64_t l = 1; l <= 7; ++l) {
        K.push_back(K.back() == 0 ? 4 : K.back() * 4);  // K_l = 4^l
        eps.push_back(Rat(1, (unsigned long)l));
    }
    auto sch = ParamSchedule::explicit_list(K, eps);
    MeasureSpec spec{sch};
    SampleStream x = sample(spec, 42, (unsigned long)sch.K(7), {6});
    Certificate cert = certify_nonnormal(x, 2, sch, 6);
    bool ok = cert.pass && cert.ns.N == 2049 && cert.ns.Nprime == 1025 &&
              cert.frac_ok && cert.quarter_ok &&
              cert.reS_over_N >= cert.lower_bound - 1e-9;
    // the JSON document round-trips as JSON with the verdict present
    ok = ok && cert.to_json().find("\"pass\": true") != std::string::npos;
    double s = tm.secs();
    report(5, "certified Re S/N lower bound, seed 42, forced block 6", ok && s < 60.0,
           s);
}

TEST_CASE("criterion 6: mass distribution exactness") {
    Timer tm;
    bool ok = true;
    MeasureSpec spec3{ParamSchedule::explicit_list({0, 2, 6, 12},
                                                   {Rat(1, 2), Rat(1, 3), Rat(1, 4)})};
    for (std::size_t gen = 1; gen <= 3; ++gen) {
        Rat total = 0;
        std::vector<std::uint64_t> widths;
        for (std::size_t l = 1; l <= gen; ++l)
            widths.push_back(spec3.sched.K(l) - spec3.sched.K(l - 1));
        std::vector<Nat> idx(gen, Nat(0));
        while (true) {
            total += interval_mass(spec3, gen, idx);
            std::size_t j = gen;
            bool carry = true;
            while (carry && j > 0) {
                --j;
                idx[j] += 1;
                if (idx[j] < pow2((unsigned long)widths[j]))
                    carry = false;
                else
                    idx[j] = 0;
            }
            if (carry) break;
        }
        if (total != 1) ok = false;
    }
    // cylinder masses vs exhaustive convolution enumeration, prefixes <= 6
    auto s2 = ParamSchedule::explicit_list({0, 2, 6}, {Rat(1, 2), Rat(1, 3)});
    MeasureSpec spec2{s2};
    for (unsigned len = 1; len <= 6; ++len)
        for (std::uint64_t p = 0; p < (std::uint64_t(1) << len); ++p) {
            std::vector<int> bits;
            for (unsigned i = 0; i < len; ++i)
                bits.push_back((int)((p >> (len - 1 - i)) & 1));
            // enumerate all 2^6 digit words with their convolution weights
            Rat brute = 0;
            for (std::uint64_t w = 0; w < 64; ++w) {
                Rat w1 = w >> 4 == 0 ? Rat(1, 2) + Rat(1, 8) : Rat(1, 8);
                Rat w2 = (w & 15) == 0 ? Rat(1, 3) + Rat(2, 48) : Rat(2, 48);
                Rat weight = w1 * w2;
                if ((w >> (6 - len)) == p) brute += weight;
            }
            if (cylinder_mass(spec2, bits) != brute) ok = false;
        }
    double s = tm.secs();
    report(6, "generation partitions of unity and convolution enumeration", ok, s);
}

TEST_CASE("criterion 7: V1 structure") {
    Timer tm;
    V1Report rep = set_V1(3, 1024);
    bool ok = rep.scan_agrees && rep.R == 10 && rep.R0 == 3 && rep.ord == 2 &&
              rep.members.size() == 1024 / 2;
    for (std::size_t i = 0; ok && i < rep.members.size(); ++i)
        if (rep.members[i] != 2 * (i + 1)) ok = false;
    double s = tm.secs();
    report(7, "order-multiple membership vs direct divisibility scan", ok, s);
}

TEST_CASE("criterion 8: decomposition identity and series trend") {
    Timer tm;
    // desk schedule: K_l = 2^l for l = 1..10, eps_l = 1/l
    std::vector<std::uint64_t> K = {0};
    std::vector<Rat> eps;
    for (std::uint64_t l = 1; l <= 10; ++l) {
        K.push_back(std::uint64_t(1) << l);
        eps.push_back(Rat(1, (unsigned long)l));
    }
    auto sch = ParamSchedule::explicit_list(K, eps);
    fs::path dir = fs::temp_directory_path() / "rajchman_acceptance_del";
    fs::remove_all(dir);
    fs::create_directories(dir);
    FourierCache cache((dir / "cache.jsonl").string());
    DelGrid grid(1, 3, 256, sch, 1e-9, &cache);
    bool ok = true;
    for (std::uint64_t N = 2; N <= 256; N *= 2) {
        DelDecomposition d = del_decompose(1, 3, N, sch, grid, Rat(1, 10), Rat(2));
        if (std::fabs(d.I - (d.I1 + d.I21 + d.I22)) >
            1e-9 * (double)(N * N) + 1e-12)
            ok = false;
        if (!d.el_bound_ok) ok = false;
    }
    DelSeries ser = del_series(1, 3, sch, grid);
    ok = ok && ser.monotone && ser.tail_decreasing;
    double s = tm.secs();
    report(8, "I = I1 + I21 + I22 and decreasing dyadic series increments",
           ok && s < 600.0, s);
}

TEST_CASE("criterion 9: byte-identical reruns") {
    Timer tm;
    RunConfig cfg;
    cfg.sched = ParamSchedule::explicit_list({0, 2, 6, 14},
                                             {Rat(1, 2), Rat(1, 3), Rat(1, 4)});
    cfg.samples = 20000;
    cfg.depth = 14;
    fs::path dir = fs::temp_directory_path() / "rajchman_acceptance_rerun";
    fs::remove_all(dir);
    cfg.out = (dir / "run").string();
    std::ostringstream log;
    std::vector<Int> etas = {Int(0), Int(1), Int(100), Int(12345)};

    RunConfig del_cfg = cfg;
    std::vector<std::uint64_t> K;
    for (std::uint64_t k = 0; k <= 32; ++k) K.push_back(k);
    del_cfg.sched = ParamSchedule::explicit_list(K, std::vector<Rat>(32, Rat(1, 2)));
    del_cfg.n_max = 16;
    del_cfg.out = cfg.out;
    del_cfg.cache_path = cfg.out + "/del_cache.jsonl";

    RunConfig adm_cfg = cfg;
    adm_cfg.sched = ParamSchedule::geometric(10);
    adm_cfg.out = cfg.out;

    auto run_all = [&] {
        bool rc = cmd_sample(cfg, log) == 0;
        rc = cmd_fourier(cfg, etas, log) == 0 && rc;
        rc = cmd_weyl(cfg, "half", 3, 1, 30, log) == 0 && rc;
        rc = cmd_verify_lemmas(cfg, log) == 0 && rc;
        rc = cmd_del(del_cfg, 1, 3, log) == 0 && rc;
        rc = cmd_admissibility(adm_cfg, log) == 0 && rc;
        return rc;
    };
    bool ok = run_all();
    const char* files[] = {"sample_stream.txt", "cylinder_freq.csv", "fourier.csv",
                           "weyl.csv",          "verify_lemmas.csv", "del.csv",
                           "del_series.csv",    "admissibility.csv"};
    std::vector<std::string> first;
    for (const char* f : files) first.push_back(slurp(cfg.out + "/" + f));
    ok = run_all() && ok;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i].empty()) ok = false;
        if (slurp(cfg.out + std::string("/") + files[i]) != first[i]) ok = false;
    }
    double s = tm.secs();
    report(9, "rerun with fixed config and seed reproduces every artifact", ok, s);
}
