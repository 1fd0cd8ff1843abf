#include "rajchman/normality.hpp"

#include "rajchman/dyadic.hpp"
#include "rajchman/order.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rajchman {

using json = nlohmann::json;

DyadicApprox to_dyadic(const SampleStream& x) { return {x.X, x.depth}; }

namespace {

Nat reduce_pow2(const Int& n, unsigned long bits) {
    Nat r;
    mpz_fdiv_r_2exp(r.get_mpz_t(), n.get_mpz_t(), bits);  // nonnegative result
    return r;
}

}  // namespace

WeylReport weyl_sum(const DyadicApprox& x, unsigned long b, const Int& h,
                    unsigned long N) {
    if (b < 2) throw std::invalid_argument("weyl_sum: base must be >= 2");
    if (h == 0) throw std::invalid_argument("weyl_sum: h must be nonzero");
    if (N < 1) throw std::invalid_argument("weyl_sum: N must be >= 1");
    unsigned long need = N * bitlength(Nat(b - 1)) + 40;
    if (x.P < need)
        throw std::invalid_argument("weyl_sum: precision starvation, need P >= " +
                                    std::to_string(need));
    WeylReport rep;
    rep.b = b;
    rep.h = h;
    rep.N = N;
    Nat y = reduce_pow2(h * x.X, x.P);
    double sr = 0, si = 0;
    for (unsigned long n = 1; n <= N; ++n) {
        y *= b;
        mpz_fdiv_r_2exp(y.get_mpz_t(), y.get_mpz_t(), x.P);
        double theta = frac_to_double(y, x.P);
        WeylTerm t{n, std::cos(2 * M_PI * theta), std::sin(2 * M_PI * theta)};
        sr += t.re;
        si += t.im;
        rep.terms.push_back(t);
    }
    rep.re = sr / (double)N;
    rep.im = si / (double)N;
    rep.abs = std::hypot(rep.re, rep.im);
    // |e({h x b^n}) - e({h x' b^n})| <= 2 pi |h| b^n 2^{-P} for |x - x'| <= 2^{-P}
    double log2err = std::log2(2 * M_PI) + log_abs(h) / std::log(2.0) +
                     (double)N * std::log2((double)b) - (double)x.P;
    rep.arith_err = log2err < 1020 ? std::exp2(log2err) : HUGE_VAL;
    return rep;
}

std::string WeylReport::to_csv() const {
    std::ostringstream os;
    os << "n,re,im\n";
    for (const auto& t : terms)
        os << t.n << "," << fmt_double(t.re) << "," << fmt_double(t.im) << "\n";
    return os.str();
}

BaseDigits base_digits(const DyadicApprox& x, unsigned long b, unsigned long count) {
    if (b < 2) throw std::invalid_argument("base_digits: base must be >= 2");
    if (x.X < 0 || x.X >= pow2(x.P))
        throw std::invalid_argument("base_digits: X out of [0, 2^P)");
    BaseDigits out;
    out.b = b;
    out.valid_horizon =
        x.P > 16 ? (unsigned long)((double)(x.P - 16) * std::log(2.0) / std::log((double)b))
                 : 0;
    if (count > out.valid_horizon)
        throw std::invalid_argument("base_digits: count exceeds valid horizon " +
                                    std::to_string(out.valid_horizon));
    Nat carry = x.X;
    for (unsigned long i = 0; i < count; ++i) {
        carry *= b;
        Nat d;
        mpz_fdiv_q_2exp(d.get_mpz_t(), carry.get_mpz_t(), x.P);
        mpz_fdiv_r_2exp(carry.get_mpz_t(), carry.get_mpz_t(), x.P);
        out.digits.push_back(d.get_ui());
    }
    return out;
}

BlockFreq block_freq(const DyadicApprox& x, unsigned long b, unsigned k,
                     unsigned long depth) {
    if (k < 1 || std::pow((double)b, (double)k) > 1e8)
        throw std::invalid_argument("block_freq: b^k too large");
    if (depth < k) throw std::invalid_argument("block_freq: depth < k");
    BaseDigits bd = base_digits(x, b, depth);
    BlockFreq out;
    out.b = b;
    out.k = k;
    out.depth = depth;
    std::uint64_t cells = 1;
    for (unsigned j = 0; j < k; ++j) cells *= b;
    out.counts.assign(cells, 0);
    std::uint64_t idx = 0;
    for (unsigned long i = 0; i < depth; ++i) {
        idx = (idx * b + bd.digits[i]) % cells;
        if (i + 1 >= k) ++out.counts[idx];
    }
    double windows = (double)(depth - k + 1);
    double target = 1.0 / (double)cells;
    for (std::uint64_t c : out.counts)
        out.max_dev = std::max(out.max_dev, std::fabs((double)c / windows - target));
    return out;
}

namespace {

// floor(K / (2 log2 b)): largest n with b^{2n} <= 2^K, decided exactly.
std::uint64_t floor_half_log_ratio(std::uint64_t K, unsigned long b) {
    auto fits = [&](std::uint64_t n) {
        Nat p;
        mpz_ui_pow_ui(p.get_mpz_t(), b, 2 * n);
        return bitlength(p) <= K + 1 && p <= pow2((unsigned long)K);
    };
    std::uint64_t n = (std::uint64_t)((double)K / (2.0 * std::log2((double)b)));
    while (fits(n + 1)) ++n;
    while (n > 0 && !fits(n)) --n;
    return n;
}

}  // namespace

NonNormalSchedule nonnormal_schedule(unsigned long b, const ParamSchedule& s,
                                     std::size_t ell) {
    if (b < 2 || b % 2 != 0)
        throw std::invalid_argument("nonnormal_schedule: base must be even and >= 2");
    if (ell < 1 || ell > s.blocks())
        throw std::out_of_range("nonnormal_schedule: ell out of range");
    if (s.K(ell) > kDigitCap)
        throw std::out_of_range("nonnormal_schedule: K_ell exceeds digit cap (saturation)");
    NonNormalSchedule ns;
    ns.b = b;
    V2Split sp = v2(Nat(b));
    ns.M = (unsigned)sp.e;
    ns.B = sp.odd.get_ui();
    double log2b = std::log2((double)b);
    ns.alpha = 0.5 * (double)ns.M / log2b;  // midpoint of (0, M/log2 b)
    ns.ell = ell;
    ns.K_ell = s.K(ell);
    ns.K_prev = s.K(ell - 1);
    if (ns.alpha * (double)ns.K_ell + 2.0 * ns.M >= (double)ns.K_ell)
        throw std::invalid_argument("nonnormal_schedule: ell too small (alpha K + 2M >= K)");
    // (alpha/M) K = K / (2 log2 b), floored exactly
    ns.N = 1 + floor_half_log_ratio(ns.K_ell, b);
    ns.Nprime = 1 + ns.K_prev / ns.M;
    ns.c = 0.5 * std::exp2(0.5);  // b^{alpha/M}/2 = 2^{1/2}/2 for every even b
    ns.log2_bcK = log2b - 0.5 * (double)ns.K_ell;
    return ns;
}

std::string NonNormalSchedule::to_json() const {
    json j;
    j["b"] = b;
    j["M"] = M;
    j["B"] = B;
    j["alpha"] = alpha;
    j["ell"] = ell;
    j["K_ell"] = K_ell;
    j["K_prev"] = K_prev;
    j["N"] = N;
    j["Nprime"] = Nprime;
    j["c"] = c;
    j["log2_bcK"] = log2_bcK;
    return j.dump(2);
}

Certificate certify_nonnormal(const SampleStream& x, unsigned long b,
                              const ParamSchedule& s, std::size_t ell) {
    Certificate cert;
    cert.ns = nonnormal_schedule(b, s, ell);
    if (ell + 1 > s.blocks() || x.depth < s.K(ell + 1))
        throw std::invalid_argument("certify_nonnormal: need precision >= K_{ell+1}");
    cert.hypothesis_ok = true;
    for (std::uint64_t k = s.K(ell - 1) + 1; k <= s.K(ell); ++k)
        if (x.digit_at(k)) { cert.hypothesis_ok = false; break; }
    if (!cert.hypothesis_ok)
        throw std::invalid_argument(
            "certify_nonnormal: hypothesis violated, nonzero digit in the conditioned block");

    std::uint64_t K = cert.ns.K_ell, N = cert.ns.N, Np = cert.ns.Nprime;
    // b c^K < 1/4  <=>  16 b^2 < 2^K, exactly
    cert.quarter_ok = Nat(16) * b * b < pow2((unsigned long)K);
    // threshold^2 comparison: {x b^n} <= b 2^{-K/2}  <=>  y^2 2^K <= b^2 2^{2P}
    Nat rhs = Nat(b) * b * pow2(2 * x.depth);
    Nat y = x.X;
    double sr = 0, sr2 = 0;
    cert.frac_ok = true;
    for (std::uint64_t n = 1; n <= N; ++n) {
        y *= b;
        mpz_fdiv_r_2exp(y.get_mpz_t(), y.get_mpz_t(), x.depth);
        double c = std::cos(2 * M_PI * frac_to_double(y, x.depth));
        sr += c;
        if (n > Np) {
            sr2 += c;
            ++cert.frac_checked;
            if (y * y * pow2((unsigned long)K) > rhs) cert.frac_ok = false;
        }
    }
    cert.reS_over_N = sr / (double)N;
    cert.reS2_over_N = sr2 / (double)N;
    double bcK = cert.ns.log2_bcK < -1020 ? 0.0 : std::exp2(cert.ns.log2_bcK);
    double ratio = (double)Np / (double)N;
    cert.lower_bound = (1.0 - ratio) * std::cos(2 * M_PI * bcK) - ratio;
    cert.pass = cert.hypothesis_ok && cert.frac_ok && cert.quarter_ok &&
                cert.reS_over_N >= cert.lower_bound - 1e-9;
    return cert;
}

std::string Certificate::to_json() const {
    json j;
    j["schedule"] = json::parse(ns.to_json());
    j["hypothesis_ok"] = hypothesis_ok;
    j["frac_ok"] = frac_ok;
    j["quarter_ok"] = quarter_ok;
    j["frac_checked"] = frac_checked;
    j["reS_over_N"] = reS_over_N;
    j["reS2_over_N"] = reS2_over_N;
    j["lower_bound"] = lower_bound;
    j["pass"] = pass;
    return j.dump(2);
}

std::uint64_t R_of_N(std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("R_of_N: N >= 1");
    if (N == 1) return 1;  // (N-and-R) has no solution at N = 1
    return bitlength(Nat(N - 1));
}

V1Report set_V1(std::uint64_t r, std::uint64_t N, unsigned k_scan) {
    if (r < 3 || r % 2 == 0) throw std::invalid_argument("set_V1: r odd >= 3");
    V1Report rep;
    rep.r = r;
    rep.N = N;
    rep.R = R_of_N(N);
    rep.R0 = (std::uint64_t)isqrt(Nat(rep.R)).get_ui();
    rep.ord = ord_pow2(r, (unsigned)rep.R0).ord;
    std::uint64_t ord = rep.ord.get_ui();
    for (std::uint64_t v = ord; v <= N; v += ord) rep.members.push_back(v);
    // direct divisibility cross-check on a bounded prefix
    Nat m = pow2((unsigned long)rep.R0);
    rep.scan_agrees = true;
    std::uint64_t cap = std::min<std::uint64_t>(N, 4096);
    std::size_t idx = 0;
    for (std::uint64_t v = 1; v <= cap; ++v) {
        bool divides = pow_mod(Nat(r), Nat(v), m) == 1 % m;
        bool member = idx < rep.members.size() && rep.members[idx] == v;
        if (member) ++idx;
        if (divides != member) rep.scan_agrees = false;
    }
    rep.c0_hat = order_ratio_scan(r, k_scan).min_ratio;
    rep.bound = 2.0 / rep.c0_hat.get_d() * (double)N *
                std::exp2(-std::sqrt((double)rep.R));
    return rep;
}

std::vector<std::uint64_t> set_U1(std::uint64_t v, std::size_t ell, const Int& h,
                                  std::uint64_t r, std::uint64_t N,
                                  const ParamSchedule& s, const Rat& alpha) {
    std::uint64_t R = R_of_N(N);
    IndexPair tt = indices_tT(s, R);
    if (ell <= tt.t || ell >= tt.T)
        throw std::out_of_range("set_U1: ell must lie in (t, T)");
    unsigned long bits = (unsigned long)R;
    Nat m = pow2(bits);
    Nat x = reduce_pow2(h, bits) * pow_mod(Nat(r), Nat(v), m);
    x = reduce_pow2(x - reduce_pow2(h, bits), bits);  // h (r^v - 1) mod 2^R
    BlockRange bb = shifted_block(s, ell);
    Rat threshold = alpha * Rat((unsigned long)bb.size());
    std::vector<std::uint64_t> out;
    for (std::uint64_t u = 1; u <= N; ++u) {
        x = reduce_pow2(x * r, bits);  // h r^u (r^v - 1) mod 2^R
        std::uint64_t cnt = digit_change_count(x, s.K(ell - 1), s.K(ell) - 1);
        if (Rat(cnt) < threshold) out.push_back(u);
    }
    return out;
}

DelGrid::DelGrid(const Int& h, std::uint64_t r, std::uint64_t N_max,
                 const ParamSchedule& s, double tol, FourierCache* cache,
                 unsigned threads)
    : N_max_(N_max), tol_(tol), vals_(N_max * N_max, 0.0) {
    if (h == 0 || r < 3 || r % 2 == 0)
        throw std::invalid_argument("DelGrid: need h != 0, r odd >= 3");
    if (N_max > 4096) throw std::invalid_argument("DelGrid: N_max exceeds desk budget 2^12");
    MeasureSpec spec{s};
    auto run = [&](std::uint64_t v_lo, std::uint64_t v_hi) {
        for (std::uint64_t v = v_lo; v <= v_hi; ++v) {
            Nat rv;
            mpz_ui_pow_ui(rv.get_mpz_t(), r, v);
            Int base = h * (rv - 1);
            Int eta = base;
            for (std::uint64_t u = 1; u <= N_max_; ++u) {
                eta *= r;
                FourierValue fv = cache ? cache->get(spec, eta, tol_)
                                        : mu_hat(spec, eta, tol_);
                vals_[(u - 1) * N_max_ + (v - 1)] = fv.abs();
            }
        }
    };
    if (threads <= 1) {
        run(1, N_max_);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (N_max_ + threads - 1) / threads;
        for (unsigned i = 0; i < threads; ++i) {
            std::uint64_t lo = 1 + i * chunk;
            if (lo > N_max_) break;
            pool.emplace_back(run, lo, std::min<std::uint64_t>(lo + chunk - 1, N_max_));
        }
        for (auto& th : pool) th.join();
    }
}

DelDecomposition del_decompose(const Int& h, std::uint64_t r, std::uint64_t N,
                               const ParamSchedule& s, const DelGrid& grid,
                               const Rat& alpha, const Rat& gamma) {
    if (N < 1 || N > grid.n_max())
        throw std::invalid_argument("del_decompose: N outside grid");
    DelDecomposition d;
    d.h = h;
    d.r = r;
    d.N = N;
    d.R = R_of_N(N);
    V1Report v1 = set_V1(r, N);
    d.R0 = v1.R0;
    d.V1 = v1.members;
    d.c0_hat = v1.c0_hat;
    IndexPair tt = indices_tT(s, d.R);
    d.t = tt.t;
    d.T = tt.T;

    std::vector<bool> in_v1(N + 1, false);
    for (std::uint64_t v : d.V1) in_v1[v] = true;

    d.eps_prod = 1;
    for (std::size_t ell = d.t + 1; ell + 1 <= d.T; ++ell) d.eps_prod *= s.eps(ell);

    MeasureSpec spec{s};
    unsigned long bits = (unsigned long)d.R;
    Nat m = pow2(bits);
    Nat hred = reduce_pow2(h, bits);
    std::map<std::pair<std::size_t, Nat>, double> eblock_memo;
    auto e_abs = [&](std::size_t ell, const Nat& xi) {
        Nat key;
        mpz_fdiv_r_2exp(key.get_mpz_t(), xi.get_mpz_t(), (unsigned long)s.K(ell));
        auto it = eblock_memo.find({ell, key});
        if (it != eblock_memo.end()) return it->second;
        EBlockValue e = E_block(spec, ell, Int(key));
        double a = std::hypot(e.re, e.im);
        eblock_memo[{ell, key}] = a;
        return a;
    };

    for (std::uint64_t v = 1; v <= N; ++v) {
        if (in_v1[v]) {
            for (std::uint64_t u = 1; u <= N; ++u) d.I1 += grid.g(u, v);
            continue;
        }
        Nat x = reduce_pow2(hred * pow_mod(Nat(r), Nat(v), m) - hred, bits);
        for (std::uint64_t u = 1; u <= N; ++u) {
            x = reduce_pow2(x * r, bits);  // xi = h r^u (r^v - 1) mod 2^R
            bool low_change = false;
            for (std::size_t ell = d.t + 1; ell + 1 <= d.T; ++ell) {
                BlockRange bb = shifted_block(s, ell);
                std::uint64_t cnt = digit_change_count(x, s.K(ell - 1), s.K(ell) - 1);
                if (Rat(cnt) < alpha * Rat((unsigned long)bb.size())) {
                    low_change = true;
                    break;
                }
            }
            if (low_change) {
                d.I21 += grid.g(u, v);
                continue;
            }
            d.I22 += grid.g(u, v);
            ++d.gamma_count;
            double prod = 1;
            for (std::size_t ell = d.t + 1; ell + 1 <= d.T; ++ell) {
                double a = e_abs(ell, x);
                double cap = std::pow(std::sqrt(0.5),
                                      alpha.get_d() * (double)(s.K(ell) - s.K(ell - 1)));
                if (a > cap + grid.tol() + 1e-9) d.el_bound_ok = false;
                prod *= 1.0 + a;
            }
            d.J1 += prod - 1.0;  // sum over nonzero multi-indices a
        }
    }
    for (std::uint64_t v = 1; v <= N; ++v)
        for (std::uint64_t u = 1; u <= N; ++u) d.I += grid.g(u, v);
    d.J0 = (double)d.gamma_count * d.eps_prod.get_d();
    d.sum_err = (double)N * (double)N * grid.tol();

    double c0 = d.c0_hat.get_d(), C0 = 2.0 / c0, Nd = (double)N;
    d.bound_I1 = N > 1 ? C0 * std::pow(Nd, 2.0 - c0 / std::sqrt(std::log2(Nd))) : C0;
    d.bound_I21 = C0 * Nd * Nd * std::exp2(-c0 * std::sqrt((double)d.R));
    d.bound_J0 = Nd * Nd * std::pow((double)d.R, -gamma.get_d());
    d.bound_J1 = d.bound_I21;
    return d;
}

std::string DelDecomposition::csv_header() {
    return "N,R,R0,t,T,I,I1,I21,I22,J0,J1,gamma_count,sum_err,"
           "bound_I1,bound_I21,bound_J0,bound_J1,el_bound_ok\n";
}

std::string DelDecomposition::to_csv_row() const {
    std::ostringstream os;
    os << N << "," << R << "," << R0 << "," << t << "," << T << ","
       << fmt_double(I) << "," << fmt_double(I1) << "," << fmt_double(I21) << ","
       << fmt_double(I22) << "," << fmt_double(J0) << "," << fmt_double(J1) << ","
       << gamma_count << "," << fmt_double(sum_err) << "," << fmt_double(bound_I1)
       << "," << fmt_double(bound_I21) << "," << fmt_double(bound_J0) << ","
       << fmt_double(bound_J1) << "," << (el_bound_ok ? 1 : 0) << "\n";
    return os.str();
}

DelSeries del_series(const Int& h, std::uint64_t r, const ParamSchedule& s,
                     const DelGrid& grid) {
    (void)h;
    (void)r;
    (void)s;
    DelSeries out;
    out.monotone = true;
    std::uint64_t N_max = grid.n_max();
    double I = 0, partial = 0, prev_partial = 0, prev_I = 0;
    std::uint64_t next_dyadic = 2;
    for (std::uint64_t n = 1; n <= N_max; ++n) {
        for (std::uint64_t u = 1; u <= n; ++u) I += grid.g(u, n);
        for (std::uint64_t v = 1; v < n; ++v) I += grid.g(n, v);
        if (I + 1e-12 < prev_I) out.monotone = false;
        prev_I = I;
        partial += I / ((double)n * n * n);
        if (n == next_dyadic) {
            out.rows.push_back({n, I, partial, partial - prev_partial});
            prev_partial = partial;
            next_dyadic *= 2;
        }
    }
    std::size_t k = out.rows.size();
    out.tail_decreasing =
        k >= 3 && out.rows[k - 3].increment > out.rows[k - 2].increment &&
        out.rows[k - 2].increment > out.rows[k - 1].increment;
    return out;
}

std::string DelSeries::to_csv() const {
    std::ostringstream os;
    os << "N,I,partial_sum,increment\n";
    for (const auto& r : rows)
        os << r.N << "," << fmt_double(r.I) << "," << fmt_double(r.partial) << ","
           << fmt_double(r.increment) << "\n";
    return os.str();
}

}  // namespace rajchman
