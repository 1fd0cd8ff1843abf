#include "rajchman/measure.hpp"

#include <mpfr.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace rajchman {

const char* const kRngName = "mt19937_64(splitmix64(seed + golden*ell)) per-block";

double FourierValue::abs() const { return std::hypot(re, im); }

int SampleStream::digit_at(unsigned long k) const {
    if (k < 1 || k > depth) throw std::out_of_range("digit_at: k out of range");
    return mpz_tstbit(X.get_mpz_t(), depth - k);
}

namespace {

// ---- mpfr complex workspace -------------------------------------------------

struct Cplx {
    mpfr_t re, im;
    explicit Cplx(long prec) { mpfr_inits2(prec, re, im, (mpfr_ptr)0); }
    ~Cplx() { mpfr_clears(re, im, (mpfr_ptr)0); }
    Cplx(const Cplx&) = delete;
    Cplx& operator=(const Cplx&) = delete;
    void set_ui(unsigned long r, unsigned long i) {
        mpfr_set_ui(re, r, MPFR_RNDN);
        mpfr_set_ui(im, i, MPFR_RNDN);
    }
};

// acc *= b, in place, using scratch registers
void cmul(Cplx& acc, const Cplx& b, mpfr_t t1, mpfr_t t2, mpfr_t t3) {
    mpfr_mul(t1, acc.re, b.re, MPFR_RNDN);
    mpfr_mul(t2, acc.im, b.im, MPFR_RNDN);
    mpfr_mul(t3, acc.re, b.im, MPFR_RNDN);
    mpfr_sub(t1, t1, t2, MPFR_RNDN);        // re' = re*bre - im*bim
    mpfr_mul(t2, acc.im, b.re, MPFR_RNDN);
    mpfr_add(acc.im, t3, t2, MPFR_RNDN);    // im' = re*bim + im*bre
    mpfr_set(acc.re, t1, MPFR_RNDN);
}

// Per-operation absolute rounding allowance; all intermediate magnitudes are
// bounded by 2*pi, so a generous fixed multiple of one ulp covers every step
// of a factor evaluation (fraction rounding, pi multiply, trig, multiplies).
double factor_round_bound(long prec) { return 16.0 * std::ldexp(1.0, -(int)prec); }

struct BlockEval {
    Cplx value;
    double round_err = 0;
    bool skipped_tail = false;  // some k > k_stop factors were treated as 1
    explicit BlockEval(long prec) : value(prec) {}
};

// E_l(eta) over k in [lo, hi], with factors at k > k_stop skipped (k_stop = 0
// means no skip). eta must be >= 0.
void eval_block(const Nat& eta, std::uint64_t lo, std::uint64_t hi,
                std::uint64_t k_stop, long prec, BlockEval& out) {
    out.value.set_ui(1, 0);
    out.round_err = 0;
    out.skipped_tail = false;
    mpfr_t pi, theta, angle, t1, t2, t3;
    mpfr_inits2(prec, pi, theta, angle, t1, t2, t3, (mpfr_ptr)0);
    mpfr_const_pi(pi, MPFR_RNDN);
    Cplx f(prec);
    Nat rem;
    for (std::uint64_t k = lo; k <= hi; ++k) {
        if (k_stop && k > k_stop) { out.skipped_tail = true; break; }
        mpz_fdiv_r_2exp(rem.get_mpz_t(), eta.get_mpz_t(), k);
        if (rem == 0) continue;  // e(0) = 1
        // theta = {eta/2^k}; exactly 1/2 kills the factor
        if (bitlength(rem) == k && mpz_scan1(rem.get_mpz_t(), 0) == k - 1) {
            out.value.set_ui(0, 0);
            out.round_err = 0;
            break;
        }
        mpfr_set_z(theta, rem.get_mpz_t(), MPFR_RNDN);
        mpfr_div_2ui(theta, theta, k, MPFR_RNDN);
        mpfr_mul(angle, theta, pi, MPFR_RNDN);
        mpfr_mul_2ui(angle, angle, 1, MPFR_RNDN);  // 2*pi*theta
        mpfr_sin_cos(t1, t2, angle, MPFR_RNDN);    // t1 = sin, t2 = cos
        mpfr_add_ui(t2, t2, 1, MPFR_RNDN);
        mpfr_div_2ui(f.re, t2, 1, MPFR_RNDN);      // (1 + cos)/2
        mpfr_div_2ui(f.im, t1, 1, MPFR_RNDN);      // sin/2
        cmul(out.value, f, t1, t2, t3);
        out.round_err += factor_round_bound(prec);
    }
    mpfr_clears(pi, theta, angle, t1, t2, t3, (mpfr_ptr)0);
}

void set_from_rat(mpfr_t dst, const Rat& q) {
    mpfr_set_q(dst, q.get_mpq_t(), MPFR_RNDN);
}

double to_double(const mpfr_t x) { return mpfr_get_d(x, MPFR_RNDN); }

// Uniform integer in [0, q), q >= 1, from 64-bit words of eng.
Nat uniform_below(const Nat& q, std::mt19937_64& eng) {
    if (q <= 1) return 0;
    unsigned long bits = bitlength(q - 1);
    unsigned long words = (bits + 63) / 64;
    while (true) {
        Nat v = 0;
        for (unsigned long w = 0; w < words; ++w) {
            Nat chunk((unsigned long)eng());
            v = (v << 64) | chunk;
        }
        mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
        if (v < q) return v;
    }
}

std::mt19937_64 block_engine(std::uint64_t seed, std::size_t ell) {
    return std::mt19937_64(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (std::uint64_t)ell));
}

struct BitSource {
    std::mt19937_64& eng;
    std::uint64_t buf = 0;
    int left = 0;
    int next() {
        if (left == 0) { buf = eng(); left = 64; }
        int b = (int)(buf & 1);
        buf >>= 1;
        --left;
        return b;
    }
};

}  // namespace

double frac_to_double(const Nat& y, unsigned long depth) {
    if (y == 0) return 0.0;
    unsigned long bl = bitlength(y);
    if (bl <= 64) {
        return std::ldexp((double)y.get_ui(), -(int)depth);
    }
    Nat top;
    mpz_fdiv_q_2exp(top.get_mpz_t(), y.get_mpz_t(), bl - 64);
    return std::ldexp((double)top.get_ui(), (int)((long)(bl - 64) - (long)depth));
}

Rat cylinder_mass(const MeasureSpec& spec, const std::vector<int>& prefix) {
    const ParamSchedule& s = spec.sched;
    for (int b : prefix)
        if (b != 0 && b != 1) throw std::invalid_argument("cylinder_mass: bits must be 0/1");
    std::uint64_t n = prefix.size();
    if (n > s.K(s.blocks()))
        throw std::out_of_range("cylinder_mass: prefix longer than materialized blocks");
    Rat mass = 1;
    for (std::size_t ell = 1; ell <= s.blocks() && s.K(ell - 1) < n; ++ell) {
        std::uint64_t lo = s.K(ell - 1) + 1, hi = s.K(ell);
        std::uint64_t upto = std::min<std::uint64_t>(hi, n);
        bool all_zero = true;
        for (std::uint64_t k = lo; k <= upto; ++k)
            if (prefix[k - 1]) { all_zero = false; break; }
        Rat eps = s.eps(ell);
        Rat uniform = (1 - eps) / Rat(pow2((unsigned long)(upto - lo + 1)));
        // the delta(0) branch matches any all-zero constraint, partial or full
        mass *= all_zero ? eps + uniform : uniform;
    }
    return mass;
}

Rat interval_mass(const MeasureSpec& spec, std::size_t ell,
                  const std::vector<Nat>& index) {
    const ParamSchedule& s = spec.sched;
    if (ell < 1 || ell > s.blocks()) throw std::out_of_range("interval_mass: ell");
    if (index.size() != ell) throw std::invalid_argument("interval_mass: index size != ell");
    Rat mass = 1;
    for (std::size_t j = 1; j <= ell; ++j) {
        unsigned long width = (unsigned long)(s.K(j) - s.K(j - 1));
        Nat cells = pow2(width);
        if (index[j - 1] < 0 || index[j - 1] >= cells)
            throw std::out_of_range("interval_mass: index out of range");
        Rat eps = s.eps(j);
        Rat uniform = (1 - eps) / Rat(cells);
        mass *= index[j - 1] == 0 ? eps + uniform : uniform;
    }
    return mass;
}

SampleStream sample(const MeasureSpec& spec, std::uint64_t seed,
                    unsigned long depth,
                    const std::set<std::size_t>& forced_zero_blocks) {
    const ParamSchedule& s = spec.sched;
    if (depth > kDigitCap) throw std::out_of_range("sample: depth beyond digit cap");
    if (depth > s.K(s.blocks()))
        throw std::out_of_range("sample: depth beyond materialized blocks");
    SampleStream out;
    out.seed = seed;
    out.depth = depth;
    out.forced_zero_blocks = forced_zero_blocks;
    for (std::size_t ell = 1; ell <= s.blocks() && s.K(ell - 1) < depth; ++ell) {
        if (forced_zero_blocks.count(ell)) continue;  // all-zero, substream untouched
        auto eng = block_engine(seed, ell);
        Rat eps = s.eps(ell);
        bool zero_block = false;
        if (eps == 1) {
            zero_block = true;
        } else if (eps != 0) {
            Nat u = uniform_below(Nat(eps.get_den()), eng);
            zero_block = u < eps.get_num();
        }
        if (zero_block) continue;
        BitSource bits{eng};
        std::uint64_t hi = std::min<std::uint64_t>(s.K(ell), depth);
        for (std::uint64_t k = s.K(ell - 1) + 1; k <= hi; ++k)
            if (bits.next()) mpz_setbit(out.X.get_mpz_t(), depth - k);
    }
    return out;
}

EBlockValue E_block(const MeasureSpec& spec, std::size_t ell, const Int& eta,
                    long prec) {
    const ParamSchedule& s = spec.sched;
    BlockRange b = block(s, ell);
    if (b.hi > kDigitCap)
        throw std::out_of_range("E_block: block exceeds digit cap (saturation)");
    // periodicity: E_l(eta) = E_l(eta mod 2^{K_l})
    Nat red;
    mpz_fdiv_r_2exp(red.get_mpz_t(), eta.get_mpz_t(), b.hi);
    if (red < 0) red += pow2((unsigned long)b.hi);
    BlockEval ev(prec);
    eval_block(red, b.lo, b.hi, 0, prec, ev);
    EBlockValue out;
    out.re = to_double(ev.value.re);
    out.im = to_double(ev.value.im);
    out.err = ev.round_err + std::ldexp(1.0, -51);
    return out;
}

FourierValue mu_hat(const MeasureSpec& spec, const Int& eta, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("mu_hat: tol must be > 0");
    FourierValue out;
    out.eta = eta;
    if (eta == 0) {
        out.re = 1;
        return out;
    }
    if (eta < 0) {
        FourierValue v = mu_hat(spec, Int(-eta), tol);
        v.eta = eta;
        v.im = -v.im;
        return v;
    }
    const ParamSchedule& s = spec.sched;
    const Nat& n = eta;
    unsigned long bl = bitlength(n);
    // per-factor deviation |1 - (1+e(eta 2^-k))/2| <= pi|eta|2^-k; summing the
    // tail k > k_stop gives pi * 2^{bl - k_stop}
    unsigned long guard = (unsigned long)std::ceil(std::log2(2.0 * M_PI / tol)) + 1;
    std::uint64_t k_stop = bl + guard;
    std::size_t L = s.blocks();
    bool full_cover = s.K(L) >= k_stop;
    if (full_cover) {
        std::size_t ell = 1;
        while (s.K(ell) < k_stop) ++ell;
        L = ell;
    } else if (s.kind() != ScheduleKind::explicit_list) {
        throw std::out_of_range("mu_hat: schedule saturated before tail bound < tol/2");
    }
    if (k_stop > kDigitCap)
        throw std::out_of_range("mu_hat: frequency exceeds digit cap (saturation)");

    std::uint64_t nfactors = std::min<std::uint64_t>(s.K(L), k_stop);
    long prec = std::max<long>(64, (long)std::ceil(std::log2(64.0 * (double)(nfactors + 4) / tol)));

    mpfr_t t1, t2, t3, er, ei;
    mpfr_inits2(prec, t1, t2, t3, er, ei, (mpfr_ptr)0);
    Cplx acc(prec), factor(prec);
    acc.set_ui(1, 0);
    double round_err = 0;
    bool skipped = false;
    BlockEval ev(prec);
    for (std::size_t ell = 1; ell <= L; ++ell) {
        std::uint64_t lo = s.K(ell - 1) + 1, hi = s.K(ell);
        if (lo > k_stop) { skipped = true; break; }
        eval_block(n, lo, hi, k_stop, prec, ev);
        skipped = skipped || ev.skipped_tail;
        Rat eps = s.eps(ell);
        set_from_rat(er, eps);
        set_from_rat(ei, Rat(1) - eps);
        // factor = eps + (1-eps) E_l
        mpfr_mul(factor.re, ei, ev.value.re, MPFR_RNDN);
        mpfr_add(factor.re, factor.re, er, MPFR_RNDN);
        mpfr_mul(factor.im, ei, ev.value.im, MPFR_RNDN);
        cmul(acc, factor, t1, t2, t3);
        round_err += ev.round_err + 2 * factor_round_bound(prec);
        out.blocks_used = (unsigned)ell;
    }
    out.re = to_double(acc.re);
    out.im = to_double(acc.im);
    mpfr_clears(t1, t2, t3, er, ei, (mpfr_ptr)0);

    // any factor past k_stop -- skipped in-block, later materialized blocks, or
    // (for infinite kinds) all blocks beyond the materialized range -- is
    // covered by the geometric tail bound; a fully evaluated finite
    // convolution has no tail at all
    bool tail_exists = skipped || L < s.blocks() ||
                       s.kind() != ScheduleKind::explicit_list;
    double tail =
        tail_exists ? M_PI * std::ldexp(1.0, (long)((long)bl - (long)k_stop)) : 0.0;
    out.err = tail + round_err + std::ldexp(1.0, -51);
    return out;
}

McEstimate mu_hat_mc(const MeasureSpec& spec, const Int& eta,
                     std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("mu_hat_mc: need >= 10^3 samples");
    if (eta < 0) {
        McEstimate m = mu_hat_mc(spec, Int(-eta), n_samples, seed);
        m.eta = eta;
        m.im = -m.im;
        return m;
    }
    const ParamSchedule& s = spec.sched;
    unsigned long want = bitlength(eta) + 40;
    unsigned long depth = 0;
    double trunc = 0;
    std::size_t L = s.blocks();
    if (s.K(L) >= want) {
        std::size_t ell = 1;
        while (s.K(ell) < want) ++ell;
        depth = (unsigned long)s.K(ell);
    } else if (s.kind() == ScheduleKind::explicit_list) {
        depth = (unsigned long)s.K(L);  // finite convolution: digits end here
    } else {
        throw std::out_of_range("mu_hat_mc: depth saturation");
    }
    if (depth > kDigitCap) throw std::out_of_range("mu_hat_mc: depth saturation");
    if (depth >= want)
        trunc = 2 * M_PI * std::ldexp(1.0, (long)bitlength(eta) - (long)depth);

    McEstimate m;
    m.eta = eta;
    m.depth = depth;
    m.n = n_samples;
    double sr = 0, si = 0, sr2 = 0, si2 = 0;
    Nat y;
    for (std::uint64_t j = 0; j < n_samples; ++j) {
        SampleStream x = sample(spec, splitmix64(seed) + j, depth);
        mpz_mul(y.get_mpz_t(), x.X.get_mpz_t(), eta.get_mpz_t());
        mpz_fdiv_r_2exp(y.get_mpz_t(), y.get_mpz_t(), depth);
        double theta = frac_to_double(y, depth);
        double c = std::cos(2 * M_PI * theta), sn = std::sin(2 * M_PI * theta);
        sr += c;
        si += sn;
        sr2 += c * c;
        si2 += sn * sn;
    }
    double n = (double)n_samples;
    m.re = sr / n;
    m.im = si / n;
    double vr = std::max(0.0, sr2 / n - m.re * m.re);
    double vi = std::max(0.0, si2 / n - m.im * m.im);
    m.sigma_re = std::sqrt(vr / n);
    m.sigma_im = std::sqrt(vi / n);
    m.radius4 = 4 * std::max(m.sigma_re, m.sigma_im);
    m.trunc_err = trunc + 1e-12;  // includes double-angle rounding allowance
    return m;
}

double lyons_bound(const MeasureSpec& spec, const Int& n) {
    const ParamSchedule& s = spec.sched;
    if (n == 0) throw std::invalid_argument("lyons_bound: n = 0 out of range");
    unsigned long b = bitlength(n);  // |n| in [2^{b-1}, 2^b)
    // need |n| in [2^{K_{l-1}-1}, 2^{K_l-1})  <=>  K_{l-1} <= b <= K_l - 1
    for (std::size_t ell = 2; ell <= s.blocks(); ++ell) {
        if (b >= s.K(ell - 1) && b <= s.K(ell) - 1) {
            double e1 = s.eps(ell).get_d(), e0 = s.eps(ell - 1).get_d();
            std::uint64_t gap = s.K(ell - 1) - s.K(ell - 2);  // K_0 = 0 at ell = 2
            double v = e1 * e0 + e1 + e0 + std::ldexp(1.0, -(long)std::min<std::uint64_t>(gap, 1100));
            return std::min(v, 1.0);
        }
    }
    throw std::out_of_range("lyons_bound: |n| outside [2^{K_1-1}, 2^{K_L-1})");
}

double log_abs(const Int& n) {
    signed long exp2;
    double d = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log(std::fabs(d)) + (double)exp2 * std::log(2.0);
}

double decay_envelope(const Int& n, double kappa) {
    if (!(kappa > 0 && kappa < 1)) throw std::invalid_argument("decay_envelope: kappa in (0,1)");
    Int a = abs(n);
    if (a < 16) throw std::invalid_argument("decay_envelope: |n| must be >= 16");
    double ll = std::log(log_abs(a));
    if (ll <= 0) throw std::invalid_argument("decay_envelope: log log |n| <= 0");
    return std::pow(ll, -1.0 + kappa);
}

}  // namespace rajchman
