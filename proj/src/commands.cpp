#include "rajchman/commands.hpp"

#include "rajchman/cache.hpp"
#include "rajchman/dyadic.hpp"
#include "rajchman/measure.hpp"
#include "rajchman/normality.hpp"
#include "rajchman/order.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rajchman {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string RunConfig::to_json() const {
    json j;
    j["schedule"] = json::parse(sched.to_json());
    j["seed"] = seed;
    j["tol"] = tol;
    j["threads"] = threads;
    j["n_max"] = n_max;
    j["k_max"] = k_max;
    j["samples"] = samples;
    j["depth"] = depth;
    j["kappa"] = kappa;
    j["alpha"] = rat_str(alpha);
    j["gamma"] = rat_str(gamma);
    j["out"] = out;
    j["format"] = format;
    j["cache_path"] = cache_path;
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    RunConfig c;
    if (j.contains("schedule")) c.sched = ParamSchedule::from_json(j["schedule"].dump());
    c.seed = j.value("seed", c.seed);
    c.tol = j.value("tol", c.tol);
    c.threads = j.value("threads", c.threads);
    c.n_max = j.value("n_max", c.n_max);
    c.k_max = j.value("k_max", c.k_max);
    c.samples = j.value("samples", c.samples);
    c.depth = j.value("depth", c.depth);
    c.kappa = j.value("kappa", c.kappa);
    if (j.contains("alpha")) c.alpha = parse_rat(j["alpha"].get<std::string>());
    if (j.contains("gamma")) c.gamma = parse_rat(j["gamma"].get<std::string>());
    c.out = j.value("out", c.out);
    c.format = j.value("format", c.format);
    c.cache_path = j.value("cache_path", c.cache_path);
    if (!(c.tol > 0)) throw std::invalid_argument("config: tol must be > 0");
    if (c.threads < 1 || c.n_max < 1 || c.k_max < 1 || c.samples < 1 || c.depth < 1)
        throw std::invalid_argument("config: caps must be positive");
    if (c.format != "csv" && c.format != "json")
        throw std::invalid_argument("config: format must be csv or json");
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json())); }

std::string RunConfig::effective_cache_path() const {
    return cache_path.empty() ? out + "/muhat_cache.jsonl" : cache_path;
}

namespace {

// Uniform tabular report; renders to CSV (with an audit header comment) or a
// JSON document, both byte-stable across reruns.
struct Table {
    std::string name;
    std::string config_hash;
    std::vector<std::string> cols;
    std::vector<std::vector<std::string>> rows;

    void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }

    std::string render(const std::string& format) const {
        if (format == "json") {
            json j;
            j["table"] = name;
            j["config"] = config_hash;
            j["rng"] = kRngName;
            j["columns"] = cols;
            j["rows"] = rows;
            return j.dump(2) + "\n";
        }
        std::ostringstream os;
        os << "# table " << name << " config " << config_hash << " rng " << kRngName
           << "\n";
        for (std::size_t i = 0; i < cols.size(); ++i)
            os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.size(); ++i)
                os << r[i] << (i + 1 < r.size() ? "," : "\n");
        return os.str();
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string out_path(const RunConfig& cfg, const std::string& base,
                     const std::string& ext) {
    fs::create_directories(cfg.out);
    return cfg.out + "/" + base + "." + (cfg.format == "json" && ext == "csv" ? "json" : ext);
}

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

int cmd_sample(const RunConfig& cfg, std::ostream& log) {
    MeasureSpec spec{cfg.sched};
    unsigned long depth =
        std::min<std::uint64_t>(cfg.depth, cfg.sched.K(cfg.sched.digit_blocks()));
    if (depth < 4) {
        log << "sample: usable depth below 4 bits\n";
        return 2;
    }
    std::vector<std::uint64_t> count2(4, 0), count4(16, 0);
    std::string first;
    for (std::uint64_t j = 0; j < cfg.samples; ++j) {
        SampleStream x = sample(spec, cfg.seed + j, depth);
        std::uint64_t p4 = 0;
        for (unsigned long k = 1; k <= 4; ++k) p4 = (p4 << 1) | (unsigned)x.digit_at(k);
        ++count2[p4 >> 2];
        ++count4[p4];
        if (j == 0) {
            for (unsigned long k = 1; k <= depth; ++k) first += char('0' + x.digit_at(k));
        }
    }
    write_file(out_path(cfg, "sample_stream", "txt"),
               "# config " + cfg.hash() + " rng " + kRngName + "\n" + first + "\n");

    Table t;
    t.name = "cylinder_freq";
    t.config_hash = cfg.hash();
    t.cols = {"len", "prefix", "count", "freq", "exact", "exact_rat", "sigma4", "ok"};
    bool all_ok = true;
    double n = (double)cfg.samples;
    auto emit = [&](unsigned len, std::uint64_t idx, std::uint64_t cnt) {
        std::vector<int> bits(len);
        std::string pref;
        for (unsigned i = 0; i < len; ++i) {
            bits[i] = (int)((idx >> (len - 1 - i)) & 1);
            pref += char('0' + bits[i]);
        }
        Rat exact = cylinder_mass(spec, bits);
        double p = exact.get_d();
        double sigma4 = 4.0 * std::sqrt(p * (1 - p) / n);
        double freq = (double)cnt / n;
        bool ok = std::fabs(freq - p) <= sigma4;
        all_ok = all_ok && ok;
        t.row({std::to_string(len), pref, std::to_string(cnt), fmt_double(freq),
               fmt_double(p), rat_str(exact), fmt_double(sigma4), flag(ok)});
    };
    for (std::uint64_t i = 0; i < 4; ++i) emit(2, i, count2[i]);
    for (std::uint64_t i = 0; i < 16; ++i) emit(4, i, count4[i]);
    write_file(out_path(cfg, "cylinder_freq", "csv"), t.render(cfg.format));
    log << "sample: " << cfg.samples << " streams at depth " << depth
        << (all_ok ? ", all cylinder checks within 4 sigma" : ", FREQUENCY CHECK FAILED")
        << "\n";
    return all_ok ? 0 : 1;
}

int cmd_fourier(const RunConfig& cfg, const std::vector<Int>& etas,
                std::ostream& log) {
    MeasureSpec spec{cfg.sched};
    fs::create_directories(cfg.out);
    FourierCache cache(cfg.effective_cache_path());
    Table t;
    t.name = "fourier";
    t.config_hash = cfg.hash();
    t.cols = {"eta", "abs", "err", "lyons_bound", "envelope", "ok"};
    bool all_ok = true;
    for (const Int& eta : etas) {
        FourierValue v = cache.get(spec, eta, cfg.tol);
        std::string lyons, env;
        bool ok = v.abs() <= 1 + v.err;
        try {
            double lb = lyons_bound(spec, eta);
            lyons = fmt_double(lb);
            ok = ok && v.abs() <= lb + cfg.tol + v.err;
        } catch (const std::exception&) {
        }
        if (abs(eta) >= 16) env = fmt_double(decay_envelope(eta, cfg.kappa));
        all_ok = all_ok && ok;
        t.row({dec(eta), fmt_double(v.abs()), fmt_double(v.err), lyons, env, flag(ok)});
    }
    write_file(out_path(cfg, "fourier", "csv"), t.render(cfg.format));
    log << "fourier: " << etas.size() << " frequencies, " << cache.evals()
        << " evaluated, " << cache.hits() << " cache hits"
        << (all_ok ? "" : ", BOUND CHECK FAILED") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_weyl(const RunConfig& cfg, const std::string& x_source, unsigned long b,
             const Int& h, unsigned long N, std::ostream& log) {
    unsigned long need = N * bitlength(Nat(b - 1)) + 40;
    DyadicApprox x;
    if (x_source == "zero") {
        x = {Nat(0), need};
    } else if (x_source == "half") {
        x = {pow2(need - 1), need};
    } else if (x_source == "sample") {
        unsigned long depth = std::max<unsigned long>(cfg.depth, need);
        if (depth > cfg.sched.K(cfg.sched.digit_blocks())) {
            log << "weyl: schedule too shallow for required precision " << depth << "\n";
            return 2;
        }
        MeasureSpec spec{cfg.sched};
        x = to_dyadic(sample(spec, cfg.seed, depth));
    } else {
        log << "weyl: unknown x source '" << x_source << "'\n";
        return 2;
    }
    WeylReport rep = weyl_sum(x, b, h, N);
    Table t;
    t.name = "weyl";
    t.config_hash = cfg.hash();
    t.cols = {"n", "re", "im"};
    for (const auto& term : rep.terms)
        t.row({std::to_string(term.n), fmt_double(term.re), fmt_double(term.im)});
    write_file(out_path(cfg, "weyl", "csv"), t.render(cfg.format));
    log << "weyl: b=" << b << " h=" << dec(h) << " N=" << N << " avg=(" << rep.re
        << "," << rep.im << ") |avg|=" << rep.abs << " arith_err=" << rep.arith_err
        << "\n";
    return rep.abs <= 1 + rep.arith_err + 1e-12 ? 0 : 1;
}

int cmd_certify(const RunConfig& cfg, unsigned long b, std::size_t ell,
                std::ostream& log) {
    if (ell + 1 > cfg.sched.digit_blocks()) {
        log << "certify: need materialized block ell+1 within digit cap\n";
        return 2;
    }
    MeasureSpec spec{cfg.sched};
    unsigned long depth = (unsigned long)cfg.sched.K(ell + 1);
    SampleStream x = sample(spec, cfg.seed, depth, {ell});
    Certificate cert = certify_nonnormal(x, b, cfg.sched, ell);
    json j;
    j["config"] = cfg.hash();
    j["rng"] = kRngName;
    j["seed"] = cfg.seed;
    j["certificate"] = json::parse(cert.to_json());
    fs::create_directories(cfg.out);
    write_file(cfg.out + "/certificate.json", j.dump(2) + "\n");
    log << "certify: b=" << b << " ell=" << ell << " pass=" << cert.pass
        << " reS/N=" << cert.reS_over_N << " bound=" << cert.lower_bound << "\n";
    return cert.pass ? 0 : 1;
}

int cmd_del(const RunConfig& cfg, const Int& h, std::uint64_t r,
            std::ostream& log) {
    fs::create_directories(cfg.out);
    FourierCache cache(cfg.effective_cache_path());
    DelGrid grid(h, r, cfg.n_max, cfg.sched, cfg.tol, &cache, cfg.threads);
    Table t;
    t.name = "del";
    t.config_hash = cfg.hash();
    t.cols = {"N", "R", "R0", "t", "T", "I", "I1", "I21", "I22", "J0", "J1",
              "gamma_count", "sum_err", "bound_I1", "bound_I21", "bound_J0",
              "bound_J1", "el_bound_ok", "identity_ok"};
    bool all_ok = true;
    for (std::uint64_t N = 2; N <= cfg.n_max; N *= 2) {
        DelDecomposition d =
            del_decompose(h, r, N, cfg.sched, grid, cfg.alpha, cfg.gamma);
        bool identity = std::fabs(d.I - (d.I1 + d.I21 + d.I22)) <=
                        1e-9 * (double)N * (double)N + 1e-12;
        all_ok = all_ok && identity && d.el_bound_ok;
        t.row({std::to_string(d.N), std::to_string(d.R), std::to_string(d.R0),
               std::to_string(d.t), std::to_string(d.T), fmt_double(d.I),
               fmt_double(d.I1), fmt_double(d.I21), fmt_double(d.I22),
               fmt_double(d.J0), fmt_double(d.J1), std::to_string(d.gamma_count),
               fmt_double(d.sum_err), fmt_double(d.bound_I1), fmt_double(d.bound_I21),
               fmt_double(d.bound_J0), fmt_double(d.bound_J1), flag(d.el_bound_ok),
               flag(identity)});
    }
    write_file(out_path(cfg, "del", "csv"), t.render(cfg.format));

    DelSeries ser = del_series(h, r, cfg.sched, grid);
    Table ts;
    ts.name = "del_series";
    ts.config_hash = cfg.hash();
    ts.cols = {"N", "I", "partial_sum", "increment"};
    for (const auto& row : ser.rows)
        ts.row({std::to_string(row.N), fmt_double(row.I), fmt_double(row.partial),
                fmt_double(row.increment)});
    write_file(out_path(cfg, "del_series", "csv"), ts.render(cfg.format));
    all_ok = all_ok && ser.monotone;
    log << "del: h=" << dec(h) << " r=" << r << " N_max=" << cfg.n_max
        << " evals=" << cache.evals() << " hits=" << cache.hits()
        << " monotone=" << ser.monotone << " tail_decreasing=" << ser.tail_decreasing
        << "\n";
    return all_ok ? 0 : 1;
}

int cmd_verify_lemmas(const RunConfig& cfg, std::ostream& log) {
    if (!alpha_valid(cfg.alpha.get_d())) {
        log << "verify-lemmas: alpha " << rat_str(cfg.alpha)
            << " fails the digit-counting inequality\n";
        return 2;
    }
    Table t;
    t.name = "verify_lemmas";
    t.config_hash = cfg.hash();
    t.cols = {"suite", "checked", "passed", "detail"};
    bool all_ok = true;
    const std::vector<std::uint64_t> rs = {3, 5, 7, 9};

    {  // order ratios and the exact order of 3
        std::uint64_t checked = 0;
        bool ok = true;
        Rat min_ratio;
        bool first = true;
        unsigned k_hi = std::min(cfg.k_max, 30u);
        for (std::uint64_t r : rs) {
            OrderRatioScan scan = order_ratio_scan(r, k_hi);
            checked += scan.rows.size();
            if (first || scan.min_ratio < min_ratio) min_ratio = scan.min_ratio;
            first = false;
        }
        for (unsigned k = 3; k <= k_hi; ++k) {
            ++checked;
            if (ord_pow2(3, k).ord != pow2(k - 2)) ok = false;
        }
        all_ok = all_ok && ok;
        t.row({"order-ratio", std::to_string(checked), flag(ok),
               "min_ratio=" + rat_str(min_ratio) +
                   (cfg.k_max < 8 ? " low coverage" : "")});
    }

    {  // low-change string count: closed form vs brute, then the 2^{3k/4} cap
        std::uint64_t checked = 0;
        bool ok = true;
        for (unsigned k = 1; k <= 16; ++k)
            for (unsigned m = 0; m + 1 <= k; ++m) {
                ++checked;
                if (count_low_change_strings(k, m) !=
                    count_low_change_strings_brute(k, m))
                    ok = false;
            }
        for (std::uint64_t k = 8; k <= 64; ++k) {
            ++checked;
            Nat mk = cfg.alpha.get_num() * k / cfg.alpha.get_den();  // floor(alpha k)
            Nat cnt = count_low_change_strings(k, mk.get_ui());
            if (cnt > pow2((unsigned long)((3 * k + 3) / 4))) ok = false;
        }
        all_ok = all_ok && ok;
        t.row({"digit-count", std::to_string(checked), flag(ok),
               "alpha=" + rat_str(cfg.alpha)});
    }

    {  // residue hit counts along orbits: each nonzero count equals
       // 2^k / ord_{2^{k-e}}(r) with e the 2-adic valuation of rho, and the
       // maximum stays within rho_2 / c0(r)
        std::uint64_t checked = 0, max_count = 0;
        bool ok = true;
        const std::vector<long> rhos = {-3, -2, 2, 3, 6, 12};
        unsigned k_hi = std::min(cfg.k_max, 14u);
        for (std::uint64_t r : rs) {
            Rat c0 = order_ratio_scan(r, k_hi).min_ratio;
            for (unsigned k = 2; k <= k_hi; ++k)
                for (long rho : rhos) {
                    unsigned long e = std::min<unsigned long>(v2(Int(rho)).e, k);
                    std::uint64_t rho2 = std::uint64_t(1) << e;
                    std::uint64_t step =
                        e == k ? (std::uint64_t(1) << k)
                               : Nat(pow2(k) / ord_pow2(r, k - (unsigned)e).ord).get_ui();
                    std::uint64_t mx = 0;
                    for (std::uint64_t c : residue_hit_table(Int(rho), r, k)) {
                        ++checked;
                        if (c != 0 && c != step) ok = false;
                        mx = std::max(mx, c);
                    }
                    if (Rat((unsigned long)mx) * c0 > rho2) ok = false;
                    max_count = std::max(max_count, mx / rho2);
                }
        }
        all_ok = all_ok && ok;
        t.row({"residue-hits", std::to_string(checked), flag(ok),
               "max_count_over_rho2=" + std::to_string(max_count)});
    }

    {  // cosine lemma at a forced digit change
        bool ok = true;
        std::mt19937_64 eng(splitmix64(cfg.seed ^ 0xC051EA5ULL));
        const double cap = std::sqrt(0.5) + std::ldexp(1.0, -40);
        for (int trial = 0; trial < 10000; ++trial) {
            unsigned k = 1 + (unsigned)(eng() % 60);
            Nat xi((unsigned long)eng());
            if (eng() & 1) {  // force (d_{k-1}, d_k) = (0, 1) or (1, 0)
                mpz_setbit(xi.get_mpz_t(), k);
                mpz_clrbit(xi.get_mpz_t(), k - 1);
            } else {
                mpz_clrbit(xi.get_mpz_t(), k);
                mpz_setbit(xi.get_mpz_t(), k - 1);
            }
            double theta = frac_part_scaled(xi, k + 1).get_d();
            if (std::fabs(std::cos(M_PI * theta)) > cap) ok = false;
        }
        all_ok = all_ok && ok;
        t.row({"cos-lemma", "10000", flag(ok), "cap=sqrt2/2+2^-40"});
    }

    write_file(out_path(cfg, "verify_lemmas", "csv"), t.render(cfg.format));
    log << "verify-lemmas: " << (all_ok ? "all suites passed" : "SUITE FAILED") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_admissibility(const RunConfig& cfg, std::ostream& log) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t R = 100; R <= 100000000ULL; R *= 10)
        if (cfg.sched.K(cfg.sched.blocks()) >= R) grid.push_back(R);
    if (grid.empty()) {
        log << "admissibility: schedule too short for the R grid\n";
        return 2;
    }
    AdmissibilityReport rep = check_admissible(cfg.sched, cfg.gamma, grid);
    Table t;
    t.name = "admissibility";
    t.config_hash = cfg.hash();
    t.cols = {"R", "t", "T", "product", "pass", "margin", "t_lt_Tm2", "T_log_ok"};
    bool tlog_all = true;
    for (const auto& row : rep.rows) {
        bool tlog = (double)row.T <= 2.0 * std::log10((double)row.R) + 2.0;
        tlog_all = tlog_all && tlog;
        t.row({std::to_string(row.R), std::to_string(row.t), std::to_string(row.T),
               rat_str(row.product), flag(row.pass), fmt_double(row.margin),
               flag(row.t_lt_Tm2), flag(tlog)});
    }
    std::vector<double> xs;
    for (double x = 10; x <= 1e8; x *= 10) xs.push_back(x);
    SlowGrowthReport sg = slow_growth_check(4.0, 0.5, xs);
    t.row({"summary", "", "", "eps_sum=" + rat_str(rep.eps_partial_sum),
           flag(rep.all_pass), flag(rep.margin_growing),
           std::to_string(rep.t_lt_Tm2_threshold),
           sg.holds_somewhere ? fmt_double(sg.least_x) : "none"});
    write_file(out_path(cfg, "admissibility", "csv"), t.render(cfg.format));
    // The product condition is asymptotic; at desk scale we verify growth,
    // divergence, T = O(log R) and a growing margin, and report the literal
    // per-R outcomes as data.
    bool ok = rep.growth_ok && rep.eps_sum_monotone && tlog_all && rep.margin_growing;
    log << "admissibility: gamma=" << rat_str(cfg.gamma) << " "
        << (ok ? "pass" : "FAIL") << ", slow-growth least x="
        << (sg.holds_somewhere ? fmt_double(sg.least_x) : std::string("none")) << "\n";
    return ok ? 0 : 1;
}

}  // namespace rajchman
