#include "rajchman/schedule.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rajchman {

std::string to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::canonical: return "canonical";
        case ScheduleKind::geometric: return "geometric";
        case ScheduleKind::explicit_list: return "explicit";
    }
    return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "canonical") return ScheduleKind::canonical;
    if (s == "geometric") return ScheduleKind::geometric;
    if (s == "explicit") return ScheduleKind::explicit_list;
    throw std::invalid_argument("unknown schedule kind: " + s);
}

unsigned long omega(double x) {
    if (x <= 1.0) return 0;
    double lg = std::log(x);
    return static_cast<unsigned long>(std::floor(std::sqrt(lg)));
}

ParamSchedule ParamSchedule::geometric(std::uint64_t K_base) {
    if (K_base < 10) throw std::invalid_argument("geometric: K_base must be >= 10");
    ParamSchedule s;
    s.kind_ = ScheduleKind::geometric;
    s.base_ = K_base;
    s.K_.push_back(0);
    Nat k = 1;
    for (std::size_t ell = 1;; ++ell) {
        k *= K_base;  // K_l = K^l
        if (k > kEndpointCap) { s.saturated_ = true; break; }
        s.K_.push_back(k.get_ui());
        s.eps_.push_back(Rat(1, (unsigned long)ell));
    }
    s.finalize();
    return s;
}

ParamSchedule ParamSchedule::canonical(std::uint64_t K_base) {
    if (K_base < 10) throw std::invalid_argument("canonical: K_base must be >= 10");
    ParamSchedule s;
    s.kind_ = ScheduleKind::canonical;
    s.base_ = K_base;
    s.K_.push_back(0);
    // K_l = max(K^{l*omega(l)}, 10*K_{l-1}, K^l for l <= 3); omega vanishes for
    // small l, so the raw formula is regularized to stay strictly increasing.
    for (std::size_t ell = 1;; ++ell) {
        Nat cand;
        mpz_ui_pow_ui(cand.get_mpz_t(), K_base, ell * omega((double)ell));
        if (ell <= 3) {
            Nat alt;
            mpz_ui_pow_ui(alt.get_mpz_t(), K_base, ell);
            if (alt > cand) cand = alt;
        }
        Nat growth = Nat(s.K_.back()) * 10;
        if (growth > cand) cand = growth;
        if (cand > kEndpointCap) { s.saturated_ = true; break; }
        s.K_.push_back(cand.get_ui());
        s.eps_.push_back(Rat(1, (unsigned long)ell));
    }
    s.finalize();
    return s;
}

ParamSchedule ParamSchedule::explicit_list(std::vector<std::uint64_t> K,
                                           std::vector<Rat> eps) {
    ParamSchedule s;
    s.kind_ = ScheduleKind::explicit_list;
    s.K_ = std::move(K);
    s.eps_ = std::move(eps);
    if (s.K_.empty() || s.K_[0] != 0)
        throw std::invalid_argument("explicit: K must start with K_0 = 0");
    if (s.eps_.size() != s.K_.size() - 1)
        throw std::invalid_argument("explicit: need one eps per block");
    s.finalize();
    return s;
}

void ParamSchedule::finalize() {
    for (std::size_t i = 1; i < K_.size(); ++i)
        if (K_[i] <= K_[i - 1])
            throw std::invalid_argument("K must be strictly increasing");
    for (const Rat& e : eps_)
        if (e < 0 || e > 1)
            throw std::invalid_argument("eps must lie in [0,1]");
    if (kind_ != ScheduleKind::explicit_list) {
        for (std::size_t i = 2; i < K_.size(); ++i)
            if (K_[i] < 10 * K_[i - 1])
                throw std::logic_error("growth condition K_l >= 10 K_{l-1} violated");
    }
    // id = hash of the canonical serialization without the id field
    id_.clear();
    std::string body = to_json();
    id_ = hex64(fnv1a64(body));
}

std::size_t ParamSchedule::digit_blocks() const {
    std::size_t ell = 0;
    while (ell + 1 < K_.size() && K_[ell + 1] <= kDigitCap) ++ell;
    return ell;
}

std::uint64_t ParamSchedule::K(std::size_t ell) const {
    if (ell >= K_.size())
        throw std::out_of_range("schedule block index " + std::to_string(ell) +
                                " beyond materialized range " +
                                std::to_string(K_.size() - 1) +
                                (saturated_ ? " (saturated at cap)" : ""));
    return K_[ell];
}

Rat ParamSchedule::eps(std::size_t ell) const {
    if (ell < 1 || ell > eps_.size())
        throw std::out_of_range("eps index out of range");
    return eps_[ell - 1];
}

std::string ParamSchedule::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    if (kind_ == ScheduleKind::explicit_list) {
        nlohmann::json ks = nlohmann::json::array();
        for (auto k : K_) ks.push_back(std::to_string(k));
        j["K"] = ks;
    } else {
        j["K_base"] = std::to_string(base_);
    }
    nlohmann::json es = nlohmann::json::array();
    for (const Rat& e : eps_) es.push_back(rat_str(e));
    j["eps"] = es;
    if (!id_.empty()) j["id"] = id_;
    return j.dump();
}

ParamSchedule ParamSchedule::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScheduleKind kind = schedule_kind_from_string(j.at("kind").get<std::string>());
    if (kind == ScheduleKind::explicit_list) {
        std::vector<std::uint64_t> K;
        for (const auto& k : j.at("K"))
            K.push_back(std::stoull(k.get<std::string>()));
        std::vector<Rat> eps;
        for (const auto& e : j.at("eps"))
            eps.push_back(parse_rat(e.get<std::string>()));
        return explicit_list(std::move(K), std::move(eps));
    }
    std::uint64_t base = std::stoull(j.at("K_base").get<std::string>());
    return kind == ScheduleKind::canonical ? canonical(base) : geometric(base);
}

BlockRange block(const ParamSchedule& s, std::size_t ell) {
    if (ell < 1) throw std::out_of_range("block index must be >= 1");
    return {s.K(ell - 1) + 1, s.K(ell)};
}

BlockRange shifted_block(const ParamSchedule& s, std::size_t ell) {
    if (ell < 1) throw std::out_of_range("block index must be >= 1");
    std::uint64_t k0 = s.K(ell - 1);
    return {k0 == 0 ? 0 : k0 - 1, s.K(ell) - 1};
}

IndexPair indices_tT(const ParamSchedule& s, std::uint64_t R) {
    if (R < 1) throw std::invalid_argument("R must be >= 1");
    IndexPair p;
    p.R = R;
    std::size_t L = s.blocks();
    // t: least l with K_l^2 >= R  (i.e. sqrt(R) <= K_l)
    for (std::size_t ell = 1;; ++ell) {
        if (ell > L)
            throw std::out_of_range("schedule too short for R = " + std::to_string(R));
        unsigned __int128 sq = (unsigned __int128)s.K(ell) * s.K(ell);
        if (sq >= R) { p.t = ell; break; }
    }
    for (std::size_t ell = 1;; ++ell) {
        if (ell > L)
            throw std::out_of_range("schedule too short for R = " + std::to_string(R));
        if (s.K(ell) >= R) { p.T = ell; break; }
    }
    return p;
}

AdmissibilityReport check_admissible(const ParamSchedule& s, const Rat& gamma,
                                     const std::vector<std::uint64_t>& R_range) {
    if (gamma <= 0) throw std::invalid_argument("gamma must be > 0");
    AdmissibilityReport rep;
    rep.gamma = gamma;

    rep.growth_ok = true;
    for (std::size_t ell = 2; ell <= s.blocks(); ++ell)
        if (s.K(ell) < 10 * s.K(ell - 1)) { rep.growth_ok = false; break; }

    rep.eps_sum_monotone = true;
    rep.eps_partial_sum = 0;
    for (std::size_t ell = 1; ell <= s.blocks(); ++ell) {
        if (s.eps(ell) == 0) rep.eps_sum_monotone = false;
        rep.eps_partial_sum += s.eps(ell);
    }

    const Nat gp = gamma.get_num();  // gamma = gp/gq, both positive
    const Nat gq = gamma.get_den();

    rep.all_pass = true;
    for (std::uint64_t R : R_range) {
        AdmissibilityRow row;
        row.R = R;
        IndexPair p = indices_tT(s, R);
        row.t = p.t;
        row.T = p.T;
        row.product = 1;
        double log_inv = 0;
        for (std::size_t ell = p.t + 1; ell + 1 <= p.T; ++ell) {
            row.product *= s.eps(ell);
            log_inv += s.eps(ell) == 0 ? HUGE_VAL : -std::log(s.eps(ell).get_d());
        }
        row.margin = log_inv / (gamma.get_d() * std::log((double)s.K(p.T)));
        // product < K_T^{-gamma}  <=>  num^gq * K_T^gp < den^gq
        Nat lhs, den_pow, kt_pow;
        mpz_pow_ui(lhs.get_mpz_t(), row.product.get_num().get_mpz_t(), gq.get_ui());
        mpz_ui_pow_ui(kt_pow.get_mpz_t(), s.K(p.T), gp.get_ui());
        lhs *= kt_pow;
        mpz_pow_ui(den_pow.get_mpz_t(), row.product.get_den().get_mpz_t(), gq.get_ui());
        row.pass = lhs < den_pow;
        row.t_lt_Tm2 = p.T >= 3 && p.t < p.T - 2;
        if (!row.pass) rep.all_pass = false;
        rep.rows.push_back(row);
    }
    rep.margin_growing =
        rep.rows.size() >= 2 && rep.rows.back().margin > rep.rows.front().margin;

    // empirical threshold for t < T-2: "large R" has no closed-form cutoff,
    // so report the least tested R from which the condition holds onward
    rep.t_lt_Tm2_threshold = 0;
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend(); ++it) {
        if (!it->t_lt_Tm2) break;
        rep.t_lt_Tm2_threshold = it->R;
    }
    return rep;
}

SlowGrowthReport slow_growth_check(double M, double tau,
                                   const std::vector<double>& x_range) {
    if (M <= 1 || tau <= 0) throw std::invalid_argument("need M > 1, tau > 0");
    SlowGrowthReport rep;
    rep.M = M;
    rep.tau = tau;
    rep.checked = x_range.size();
    std::vector<double> xs = x_range;
    std::sort(xs.begin(), xs.end());
    rep.least_x = std::nan("");
    for (std::size_t i = xs.size(); i-- > 0;) {
        double x = xs[i];
        unsigned long w = omega(x), wm = omega(M * x);
        bool ok = w <= wm && (double)wm <= (1.0 + tau) * (double)w;
        if (!ok) break;
        rep.least_x = x;
        rep.holds_somewhere = true;
    }
    return rep;
}

}  // namespace rajchman
