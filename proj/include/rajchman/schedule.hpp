#ifndef RAJCHMAN_SCHEDULE_HPP
#define RAJCHMAN_SCHEDULE_HPP

#include "rajchman/bignum.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rajchman {

// Cap on block endpoints whose digit ranges may be expanded (sampling depth,
// evaluator factor count). Queries past digit_blocks() report saturation
// instead of truncating silently.
inline constexpr std::uint64_t kDigitCap = std::uint64_t(1) << 24;
// Cap on endpoint materialization itself; endpoints are plain integers and
// cheap, so this is far beyond desk scale.
inline constexpr std::uint64_t kEndpointCap = std::uint64_t(1) << 60;

enum class ScheduleKind { canonical, geometric, explicit_list };

std::string to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& s);

// omega(x) = floor(sqrt(log x)), natural log.
unsigned long omega(double x);

// The parameter pair (K, eps). K_0 = 0, K strictly increasing, eps_l in [0,1]
// exact rationals. Immutable after construction; safe to share across threads.
class ParamSchedule {
public:
    static ParamSchedule canonical(std::uint64_t K_base);
    static ParamSchedule geometric(std::uint64_t K_base);
    static ParamSchedule explicit_list(std::vector<std::uint64_t> K,
                                       std::vector<Rat> eps);

    ScheduleKind kind() const { return kind_; }
    std::uint64_t base() const { return base_; }
    // Number of materialized blocks L; K_l defined for 0 <= l <= L.
    std::size_t blocks() const { return K_.size() - 1; }
    // Largest l with K_l <= kDigitCap (digit-range expansion allowed).
    std::size_t digit_blocks() const;
    bool saturated() const { return saturated_; }
    std::uint64_t K(std::size_t ell) const;
    Rat eps(std::size_t ell) const;  // 1 <= ell <= blocks()
    const std::string& id() const { return id_; }

    std::string to_json() const;
    static ParamSchedule from_json(const std::string& text);

private:
    ParamSchedule() = default;
    void finalize();  // checks invariants, computes id

    ScheduleKind kind_ = ScheduleKind::explicit_list;
    std::uint64_t base_ = 0;
    std::vector<std::uint64_t> K_;  // K_[0] = 0
    std::vector<Rat> eps_;          // eps_[l-1] = eps_l
    bool saturated_ = false;
    std::string id_;
};

struct BlockRange {
    std::uint64_t lo = 0, hi = 0;  // inclusive [lo, hi]
    std::uint64_t size() const { return hi - lo + 1; }
};

// B_l = [K_{l-1}+1, K_l]
BlockRange block(const ParamSchedule& s, std::size_t ell);
// Bbar_l = [K_{l-1}-1, K_l-1], clamped at 0 for ell = 1.
BlockRange shifted_block(const ParamSchedule& s, std::size_t ell);

struct IndexPair {
    std::size_t t = 0, T = 0;
    std::uint64_t R = 0;
};

// Unique (t, T) with sqrt(R) in (K_{t-1}, K_t] and R in (K_{T-1}, K_T].
// Exact integer comparisons (K^2 vs R), no floating point.
IndexPair indices_tT(const ParamSchedule& s, std::uint64_t R);

struct AdmissibilityRow {
    std::uint64_t R = 0;
    std::size_t t = 0, T = 0;
    Rat product;         // prod_{l=t+1}^{T-1} eps_l (empty product = 1)
    bool pass = false;   // product < K_T^{-gamma}, exact comparison
    // log(1/product) / (gamma log K_T): the condition above reads margin > 1,
    // and it is only claimed asymptotically; the margin makes the approach
    // observable at desk scale.
    double margin = 0;
    bool t_lt_Tm2 = false;
};

struct AdmissibilityReport {
    Rat gamma;
    std::vector<AdmissibilityRow> rows;
    bool growth_ok = false;        // K_l >= 10 K_{l-1} for all l >= 2
    bool eps_sum_monotone = false; // partial sums of eps strictly increase
    Rat eps_partial_sum;           // over materialized blocks
    bool all_pass = false;
    // margin at the largest tested R exceeds the margin at the smallest
    bool margin_growing = false;
    // smallest tested R from which t < T-2 holds onward; 0 if never
    std::uint64_t t_lt_Tm2_threshold = 0;
};

AdmissibilityReport check_admissible(const ParamSchedule& s, const Rat& gamma,
                                     const std::vector<std::uint64_t>& R_range);

struct SlowGrowthReport {
    double M = 0, tau = 0;
    // least grid x from which omega(x) <= omega(Mx) <= (1+tau) omega(x)
    // holds for the rest of the grid; NaN if nowhere
    double least_x = 0;
    bool holds_somewhere = false;
    std::size_t checked = 0;
};

SlowGrowthReport slow_growth_check(double M, double tau,
                                   const std::vector<double>& x_range);

}  // namespace rajchman

#endif
