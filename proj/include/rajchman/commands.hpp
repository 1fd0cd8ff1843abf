#ifndef RAJCHMAN_COMMANDS_HPP
#define RAJCHMAN_COMMANDS_HPP

#include "rajchman/bignum.hpp"
#include "rajchman/schedule.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rajchman {

// One JSON document drives every command; reports embed hash() and the RNG
// name so runs can be audited and reproduced.
struct RunConfig {
    ParamSchedule sched = ParamSchedule::geometric(10);
    std::uint64_t seed = 1;
    double tol = 1e-9;
    unsigned threads = 1;
    std::uint64_t n_max = 256;       // DEL grid budget
    unsigned k_max = 20;             // order/lemma scan cap
    std::uint64_t samples = 100000;
    unsigned long depth = 64;        // sampling depth in bits
    double kappa = 0.5;              // decay envelope exponent
    Rat alpha = Rat(1, 10);
    Rat gamma = Rat(2);
    std::string out = "out";
    std::string format = "csv";      // csv | json
    std::string cache_path;          // default: <out>/muhat_cache.jsonl

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig from_file(const std::string& path);
    std::string hash() const;
    std::string effective_cache_path() const;
};

// Commands return the process exit code: 0 = checks passed, 1 = a
// verification failed, 2 = usage/config error. Statistics that vary between
// runs (cache hit counts) go to `log`, never into output files.
int cmd_sample(const RunConfig& cfg, std::ostream& log);
int cmd_fourier(const RunConfig& cfg, const std::vector<Int>& etas,
                std::ostream& log);
int cmd_weyl(const RunConfig& cfg, const std::string& x_source, unsigned long b,
             const Int& h, unsigned long N, std::ostream& log);
int cmd_certify(const RunConfig& cfg, unsigned long b, std::size_t ell,
                std::ostream& log);
int cmd_del(const RunConfig& cfg, const Int& h, std::uint64_t r,
            std::ostream& log);
int cmd_verify_lemmas(const RunConfig& cfg, std::ostream& log);
int cmd_admissibility(const RunConfig& cfg, std::ostream& log);

}  // namespace rajchman

#endif
