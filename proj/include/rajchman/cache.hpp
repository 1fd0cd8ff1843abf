#ifndef RAJCHMAN_CACHE_HPP
#define RAJCHMAN_CACHE_HPP

#include "rajchman/measure.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <tuple>

namespace rajchman {

// Memo for mu_hat keyed by (schedule id, eta, tol). Concurrent reads share a
// lock; inserts are serialized. With a backing file, records persist as
// line-delimited JSON and malformed lines are quarantined on load, never used.
class FourierCache {
public:
    FourierCache() = default;
    explicit FourierCache(std::string path);

    // Compute-through lookup; appends fresh values to the backing file.
    FourierValue get(const MeasureSpec& spec, const Int& eta, double tol);

    std::uint64_t hits() const { return hits_; }
    std::uint64_t evals() const { return evals_; }
    std::uint64_t loaded() const { return loaded_; }
    std::uint64_t quarantined() const { return quarantined_; }
    const std::string& path() const { return path_; }

private:
    using Key = std::tuple<std::string, std::string, std::string>;  // id, eta, tol
    void load();
    void append(const Key& k, const FourierValue& v);

    std::map<Key, FourierValue> map_;
    mutable std::shared_mutex mu_;
    std::string path_;
    std::atomic<std::uint64_t> hits_{0}, evals_{0};
    std::uint64_t loaded_ = 0, quarantined_ = 0;
};

}  // namespace rajchman

#endif
