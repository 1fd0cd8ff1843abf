#include "rajchman/cache.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>

namespace rajchman {

using json = nlohmann::json;

FourierCache::FourierCache(std::string path) : path_(std::move(path)) {
    if (!path_.empty()) load();
}

void FourierCache::load() {
    std::ifstream in(path_);
    if (!in) return;  // nothing persisted yet
    std::ofstream quar;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        bool ok = false;
        try {
            json j = json::parse(line);
            FourierValue v;
            v.eta = Int(j.at("eta").get<std::string>());
            v.re = j.at("re").get<double>();
            v.im = j.at("im").get<double>();
            v.err = j.at("err").get<double>();
            v.blocks_used = j.at("blocks_used").get<unsigned>();
            if (v.err >= 0 && std::string(j.at("sched_id")).size() == 16) {
                Key k{j.at("sched_id").get<std::string>(),
                      j.at("eta").get<std::string>(),
                      j.at("tol").get<std::string>()};
                map_.emplace(std::move(k), std::move(v));
                ++loaded_;
                ok = true;
            }
        } catch (const std::exception&) {
        }
        if (!ok) {
            if (!quar.is_open()) quar.open(path_ + ".quarantine", std::ios::app);
            quar << line << "\n";
            ++quarantined_;
        }
    }
}

void FourierCache::append(const Key& k, const FourierValue& v) {
    if (path_.empty()) return;
    json j;
    j["sched_id"] = std::get<0>(k);
    j["eta"] = std::get<1>(k);
    j["tol"] = std::get<2>(k);
    j["re"] = v.re;
    j["im"] = v.im;
    j["err"] = v.err;
    j["blocks_used"] = v.blocks_used;
    std::string line = j.dump() + "\n";
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw std::runtime_error("cache: cannot open " + path_);
    ::flock(fd, LOCK_EX);
    ssize_t n = ::write(fd, line.data(), line.size());
    ::flock(fd, LOCK_UN);
    ::close(fd);
    if (n != (ssize_t)line.size())
        throw std::runtime_error("cache: short write to " + path_);
}

FourierValue FourierCache::get(const MeasureSpec& spec, const Int& eta, double tol) {
    Key k{spec.sched.id(), dec(eta), fmt_double(tol)};
    {
        std::shared_lock lk(mu_);
        auto it = map_.find(k);
        if (it != map_.end()) {
            ++hits_;
            return it->second;
        }
    }
    FourierValue v = mu_hat(spec, eta, tol);
    {
        std::unique_lock lk(mu_);
        auto [it, fresh] = map_.emplace(k, v);
        if (!fresh) return it->second;  // racing insert won
        ++evals_;
    }
    append(k, v);
    return v;
}

}  // namespace rajchman
