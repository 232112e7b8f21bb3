#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace mcb {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ generator. Streams are derived from (seed, stream, substream)
// by hashing, so replica k of a run never depends on how many replicas came
// before it or which thread ran it.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0, std::uint64_t substream = 0) {
        std::uint64_t sm = seed;
        std::uint64_t key = splitmix64(sm);
        sm = key ^ (stream * 0xd1b54a32d192ed03ULL);
        key = splitmix64(sm);
        sm = key ^ (substream * 0x8cb92ba72f3d8dd7ULL + 0x632be59bd9b4e019ULL);
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(*this); }

    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::poisson_distribution<std::uint64_t> d(mean);
        return d(*this);
    }

    // Child generator for an independent sub-task (e.g. one site or one probe).
    Rng split(std::uint64_t tag) { return Rng((*this)(), tag, 0x5bd1e995ULL); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Runs fn(replica, rng) for replica = 0..count-1 on `workers` threads and
// returns the results in replica order. Each replica gets Rng(seed, replica),
// so the output is independent of the worker count and of scheduling.
template <class Result, class Fn>
std::vector<Result> run_replicas(std::size_t count, std::uint64_t seed, unsigned workers, Fn&& fn) {
    std::vector<Result> out(count);
    if (workers <= 1 || count <= 1) {
        for (std::size_t r = 0; r < count; ++r) {
            Rng rng(seed, r);
            out[r] = fn(r, rng);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= count) return;
            try {
                Rng rng(seed, r);
                out[r] = fn(r, rng);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<std::size_t>(workers, count);
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace mcb
