#include "greenwalks/common.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace greenwalks {

unsigned worker_count() {
    if (const char* env = std::getenv("GREENWALKS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 512) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = worker_count();
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(count);
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_decimal(const BigInt& v) { return v.get_str(10); }

BigInt from_decimal(const std::string& s) {
    BigInt v;
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad decimal integer: " + s);
    return v;
}

}  // namespace greenwalks
