#include "greenwalks/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace greenwalks {

LatticeSpec::LatticeSpec(int m, int n) : M(m), N(n) {
    if (m < 1 || n < 1 || m > n) throw std::invalid_argument("LatticeSpec: need 1 <= M <= N");
}

std::uint64_t coordination_number(const LatticeSpec& spec) {
    std::uint64_t binom = 1;
    for (int i = 0; i < spec.M; ++i) binom = binom * static_cast<std::uint64_t>(spec.N - i) / (i + 1);
    return binom << spec.M;
}

std::vector<DirectionVector> direction_vectors(const LatticeSpec& spec) {
    const int N = spec.N, M = spec.M;
    std::vector<DirectionVector> out;
    out.reserve(coordination_number(spec));

    std::vector<int> support(M);
    for (int i = 0; i < M; ++i) support[i] = i;
    for (;;) {
        for (std::uint32_t signs = 0; signs < (1u << M); ++signs) {
            DirectionVector v(N, 0);
            for (int i = 0; i < M; ++i) v[support[i]] = (signs >> i) & 1 ? 1 : -1;
            out.push_back(std::move(v));
        }
        // next M-subset of {0..N-1}
        int i = M - 1;
        while (i >= 0 && support[i] == N - M + i) --i;
        if (i < 0) break;
        ++support[i];
        for (int j = i + 1; j < M; ++j) support[j] = support[j - 1] + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

double structure_function(const LatticeSpec& spec, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != spec.N)
        throw std::invalid_argument("structure_function: theta must have N entries");
    // elementary symmetric polynomial e_M of the cosines
    std::vector<double> e(spec.M + 1, 0.0);
    e[0] = 1.0;
    for (int j = 0; j < spec.N; ++j) {
        double c = std::cos(theta[j]);
        for (int k = std::min(spec.M, j + 1); k >= 1; --k) e[k] += e[k - 1] * c;
    }
    double binom = 1;
    for (int i = 0; i < spec.M; ++i) binom = binom * (spec.N - i) / (i + 1);
    return e[spec.M] / binom;
}

namespace {

struct StepSet {
    int N;
    std::vector<std::int8_t> deltas;  // q rows of N entries
    std::uint64_t q;
};

StepSet make_step_set(const LatticeSpec& spec) {
    StepSet s;
    s.N = spec.N;
    auto dirs = direction_vectors(spec);
    s.q = dirs.size();
    s.deltas.reserve(dirs.size() * spec.N);
    for (const auto& d : dirs)
        for (int x : d) s.deltas.push_back(static_cast<std::int8_t>(x));
    return s;
}

// Walks one trial; returns the step of first return, or 0 if none by horizon.
// `pos` is scratch of size N.
long run_walk(const StepSet& s, long horizon, std::uint64_t stream_seed, long* pos) {
    SplitMix64 rng(stream_seed);
    const int N = s.N;
    std::memset(pos, 0, sizeof(long) * N);
    for (long step = 1; step <= horizon; ++step) {
        const std::int8_t* d = &s.deltas[rng.below(s.q) * N];
        bool at_origin = true;
        for (int j = 0; j < N; ++j) {
            pos[j] += d[j];
            at_origin &= (pos[j] == 0);
        }
        if (at_origin) return step;
    }
    return 0;
}

}  // namespace

WalkResult sample_walk(const LatticeSpec& spec, long horizon, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("sample_walk: horizon must be >= 1");
    StepSet s = make_step_set(spec);
    std::vector<long> pos(spec.N, 0);
    long ret = run_walk(s, horizon, seed, pos.data());
    WalkResult r;
    r.final_site.assign(pos.begin(), pos.end());
    if (ret > 0) {
        r.returned = true;
        r.return_step = ret;
        std::fill(r.final_site.begin(), r.final_site.end(), 0L);
    }
    return r;
}

McEstimate mc_return_probability(const LatticeSpec& spec, long horizon, long trials, std::uint64_t seed) {
    if (horizon < 1 || trials < 1) throw std::invalid_argument("mc_return_probability: bad parameters");
    StepSet s = make_step_set(spec);

    std::atomic<long> next_block{0};
    std::atomic<long> returned_total{0};
    const long block = 4096;
    const long nblocks = (trials + block - 1) / block;

    auto worker = [&] {
        long pos[16];
        long local = 0;
        for (;;) {
            long b = next_block.fetch_add(1);
            if (b >= nblocks) break;
            long lo = b * block, hi = std::min(trials, lo + block);
            for (long i = lo; i < hi; ++i)
                if (run_walk(s, horizon, seed ^ static_cast<std::uint64_t>(i), pos) > 0) ++local;
        }
        returned_total.fetch_add(local);
    };

    unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(nblocks));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    McEstimate e;
    e.returned = returned_total.load();
    e.trials = trials;
    e.estimate = static_cast<double>(e.returned) / static_cast<double>(trials);
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    return e;
}

}  // namespace greenwalks
