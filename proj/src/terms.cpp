#include "greenwalks/terms.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "greenwalks/modarith.hpp"
#include "greenwalks/primes.hpp"

namespace greenwalks {

std::string norm_name(Norm n) { return n == Norm::raw ? "raw" : "tilde"; }

Norm norm_from_name(const std::string& s) {
    if (s == "raw") return Norm::raw;
    if (s == "tilde") return Norm::tilde;
    throw std::invalid_argument("unknown normalization: " + s);
}

namespace {

void require_tilde_ok(const LatticeSpec& spec, Norm norm) {
    if (norm == Norm::tilde && !spec.parity_vanishing())
        throw std::invalid_argument("tilde normalization needs M odd or M = N");
}

}  // namespace

// ---------------------------------------------------------------------------
// shared factorial cache

namespace {
// deque keeps references stable while the cache grows
std::deque<BigInt> g_fact;
std::mutex g_fact_mutex;
}  // namespace

const BigInt& factorial_exact(long n) {
    if (n < 0) throw std::invalid_argument("factorial of negative");
    std::lock_guard<std::mutex> lock(g_fact_mutex);
    if (g_fact.empty()) g_fact.emplace_back(1);
    while (static_cast<std::size_t>(n) >= g_fact.size())
        g_fact.push_back(g_fact.back() * static_cast<long>(g_fact.size()));
    return g_fact[static_cast<std::size_t>(n)];
}

BigInt binomial_exact(unsigned long n, unsigned long k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// ---------------------------------------------------------------------------
// TermTable

void TermTable::validate() const {
    if (terms.empty()) return;
    if (terms[0] != 1) throw std::runtime_error("TermTable: terms[0] must be 1");
    std::uint64_t q = coordination_number(spec);
    if (norm == Norm::raw) {
        if (count() > 1 && terms[1] != 0) throw std::runtime_error("TermTable: terms[1] must be 0");
        if (count() > 2 && exact() && terms[2] != static_cast<unsigned long>(q))
            throw std::runtime_error("TermTable: terms[2] must equal the coordination number");
        if (spec.parity_vanishing())
            for (long n = 1; n < count(); n += 2)
                if (terms[n] != 0) throw std::runtime_error("TermTable: odd-index term nonzero at n=" + std::to_string(n));
    } else {
        require_tilde_ok(spec, norm);
        if (count() > 1 && exact() && terms[1] != static_cast<unsigned long>(q))
            throw std::runtime_error("TermTable: tilde terms[1] must equal the coordination number");
    }
    if (exact())
        for (long n = 0; n < count(); ++n)
            if (terms[n] < 0) throw std::runtime_error("TermTable: negative count at n=" + std::to_string(n));
}

void TermTable::save(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << "greenwalks-terms v1 M=" << spec.M << " N=" << spec.N << " norm=" << norm_name(norm)
            << " modulus=" << modulus.get_str() << " count=" << terms.size() << " method=" << method << "\n";
        for (const auto& t : terms) out << t.get_str() << "\n";
    }
    std::filesystem::rename(tmp, path);
}

TermTable TermTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic, ver;
    hs >> magic >> ver;
    if (magic != "greenwalks-terms" || ver != "v1") throw std::runtime_error("bad term file header: " + header);
    TermTable t;
    long count = -1;
    std::string field;
    int m = 0, n = 0;
    while (hs >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad header field: " + field);
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "M") m = std::stoi(val);
        else if (key == "N") n = std::stoi(val);
        else if (key == "norm") t.norm = norm_from_name(val);
        else if (key == "modulus") t.modulus = from_decimal(val);
        else if (key == "count") count = std::stol(val);
        else if (key == "method") t.method = val;
        else throw std::runtime_error("unknown header field: " + key);
    }
    t.spec = LatticeSpec(m, n);
    t.terms.reserve(count > 0 ? count : 0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.terms.push_back(from_decimal(line));
    }
    if (count >= 0 && t.count() != count) throw std::runtime_error("term file count mismatch in " + path.string());
    return t;
}

// ---------------------------------------------------------------------------
// walk DP over signed-permutation orbit representatives

namespace {

// key: N coordinate magnitudes (<= 255), sorted descending, packed in a u64
std::uint64_t pack_rep(const int* abs_sorted, int N) {
    std::uint64_t k = 0;
    for (int i = 0; i < N; ++i) k = (k << 8) | static_cast<std::uint64_t>(abs_sorted[i]);
    return k;
}

std::uint64_t reduce_pos(const int* pos, int N) {
    int a[8];
    for (int i = 0; i < N; ++i) a[i] = pos[i] < 0 ? -pos[i] : pos[i];
    std::sort(a, a + N, std::greater<int>());
    return pack_rep(a, N);
}

void unpack_rep(std::uint64_t key, int* pos, int N) {
    for (int i = N - 1; i >= 0; --i) {
        pos[i] = static_cast<int>(key & 0xff);
        key >>= 8;
    }
}

double binom_d(int n, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace

TermTable terms_walk_dp(const LatticeSpec& spec, int nmax, Norm norm, std::size_t state_budget) {
    require_tilde_ok(spec, norm);
    if (nmax < 0) throw std::invalid_argument("terms_walk_dp: nmax must be >= 0");
    int raw_max = norm == Norm::raw ? nmax : 2 * nmax;
    if (raw_max > 250) throw budget_error("terms_walk_dp: coordinates exceed packing range", 0);

    double est = binom_d(raw_max + spec.N, spec.N);
    if (est > static_cast<double>(state_budget))
        throw budget_error("terms_walk_dp: estimated " + std::to_string(est) + " orbit states exceed budget", est);

    auto dirs = direction_vectors(spec);
    const int N = spec.N;

    std::unordered_map<std::uint64_t, BigInt> cur, next;
    int origin_pos[8] = {0};
    const std::uint64_t origin = reduce_pos(origin_pos, N);
    cur[origin] = 1;

    std::vector<BigInt> raw(raw_max + 1);
    raw[0] = 1;
    int pos[8], tgt[8];
    for (int step = 1; step <= raw_max; ++step) {
        next.clear();
        next.reserve(cur.size() * 2);
        // candidate targets, then pull: V is negation-closed so stepping from
        // representatives covers every reachable orbit
        for (const auto& [key, cnt] : cur) {
            (void)cnt;
            unpack_rep(key, pos, N);
            for (const auto& d : dirs) {
                for (int i = 0; i < N; ++i) tgt[i] = pos[i] + d[i];
                next.emplace(reduce_pos(tgt, N), BigInt(0));
            }
        }
        for (auto& [key, val] : next) {
            unpack_rep(key, pos, N);
            BigInt acc = 0;
            for (const auto& d : dirs) {
                for (int i = 0; i < N; ++i) tgt[i] = pos[i] - d[i];
                auto it = cur.find(reduce_pos(tgt, N));
                if (it != cur.end()) acc += it->second;
            }
            val = std::move(acc);
        }
        // drop zero amplitudes to keep the support tight
        for (auto it = next.begin(); it != next.end();)
            it = it->second == 0 ? next.erase(it) : std::next(it);
        std::swap(cur, next);
        auto it = cur.find(origin);
        raw[step] = it == cur.end() ? BigInt(0) : it->second;
    }

    TermTable t;
    t.spec = spec;
    t.norm = norm;
    t.method = "walk-dp";
    if (norm == Norm::raw) {
        t.terms = std::move(raw);
    } else {
        t.terms.reserve(nmax + 1);
        for (int k = 0; k <= nmax; ++k) t.terms.push_back(raw[2 * k]);
    }
    t.validate();
    return t;
}

std::vector<std::uint64_t> walk_counts_unreduced(const LatticeSpec& spec, int nmax) {
    if (nmax > 8) throw std::invalid_argument("walk_counts_unreduced: counts overflow past n = 8");
    auto dirs = direction_vectors(spec);
    const int N = spec.N;
    std::unordered_map<std::uint64_t, std::uint64_t> cur, next;
    auto pack = [N](const int* p) {
        std::uint64_t k = 0;
        for (int i = 0; i < N; ++i) k = (k << 10) | static_cast<std::uint64_t>(p[i] + 260);
        return k;
    };
    int origin[8] = {0};
    cur[pack(origin)] = 1;
    std::vector<std::uint64_t> out(nmax + 1, 0);
    out[0] = 1;
    int pos[8], tgt[8];
    for (int step = 1; step <= nmax; ++step) {
        next.clear();
        for (const auto& [key, cnt] : cur) {
            std::uint64_t k = key;
            for (int i = N - 1; i >= 0; --i) {
                pos[i] = static_cast<int>(k & 0x3ff) - 260;
                k >>= 10;
            }
            for (const auto& d : dirs) {
                for (int i = 0; i < N; ++i) tgt[i] = pos[i] + d[i];
                next[pack(tgt)] += cnt;
            }
        }
        std::swap(cur, next);
        auto it = cur.find(pack(origin));
        out[step] = it == cur.end() ? 0 : it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// partitions (k_1 >= ... >= k_parts >= 0, fixed length, with multiset
// permutation multiplicity)

namespace {

template <class F>
void partitions_rec(int remaining, int slots, int bound, std::array<int, 8>& k, int depth, const F& cb) {
    if (slots == 1) {
        if (remaining <= bound) {
            k[depth] = remaining;
            cb(k.data(), depth + 1);
        }
        return;
    }
    int lo = (remaining + slots - 1) / slots;  // keep parts nonincreasing
    for (int v = std::min(bound, remaining); v >= lo; --v) {
        k[depth] = v;
        partitions_rec(remaining - v, slots - 1, v, k, depth + 1, cb);
    }
}

// cb(parts pointer, count) for each partition of `total` into exactly `slots`
// nonincreasing nonnegative parts
template <class F>
void for_each_partition(int total, int slots, const F& cb) {
    if (total < 0) return;
    std::array<int, 8> k{};
    partitions_rec(total, slots, total, k, 0, cb);
}

std::uint64_t multiset_permutations(const int* k, int len) {
    static const std::uint64_t fact[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    std::uint64_t denom = 1;
    int run = 1;
    for (int i = 1; i < len; ++i) {
        if (k[i] == k[i - 1]) {
            ++run;
        } else {
            denom *= fact[run];
            run = 1;
        }
    }
    denom *= fact[run];
    return fact[len] / denom;
}

// factorials and inverse factorials mod p up to nmax
struct ModFact {
    PrimeField f;
    std::vector<std::uint64_t> fact, ifact;

    ModFact(std::uint64_t p, long nmax) : f(p), fact(nmax + 1), ifact(nmax + 1) {
        fact[0] = 1;
        for (long i = 1; i <= nmax; ++i) fact[i] = f.mul(fact[i - 1], static_cast<std::uint64_t>(i) % p);
        ifact[nmax] = f.inv(fact[nmax]);
        for (long i = nmax; i >= 1; --i) ifact[i - 1] = f.mul(ifact[i], static_cast<std::uint64_t>(i) % p);
    }
    std::uint64_t binom(long n, long k) const {
        if (k < 0 || k > n) return 0;
        return f.mul(fact[n], f.mul(ifact[k], ifact[n - k]));
    }
    std::uint64_t central(long n) const { return binom(2 * n, n); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Heracles lattices (M = N-1): composition sums

std::vector<std::uint64_t> heracles_mod(const LatticeSpec& spec, int nmax_raw, std::uint64_t prime) {
    if (spec.M != spec.N - 1) throw std::invalid_argument("terms_heracles: requires M = N-1");
    const int N = spec.N;
    PrimeField f(prime);
    ModFact mf(prime, 2L * nmax_raw + 2);

    std::vector<std::uint64_t> out(nmax_raw + 1, 0);
    out[0] = 1;
    // even part: r(2t) = sum over k_1+...+k_N = t of
    //   multinomial(2t; 2k_1..2k_N) * prod C(2(t-k_j), t-k_j)
    for (int t = 1; 2 * t <= nmax_raw; ++t) {
        std::uint64_t acc = 0;
        for_each_partition(t, N, [&](const int* k, int len) {
            std::uint64_t term = mf.fact[2 * t];
            for (int j = 0; j < len; ++j) term = f.mul(term, mf.ifact[2 * k[j]]);
            for (int j = 0; j < len; ++j) term = f.mul(term, mf.central(t - k[j]));
            acc = f.add(acc, f.mul(term, multiset_permutations(k, len) % prime));
        });
        out[2 * t] = acc;
    }
    if (N % 2 == 1) {
        // odd part: r(2t+1) = sum over k_1+...+k_N = t-(N-1)/2 of
        //   multinomial(2t+1; 2k_1+1..2k_N+1) * prod C(2(t-k_j), t-k_j)
        for (int t = 0; 2 * t + 1 <= nmax_raw; ++t) {
            int target = t - (N - 1) / 2;
            if (target < 0) continue;
            std::uint64_t acc = 0;
            for_each_partition(target, N, [&](const int* k, int len) {
                std::uint64_t term = mf.fact[2 * t + 1];
                for (int j = 0; j < len; ++j) term = f.mul(term, mf.ifact[2 * k[j] + 1]);
                for (int j = 0; j < len; ++j) term = f.mul(term, mf.central(t - k[j]));
                acc = f.add(acc, f.mul(term, multiset_permutations(k, len) % prime));
            });
            out[2 * t + 1] = acc;
        }
    }
    return out;
}

namespace {

// CRT residue tables (one per prime) into exact values; all values are
// nonnegative and below the prime product by choice of the basis.
std::vector<BigInt> crt_tables(const std::vector<std::vector<std::uint64_t>>& residues, const PrimeBasis& basis) {
    std::size_t len = residues.at(0).size();
    std::vector<BigInt> out(len);
    // precompute Garner mixing constants once
    std::vector<BigInt> premod(basis.size());
    std::vector<std::uint64_t> inv(basis.size());
    BigInt m = 1;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        premod[i] = m;
        PrimeField f(basis[i]);
        inv[i] = f.inv(f.reduce(m));
        m *= static_cast<unsigned long>(basis[i]);
    }
    parallel_for(len, [&](std::size_t n) {
        BigInt x = 0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            PrimeField f(basis[i]);
            std::uint64_t delta = f.mul(f.sub(residues[i][n] % basis[i], f.reduce(x)), inv[i]);
            x += premod[i] * static_cast<unsigned long>(delta);
        }
        out[n] = std::move(x);
    });
    return out;
}

BigInt q_power_bound(const LatticeSpec& spec, int raw_n) {
    BigInt q(static_cast<unsigned long>(coordination_number(spec)));
    BigInt b;
    mpz_pow_ui(b.get_mpz_t(), q.get_mpz_t(), raw_n < 1 ? 1 : raw_n);
    return b;
}

TermTable raw_to_norm(TermTable t, Norm norm, int nmax_tilde) {
    if (norm == Norm::raw) return t;
    TermTable out;
    out.spec = t.spec;
    out.norm = Norm::tilde;
    out.modulus = t.modulus;
    out.method = t.method;
    out.terms.reserve(nmax_tilde + 1);
    for (int k = 0; k <= nmax_tilde; ++k) out.terms.push_back(t.terms.at(2 * k));
    return out;
}

}  // namespace

TermTable terms_heracles(const LatticeSpec& spec, int nmax, Norm norm) {
    require_tilde_ok(spec, norm);
    if (spec.M != spec.N - 1) throw std::invalid_argument("terms_heracles: requires M = N-1");
    int raw_max = norm == Norm::raw ? nmax : 2 * nmax;

    PrimeBasis basis = prime_basis_for_bound(q_power_bound(spec, raw_max));
    std::vector<std::vector<std::uint64_t>> residues(basis.size());
    parallel_for(basis.size(), [&](std::size_t i) { residues[i] = heracles_mod(spec, raw_max, basis[i]); });

    TermTable t;
    t.spec = spec;
    t.norm = Norm::raw;
    t.method = "heracles";
    t.terms = crt_tables(residues, basis);
    t = raw_to_norm(std::move(t), norm, nmax);
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------
// closed forms: M = N and M = 1

TermTable terms_closed_form(const LatticeSpec& spec, int nmax, Norm norm) {
    require_tilde_ok(spec, norm);
    if (spec.M != spec.N && spec.M != 1)
        throw std::invalid_argument("terms_closed_form: requires M = N or M = 1");
    int raw_max = norm == Norm::raw ? nmax : 2 * nmax;

    TermTable t;
    t.spec = spec;
    t.norm = Norm::raw;
    t.method = "closed-form";
    t.terms.assign(raw_max + 1, BigInt(0));
    t.terms[0] = 1;

    if (spec.M == spec.N) {
        // r(2t) = C(2t, t)^N with a running central binomial
        BigInt central = 1;
        for (int t2 = 1; 2 * t2 <= raw_max; ++t2) {
            central *= 2 * (2 * t2 - 1);
            mpz_divexact_ui(central.get_mpz_t(), central.get_mpz_t(), t2);
            BigInt v;
            mpz_pow_ui(v.get_mpz_t(), central.get_mpz_t(), spec.N);
            t.terms[2 * t2] = std::move(v);
        }
    } else {
        // M = 1: r(2t) = (2t)! * sum over k_1+...+k_N = t of prod 1/(k_j!)^2
        const int N = spec.N;
        for (int t2 = 1; 2 * t2 <= raw_max; ++t2) {
            BigInt acc = 0;
            for_each_partition(t2, N, [&](const int* k, int len) {
                // multinomial(2t; 2k_1..2k_N) * prod C(2k_j, k_j)
                BigInt term = factorial_exact(2 * t2);
                for (int j = 0; j < len; ++j)
                    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), factorial_exact(2 * k[j]).get_mpz_t());
                for (int j = 0; j < len; ++j) term *= binomial_exact(2 * k[j], k[j]);
                acc += term * static_cast<unsigned long>(multiset_permutations(k, len));
            });
            t.terms[2 * t2] = std::move(acc);
        }
    }
    t = raw_to_norm(std::move(t), norm, nmax);
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------
// factor-fill DP for r(n) = CT (sigma_M(Y_1..Y_N))^n

namespace {

// Compositions (c_0..c_M) of n, ranked by the combinatorial number system on
// the bar positions s_j = c_0+...+c_{j-1} + (j-1). Enumerated in rank order.
struct CompTable {
    int n, M;
    std::size_t count;
    std::vector<std::uint16_t> parts;              // count x (M+1)
    std::vector<std::vector<std::uint64_t>> choose;  // C(x, j) for x <= n+M, j <= M

    CompTable(int n_, int M_) : n(n_), M(M_) {
        choose.assign(n + M + 1, std::vector<std::uint64_t>(M + 1, 0));
        for (int x = 0; x <= n + M; ++x) {
            choose[x][0] = 1;
            for (int j = 1; j <= M && j <= x; ++j)
                choose[x][j] = choose[x - 1][j - 1] + (x - 1 >= j ? choose[x - 1][j] : 0);
        }
        count = choose[n + M][M];
        parts.resize(count * (M + 1));
        // colex odometer over bar positions = rank order
        std::vector<int> s(M + 1);
        for (int j = 0; j < M; ++j) s[j] = j;
        s[M] = n + M;  // sentinel
        for (std::size_t r = 0;; ++r) {
            std::uint16_t* row = &parts[r * (M + 1)];
            int prev = -1;
            for (int j = 0; j < M; ++j) {
                row[j] = static_cast<std::uint16_t>(s[j] - prev - 1);
                prev = s[j];
            }
            row[M] = static_cast<std::uint16_t>(n + M - 1 - prev);
            if (r + 1 == count) break;
            int j = 0;
            while (s[j] + 1 == s[j + 1]) {
                s[j] = j;
                ++j;
            }
            ++s[j];
        }
    }
};

std::map<std::pair<int, int>, std::shared_ptr<const CompTable>> g_comp_cache;
std::mutex g_comp_mutex;

std::shared_ptr<const CompTable> comp_table(int n, int M) {
    std::lock_guard<std::mutex> lock(g_comp_mutex);
    auto& slot = g_comp_cache[{n, M}];
    if (!slot) slot = std::make_shared<CompTable>(n, M);
    return slot;
}

}  // namespace

std::uint64_t term_factor_dp_mod(const LatticeSpec& spec, int n, std::uint64_t prime) {
    if (n < 0) throw std::invalid_argument("term_factor_dp_mod: n must be >= 0");
    if (n == 0) return 1 % prime;
    const int N = spec.N, M = spec.M;
    PrimeField f(prime);
    ModFact mf(prime, n);
    auto ct = comp_table(n, M);
    const std::size_t S = ct->count;
    const int W = M + 1;

    // amplitudes between variables; substep buffers carry the exponent d
    std::vector<std::uint64_t> amp(S, 0);
    // start: all n factors still empty = composition (n, 0, ..., 0)
    std::size_t start = 0;
    {
        std::vector<int> c(W, 0);
        c[0] = n;
        // rank from bar positions
        std::uint64_t r = 0;
        int prefix = 0;
        for (int j = 1; j <= M; ++j) {
            prefix += c[j - 1];
            r += ct->choose[prefix + j - 1][j];
        }
        start = r;
    }
    amp[start] = 1;

    std::vector<std::uint64_t> buf((n + 1) * S, 0), buf2((n + 1) * S, 0);
    for (int var = 0; var < N; ++var) {
        std::fill(buf.begin(), buf.end(), 0);
        for (std::size_t r = 0; r < S; ++r) buf[r * (n + 1)] = amp[r];

        // classes processed downward so a factor takes this variable at most once
        for (int t = M - 1; t >= 0; --t) {
            std::fill(buf2.begin(), buf2.end(), 0);
            for (std::size_t r = 0; r < S; ++r) {
                const std::uint16_t* c = &ct->parts[r * W];
                int ct_t = c[t];
                int s_t1 = 0;
                for (int j = 0; j <= t; ++j) s_t1 += c[j];
                s_t1 += t;  // bar position s_{t+1}
                const std::uint64_t base_rank_term = ct->choose[s_t1][t + 1];
                const std::uint64_t* src = &buf[r * (n + 1)];
                for (int d = 0; d <= n; ++d) {
                    std::uint64_t a = src[d];
                    if (!a) continue;
                    // move m factors from class t to class t+1
                    for (int m = 0; m <= ct_t && d + m <= n; ++m) {
                        std::size_t r2 = r - base_rank_term + ct->choose[s_t1 - m][t + 1];
                        std::uint64_t w = m == 0 ? a : f.mul(a, mf.binom(ct_t, m));
                        std::uint64_t& dst = buf2[r2 * (n + 1) + d + m];
                        dst = f.add(dst, w);
                    }
                }
            }
            std::swap(buf, buf2);
        }

        // fold the variable's exponent: CT of Y^d is C(d, d/2) for even d
        std::fill(amp.begin(), amp.end(), 0);
        int min_class = M - (N - var - 1);  // classes below this can no longer finish
        for (std::size_t r = 0; r < S; ++r) {
            const std::uint16_t* c = &ct->parts[r * W];
            if (min_class > 0) {
                bool dead = false;
                for (int j = 0; j < min_class && j <= M; ++j) dead |= c[j] != 0;
                if (dead) continue;
            }
            const std::uint64_t* src = &buf[r * (n + 1)];
            std::uint64_t acc = 0;
            for (int d = 0; d <= n; d += 2) {
                if (src[d]) acc = f.add(acc, f.mul(src[d], mf.central(d / 2)));
            }
            amp[r] = acc;
        }
    }

    // terminal state: every factor chose M variables = composition (0,...,0,n),
    // whose bar positions are 0..M-1, i.e. rank 0
    return amp[0];
}

BigInt term_factor_dp(const LatticeSpec& spec, int n) {
    if (n == 0) return 1;
    PrimeBasis basis = prime_basis_for_bound(q_power_bound(spec, n));
    std::vector<std::vector<std::uint64_t>> residues(basis.size(), std::vector<std::uint64_t>(1));
    parallel_for(basis.size(), [&](std::size_t i) { residues[i][0] = term_factor_dp_mod(spec, n, basis[i]); });
    return crt_tables(residues, basis)[0];
}

TermTable terms_factor_dp(const LatticeSpec& spec, int nmax, Norm norm, std::optional<std::uint64_t> modulus) {
    require_tilde_ok(spec, norm);
    int raw_max = norm == Norm::raw ? nmax : 2 * nmax;

    TermTable t;
    t.spec = spec;
    t.norm = Norm::raw;
    t.method = "factor-dp";
    t.terms.assign(raw_max + 1, BigInt(0));

    std::vector<int> todo;  // raw indices worth computing
    for (int k = 0; k <= raw_max; ++k) {
        if (k % 2 == 1 && spec.parity_vanishing()) continue;
        todo.push_back(k);
    }

    if (modulus) {
        parallel_for(todo.size(), [&](std::size_t i) {
            t.terms[todo[i]] = static_cast<unsigned long>(term_factor_dp_mod(spec, todo[i], *modulus));
        });
        t.modulus = BigInt(static_cast<unsigned long>(*modulus));
    } else {
        PrimeBasis basis = prime_basis_for_bound(q_power_bound(spec, raw_max));
        // flatten (prime, n) jobs; each job is an independent single-threaded DP
        std::vector<std::vector<std::uint64_t>> residues(basis.size(),
                                                         std::vector<std::uint64_t>(todo.size(), 0));
        parallel_for(basis.size() * todo.size(), [&](std::size_t j) {
            std::size_t pi = j / todo.size(), ni = j % todo.size();
            residues[pi][ni] = term_factor_dp_mod(spec, todo[ni], basis[pi]);
        });
        auto exact = crt_tables(residues, basis);
        for (std::size_t i = 0; i < todo.size(); ++i) t.terms[todo[i]] = std::move(exact[i]);
    }
    t = raw_to_norm(std::move(t), norm, nmax);
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------
// disk cache

std::filesystem::path cache_root() {
    if (const char* env = std::getenv("GREENWALKS_CACHE")) return env;
    return "cache";
}

std::filesystem::path cache_path(const LatticeSpec& spec, Norm norm, const std::string& method) {
    return cache_root() / (std::to_string(spec.M) + "-" + std::to_string(spec.N)) / norm_name(norm) /
           (method + ".terms");
}

TermTable cached_terms(const LatticeSpec& spec, Norm norm, const std::string& method, int nmax,
                       const std::function<TermTable()>& compute) {
    auto path = cache_path(spec, norm, method);
    if (std::filesystem::exists(path)) {
        TermTable t = TermTable::load(path);
        if (t.count() > nmax && t.exact()) {
            t.terms.resize(nmax + 1);
            return t;
        }
    }
    TermTable t = compute();
    t.validate();
    if (t.exact()) t.save(path);
    return t;
}

}  // namespace greenwalks
