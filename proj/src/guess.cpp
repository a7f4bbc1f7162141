#include "greenwalks/guess.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

#include "greenwalks/modarith.hpp"
#include "greenwalks/primes.hpp"

namespace greenwalks {

void GuessConfig::validate() const {
    if (max_order < 1 || max_degree < 0) throw std::invalid_argument("GuessConfig: bad search bounds");
    if (oversample < 25) throw std::invalid_argument("GuessConfig: oversample must be >= 25");
    if (prime_count < 2) throw std::invalid_argument("GuessConfig: prime_count must be >= 2");
}

namespace {

// Streamed reduced row echelon form over Z/p. Rows are fed one at a time;
// memory stays O(cols^2) regardless of how many rows go through.
struct ModRREF {
    PrimeField f;
    int cols;
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<int> pivots;  // pivot column per stored row (sorted by insertion)

    ModRREF(std::uint64_t p, int cols_) : f(p), cols(cols_) {}

    int rank() const { return static_cast<int>(rows.size()); }
    bool full_rank() const { return rank() == cols; }

    void feed(std::vector<std::uint64_t> row) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::uint64_t x = row[pivots[r]];
            if (!x) continue;
            const auto& base = rows[r];
            for (int c = 0; c < cols; ++c)
                if (base[c]) row[c] = f.sub(row[c], f.mul(x, base[c]));
        }
        int pv = -1;
        for (int c = 0; c < cols; ++c)
            if (row[c]) {
                pv = c;
                break;
            }
        if (pv < 0) return;
        std::uint64_t inv = f.inv(row[pv]);
        for (int c = pv; c < cols; ++c)
            if (row[c]) row[c] = f.mul(row[c], inv);
        // keep full reduction so the nullspace reads off directly
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::uint64_t x = rows[r][pv];
            if (!x) continue;
            for (int c = 0; c < cols; ++c)
                if (row[c]) rows[r][c] = f.sub(rows[r][c], f.mul(x, row[c]));
        }
        rows.push_back(std::move(row));
        pivots.push_back(pv);
    }
};

struct ModSolution {
    int dim = 0;
    std::vector<int> pivot_cols;  // sorted
    int free_col = -1;
    std::vector<std::uint64_t> x;  // normalized: x[free_col] = 1
};

// rec rows:  n in [L, len): entry(l, j) = n^j * t(n-l)
// ode rows:  n in [0, len): entry(k, l) = (n-l)^k * t(n-l), l <= min(n, Ld)
ModSolution solve_candidate_mod(std::uint64_t prime, const std::vector<std::uint64_t>& tmod, bool ode_mode,
                                int a, int b) {
    PrimeField f(prime);
    const long len = static_cast<long>(tmod.size());
    const int cols = (a + 1) * (b + 1);
    ModRREF rref(prime, cols);
    std::vector<std::uint64_t> row(cols);

    if (!ode_mode) {
        const int L = a, D = b;
        std::vector<std::uint64_t> npow(D + 1);
        for (long n = L; n < len && !rref.full_rank(); ++n) {
            std::uint64_t nm = static_cast<std::uint64_t>(n) % prime;
            npow[0] = 1;
            for (int j = 1; j <= D; ++j) npow[j] = f.mul(npow[j - 1], nm);
            for (int l = 0; l <= L; ++l) {
                std::uint64_t t = tmod[n - l];
                for (int j = 0; j <= D; ++j) row[l * (D + 1) + j] = f.mul(npow[j], t);
            }
            rref.feed(row);
        }
    } else {
        const int K = a, Ld = b;
        for (long n = 0; n < len && !rref.full_rank(); ++n) {
            std::fill(row.begin(), row.end(), 0);
            for (int l = 0; l <= Ld && l <= n; ++l) {
                std::uint64_t t = tmod[n - l];
                if (!t) continue;
                std::uint64_t base = static_cast<std::uint64_t>(n - l) % prime;
                std::uint64_t pw = 1;
                for (int k = 0; k <= K; ++k) {
                    row[k * (Ld + 1) + l] = f.mul(pw, t);
                    pw = f.mul(pw, base);
                }
            }
            rref.feed(row);
        }
    }

    ModSolution sol;
    sol.dim = cols - rref.rank();
    sol.pivot_cols = rref.pivots;
    std::sort(sol.pivot_cols.begin(), sol.pivot_cols.end());
    if (sol.dim != 1) return sol;
    std::vector<char> is_pivot(cols, 0);
    for (int c : sol.pivot_cols) is_pivot[c] = 1;
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[c]) {
            sol.free_col = c;
            break;
        }
    sol.x.assign(cols, 0);
    sol.x[sol.free_col] = 1;
    for (std::size_t r = 0; r < rref.rows.size(); ++r) sol.x[rref.pivots[r]] = f.neg(rref.rows[r][sol.free_col]);
    return sol;
}

std::vector<std::uint64_t> reduce_terms(const std::vector<BigInt>& terms, std::uint64_t prime) {
    std::vector<std::uint64_t> out(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) out[i] = mpz_fdiv_ui(terms[i].get_mpz_t(), prime);
    return out;
}

// CRT + rational reconstruction of the normalized nullvectors; returns the
// cleared integer coefficient vector.
std::optional<std::vector<BigInt>> lift_solution(const std::vector<ModSolution>& sols,
                                                 const std::vector<std::uint64_t>& primes) {
    const int cols = static_cast<int>(sols[0].x.size());
    std::vector<BigRat> rats(cols);
    BigInt lcm_den = 1;
    for (int c = 0; c < cols; ++c) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> residues;
        residues.reserve(primes.size());
        for (std::size_t i = 0; i < primes.size(); ++i) residues.emplace_back(sols[i].x[c], primes[i]);
        auto [value, modulus] = crt_combine_u64(residues);
        auto q = rational_reconstruct(value, modulus);
        if (!q) return std::nullopt;
        rats[c] = *q;
        BigInt den = q->get_den();
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), den.get_mpz_t());
    }
    std::vector<BigInt> out(cols);
    for (int c = 0; c < cols; ++c) {
        BigRat v = rats[c] * BigRat(lcm_den);
        v.canonicalize();
        if (v.get_den() != 1) return std::nullopt;
        out[c] = v.get_num();
    }
    return out;
}

PolyRec rec_from_vector(const std::vector<BigInt>& v, int L, int D) {
    PolyRec rec;
    rec.p.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        ZPoly p;
        p.c.assign(D + 1, BigInt(0));
        for (int j = 0; j <= D; ++j) p.c[j] = v[l * (D + 1) + j];
        p.trim();
        rec.p[l] = std::move(p);
    }
    return rec;
}

ThetaODE ode_from_vector(const std::vector<BigInt>& v, int K, int Ld) {
    ThetaODE ode;
    ode.u.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
        ZPoly p;
        p.c.assign(Ld + 1, BigInt(0));
        for (int l = 0; l <= Ld; ++l) p.c[l] = v[k * (Ld + 1) + l];
        p.trim();
        ode.u[k] = std::move(p);
    }
    return ode;
}

struct Candidate {
    int a, b;  // (order, degree) for rec; (order, degree) for ode
};

std::vector<Candidate> candidate_schedule(const GuessConfig& cfg) {
    std::vector<Candidate> out;
    if (cfg.objective == Objective::order_first) {
        for (int a = 1; a <= cfg.max_order; ++a)
            for (int b = 0; b <= cfg.max_degree; ++b) out.push_back({a, b});
    } else {
        for (int b = 0; b <= cfg.max_degree; ++b)
            for (int a = 1; a <= cfg.max_order; ++a) out.push_back({a, b});
    }
    return out;
}

GuessReport guess_core(const TermTable& terms, const GuessConfig& cfg, bool ode_mode) {
    cfg.validate();
    GuessReport report;
    const long len = terms.count();

    const bool modular_input = !terms.exact();
    std::vector<std::uint64_t> primes;
    if (modular_input) {
        if (!terms.modulus.fits_ulong_p()) throw std::invalid_argument("guess: modulus too large");
        primes = {terms.modulus.get_ui()};
    } else {
        primes = prime_stream(62, cfg.prime_count).primes;
    }
    const int prime_cap = modular_input ? 1 : cfg.prime_count + 8;

    std::vector<std::vector<std::uint64_t>> tmods;
    auto ensure_tmods = [&] {
        while (tmods.size() < primes.size()) tmods.push_back(reduce_terms(terms.terms, primes[tmods.size()]));
    };
    ensure_tmods();

    for (const Candidate& cand : candidate_schedule(cfg)) {
        const int cols = (cand.a + 1) * (cand.b + 1);
        const long rows_avail = ode_mode ? len : len - cand.a;
        if (rows_avail < cols + cfg.oversample) {
            report.frontier.emplace_back(cand.a, cand.b);
            continue;
        }

        std::vector<ModSolution> sols(primes.size());
        parallel_for(primes.size(), [&](std::size_t i) {
            sols[i] = solve_candidate_mod(primes[i], tmods[i], ode_mode, cand.a, cand.b);
        });

        bool dims_agree = true;
        for (const auto& s : sols) dims_agree &= s.dim == sols[0].dim;
        if (!dims_agree) {
            // unlucky-prime guard
            report.frontier.emplace_back(cand.a, cand.b);
            continue;
        }
        if (sols[0].dim != 1) {
            report.frontier.emplace_back(cand.a, cand.b);
            continue;
        }
        bool pivots_agree = true;
        for (const auto& s : sols) pivots_agree &= s.pivot_cols == sols[0].pivot_cols;
        if (!pivots_agree) {
            report.frontier.emplace_back(cand.a, cand.b);
            continue;
        }

        std::optional<std::vector<BigInt>> lifted;
        for (;;) {
            if (modular_input) {
                // balanced lift from the single modulus
                std::vector<BigInt> v(cols);
                BigInt p = terms.modulus;
                for (int c = 0; c < cols; ++c) {
                    BigInt x(static_cast<unsigned long>(sols[0].x[c]));
                    v[c] = 2 * x > p ? x - p : x;
                }
                lifted = std::move(v);
                break;
            }
            lifted = lift_solution(sols, primes);
            if (lifted) break;
            if (static_cast<int>(primes.size()) >= prime_cap) break;
            // add a prime and retry the reconstruction
            primes = prime_stream(62, static_cast<int>(primes.size()) + 1).primes;
            ensure_tmods();
            sols.push_back(solve_candidate_mod(primes.back(), tmods.back(), ode_mode, cand.a, cand.b));
            if (sols.back().dim != 1 || sols.back().pivot_cols != sols[0].pivot_cols) {
                lifted.reset();
                break;
            }
        }
        if (!lifted) {
            report.frontier.emplace_back(cand.a, cand.b);
            report.reconstruction_status = "reconstruction-failed";
            continue;
        }

        // build, canonicalize, verify on everything supplied
        if (!ode_mode) {
            PolyRec rec = rec_from_vector(*lifted, cand.a, cand.b);
            if (rec.p.front().zero() || rec.p.back().zero()) {
                report.frontier.emplace_back(cand.a, cand.b);
                continue;
            }
            rec.canonicalize();
            auto vr = rec_verify_values(rec, terms.terms, terms.modulus, false);
            if (!vr.pass) {
                report.frontier.emplace_back(cand.a, cand.b);
                continue;
            }
            report.found = true;
            report.rec = std::move(rec);
            report.order = report.rec->order();
            report.degree = report.rec->degree();
        } else {
            ThetaODE ode = ode_from_vector(*lifted, cand.a, cand.b);
            if (ode.u.back().zero()) {
                report.frontier.emplace_back(cand.a, cand.b);
                continue;
            }
            ode.canonicalize();
            PolyRec image = theta_ode_to_rec(ode);
            auto vr = rec_verify_values(image, terms.terms, terms.modulus, true);
            if (!vr.pass) {
                report.frontier.emplace_back(cand.a, cand.b);
                continue;
            }
            report.found = true;
            report.ode = std::move(ode);
            report.order = report.ode->order();
            report.degree = report.ode->degree();
        }
        report.equations_used = rows_avail;
        report.primes_used = static_cast<int>(primes.size());
        report.verified_terms = len;
        report.reconstruction_status = "ok";
        return report;
    }

    if (report.reconstruction_status.empty()) report.reconstruction_status = "no-candidate";
    report.primes_used = static_cast<int>(primes.size());
    return report;
}

}  // namespace

GuessReport guess_rec(const TermTable& terms, const GuessConfig& cfg) { return guess_core(terms, cfg, false); }

GuessReport guess_theta_ode(const TermTable& terms, const GuessConfig& cfg) {
    return guess_core(terms, cfg, true);
}

CertifyReport certify_candidate(const PolyRec& candidate, const TermTable& oracle_terms, int extra_primes) {
    CertifyReport rep;
    rep.extra_primes = extra_primes;
    auto vr = rec_verify(candidate, oracle_terms);
    if (!vr.pass) {
        rep.first_failure = vr.first_failure;
        return rep;
    }

    const int L = candidate.order(), D = candidate.degree();
    const int cols = (L + 1) * (D + 1);
    rep.margin = oracle_terms.count() - L - (cols + 25);

    // flatten the candidate into the unknown layout once
    std::vector<BigInt> flat(cols);
    for (int l = 0; l <= L; ++l)
        for (int j = 0; j <= D; ++j) flat[l * (D + 1) + j] = candidate.p[l].coeff(j);

    if (oracle_terms.count() >= L + cols + 25 && oracle_terms.exact()) {
        // held-out primes from a disjoint (61-bit) stream
        PrimeBasis held = prime_stream(61, extra_primes);
        for (std::uint64_t p : held.primes) {
            auto tmod = reduce_terms(oracle_terms.terms, p);
            ModSolution sol = solve_candidate_mod(p, tmod, false, L, D);
            if (sol.dim != 1) return rep;  // pass stays false
            PrimeField f(p);
            std::uint64_t scale = f.reduce(flat[sol.free_col]);
            if (scale == 0) return rep;
            std::uint64_t inv = f.inv(scale);
            for (int c = 0; c < cols; ++c)
                if (f.mul(f.reduce(flat[c]), inv) != sol.x[c]) return rep;
        }
    }
    rep.pass = true;
    return rep;
}

bool rec_equivalent_on(const PolyRec& a, const PolyRec& b, const std::vector<BigInt>& initial) {
    PolyRec diff = rec_add(a, b);
    long window = diff.order() + 1;
    if (auto z = leading_zero_in_range(diff, diff.order() + 256)) window = std::max(window, *z + diff.order() + 1);
    long T = std::max<long>(window, static_cast<long>(initial.size())) ;
    auto fa = rec_unroll(a, initial, T);
    auto fb = rec_unroll(b, initial, T);
    return fa == fb;
}

std::string guess_report_to_json(const GuessReport& report) {
    nlohmann::json j;
    j["found"] = report.found;
    j["order"] = report.order;
    j["degree"] = report.degree;
    j["equations_used"] = report.equations_used;
    j["primes_used"] = report.primes_used;
    j["verified_terms"] = report.verified_terms;
    j["reconstruction_status"] = report.reconstruction_status;
    if (report.rec) j["operator"] = nlohmann::json::parse(rec_to_json(*report.rec));
    if (report.ode) j["operator"] = nlohmann::json::parse(ode_to_json(*report.ode));
    if (!report.found) {
        nlohmann::json fr = nlohmann::json::array();
        for (auto [a, b] : report.frontier) fr.push_back({a, b});
        j["frontier"] = fr;
    }
    return j.dump(2);
}

}  // namespace greenwalks
