#include "greenwalks/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "greenwalks/lattice.hpp"

namespace greenwalks {

namespace {

long double log_mpz(const BigInt& v) {
    if (v <= 0) throw std::invalid_argument("log of nonpositive term");
    long exp2;
    double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
    return std::log(static_cast<long double>(d)) + static_cast<long double>(exp2) * 0.6931471805599453094L;
}

// The sequence actually summed/fitted: tilde tables (and raw tables whose odd
// terms all vanish) are handled at stride two so t(k) = r(2k) / q^{2k}.
struct Summable {
    std::vector<const BigInt*> vals;  // positive terms, consecutive
    int q_power_step = 1;             // exponent step of q per index
};

Summable summable_view(const TermTable& t) {
    if (!t.exact()) throw std::invalid_argument("analysis requires exact terms");
    Summable s;
    if (t.norm == Norm::tilde) {
        s.q_power_step = 2;
        for (const auto& v : t.terms) s.vals.push_back(&v);
        return s;
    }
    bool odd_vanish = t.spec.parity_vanishing();
    if (!odd_vanish) {
        s.q_power_step = 1;
        for (const auto& v : t.terms) s.vals.push_back(&v);
        return s;
    }
    s.q_power_step = 2;
    for (long n = 0; n < t.count(); n += 2) s.vals.push_back(&t.terms[n]);
    return s;
}

// log t(k) = log r(k) - k * step * log q
std::vector<long double> log_t(const Summable& s, std::uint64_t q) {
    std::vector<long double> lt(s.vals.size());
    long double lq = std::log(static_cast<long double>(q)) * s.q_power_step;
    for (std::size_t k = 0; k < s.vals.size(); ++k) lt[k] = log_mpz(*s.vals[k]) - lq * k;
    return lt;
}

std::vector<std::pair<long, long double>> tail_samples(const std::vector<long double>& y, long first, int levels) {
    long len = static_cast<long>(y.size());
    long lo = std::max(first, len / 2);
    long avail = len - 1 - lo;
    int nodes = std::min<long>(levels + 1, avail + 1);
    std::vector<std::pair<long, long double>> pts;
    if (nodes < 2) {
        for (long k = std::max<long>(first, len - 2); k < len; ++k) pts.emplace_back(k, y[k]);
        return pts;
    }
    for (int i = 0; i < nodes; ++i) {
        long k = lo + (avail * i) / (nodes - 1);
        pts.emplace_back(k, y[k]);
    }
    return pts;
}

}  // namespace

std::pair<long double, long double> richardson_limit(const std::vector<std::pair<long, long double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("richardson_limit: no samples");
    std::size_t m = samples.size();
    std::vector<long double> x(m), t(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = 1.0L / static_cast<long double>(samples[i].first);
        t[i] = samples[i].second;
    }
    if (m == 1) return {t[0], std::fabs(t[0])};
    // Neville tableau evaluated at x = 0
    long double prev = t[m - 1];
    for (std::size_t j = 1; j < m; ++j) {
        prev = t[m - 1];
        for (std::size_t i = m - 1; i >= j; --i) {
            t[i] = (x[i] * t[i - 1] - x[i - j] * t[i]) / (x[i] - x[i - j]);
            if (i == j) break;
        }
    }
    return {t[m - 1], std::fabs(t[m - 1] - prev)};
}

long double power_tail(long double s, long a) {
    if (s <= 1.0L) return std::numeric_limits<long double>::infinity();
    long double x = static_cast<long double>(a);
    long double integral = std::pow(x, 1 - s) / (s - 1);
    long double f = std::pow(x, -s);
    long double fp = -s * std::pow(x, -s - 1);
    long double fppp = -s * (s + 1) * (s + 2) * std::pow(x, -s - 3);
    // sum_{n > a} f(n) = int_a^inf f - f(a)/2 - f'(a)/12 + f'''(a)/720
    return integral - f / 2 - fp / 12 + fppp / 720;
}

PolyaEstimate polya_estimate(const TermTable& terms, double tolerance) {
    terms.validate();
    Summable s = summable_view(terms);
    const long len = static_cast<long>(s.vals.size());
    if (len < 16) throw need_more_terms("polya_estimate: need at least 16 summable terms", 16);
    std::uint64_t q = coordination_number(terms.spec);

    auto lt = log_t(s, q);

    // fitted tail exponent beta: t(k) ~ C k^-beta
    std::vector<long double> beta_seq(len - 1);
    for (long k = 1; k + 1 < len; ++k)
        beta_seq[k] = (lt[k] - lt[k + 1]) / (std::log(static_cast<long double>(k + 1)) - std::log(static_cast<long double>(k)));
    beta_seq[0] = beta_seq[1];
    auto [beta, beta_res] = richardson_limit(tail_samples(beta_seq, 2, 7));

    PolyaEstimate est;
    est.terms_used = len;
    est.beta = static_cast<double>(beta);

    if (beta <= 1.05L) {
        est.status = PolyaEstimate::Status::recurrent;
        est.value = 1.0;
        est.green_value = std::numeric_limits<double>::infinity();
        est.tail_bound = 0.0;
        return est;
    }
    if (beta < 1.2L) {
        throw need_more_terms("polya_estimate: tail exponent " + std::to_string((double)beta) +
                                  " is too close to the recurrence boundary",
                              4 * len);
    }

    // partial sum at high precision
    mpf_set_default_prec(320);
    mpf_class sum(0, 320), pw(1, 320), inv(1, 320);
    {
        mpf_class qq(0, 320);
        qq = static_cast<unsigned long>(q);
        if (s.q_power_step == 2) qq *= static_cast<unsigned long>(q);
        inv = 1 / qq;
    }
    for (long k = 0; k < len; ++k) {
        mpf_class term(*s.vals[k], 320);
        sum += term * pw;
        pw *= inv;
    }
    long n0 = len - 1;

    // power-law coefficients c0, c1, c2 via iterated extrapolation
    std::vector<long double> g(len);
    for (long k = 1; k < len; ++k) g[k] = std::exp(lt[k] + beta * std::log(static_cast<long double>(k)));
    g[0] = g[1];
    auto [c0, c0_res] = richardson_limit(tail_samples(g, 2, 7));
    std::vector<long double> h(len, 0.0L);
    for (long k = 1; k < len; ++k) h[k] = (g[k] - c0) * k;
    auto [c1, c1_res] = richardson_limit(tail_samples(h, 2, 6));
    std::vector<long double> h2(len, 0.0L);
    for (long k = 1; k < len; ++k) h2[k] = (h[k] - c1) * k;
    auto [c2, c2_res] = richardson_limit(tail_samples(h2, 2, 5));
    // guard the noisy third coefficient
    if (!std::isfinite(static_cast<double>(c2)) || std::fabs(c2) > 1e6L * std::fabs(c0) + 1) c2 = 0;
    if (!std::isfinite(static_cast<double>(c1)) || std::fabs(c1) > 1e4L * std::fabs(c0) + 1) {
        c1 = 0;
        c2 = 0;
    }

    long double tail = c0 * power_tail(beta, n0) + c1 * power_tail(beta + 1, n0) + c2 * power_tail(beta + 2, n0);

    // model mismatch over the back window
    long double mres = 0;
    for (long k = std::max<long>(2, len - len / 8); k < len; ++k) {
        long double model = (c0 + c1 / k + c2 / (static_cast<long double>(k) * k)) *
                            std::exp(-beta * std::log(static_cast<long double>(k)));
        long double actual = std::exp(lt[k]);
        if (model != 0) mres = std::max(mres, std::fabs(actual / model - 1));
    }
    long double tail_err = std::fabs(tail) * (2 * mres + 1e-9L) +
                           std::fabs(c2 * power_tail(beta + 2, n0)) + std::fabs(c0) * beta_res *
                               std::fabs(std::log(static_cast<long double>(n0))) * power_tail(beta, n0);

    long double green = static_cast<long double>(sum.get_d()) + tail;
    long double polya = 1 - 1 / green;
    long double polya_err = tail_err / (green * green);

    if (!(polya_err < tolerance)) {
        long projected = static_cast<long>(n0 * std::pow(static_cast<double>(polya_err / tolerance),
                                                         1.0 / std::max(0.2, (double)beta - 1.0))) +
                         16;
        throw need_more_terms("polya_estimate: tail uncertainty " + std::to_string((double)polya_err) +
                                  " exceeds tolerance " + std::to_string(tolerance),
                              projected);
    }

    est.status = PolyaEstimate::Status::transient;
    est.green_value = static_cast<double>(green);
    est.value = static_cast<double>(polya);
    est.tail_bound = static_cast<double>(polya_err);
    return est;
}

AsymptoticFit asymptotic_fit(const TermTable& terms) {
    terms.validate();
    Summable s = summable_view(terms);
    const long len = static_cast<long>(s.vals.size());
    AsymptoticFit fit;
    if (len < 12) throw need_more_terms("asymptotic_fit: need at least 12 terms", 12);
    fit.low_confidence = len < 50;

    std::vector<long double> lr(len);
    for (long k = 0; k < len; ++k) lr[k] = log_mpz(*s.vals[k]);

    int levels = len >= 200 ? 8 : (len >= 60 ? 6 : 4);

    // rho from ratios
    std::vector<long double> ratio(len - 1);
    for (long k = 0; k + 1 < len; ++k) ratio[k] = std::exp(lr[k + 1] - lr[k]);
    auto [rho, rho_res] = richardson_limit(tail_samples(ratio, 1, levels));

    // alpha from second differences of log r
    std::vector<long double> alpha_seq(len - 1, 0.0L);
    for (long k = 2; k + 1 < len; ++k) {
        long double num = lr[k + 1] + lr[k - 1] - 2 * lr[k];
        long double den = std::log(static_cast<long double>(k + 1)) + std::log(static_cast<long double>(k - 1)) -
                          2 * std::log(static_cast<long double>(k));
        alpha_seq[k] = num / den;
    }
    auto [alpha, alpha_res] = richardson_limit(tail_samples(alpha_seq, 3, levels));

    // C from the compensated sequence
    long double lrho = std::log(rho);
    std::vector<long double> cseq(len, 0.0L);
    for (long k = 1; k < len; ++k) cseq[k] = std::exp(lr[k] - k * lrho - alpha * std::log(static_cast<long double>(k)));
    auto [cval, c_res] = richardson_limit(tail_samples(cseq, 2, levels));

    fit.rho = static_cast<double>(rho);
    fit.alpha = static_cast<double>(alpha);
    fit.C = static_cast<double>(cval);
    long double rres = rho != 0 ? rho_res / std::fabs(rho) : rho_res;
    long double cres = cval != 0 ? c_res / std::fabs(cval) : c_res;
    fit.residual = static_cast<double>(std::max({rres, alpha_res, cres}));
    return fit;
}

std::string polya_to_json(const PolyaEstimate& e) {
    nlohmann::json j;
    j["value"] = e.value;
    j["tail_bound"] = e.tail_bound;
    j["terms_used"] = e.terms_used;
    j["status"] = e.status == PolyaEstimate::Status::recurrent ? "recurrent" : "transient";
    j["green_value"] = e.green_value;
    j["beta"] = e.beta;
    return j.dump(2);
}

std::string fit_to_json(const AsymptoticFit& f) {
    nlohmann::json j;
    j["rho"] = f.rho;
    j["alpha"] = f.alpha;
    j["C"] = f.C;
    j["residual"] = f.residual;
    j["low_confidence"] = f.low_confidence;
    return j.dump(2);
}

}  // namespace greenwalks
