#include "greenwalks/pfinite.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace greenwalks {

namespace {

int max_degree(const std::vector<ZPoly>& ps) {
    int d = -1;
    for (const auto& p : ps) d = std::max(d, p.degree());
    return d;
}

BigInt vector_content(const std::vector<ZPoly>& ps) {
    BigInt g = 0;
    for (const auto& p : ps)
        for (const auto& c : p.c) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
            if (g == 1) return g;
        }
    return g;
}

void divide_all(std::vector<ZPoly>& ps, const BigInt& g) {
    for (auto& p : ps) p = divexact(p, g);
}

// lowest power of z dividing every polynomial (0 when some constant term lives)
int common_z_valuation(const std::vector<ZPoly>& ps) {
    int val = -1;
    for (const auto& p : ps) {
        if (p.zero()) continue;
        int v = 0;
        while (v < static_cast<int>(p.c.size()) && p.c[v] == 0) ++v;
        val = val < 0 ? v : std::min(val, v);
        if (val == 0) break;
    }
    return std::max(val, 0);
}

void strip_z(std::vector<ZPoly>& ps) {
    int v = common_z_valuation(ps);
    if (v == 0) return;
    for (auto& p : ps) {
        if (p.zero()) continue;
        p.c.erase(p.c.begin(), p.c.begin() + v);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// PolyRec

int PolyRec::degree() const { return max_degree(p); }

void PolyRec::validate() const {
    if (p.empty()) throw std::invalid_argument("PolyRec: empty");
    if (p.front().zero()) throw std::invalid_argument("PolyRec: p_0 identically zero");
    if (p.back().zero()) throw std::invalid_argument("PolyRec: p_L identically zero");
}

void PolyRec::canonicalize() {
    validate();
    BigInt g = vector_content(p);
    if (p[0].leading() < 0) g = -g;
    if (g != 1 && g != 0) divide_all(p, g);
}

std::vector<ZPoly> PolyRec::forward_coeffs() const {
    int L = order();
    std::vector<ZPoly> q(L + 1);
    for (int j = 0; j <= L; ++j) q[j] = p[L - j].shifted(L);
    return q;
}

std::string PolyRec::str(const std::string& seq) const {
    std::ostringstream out;
    auto q = forward_coeffs();
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (j) out << " + ";
        out << "(" << q[j].str("n") << ")*" << seq << "(n+" << j << ")";
    }
    out << " = 0";
    return out.str();
}

// ---------------------------------------------------------------------------
// ThetaODE / DiffOpD

int ThetaODE::degree() const { return max_degree(u); }

void ThetaODE::validate() const {
    if (u.empty()) throw std::invalid_argument("ThetaODE: empty");
    if (u.back().zero()) throw std::invalid_argument("ThetaODE: u_K identically zero");
}

void ThetaODE::canonicalize() {
    validate();
    strip_z(u);
    BigInt g = vector_content(u);
    // sign rule matching PolyRec: the bijection image p_0(m) = sum_k u_{k,0} m^k
    // must have a positive leading coefficient
    for (int k = order(); k >= 0; --k) {
        if (u[k].coeff(0) != 0) {
            if (u[k].coeff(0) < 0) g = -g;
            break;
        }
    }
    if (g != 1 && g != 0) divide_all(u, g);
}

std::string ThetaODE::str() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (k) out << " + ";
        out << "(" << u[k].str("z") << ")";
        if (k == 1) out << "*T";
        if (k > 1) out << "*T^" << k;
    }
    return out.str();
}

int DiffOpD::degree() const { return max_degree(v); }

void DiffOpD::validate() const {
    if (v.empty()) throw std::invalid_argument("DiffOpD: empty");
    if (v.back().zero()) throw std::invalid_argument("DiffOpD: v_K identically zero");
}

void DiffOpD::canonicalize() {
    validate();
    strip_z(v);
    BigInt g = vector_content(v);
    if (v.back().leading() < 0) g = -g;
    if (g != 1 && g != 0) divide_all(v, g);
}

// ---------------------------------------------------------------------------
// bijection

PolyRec theta_ode_to_rec(const ThetaODE& input) {
    input.validate();
    ThetaODE ode = input;
    strip_z(ode.u);  // a common z factor would make the image p_0 vanish
    int K = ode.order(), L = ode.degree();
    PolyRec rec;
    rec.p.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        // q_l(m) = sum_k u_{k,l} m^k, then p_l(n) = q_l(n - l)
        ZPoly q;
        q.c.assign(K + 1, BigInt(0));
        for (int k = 0; k <= K; ++k) q.c[k] = ode.u[k].coeff(l);
        q.trim();
        rec.p[l] = q.shifted(-l);
    }
    rec.validate();
    return rec;
}

ThetaODE rec_to_theta_ode(const PolyRec& rec) {
    rec.validate();
    int L = rec.order();
    int K = rec.degree();
    ThetaODE ode;
    ode.u.resize(K + 1);
    for (int k = 0; k <= K; ++k) ode.u[k].c.assign(L + 1, BigInt(0));
    for (int l = 0; l <= L; ++l) {
        ZPoly q = rec.p[l].shifted(l);  // u_{k,l} = [m^k] p_l(m + l)
        for (int k = 0; k <= q.degree(); ++k) ode.u[k].c[l] = q.coeff(k);
    }
    for (auto& u : ode.u) u.trim();
    while (ode.u.size() > 1 && ode.u.back().zero()) ode.u.pop_back();
    ode.validate();
    return ode;
}

namespace {

// left-multiply by (theta - i): u_k <- u_{k-1} + z u_k' - i u_k
ThetaODE theta_factor_multiply(const ThetaODE& ode, long i) {
    ThetaODE out;
    int K = ode.order();
    out.u.assign(K + 2, ZPoly());
    for (int k = 0; k <= K + 1; ++k) {
        ZPoly acc;
        if (k >= 1 && k - 1 <= K) acc = ode.u[k - 1];
        if (k <= K) {
            ZPoly zd = ode.u[k];
            for (int j = 0; j < static_cast<int>(zd.c.size()); ++j) zd.c[j] *= j;
            zd.trim();
            acc = acc + zd - ode.u[k] * BigInt(i);
        }
        out.u[k] = std::move(acc);
    }
    while (out.u.size() > 1 && out.u.back().zero()) out.u.pop_back();
    return out;
}

}  // namespace

ThetaODE rec_annihilator_ode(const PolyRec& rec, const std::vector<BigInt>* terms) {
    ThetaODE ode = rec_to_theta_ode(rec);
    int L = rec.order();
    for (long i = 0; i < L; ++i) {
        bool failing = true;
        if (terms) {
            if (static_cast<long>(terms->size()) <= i)
                throw std::invalid_argument("rec_annihilator_ode: need at least order-many terms");
            BigInt row = 0;
            for (long l = 0; l <= i; ++l) row += rec.p[l].eval_int(i) * (*terms)[i - l];
            failing = row != 0;
        }
        if (failing) ode = theta_factor_multiply(ode, i);
    }
    ode.canonicalize();
    return ode;
}

// ---------------------------------------------------------------------------
// theta <-> D

DiffOpD theta_to_d(const ThetaODE& ode) {
    ode.validate();
    int K = ode.order();
    // Stirling numbers of the second kind: theta^k = sum_j S2(k,j) z^j D^j
    std::vector<std::vector<BigInt>> S2(K + 1, std::vector<BigInt>(K + 1, BigInt(0)));
    S2[0][0] = 1;
    for (int k = 1; k <= K; ++k)
        for (int j = 1; j <= k; ++j) S2[k][j] = S2[k - 1][j - 1] + S2[k - 1][j] * j;

    DiffOpD op;
    op.v.assign(K + 1, ZPoly());
    for (int j = 0; j <= K; ++j) {
        ZPoly acc;
        for (int k = j; k <= K; ++k) acc = acc + ode.u[k] * S2[k][j];
        op.v[j] = ZPoly::monomial(BigInt(1), j) * acc;
    }
    while (op.v.size() > 1 && op.v.back().zero()) op.v.pop_back();
    op.canonicalize();
    return op;
}

ThetaODE d_to_theta(const DiffOpD& op) {
    op.validate();
    int K = op.order();
    // falling factorial theta(theta-1)...(theta-j+1) expanded in theta
    std::vector<ZPoly> fall(K + 1);
    fall[0] = ZPoly(BigInt(1));
    for (int j = 1; j <= K; ++j) {
        ZPoly lin;  // (x - (j-1))
        lin.c = {BigInt(-(j - 1)), BigInt(1)};
        fall[j] = fall[j - 1] * lin;
    }
    // z^K (sum_j v_j D^j) = sum_j v_j z^{K-j} fall_j(theta)
    ThetaODE ode;
    ode.u.assign(K + 1, ZPoly());
    for (int j = 0; j <= K; ++j) {
        ZPoly w = op.v[j] * ZPoly::monomial(BigInt(1), K - j);
        for (int k = 0; k <= fall[j].degree(); ++k) ode.u[k] = ode.u[k] + w * fall[j].coeff(k);
    }
    while (ode.u.size() > 1 && ode.u.back().zero()) ode.u.pop_back();
    ode.canonicalize();
    return ode;
}

// ---------------------------------------------------------------------------
// closure: sum of solution spaces

namespace {

using Row = std::vector<QPolyFrac>;

// reduction table: f(n-j) expressed over the window f(n), ..., f(n-A+1)
std::vector<Row> reduction_rows(const PolyRec& rec, int needed) {
    int A = rec.order();
    std::vector<Row> rows;
    rows.reserve(needed);
    for (int j = 0; j < needed; ++j) {
        Row r(A);
        if (j < A) {
            r[j] = QPolyFrac::from_poly(ZPoly(BigInt(1)));
        } else {
            // rec at m = n - (j - A): f(m - A) = -sum_{l<A} p_l(m)/p_A(m) f(m-l)
            long shift = -(j - A);
            ZPoly den = rec.p[A].shifted(shift);
            for (int l = 0; l < A; ++l) {
                QPolyFrac coef(rec.p[l].shifted(shift) * BigInt(-1), den);
                const Row& prev = rows[j - A + l];
                for (int i = 0; i < A; ++i) {
                    if (!prev[i].zero()) r[i] = r[i] + coef * prev[i];
                }
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

PolyRec rec_add(const PolyRec& a, const PolyRec& b) {
    a.validate();
    b.validate();
    int A = a.order(), B = b.order();
    int dim = A + B;
    int max_rows = dim + 1;
    auto ra = reduction_rows(a, max_rows);
    auto rb = reduction_rows(b, max_rows);

    // incremental elimination with an augmented coefficient trail
    struct BasisRow {
        Row val;
        std::vector<QPolyFrac> coef;  // over the T_j fed in so far
        int pivot;
    };
    std::vector<BasisRow> basis;

    for (int j = 0; j < max_rows; ++j) {
        Row w(dim);
        for (int i = 0; i < A; ++i) w[i] = ra[j][i];
        for (int i = 0; i < B; ++i) w[A + i] = rb[j][i];
        std::vector<QPolyFrac> coef(max_rows);
        coef[j] = QPolyFrac::from_poly(ZPoly(BigInt(1)));

        for (const auto& row : basis) {
            if (w[row.pivot].zero()) continue;
            QPolyFrac factor = w[row.pivot] / row.val[row.pivot];
            for (int i = 0; i < dim; ++i)
                if (!row.val[i].zero()) w[i] = w[i] - factor * row.val[i];
            for (int i = 0; i < max_rows; ++i)
                if (!row.coef[i].zero()) coef[i] = coef[i] - factor * row.coef[i];
        }
        int pivot = -1;
        for (int i = 0; i < dim; ++i)
            if (!w[i].zero()) {
                pivot = i;
                break;
            }
        if (pivot < 0) {
            // dependency found: sum_i coef[i](n) (f+g)(n-i) = 0. Clear the
            // rational-function denominators: primitive parts via the
            // polynomial lcm, integer contents via an integer lcm.
            ZPoly lcm_prim(BigInt(1));
            BigInt lcm_cont = 1;
            std::vector<ZPoly> den_prim(j + 1);
            std::vector<BigInt> den_cont(j + 1, BigInt(1));
            for (int i = 0; i <= j; ++i) {
                if (coef[i].zero()) continue;
                den_cont[i] = coef[i].den.content();
                if (coef[i].den.leading() < 0) den_cont[i] = -den_cont[i];
                den_prim[i] = divexact(coef[i].den, den_cont[i]);
                ZPoly g = poly_gcd(lcm_prim, den_prim[i]);
                lcm_prim = poly_divexact(lcm_prim, g) * den_prim[i];
                mpz_lcm(lcm_cont.get_mpz_t(), lcm_cont.get_mpz_t(), den_cont[i].get_mpz_t());
            }
            std::vector<ZPoly> cleared(j + 1);
            for (int i = 0; i <= j; ++i) {
                if (coef[i].zero()) continue;
                BigInt cmul;
                mpz_divexact(cmul.get_mpz_t(), lcm_cont.get_mpz_t(), den_cont[i].get_mpz_t());
                cleared[i] = coef[i].num * poly_divexact(lcm_prim, den_prim[i]) * cmul;
            }
            // shift-normalize away an identically-zero head
            int s = 0;
            while (s <= j && cleared[s].zero()) ++s;
            int e = j;
            while (e >= s && cleared[e].zero()) --e;
            PolyRec out;
            out.p.resize(e - s + 1);
            for (int i = s; i <= e; ++i) out.p[i - s] = cleared[i].shifted(-s);
            out.canonicalize();
            return out;
        }
        basis.push_back({std::move(w), std::move(coef), pivot});
    }
    throw std::logic_error("rec_add: no dependency found (unreachable)");
}

PolyRec rec_interleave(const PolyRec& rec, int offset) {
    rec.validate();
    if (offset != 0 && offset != 1) throw std::invalid_argument("rec_interleave: offset must be 0 or 1");
    int L = rec.order(), D = rec.degree();
    BigInt two(2);
    PolyRec out;
    out.p.assign(2 * L + 1, ZPoly());
    for (int l = 0; l <= L; ++l) {
        // 2^D p_l((n - offset)/2), cleared to an integer polynomial
        ZPoly s;
        s.c.assign(rec.p[l].c.size(), BigInt(0));
        for (int j = 0; j <= rec.p[l].degree(); ++j) {
            BigInt pw;
            mpz_pow_ui(pw.get_mpz_t(), two.get_mpz_t(), D - j);
            s.c[j] = rec.p[l].coeff(j) * pw;
        }
        s.trim();
        out.p[2 * l] = s.shifted(-offset);
    }
    out.canonicalize();
    return out;
}

ThetaODE ode_compose_power(const ThetaODE& ode, int k) {
    ode.validate();
    if (k < 1) throw std::invalid_argument("ode_compose_power: k must be >= 1");
    int K = ode.order();
    BigInt kk(k);
    ThetaODE out;
    out.u.resize(K + 1);
    for (int j = 0; j <= K; ++j) {
        BigInt pw;
        mpz_pow_ui(pw.get_mpz_t(), kk.get_mpz_t(), K - j);
        out.u[j] = ode.u[j].stretched(k) * pw;
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// verification and unrolling

VerifyResult rec_verify_values(const PolyRec& rec, const std::vector<BigInt>& terms, const BigInt& modulus,
                               bool padded_rows) {
    rec.validate();
    int L = rec.order();
    long count = static_cast<long>(terms.size());
    long start = padded_rows ? 0 : L;
    for (long n = start; n < count; ++n) {
        BigInt acc = 0;
        for (int l = 0; l <= L && l <= n; ++l) acc += rec.p[l].eval_int(n) * terms[n - l];
        if (modulus != 0) acc %= modulus;
        if (acc != 0) return {false, n};
    }
    return {true, -1};
}

VerifyResult rec_verify(const PolyRec& rec, const TermTable& terms, bool padded_rows) {
    return rec_verify_values(rec, terms.terms, terms.modulus, padded_rows);
}

std::vector<BigInt> rec_unroll(const PolyRec& rec, std::vector<BigInt> initial, long nmax) {
    rec.validate();
    int L = rec.order();
    if (static_cast<long>(initial.size()) < L)
        throw std::invalid_argument("rec_unroll: need at least order-many initial values");
    std::vector<BigInt> f = std::move(initial);
    f.reserve(nmax + 1);
    for (long n = static_cast<long>(f.size()); n <= nmax; ++n) {
        BigInt den = rec.p[0].eval_int(n);
        if (den == 0)
            throw std::runtime_error("rec_unroll: leading coefficient vanishes at n = " + std::to_string(n));
        BigInt num = 0;
        for (int l = 1; l <= L; ++l) num -= rec.p[l].eval_int(n) * f[n - l];
        if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
            throw std::runtime_error("rec_unroll: non-integer value at n = " + std::to_string(n) +
                                     " (wrong recurrence or initial values)");
        BigInt v;
        mpz_divexact(v.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        f.push_back(std::move(v));
    }
    return f;
}

std::optional<long> leading_zero_in_range(const PolyRec& rec, long scan_limit) {
    std::optional<long> last;
    for (long n = 0; n <= scan_limit; ++n)
        if (rec.p[0].eval_int(n) == 0) last = n;
    return last;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json coeffs_to_json(const std::vector<ZPoly>& ps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : ps) {
        nlohmann::json poly = nlohmann::json::array();
        for (const auto& c : p.c) poly.push_back(c.get_str());
        arr.push_back(std::move(poly));
    }
    return arr;
}

std::vector<ZPoly> coeffs_from_json(const nlohmann::json& arr) {
    std::vector<ZPoly> ps;
    for (const auto& poly : arr) {
        ZPoly p;
        for (const auto& c : poly) p.c.push_back(from_decimal(c.get<std::string>()));
        p.trim();
        ps.push_back(std::move(p));
    }
    return ps;
}

nlohmann::json op_json(const std::string& kind, int order, int degree, const std::vector<ZPoly>& ps) {
    nlohmann::json j;
    j["kind"] = kind;
    j["order"] = order;
    j["degree"] = degree;
    j["coeffs"] = coeffs_to_json(ps);
    return j;
}

}  // namespace

std::string rec_to_json(const PolyRec& rec) { return op_json("rec", rec.order(), rec.degree(), rec.p).dump(2); }
std::string ode_to_json(const ThetaODE& ode) {
    return op_json("theta-ode", ode.order(), ode.degree(), ode.u).dump(2);
}
std::string dop_to_json(const DiffOpD& op) { return op_json("d-ode", op.order(), op.degree(), op.v).dump(2); }

namespace {
nlohmann::json parse_kind(const std::string& json, const std::string& kind) {
    auto j = nlohmann::json::parse(json);
    if (j.at("kind").get<std::string>() != kind)
        throw std::invalid_argument("expected operator kind '" + kind + "', got '" +
                                    j.at("kind").get<std::string>() + "'");
    return j;
}
}  // namespace

PolyRec rec_from_json(const std::string& json) {
    auto j = parse_kind(json, "rec");
    PolyRec r;
    r.p = coeffs_from_json(j.at("coeffs"));
    r.validate();
    return r;
}

ThetaODE ode_from_json(const std::string& json) {
    auto j = parse_kind(json, "theta-ode");
    ThetaODE o;
    o.u = coeffs_from_json(j.at("coeffs"));
    o.validate();
    return o;
}

DiffOpD dop_from_json(const std::string& json) {
    auto j = parse_kind(json, "d-ode");
    DiffOpD o;
    o.v = coeffs_from_json(j.at("coeffs"));
    o.validate();
    return o;
}

}  // namespace greenwalks
