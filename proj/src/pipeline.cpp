#include "greenwalks/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace greenwalks {

namespace {

std::vector<LatticePlan> build_plan() {
    // columns: M N norm method guess_terms recL recD odeK odeL
    //   ode_row rec_row ode2_row polya recurrent polya_terms guessable
    auto raw = Norm::raw;
    auto til = Norm::tilde;
    std::vector<LatticePlan> plan = {
        // 1D / 2D (recurrent)
        {1, 1, til, "closed-form", 60, 2, 3, 2, 2, /*ode*/ 1, 2, /*rec*/ 1, 1, /*ode2*/ -1, -1, 1.0, true, 1000, true},
        {1, 2, til, "closed-form", 60, 2, 3, 3, 2, 2, 2, 1, 2, -1, -1, 1.0, true, 1000, true},
        {2, 2, til, "closed-form", 60, 2, 3, 3, 2, 2, 2, 1, 2, -1, -1, 1.0, true, 1000, true},
        // 3D
        {1, 3, til, "closed-form", 60, 3, 4, 4, 3, 3, 4, 2, 3, -1, -1, 0.34054, false, 5000, true},
        {2, 3, raw, "factor-dp", 70, 4, 5, 4, 4, 3, 3, 3, 3, -1, -1, 0.25632, false, 5000, true},
        {3, 3, til, "closed-form", 60, 2, 4, 4, 2, 3, 2, 1, 3, -1, -1, 0.28223, false, 5000, true},
        // 4D
        {1, 4, til, "closed-form", 60, 3, 5, 5, 3, 4, 4, 2, 4, -1, -1, 0.19313, false, 5000, true},
        {2, 4, raw, "factor-dp", 95, 6, 8, 5, 9, 4, 7, 5, 6, 11, 5, 0.09571, false, 5000, true},
        {3, 4, til, "heracles", 200, 5, 22, 9, 18, 8, 32, 4, 20, 24, 8, 0.04332, false, 5000, true},
        {4, 4, til, "closed-form", 60, 2, 5, 5, 2, 4, 2, 1, 4, -1, -1, 0.10605, false, 5000, true},
        // 5D
        {1, 5, til, "closed-form", 80, 4, 6, 6, 4, 5, 6, 3, 5, -1, -1, 0.13517, false, 5000, true},
        {2, 5, raw, "factor-dp", 160, 8, 13, 7, 15, 6, 13, 7, 12, 19, 7, 0.04657, false, 5000, true},
        {3, 5, til, "factor-dp", 41, 0, 0, 0, 0, 14, 110, 8, 61, 69, 16, 0.01581, false, 41, false},
        {4, 5, raw, "heracles", 310, 7, 29, 10, 26, 9, 24, 6, 27, 33, 6, 0.01561, false, 5000, true},
        {5, 5, til, "closed-form", 60, 2, 6, 6, 2, 5, 2, 1, 5, -1, -1, 0.04473, false, 5000, true},
    };
    return plan;
}

}  // namespace

const std::vector<LatticePlan>& table1_plan() {
    static const std::vector<LatticePlan> plan = build_plan();
    return plan;
}

const LatticePlan& plan_for(int M, int N) {
    for (const auto& p : table1_plan())
        if (p.M == M && p.N == N) return p;
    throw std::invalid_argument("no survey plan for M=" + std::to_string(M) + " N=" + std::to_string(N));
}

int degree_doubling(const LatticePlan& plan) { return plan.norm == Norm::tilde ? 2 : 1; }

TermTable plan_terms(const LatticePlan& plan, int nmax, bool use_cache) {
    LatticeSpec spec(plan.M, plan.N);
    auto compute = [&]() -> TermTable {
        if (plan.term_method == "heracles") return terms_heracles(spec, nmax, plan.norm);
        if (plan.term_method == "closed-form") return terms_closed_form(spec, nmax, plan.norm);
        if (plan.term_method == "factor-dp") return terms_factor_dp(spec, nmax, plan.norm);
        throw std::logic_error("unknown term method " + plan.term_method);
    };
    if (!use_cache) return compute();
    return cached_terms(spec, plan.norm, plan.term_method, nmax, compute);
}

GuessConfig plan_rec_config(const LatticePlan& plan) {
    GuessConfig cfg;
    cfg.max_order = plan.rec_max_order;
    cfg.max_degree = plan.rec_max_degree;
    cfg.objective = Objective::order_first;
    return cfg;
}

GuessConfig plan_ode_config(const LatticePlan& plan) {
    GuessConfig cfg;
    cfg.max_order = plan.ode_max_order;
    cfg.max_degree = plan.ode_max_degree;
    cfg.objective = Objective::order_first;
    return cfg;
}

PlannedOperators plan_operators(const LatticePlan& plan, bool want_ode, bool use_cache) {
    if (!plan.guessable)
        throw std::invalid_argument("the minimal operators for this lattice are out of desk-scale reach");
    PlannedOperators out;
    out.table = plan_terms(plan, plan.guess_terms, use_cache);
    out.rec = guess_rec(out.table, plan_rec_config(plan));
    if (!out.rec.found) throw std::runtime_error("recurrence guess failed within the plan's search bounds");
    if (want_ode) {
        out.ode = guess_theta_ode(out.table, plan_ode_config(plan));
        if (!out.ode.found) throw std::runtime_error("ODE guess failed within the plan's search bounds");
    }
    return out;
}

TermTable plan_extended_terms(const LatticePlan& plan, long nmax, bool use_cache) {
    auto ops = plan_operators(plan, false, use_cache);
    const PolyRec& rec = *ops.rec.rec;
    long need = rec.order();
    if (auto z = leading_zero_in_range(rec, std::min<long>(nmax, 4 * rec.order() + 64)))
        need = std::max<long>(need, *z + 1);
    if (ops.table.count() < need)
        throw std::runtime_error("guess table too short to seed the extension");
    TermTable seed = ops.table;
    seed.terms.resize(need);
    return extend_terms(rec, seed, nmax);
}

PolyaEstimate plan_polya(const LatticePlan& plan, double tolerance, bool use_cache) {
    TermTable terms;
    if (!plan.guessable || plan.recurrent) {
        // direct summation table; recurrent rows classify from the generator output
        terms = plan_terms(plan, static_cast<int>(plan.polya_terms), use_cache);
    } else {
        terms = plan_extended_terms(plan, plan.polya_terms, use_cache);
    }
    return polya_estimate(terms, tolerance);
}

}  // namespace greenwalks
