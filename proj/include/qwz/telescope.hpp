#pragma once

#include "qwz/wz.hpp"

namespace qwz {

// sum_i coeffs[i](a) * f(a q^i) = rhs(a); coefficients are rational in a and q.
struct FunctionalRecurrence {
    std::vector<RatFunc> coeffs;
    RatFunc rhs;
};

struct TelescopeResult {
    QHyperTerm T;    // normalized combination sum_i (c_i/c_0) D_n(a q^i)
    QHyperTerm z;    // z_{n+1} - z_n = T(n)
    RatFunc rho;     // T / D
    RatFunc y;       // z / T, the antidifference certificate in n
    bool z0_zero;    // rational prefactor of z vanishes at n = 0 (symbolic)
};

// Telescoping certificate for a dilation recurrence applied termwise to a
// summand family D_n(a): find z with
//   sum_i (c_i/c_0) D_n(a q^i) = z_{n+1} - z_n.
inline std::optional<TelescopeResult> telescope_certify(const FunctionalRecurrence& rec,
                                                        const QHyperTerm& D) {
    if (rec.coeffs.empty() || rec.coeffs[0].is_zero())
        throw std::invalid_argument("recurrence needs a nonzero leading coefficient");
    if (D.pre.is_zero()) {
        TelescopeResult triv{D, D, RatFunc(Rational(0)), RatFunc(Rational(0)), true};
        return triv;
    }

    RatFunc rho(Rational(0));
    for (std::size_t i = 0; i < rec.coeffs.size(); ++i) {
        ParamSubst s;
        s.m.pexp[VA - VA] = 1;
        s.m.qexp = static_cast<long>(i);
        QHyperTerm Di = subst_param(D, VA, s);
        rho += (rec.coeffs[i] / rec.coeffs[0]) * term_quotient(Di, D);
    }
    if (rho.is_zero()) {
        QHyperTerm zero = D.scaled(RatFunc(Rational(0)));
        TelescopeResult triv{zero, zero, rho, RatFunc(Rational(0)), true};
        return triv;
    }

    QHyperTerm T = D.scaled(rho);
    auto y = qgosper_solve(shift_ratio_n(T), VY);
    if (!y) return std::nullopt;

    TelescopeResult res{T, T.scaled(*y), rho, *y, false};
    // z vanishes at n = 0 iff its rational prefactor does (the q-shifted
    // factorial factors are all (·;q)_0 = 1 or generically nonzero there)
    try {
        res.z0_zero = res.z.pre.subst_value(VY, Rational(1)).is_zero();
    } catch (const PoleError&) {
        res.z0_zero = false;
    }
    return res;
}

struct ABReport {
    std::vector<Rational> A, B;
    Real max_tail_diff{0};
    bool cauchy = false;
};

// Iterate H(a) = alpha(a) H(aq) + beta(a) H(aq^2), alpha = -c_1/c_0,
// beta = -c_2/c_0:  A_{n+1} = alpha(a q^{n+1}) A_n + B_n,
// B_{n+1} = beta(a q^{n+1}) A_n, starting from A_0 = alpha(a), B_0 = beta(a).
// Exact rational iteration; the convergence report compares the last few
// successive differences against tol.
inline ABReport iterate_AnBn(const FunctionalRecurrence& rec, long N, const Assignment& asg,
                             const Real& tol) {
    if (rec.coeffs.size() != 3) throw std::invalid_argument("expected a three-term recurrence");
    auto coeff_at = [&](const RatFunc& c, const Rational& aval) {
        auto pt = asg.point(0, 0);
        pt[VA] = aval;
        auto v = c.eval(pt);
        if (!v) throw PoleError("recurrence coefficient pole during iteration");
        return *v;
    };
    auto alpha = [&](const Rational& aval) { return -coeff_at(rec.coeffs[1], aval) / coeff_at(rec.coeffs[0], aval); };
    auto beta = [&](const Rational& aval) { return -coeff_at(rec.coeffs[2], aval) / coeff_at(rec.coeffs[0], aval); };

    ABReport rep;
    Rational a0 = asg.param(VA);
    rep.A.push_back(alpha(a0));
    rep.B.push_back(beta(a0));
    Rational scale = a0;
    for (long n = 0; n < N; ++n) {
        scale = a0 * rational_pow(asg.q, n + 1);
        Rational An1 = alpha(scale) * rep.A.back() + rep.B.back();
        Rational Bn1 = beta(scale) * rep.A.back();
        rep.A.push_back(An1);
        rep.B.push_back(Bn1);
    }

    rep.cauchy = rep.A.size() >= 6;
    for (std::size_t i = rep.A.size() - 5; i < rep.A.size() && rep.cauchy; ++i) {
        Real da = to_real(boost::multiprecision::abs(rep.A[i] - rep.A[i - 1]));
        Real db = to_real(boost::multiprecision::abs(rep.B[i] - rep.B[i - 1]));
        rep.max_tail_diff = std::max(rep.max_tail_diff, std::max(da, db));
        if (da > tol || db > tol) rep.cauchy = false;
    }
    return rep;
}

} // namespace qwz
