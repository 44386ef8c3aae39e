#pragma once

#include "qwz/term.hpp"

#include <vector>

namespace qwz {

// r(x) = (A/B) * (C(qx)/C(x)) with gcd(A(x), B(q^j x)) trivial in x for all
// j >= 0.  A, B, C are rational functions whose denominators are pure powers
// of q (divisions below happen in the field); the product identity is exact.
struct GosperNormalForm {
    RatFunc A, B, C;
};

namespace detail {

inline MultiPoly dilate_cleared(const MultiPoly& p, int v, long j) {
    long c = 0;
    return p.subst_q_dilate(v, j, c);
}

// den must be a pure q-power monomial; returns its q-exponent
inline long qpow_den(const RatFunc& r) {
    if (!r.den.is_monomial()) throw std::logic_error("expected q-power denominator");
    const auto& m = r.den.terms.begin()->first;
    for (int v = 0; v < NVARS; ++v)
        if (v != VQ && m[v] != 0) throw std::logic_error("expected q-power denominator");
    return m[VQ];
}

} // namespace detail

// Normal form of ab * (c0(qx)/c0(x)); callers that already know a dilation
// factor of their ratio pass it as c0 and skip the expensive root hunt on the
// expanded product.
inline GosperNormalForm gosper_normal_form(const RatFunc& ab, int main, MultiPoly c0) {
    GosperNormalForm nf{RatFunc(ab.num), RatFunc(ab.den), RatFunc(std::move(c0))};
    for (long j : q_resultant_roots(nf.A.num, nf.B.num, main)) {
        MultiPoly g = mpoly_gcd(nf.A.num, detail::dilate_cleared(nf.B.num, main, j));
        if (g.degree(main) <= 0) continue;
        RatFunc gr{g};
        // A/B loses g(x)/g(q^{-j}x); C(qx)/C(x) gains exactly that back
        nf.A = nf.A / gr;
        nf.B = nf.B / gr.subst_q_dilate(main, -j);
        for (long i = 1; i <= j; ++i) nf.C = nf.C * gr.subst_q_dilate(main, -i);
    }
    return nf;
}

inline GosperNormalForm gosper_normal_form(const RatFunc& r, int main) {
    return gosper_normal_form(r, main, MultiPoly(Rational(1)));
}

namespace detail {

// Solve M p = rhs over the rational-function field; free unknowns are set to
// zero.  Returns nullopt when the system is inconsistent.
inline std::optional<std::vector<RatFunc>> solve_linear(std::vector<std::vector<RatFunc>> M,
                                                        std::vector<RatFunc> rhs) {
    const std::size_t rows = M.size();
    const std::size_t cols = rows ? M[0].size() : 0;
    std::vector<long> pivot_of_col(cols, -1);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && M[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(M[p], M[rank]);
        std::swap(rhs[p], rhs[rank]);
        RatFunc inv = RatFunc(Rational(1)) / M[rank][c];
        for (std::size_t cc = c; cc < cols; ++cc) M[rank][cc] *= inv;
        rhs[rank] *= inv;
        for (std::size_t rr = 0; rr < rows; ++rr) {
            if (rr == rank || M[rr][c].is_zero()) continue;
            RatFunc f = M[rr][c];
            for (std::size_t cc = c; cc < cols; ++cc) M[rr][cc] -= f * M[rank][cc];
            rhs[rr] -= f * rhs[rank];
        }
        pivot_of_col[c] = static_cast<long>(rank);
        ++rank;
    }
    for (std::size_t rr = rank; rr < rows; ++rr)
        if (!rhs[rr].is_zero()) return std::nullopt;
    std::vector<RatFunc> sol(cols, RatFunc(Rational(0)));
    for (std::size_t c = 0; c < cols; ++c)
        if (pivot_of_col[c] >= 0) sol[c] = rhs[pivot_of_col[c]];
    return sol;
}

} // namespace detail

// Certificate y(x) with r(x) y(qx) - y(x) = 1, if one exists that is rational
// in x.  The unknown in A(x)P(qx) - B(q^{-1}x)P(x) = C(x) is allowed to be a
// Laurent polynomial, which covers the bilateral cases.
namespace detail {

inline std::optional<RatFunc> gosper_solve_from_nf(const GosperNormalForm& nf, const RatFunc& r,
                                                   int main) {
    RatFunc Bm = nf.B.subst_q_dilate(main, -1);

    // clear the q-power denominators to get polynomial equation data
    long ca = detail::qpow_den(nf.A), cb = detail::qpow_den(Bm), cc = detail::qpow_den(nf.C);
    long cm = std::max({ca, cb, cc});
    auto cleared = [&](const RatFunc& f, long c) {
        return f.num * MultiPoly::variable(VQ, static_cast<int>(cm - c));
    };
    MultiPoly Ap = cleared(nf.A, ca), Bp = cleared(Bm, cb), Cp = cleared(nf.C, cc);

    long alpha = Ap.degree(main), beta = Bp.degree(main), gamma = Cp.degree(main);
    long a0 = Ap.low_degree(main), b0 = Bp.low_degree(main), c0 = Cp.low_degree(main);

    long d, l;
    if (alpha != beta) {
        d = gamma - std::max(alpha, beta);
    } else {
        d = gamma - alpha;
        auto j = (RatFunc(Bp.coeff_of(main, static_cast<int>(beta))) /
                  RatFunc(Ap.coeff_of(main, static_cast<int>(alpha))))
                     .as_q_power();
        if (j) d = std::max(d, *j);
    }
    if (a0 != b0) {
        l = c0 - std::min(a0, b0);
    } else {
        l = c0 - a0;
        auto j = (RatFunc(Bp.coeff_of(main, static_cast<int>(b0))) /
                  RatFunc(Ap.coeff_of(main, static_cast<int>(a0))))
                     .as_q_power();
        if (j) l = std::min(l, *j);
    }
    if (d < l) return std::nullopt;

    // shift the whole equation by x^{-l} so every exponent is >= 0
    long ncols = d - l + 1;
    long emax = std::max(std::max(alpha, beta) + (d - l), gamma - l);
    std::vector<std::vector<RatFunc>> M(emax + 1, std::vector<RatFunc>(ncols, RatFunc(Rational(0))));
    std::vector<RatFunc> rhs(emax + 1, RatFunc(Rational(0)));
    for (long e = 0; e <= emax; ++e)
        rhs[e] = RatFunc(Cp.coeff_of(main, static_cast<int>(e + l)));
    for (long i = l; i <= d; ++i) {
        // p_i contributes (A q^i - B(q^{-1}x)) x^{i-l} to the shifted equation
        RatFunc col{(i >= 0) ? Ap * MultiPoly::variable(VQ, static_cast<int>(i)) : Ap};
        if (i < 0) col = col.mul_monomial(1, [&] {
            std::array<int, NVARS> ex{};
            ex[VQ] = static_cast<int>(i);
            return ex;
        }());
        col = col - RatFunc(Bp);
        for (long e = 0; e <= emax; ++e) {
            long src = e - (i - l);
            RatFunc entry(Rational(0));
            if (src >= 0) {
                entry = RatFunc(col.num.coeff_of(main, static_cast<int>(src))) / RatFunc(col.den);
            }
            M[e][i - l] = entry;
        }
    }

    auto sol = detail::solve_linear(std::move(M), std::move(rhs));
    if (!sol) return std::nullopt;

    RatFunc P(Rational(0));
    for (long i = l; i <= d; ++i) {
        std::array<int, NVARS> ex{};
        ex[main] = static_cast<int>(i);
        P += (*sol)[i - l].mul_monomial(1, ex);
    }
    RatFunc y = Bm * P / nf.C;

    // mandatory certificate check
    if (!rat_is_zero(r * y.subst_q_dilate(main, 1) - y - RatFunc(Rational(1))))
        return std::nullopt;
    return y;
}

} // namespace detail

inline std::optional<RatFunc> qgosper_solve(const RatFunc& r, int main) {
    if (r.is_zero()) return RatFunc(Rational(-1)); // 0*y(qx) - y = 1
    return detail::gosper_solve_from_nf(gosper_normal_form(r, main), r, main);
}

// r = ab * (c(qx)/c(x)) with the factorization supplied by the caller; the
// normal-form root hunt then only touches ab.  Falls back to nullopt exactly
// like qgosper_solve; the certificate check runs against the full r.
inline std::optional<RatFunc> qgosper_solve_factored(const RatFunc& ab, const MultiPoly& c,
                                                     const RatFunc& r, int main) {
    if (r.is_zero()) return RatFunc(Rational(-1));
    return detail::gosper_solve_from_nf(gosper_normal_form(ab, main, c), r, main);
}

// Z with Z(k+1) - Z(k) = t (k_shift = true) or Z(n+1) - Z(n) = t, as
// (certificate) * t.  Z(k+1) - Z(k) = t * (r * y(qx) - y) = t by construction.
inline std::optional<QHyperTerm> antidifference(const QHyperTerm& t, bool k_shift = true) {
    RatFunc r = k_shift ? shift_ratio_k(t) : shift_ratio_n(t);
    auto y = qgosper_solve(r, k_shift ? VX : VY);
    if (!y) return std::nullopt;
    return t.scaled(*y);
}

} // namespace qwz
