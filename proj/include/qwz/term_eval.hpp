#pragma once

#include "qwz/numeric.hpp"
#include "qwz/term.hpp"

namespace qwz {

// Numeric sample point: rational values for q and the letter parameters, so
// vanishing factors are detected exactly rather than by thresholding.
struct Assignment {
    Rational q{1, 2};
    std::array<Rational, NPARAMS> params{}; // a, b, c, d, e, z

    Rational param(Var v) const { return params[v - VA]; }
    void set(Var v, const Rational& r) {
        if (v == VQ) q = r;
        else params[v - VA] = r;
    }

    std::array<Rational, NVARS> point(long k, long n) const {
        std::array<Rational, NVARS> pt{};
        pt[VQ] = q;
        for (int i = 0; i < NPARAMS; ++i) pt[VA + i] = params[i];
        pt[VX] = rational_pow(q, k);
        pt[VY] = rational_pow(q, n);
        pt[VT] = 1;
        return pt;
    }
};

namespace detail {

struct FactorAccum {
    Real value{1};
    long zero_order = 0;

    void mul_rational(const Rational& r, int expo) {
        if (r == 0) {
            zero_order += expo;
            return;
        }
        Real rr = to_real(r);
        if (expo >= 0)
            for (int i = 0; i < expo; ++i) value *= rr;
        else
            for (int i = 0; i < -expo; ++i) value /= rr;
    }
    void mul_real(const Real& r, int expo) {
        if (expo >= 0)
            for (int i = 0; i < expo; ++i) value *= r;
        else
            for (int i = 0; i < -expo; ++i) value /= r;
    }
};

// (arg; q)_len with rational arg, exact zero tracking.
inline void accumulate_poch(FactorAccum& acc, const Rational& arg, const Rational& q,
                            std::optional<long> len, int expo, const TruncationPolicy& policy) {
    if (arg == 0) return; // (0;q)_len = 1
    if (len && *len == 0) return;
    if (len && *len > 0) {
        Rational u = arg;
        for (long j = 0; j < *len; ++j) {
            acc.mul_rational(1 - u, expo);
            u *= q;
        }
        return;
    }
    if (len) { // negative length: reciprocal rule
        Rational u = arg;
        for (long j = 0; j < -*len; ++j) {
            u /= q;
            acc.mul_rational(1 - u, -expo);
        }
        return;
    }
    // infinite product: rational phase while |u| >= 1/2 (exact zero tests),
    // then float phase with a geometric tail bound
    Rational u = arg;
    Real eps = policy.eps_real();
    long steps = 0;
    while (boost::multiprecision::abs(u) >= Rational(1, 2)) {
        acc.mul_rational(1 - u, expo);
        u *= q;
        if (++steps > policy.max_terms)
            throw std::runtime_error("infinite q-shifted factorial does not enter |u|<1/2 regime");
    }
    Real ur = to_real(u), qr = to_real(q), aq = boost::multiprecision::abs(qr);
    while (true) {
        Real au = boost::multiprecision::abs(ur);
        if (2 * au / (1 - aq) < eps) break;
        acc.mul_real(Real(1) - ur, expo);
        ur *= qr;
        if (++steps > policy.max_terms)
            throw std::runtime_error("infinite q-shifted factorial: tail bound not met");
    }
}

} // namespace detail

// Numeric value of T(n, k).  Exact zero factors make the value exactly zero;
// a net negative zero order is a pole.
inline Real eval_term(const QHyperTerm& t, const Assignment& asg, long k, long n,
                      const TruncationPolicy& policy) {
    detail::FactorAccum acc;
    std::string vanishing; // factor that drove the zero order negative
    for (const auto& f : t.factors) {
        Rational arg = f.coeff;
        for (int i = 0; i < NPARAMS; ++i)
            if (f.pexp[i]) arg *= rational_pow(asg.params[i], f.pexp[i]);
        arg *= rational_pow(asg.q, f.qpow.at(k, n));
        std::optional<long> len;
        if (!f.infinite) len = f.len.at(k, n);
        long before = acc.zero_order;
        detail::accumulate_poch(acc, arg, asg.q, len, f.expo, policy);
        if (acc.zero_order < before)
            vanishing = "(" + arg.str() + ";q)_" + (len ? std::to_string(*len) : "inf") + "^" +
                        std::to_string(f.expo);
    }

    // prefactor, exactly
    auto pt = asg.point(k, n);
    Rational den = t.pre.den.eval(pt);
    if (den == 0) {
        if (acc.zero_order > 0) throw PoleError("indeterminate 0 * inf in term evaluation");
        throw PoleError("prefactor pole in term evaluation");
    }
    Rational num = t.pre.num.eval(pt);
    if (num == 0) acc.zero_order += 1;

    // geometric parts
    auto geo_val = [&](const ParamMono& g) -> Rational {
        Rational b = g.coeff;
        for (int i = 0; i < NPARAMS; ++i)
            if (g.pexp[i]) b *= rational_pow(asg.params[i], g.pexp[i]);
        b *= rational_pow(asg.q, g.qexp);
        return b;
    };
    long geo_zero = 0;
    Real geo{1};
    auto apply_geo = [&](const ParamMono& g, long e) {
        if (g.is_one() || e == 0) return;
        Rational b = geo_val(g);
        if (b == 0) {
            if (e < 0) throw PoleError("zero geometric base with negative index");
            geo_zero += 1;
            return;
        }
        Real br = to_real(b);
        Real p = boost::multiprecision::pow(br, static_cast<unsigned>(e >= 0 ? e : -e));
        geo *= (e >= 0) ? p : Real(1 / p);
    };
    apply_geo(t.geo_k, k);
    apply_geo(t.geo_n, n);

    if (acc.zero_order < 0)
        throw PoleError("pole in term evaluation" +
                        (vanishing.empty() ? std::string()
                                           : ": vanishing factor " + vanishing));
    if (acc.zero_order > 0 || geo_zero > 0) return Real(0);

    Real v = acc.value * to_real(num) / to_real(den) * geo;
    Real qr = to_real(asg.q);
    auto mul_qpow = [&](long e) {
        Real p = boost::multiprecision::pow(qr, static_cast<unsigned long>(e >= 0 ? e : -e));
        v *= (e >= 0) ? p : Real(1 / p);
    };
    if (t.qbin_k) mul_qpow(t.qbin_k * (k * (k - 1) / 2));
    if (t.cross) mul_qpow(t.cross * n * k);
    if (t.sign_k && (k % 2 != 0)) v = -v;
    return v;
}

enum class Support { Unilateral, Bilateral };
enum class SumVar { K, N };

struct SumResult {
    Real value{0};
    Real tail_bound{0};
    long terms = 0;
    bool converged = false;
};

namespace detail {

// One-directional adaptive summation: idx = start, start+step, ...
inline void sum_direction(SumResult& out, const QHyperTerm& t, const Assignment& asg,
                          long fixed_other, SumVar var, long start, long step,
                          const TruncationPolicy& policy) {
    Real eps = policy.eps_real();
    Real prev_abs{-1};
    int small_run = 0;
    long idx = start;
    for (long i = 0; i < policy.max_terms; ++i, idx += step) {
        long k = (var == SumVar::K) ? idx : fixed_other;
        long n = (var == SumVar::K) ? fixed_other : idx;
        Real v = eval_term(t, asg, k, n, policy);
        out.value += v;
        ++out.terms;
        Real av = boost::multiprecision::abs(v);
        if (av < eps) {
            ++small_run;
            bool tail_ok = true;
            if (policy.tail_mode == TailMode::GeometricBound && prev_abs > 0 && av > 0) {
                Real ratio = av / prev_abs;
                tail_ok = ratio < 1 && av * ratio / (1 - ratio) < eps;
            }
            if (small_run >= 4 && tail_ok) {
                out.tail_bound = av;
                out.converged = true;
                return;
            }
        } else {
            small_run = 0;
        }
        if (av > 0) prev_abs = av;
    }
    out.converged = false;
}

} // namespace detail

// Adaptive truncated summation over k (or n) with the other index fixed.
inline SumResult sum_series(const QHyperTerm& t, long fixed_other, Support support,
                            const Assignment& asg, const TruncationPolicy& policy,
                            SumVar var = SumVar::K) {
    SumResult r;
    detail::sum_direction(r, t, asg, fixed_other, var, 0, +1, policy);
    if (support == Support::Bilateral) {
        SumResult neg;
        detail::sum_direction(neg, t, asg, fixed_other, var, -1, -1, policy);
        r.value += neg.value;
        r.tail_bound += neg.tail_bound;
        r.terms += neg.terms;
        r.converged = r.converged && neg.converged;
    }
    return r;
}

} // namespace qwz
