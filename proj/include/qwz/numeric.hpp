#pragma once

#include "qwz/rational.hpp"

#include <optional>

namespace qwz {

// Minimal complex type over Real; evaluation code is templated on the scalar
// so complex sample points work, though the stock checks use rational reals.
struct Complex {
    Real re, im;

    Complex() : re(0), im(0) {}
    Complex(Real r) : re(std::move(r)), im(0) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
};

inline Real abs_val(const Real& x) { return boost::multiprecision::abs(x); }
inline Real abs_val(const Complex& x) { return boost::multiprecision::sqrt(x.re * x.re + x.im * x.im); }

enum class TailMode { GeometricBound, TermSmallness };

struct TruncationPolicy {
    unsigned precision_digits = 40;
    Rational epsilon = Rational(1, boost::multiprecision::pow(Integer(10), 30));
    long max_terms = 4000;
    TailMode tail_mode = TailMode::GeometricBound;

    // invariant from the data model: epsilon >= 10^{1-precision_digits}
    bool valid() const {
        return epsilon > 0 && precision_digits > 0 &&
               epsilon * Rational(boost::multiprecision::pow(Integer(10), precision_digits - 1)) >= 1;
    }

    Real eps_real() const { return to_real(epsilon); }
};

// (a;q)_n for scalar arguments: finite n >= 0 as the defining product,
// n = 0 as 1, negative n via (a;q)_{-n} = 1/(aq^{-n};q)_n, and n = infinity
// (nullopt) as a partial product with a certified geometric tail bound.
template <class S>
S eval_poch(const S& a, const S& qv, std::optional<long> n, const TruncationPolicy& policy) {
    if (n && *n == 0) return S(Real(1));
    if (n && *n < 0) {
        // product of 1/(1 - a q^{-j}), j = 1..-n
        S prod{Real(1)};
        S qinv = S(Real(1)) / qv;
        S arg = a;
        for (long j = 0; j < -*n; ++j) {
            arg = arg * qinv;
            S f = S(Real(1)) - arg;
            if (abs_val(f) == 0) throw PoleError("vanishing factor in negative-length q-shifted factorial");
            prod = prod / f;
        }
        return prod;
    }
    if (abs_val(qv) >= 1 && !n)
        throw std::invalid_argument("(a;q)_inf needs |q| < 1");
    S prod{Real(1)};
    S u = a;
    Real eps = policy.eps_real();
    long limit = n ? *n : policy.max_terms;
    for (long j = 0; j < limit; ++j) {
        prod = prod * (S(Real(1)) - u);
        u = u * qv;
        if (!n) {
            // remaining |log prod| <= sum |u_i|/(1-|u_i|) <= 2|u|/(1-|q|) once |u| < 1/2
            Real au = abs_val(u);
            if (au < Real(0.5) && 2 * au / (1 - abs_val(qv)) < eps) return prod;
        }
    }
    if (!n) throw std::runtime_error("infinite q-shifted factorial: tail bound not met within max_terms");
    return prod;
}

} // namespace qwz
