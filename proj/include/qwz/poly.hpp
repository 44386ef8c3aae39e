#pragma once

#include "qwz/rational.hpp"
#include "qwz/vars.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace qwz {

// Exponent vector over the fixed universe q,a,b,c,d,e,z,x,y.
using Mono = std::array<int, NVARS>;

inline Mono mono_one() { return Mono{}; }

inline Mono mono_var(int v, int e = 1) {
    Mono m{};
    m[v] = e;
    return m;
}

inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono m;
    for (int i = 0; i < NVARS; ++i) m[i] = a[i] + b[i];
    return m;
}

// Sparse multivariate polynomial with exact rational coefficients.
// Invariant: no stored zero coefficients; exponents are non-negative.
class MultiPoly {
public:
    std::map<Mono, Rational> terms;

    MultiPoly() = default;
    explicit MultiPoly(const Rational& r) {
        if (r != 0) terms[mono_one()] = r;
    }
    explicit MultiPoly(long v) : MultiPoly(Rational(v)) {}

    static MultiPoly monomial(const Rational& coef, const Mono& m) {
        MultiPoly p;
        if (coef != 0) p.terms[m] = coef;
        return p;
    }
    static MultiPoly variable(int v, int e = 1) { return monomial(1, mono_var(v, e)); }

    bool is_zero() const { return terms.empty(); }

    bool is_constant() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first == mono_one());
    }

    Rational constant_value() const {
        if (terms.empty()) return 0;
        return terms.begin()->second;
    }

    bool is_monomial() const { return terms.size() == 1; }

    void add_term(const Mono& m, const Rational& c) {
        if (c == 0) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        for (auto& [m, c] : o.terms) add_term(m, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        for (auto& [m, c] : o.terms) add_term(m, -c);
        return *this;
    }
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator-(const MultiPoly& a) {
        MultiPoly r;
        for (auto& [m, c] : a.terms) r.terms[m] = -c;
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r;
        for (auto& [ma, ca] : a.terms)
            for (auto& [mb, cb] : b.terms) r.add_term(mono_mul(ma, mb), ca * cb);
        return r;
    }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    friend MultiPoly operator*(const MultiPoly& a, const Rational& s) {
        MultiPoly r;
        if (s == 0) return r;
        for (auto& [m, c] : a.terms) r.terms[m] = c * s;
        return r;
    }
    MultiPoly& operator*=(const Rational& s) { return *this = *this * s; }
    MultiPoly& operator/=(const Rational& s) { return *this = *this * (Rational(1) / s); }

    friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

    MultiPoly pow(unsigned e) const {
        MultiPoly r(Rational(1));
        MultiPoly b = *this;
        while (e) {
            if (e & 1) r *= b;
            b = (e >>= 1) ? b * b : b;
        }
        return r;
    }

    int degree(int v) const {
        int d = -1;
        for (auto& [m, c] : terms) d = std::max(d, m[v]);
        return d; // -1 for the zero polynomial
    }

    int low_degree(int v) const {
        if (terms.empty()) return 0;
        int d = INT32_MAX;
        for (auto& [m, c] : terms) d = std::min(d, m[v]);
        return d;
    }

    bool depends_on(int v) const { return degree(v) > 0; }

    // Coefficient of v^d, a polynomial in the remaining variables.
    MultiPoly coeff_of(int v, int d) const {
        MultiPoly r;
        for (auto& [m, c] : terms)
            if (m[v] == d) {
                Mono mm = m;
                mm[v] = 0;
                r.terms[mm] = c;
            }
        return r;
    }

    // Leading coefficient in the global (lex over the variable order) sense.
    Rational lead_coeff_global() const {
        if (terms.empty()) return 0;
        return terms.rbegin()->second;
    }

    Rational eval(const std::array<Rational, NVARS>& point) const {
        Rational s = 0;
        for (auto& [m, c] : terms) {
            Rational t = c;
            for (int v = 0; v < NVARS; ++v)
                if (m[v]) t *= rational_pow(point[v], m[v]);
            s += t;
        }
        return s;
    }

    // Substitute v -> q^j * v (monomial dilation).  Requires j*deg >= 0 terms
    // to stay polynomial; negative net q-exponents are the caller's problem,
    // so we return the polynomial together with the q-power that was cleared:
    // result = q^{cleared} * subst(p).
    MultiPoly subst_q_dilate(int v, long j, long& cleared_qpow) const {
        long min_q = 0;
        for (auto& [m, c] : terms) min_q = std::min(min_q, static_cast<long>(m[VQ]) + j * m[v]);
        cleared_qpow = -min_q;
        MultiPoly r;
        for (auto& [m, c] : terms) {
            Mono mm = m;
            mm[VQ] = static_cast<int>(m[VQ] + j * m[v] - min_q);
            r.add_term(mm, c);
        }
        return r;
    }

    // Substitute v -> value.
    MultiPoly subst_value(int v, const Rational& val) const {
        MultiPoly r;
        for (auto& [m, c] : terms) {
            Mono mm = m;
            mm[v] = 0;
            r.add_term(mm, c * rational_pow(val, m[v]));
        }
        return r;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            const auto& [m, c] = *it;
            Rational ac = c < 0 ? Rational(-c) : c;
            if (first) {
                if (c < 0) out += "-";
            } else {
                out += c < 0 ? " - " : " + ";
            }
            first = false;
            bool any_var = false;
            for (int v = 0; v < NVARS; ++v)
                if (m[v]) any_var = true;
            std::string mstr;
            for (int v = 0; v < NVARS; ++v) {
                if (!m[v]) continue;
                if (!mstr.empty()) mstr += "*";
                mstr += var_name(v);
                if (m[v] != 1) mstr += "^" + std::to_string(m[v]);
            }
            if (!any_var) {
                out += ac.str();
            } else {
                if (ac != 1) out += ac.str() + "*";
                out += mstr;
            }
        }
        return out;
    }
};

} // namespace qwz
