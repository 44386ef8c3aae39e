#pragma once

#include "qwz/polyops.hpp"

#include <map>
#include <optional>

namespace qwz {

// Normalized quotient of two MultiPoly.  Canonical form: num and den coprime
// (full multivariate gcd removed) and den's lex-leading coefficient equal to 1,
// so equality of rational functions is structural equality.
class RatFunc {
public:
    MultiPoly num, den;

    RatFunc() : num(), den(1) {}
    explicit RatFunc(const Rational& r) : num(r), den(1) {}
    explicit RatFunc(long v) : num(Rational(v)), den(1) {}
    explicit RatFunc(const MultiPoly& p) : num(p), den(1) {}
    RatFunc(const MultiPoly& n, const MultiPoly& d) : num(n), den(d) { normalize(); }

    static RatFunc variable(int v, int e = 1) { return RatFunc(MultiPoly::variable(v, e)); }

    void normalize() {
        if (den.is_zero()) throw PoleError("rational function with zero denominator");
        if (num.is_zero()) {
            den = MultiPoly(1);
            return;
        }
        MultiPoly g = mpoly_gcd(num, den);
        if (!g.is_constant()) {
            num = *divide_exact(num, g);
            den = *divide_exact(den, g);
        }
        Rational lc = den.lead_coeff_global();
        num *= Rational(1) / lc;
        den *= Rational(1) / lc;
    }

    bool is_zero() const { return num.is_zero(); }
    bool is_one() const { return num == den; }

    // a.num/a.den and b.num/b.den are each coprime, so products and sums can
    // be normalized with small cross-gcds instead of one gcd of the products.
    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) { return add_sub(a, b, 1); }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return add_sub(a, b, -1); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return mul_coprime(a.num, a.den, b.num, b.den);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw PoleError("division by zero rational function");
        return mul_coprime(a.num, a.den, b.den, b.num);
    }
    friend RatFunc operator-(const RatFunc& a) {
        RatFunc r = a;
        r.num = -r.num;
        return r;
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc&, const RatFunc&) = default;

private:
    // Already-coprime numerator/denominator: only fix the leading coefficient.
    static RatFunc make_reduced(MultiPoly n, MultiPoly d) {
        RatFunc r;
        if (d.is_zero()) throw PoleError("rational function with zero denominator");
        if (n.is_zero()) return r;
        Rational lc = d.lead_coeff_global();
        r.num = n * (Rational(1) / lc);
        r.den = d * (Rational(1) / lc);
        return r;
    }

    // (n1/d1)*(n2/d2) with gcd(n1,d1) = gcd(n2,d2) = 1
    static RatFunc mul_coprime(const MultiPoly& n1, const MultiPoly& d1, const MultiPoly& n2,
                               const MultiPoly& d2) {
        if (n1.is_zero() || n2.is_zero()) {
            if (d2.is_zero()) throw PoleError("rational function with zero denominator");
            return RatFunc();
        }
        MultiPoly g1 = mpoly_gcd(n1, d2), g2 = mpoly_gcd(n2, d1);
        return make_reduced(*divide_exact(n1, g1) * *divide_exact(n2, g2),
                            *divide_exact(d1, g2) * *divide_exact(d2, g1));
    }

    static RatFunc add_sub(const RatFunc& a, const RatFunc& b, int sgn) {
        MultiPoly g = mpoly_gcd(a.den, b.den);
        MultiPoly bd = *divide_exact(a.den, g), dd = *divide_exact(b.den, g);
        MultiPoly n = (sgn > 0) ? a.num * dd + b.num * bd : a.num * dd - b.num * bd;
        if (n.is_zero()) return RatFunc();
        // the only possible common factor sits inside g
        MultiPoly h = mpoly_gcd(n, g);
        return make_reduced(*divide_exact(n, h), *divide_exact(g, h) * bd * dd);
    }

public:

    RatFunc inverse() const { return RatFunc(den, num); }

    // Multiply by a signed monomial coeff * prod v^{e[v]}.
    RatFunc mul_monomial(const Rational& coeff, const std::array<int, NVARS>& e) const {
        Mono up{}, dn{};
        for (int v = 0; v < NVARS; ++v)
            (e[v] >= 0 ? up[v] : dn[v]) = std::abs(e[v]);
        return RatFunc(num * MultiPoly::monomial(coeff, up), den * MultiPoly::monomial(1, dn));
    }

    // v -> q^j * v
    RatFunc subst_q_dilate(int v, long j) const {
        long cn = 0, cd = 0;
        MultiPoly n = num.subst_q_dilate(v, j, cn);
        MultiPoly d = den.subst_q_dilate(v, j, cd);
        // value = q^{-cn} n / (q^{-cd} d) = q^{cd-cn} n/d
        long s = cd - cn;
        if (s >= 0)
            return RatFunc(n * MultiPoly::variable(VQ, static_cast<int>(s)), d);
        return RatFunc(n, d * MultiPoly::variable(VQ, static_cast<int>(-s)));
    }

    RatFunc subst_value(int v, const Rational& val) const {
        return RatFunc(num.subst_value(v, val), den.subst_value(v, val));
    }

    // v -> coeff * prod_i v_i^{sexp[i]}  (general monomial substitution;
    // coeff may be 0, sexp entries may be negative).
    RatFunc subst_monomial(int v, const Rational& coeff, const std::array<int, NVARS>& sexp) const {
        auto subst_poly = [&](const MultiPoly& p) -> std::map<std::array<long, NVARS>, Rational> {
            std::map<std::array<long, NVARS>, Rational> out;
            for (auto& [m, cc] : p.terms) {
                long e = m[v];
                Rational c2 = cc;
                if (e != 0) {
                    if (coeff == 0) continue; // whole term vanishes
                    c2 *= rational_pow(coeff, e);
                }
                std::array<long, NVARS> sm{};
                for (int i = 0; i < NVARS; ++i) sm[i] = m[i] + e * sexp[i];
                sm[v] -= e;
                auto it = out.find(sm);
                if (it == out.end()) out.emplace(sm, c2);
                else {
                    it->second += c2;
                    if (it->second == 0) out.erase(it);
                }
            }
            return out;
        };
        auto build = [&](const std::map<std::array<long, NVARS>, Rational>& sm,
                         std::array<long, NVARS>& shift) -> MultiPoly {
            shift.fill(0);
            for (auto& [m, c] : sm)
                for (int i = 0; i < NVARS; ++i) shift[i] = std::min(shift[i], m[i]);
            MultiPoly p;
            for (auto& [m, c] : sm) {
                Mono mm;
                for (int i = 0; i < NVARS; ++i) mm[i] = static_cast<int>(m[i] - shift[i]);
                p.add_term(mm, c);
            }
            return p;
        };
        std::array<long, NVARS> s1{}, s2{};
        MultiPoly n = build(subst_poly(num), s1);
        MultiPoly d = build(subst_poly(den), s2);
        // value = (prod v^{s1} n) / (prod v^{s2} d)
        std::array<int, NVARS> net{};
        for (int i = 0; i < NVARS; ++i) net[i] = static_cast<int>(s1[i] - s2[i]);
        return RatFunc(n, d).mul_monomial(1, net);
    }

    std::optional<Rational> eval(const std::array<Rational, NVARS>& point) const {
        Rational d = den.eval(point);
        if (d == 0) return std::nullopt;
        return num.eval(point) / d;
    }

    // If this is exactly q^j (a pure power of q, possibly negative), return j.
    std::optional<long> as_q_power() const {
        if (!num.is_monomial() || !den.is_monomial()) return std::nullopt;
        const auto& [mn, cn] = *num.terms.begin();
        const auto& [md, cd] = *den.terms.begin();
        if (cn != cd) return std::nullopt;
        for (int v = 0; v < NVARS; ++v)
            if (v != VQ && mn[v] != md[v]) return std::nullopt;
        return static_cast<long>(mn[VQ]) - md[VQ];
    }

    std::string str() const {
        if (den == MultiPoly(1)) return num.str();
        return "(" + num.str() + ")/(" + den.str() + ")";
    }
};

inline bool rat_is_zero(const RatFunc& r) { return r.is_zero(); }

// Dispersion set for the q-Gosper normal form:
// { j >= 0 : gcd(p1(x), p2(q^j x)) has positive degree in x }.
// Candidate j come from powers of q annihilating Res_x(p1(x), p2(t*x)) as a
// polynomial in t; each candidate is confirmed by an explicit gcd check.
inline std::vector<long> q_resultant_roots(const MultiPoly& p1, const MultiPoly& p2, int main) {
    std::vector<long> out;
    int d1 = p1.degree(main), d2 = p2.degree(main);
    if (d1 <= 0 || d2 <= 0) return out; // a common factor would be x-free
    // Shift bound.  A shift j is relevant only if Res_x(p1(x), p2(t x))
    // vanishes under t -> q^j.  Every term of that resultant is a product of
    // d2 coefficients of p1 and d1 coefficients of p2(tx), so its pure
    // q-degree lies in [0, d2 deg_q p1 + d1 deg_q p2]; cancellation at
    // t = q^j needs two terms (same parameter monomial, different t-degree)
    // with q-degrees differing by a multiple of j, which caps j by that range.
    long J = static_cast<long>(d2) * std::max(0, p1.degree(VQ)) +
             static_cast<long>(d1) * std::max(0, p2.degree(VQ));
    for (long j = 0; j <= J; ++j) {
        long cleared = 0;
        MultiPoly p2j = p2.subst_q_dilate(main, j, cleared);
        // cheap sound certificate of coprimality first, exact gcd only for
        // the handful of surviving candidates
        if (detail::gcd_free_of(p1, p2j, main)) continue;
        if (mpoly_gcd(p1, p2j).degree(main) > 0) out.push_back(j);
    }
    return out;
}

} // namespace qwz
