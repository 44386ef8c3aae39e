#pragma once

#include "qwz/poly.hpp"

#include <optional>
#include <vector>

namespace qwz {

// Exact multivariate division: returns A/B when B divides A, nullopt otherwise.
inline std::optional<MultiPoly> divide_exact(const MultiPoly& a, const MultiPoly& b) {
    if (b.is_zero()) return std::nullopt;
    MultiPoly rem = a, quot;
    while (!rem.is_zero()) {
        const auto& [mr, cr] = *rem.terms.rbegin();
        const auto& [mb, cb] = *b.terms.rbegin();
        Mono m;
        for (int v = 0; v < NVARS; ++v) {
            m[v] = mr[v] - mb[v];
            if (m[v] < 0) return std::nullopt;
        }
        MultiPoly t = MultiPoly::monomial(cr / cb, m);
        quot += t;
        rem -= t * b;
    }
    return quot;
}

// Pseudo-remainder of a by b, both viewed univariate in v.
inline MultiPoly pseudo_rem(const MultiPoly& a, const MultiPoly& b, int v) {
    int db = b.degree(v);
    MultiPoly lcb = b.coeff_of(v, db);
    MultiPoly r = a;
    while (true) {
        int dr = r.degree(v);
        if (dr < db || r.is_zero()) return r;
        MultiPoly lcr = r.coeff_of(v, dr);
        r = lcb * r - lcr * MultiPoly::variable(v, dr - db) * b;
    }
}

MultiPoly mpoly_gcd(const MultiPoly& a, const MultiPoly& b);

// Normalize so the lex-leading coefficient is 1 (unit normalization over Q).
inline MultiPoly unit_normalize(const MultiPoly& p) {
    if (p.is_zero()) return p;
    return p * (Rational(1) / p.lead_coeff_global());
}

// GCD of the coefficients of p viewed univariate in v.
inline MultiPoly content_wrt(const MultiPoly& p, int v) {
    MultiPoly g;
    for (int d = 0; d <= p.degree(v); ++d) {
        MultiPoly c = p.coeff_of(v, d);
        if (c.is_zero()) continue;
        g = g.is_zero() ? unit_normalize(c) : mpoly_gcd(g, c);
        if (g.is_constant()) break;
    }
    return g.is_zero() ? MultiPoly(1) : g;
}

namespace detail {

// p specialized at `point` in every variable except v, as a univariate
// coefficient map exponent-of-v -> rational.
inline std::map<int, Rational> specialize_uni(const MultiPoly& p, int v,
                                              const std::array<Rational, NVARS>& point) {
    std::map<int, Rational> r;
    for (const auto& [m, c] : p.terms) {
        Rational t = c;
        for (int u = 0; u < NVARS; ++u)
            if (u != v && m[u]) t *= rational_pow(point[u], m[u]);
        auto [it, fresh] = r.emplace(m[v], t);
        if (!fresh) {
            it->second += t;
            if (it->second == 0) r.erase(it);
        }
    }
    return r;
}

inline int uni_gcd_degree(std::map<int, Rational> f, std::map<int, Rational> g) {
    auto deg = [](const std::map<int, Rational>& p) { return p.empty() ? -1 : p.rbegin()->first; };
    while (!g.empty()) {
        // f mod g
        while (deg(f) >= deg(g)) {
            int d = deg(f) - deg(g);
            Rational c = f.rbegin()->second / g.rbegin()->second;
            for (const auto& [e, gc] : g) {
                auto [it, fresh] = f.emplace(e + d, -c * gc);
                if (!fresh) {
                    it->second -= c * gc;
                    if (it->second == 0) f.erase(it);
                }
            }
        }
        std::swap(f, g);
    }
    return deg(f);
}

// Sound test for deg_v(gcd(a,b)) == 0: specialize every other variable at a
// point where lc_v(a) stays nonzero — then deg_v(gcd) survives specialization,
// so a constant univariate gcd forces deg_v(gcd) = 0.
inline bool gcd_free_of(const MultiPoly& a, const MultiPoly& b, int v) {
    MultiPoly lc = a.coeff_of(v, a.degree(v));
    for (long trial = 0; trial < 6; ++trial) {
        std::array<Rational, NVARS> point;
        for (int u = 0; u < NVARS; ++u)
            point[u] = Rational(2 * (v * 37 + u * 11 + trial * trial * 5 + 3) + 1,
                                2 * (u * 7 + trial * 13 + 1));
        if (lc.eval(point) == 0) continue;
        return uni_gcd_degree(specialize_uni(a, v, point), specialize_uni(b, v, point)) == 0;
    }
    return false;
}

inline Integer balanced_mod(const Integer& x, const Integer& m) {
    Integer r = x % m;
    if (r * 2 > m) r -= m;
    else if (r * 2 <= -m) r += m;
    return r;
}

inline MultiPoly clear_denominators(const MultiPoly& p) {
    Integer l = 1;
    for (const auto& [m, c] : p.terms) l = lcm(l, denominator(c));
    return p * Rational(l);
}

inline Integer max_coeff_mag(const MultiPoly& p) {
    Integer mag = 0;
    for (const auto& [m, c] : p.terms) mag = std::max(mag, Integer(abs(numerator(c))));
    return mag;
}

// Integer-evaluation heuristic gcd (GCDHEU): evaluate one variable at a large
// integer, recurse, and lift the result back by balanced base-xi digits.
// Inputs carry integer coefficients; every level certifies its candidate by
// trial division, so a returned polynomial is a genuine common divisor
// (maximality is checked by the caller).
inline std::optional<MultiPoly> gcdheu(const MultiPoly& a, const MultiPoly& b,
                                       std::vector<int> vars, int depth = 0) {
    while (!vars.empty() && a.degree(vars.back()) <= 0 && b.degree(vars.back()) <= 0)
        vars.pop_back();
    if (vars.empty()) {
        Integer ga = a.is_zero() ? Integer(0) : numerator(a.terms.begin()->second);
        Integer gb = b.is_zero() ? Integer(0) : numerator(b.terms.begin()->second);
        return MultiPoly(Rational(gcd(ga, gb)));
    }
    if (depth > 10) return std::nullopt;
    int x = vars.back();
    std::vector<int> rest(vars.begin(), vars.end() - 1);
    int bound = std::max(a.degree(x), b.degree(x));
    Integer xi = 2 * std::min(max_coeff_mag(a), max_coeff_mag(b)) + 29;
    for (int attempt = 0; attempt < 6; ++attempt, xi = xi * 73794 / 27011) {
        MultiPoly ax = a.subst_value(x, Rational(xi));
        MultiPoly bx = b.subst_value(x, Rational(xi));
        if (ax.is_zero() || bx.is_zero()) continue;
        auto gx = gcdheu(ax, bx, rest, depth + 1);
        if (!gx || gx->is_zero()) continue;
        MultiPoly G, cur = *gx;
        bool ok = true;
        for (int e = 0; !cur.is_zero(); ++e) {
            if (e > bound) {
                ok = false;
                break;
            }
            MultiPoly digit; // x-free: gx came from x-evaluated inputs
            for (const auto& [m, c] : cur.terms) {
                Integer d = balanced_mod(numerator(c), xi);
                if (d == 0) continue;
                digit.add_term(m, Rational(d));
                Mono mm = m;
                mm[x] = e;
                G.add_term(mm, Rational(d));
            }
            cur = (cur - digit) * Rational(Integer(1), xi);
        }
        if (!ok || G.is_zero()) continue;
        Integer cont = 0;
        for (const auto& [m, c] : G.terms) cont = gcd(cont, numerator(c));
        if (cont > 1) G = G * Rational(Integer(1), cont);
        if (divide_exact(a, G) && divide_exact(b, G)) return G;
    }
    return std::nullopt;
}

} // namespace detail

// Multivariate GCD over Q, unit-normalized.  Coprime inputs (the common case
// in rational-function normalization) exit early via a univariate degree
// probe at random points; containment exits via trial division; the heavy
// lifting uses the certified integer-evaluation heuristic, with primitive
// PRS as the last resort.
inline MultiPoly mpoly_gcd(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero()) return unit_normalize(b);
    if (b.is_zero()) return unit_normalize(a);
    if (a.is_constant() || b.is_constant()) return MultiPoly(1);
    if (divide_exact(b, a)) return unit_normalize(a);
    if (divide_exact(a, b)) return unit_normalize(b);
    int v = -1;
    long best = 0;
    for (int i = 0; i < NVARS; ++i) {
        int da = a.degree(i), db = b.degree(i);
        if (da <= 0 || db <= 0) continue; // gcd cannot involve a one-sided variable
        long score = std::max(da, db);
        if (v < 0 || score < best) {
            v = i;
            best = score;
        }
    }
    if (v < 0) return MultiPoly(1); // every variable of the gcd must be shared
    if (detail::gcd_free_of(a, b, v))
        return mpoly_gcd(content_wrt(a, v), content_wrt(b, v));
    {
        MultiPoly ia = detail::clear_denominators(a), ib = detail::clear_denominators(b);
        std::vector<int> vars;
        for (int i = 0; i < NVARS; ++i)
            if (ia.degree(i) > 0 || ib.degree(i) > 0) vars.push_back(i);
        auto g = detail::gcdheu(ia, ib, vars);
        if (g && !g->is_constant()) {
            // maximality: the cofactors must be coprime; the probe verdict
            // "free" is sound, so success in every shared variable certifies it
            MultiPoly qa = *divide_exact(ia, *g), qb = *divide_exact(ib, *g);
            bool maximal = true;
            for (int i = 0; i < NVARS && maximal; ++i)
                if (qa.degree(i) > 0 && qb.degree(i) > 0 && !detail::gcd_free_of(qa, qb, i))
                    maximal = false;
            if (maximal) return unit_normalize(*g);
        } else if (g) {
            bool coprime = true;
            for (int i = 0; i < NVARS && coprime; ++i)
                if (a.degree(i) > 0 && b.degree(i) > 0 && !detail::gcd_free_of(a, b, i))
                    coprime = false;
            if (coprime) return MultiPoly(1);
        }
    }
    MultiPoly ca = content_wrt(a, v), cb = content_wrt(b, v);
    MultiPoly pa = *divide_exact(a, ca), pb = *divide_exact(b, cb);
    MultiPoly r0 = pa, r1 = pb;
    if (r0.degree(v) < r1.degree(v)) std::swap(r0, r1);
    while (!r1.is_zero()) {
        MultiPoly r = pseudo_rem(r0, r1, v);
        if (!r.is_zero()) r = *divide_exact(r, content_wrt(r, v));
        r0 = r1;
        r1 = r;
    }
    MultiPoly g = mpoly_gcd(ca, cb);
    if (r0.degree(v) > 0) g *= *divide_exact(r0, content_wrt(r0, v));
    return unit_normalize(g);
}

// Resultant of a and b with respect to v, by fraction-free (Bareiss)
// elimination of the Sylvester matrix.  Entries live in the remaining
// variables.
inline MultiPoly resultant(const MultiPoly& a, const MultiPoly& b, int v) {
    int da = a.degree(v), db = b.degree(v);
    if (da < 0 || db < 0) return MultiPoly();
    if (da == 0) return a.pow(static_cast<unsigned>(db));
    if (db == 0) return b.pow(static_cast<unsigned>(da));
    int n = da + db;
    std::vector<std::vector<MultiPoly>> m(n, std::vector<MultiPoly>(n));
    for (int i = 0; i < db; ++i)
        for (int j = 0; j <= da; ++j) m[i][i + j] = a.coeff_of(v, da - j);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j <= db; ++j) m[db + i][i + j] = b.coeff_of(v, db - j);

    MultiPoly prev(1);
    Rational sign(1);
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k].is_zero()) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (!m[i][k].is_zero()) { p = i; break; }
            if (p < 0) return MultiPoly(); // singular: resultant is 0
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                MultiPoly num = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                m[i][j] = num.is_zero() ? num : *divide_exact(num, prev);
            }
            m[i][k] = MultiPoly();
        }
        prev = m[k][k];
    }
    return m[n - 1][n - 1] * sign;
}

} // namespace qwz
