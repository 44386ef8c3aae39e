#pragma once

#include "qwz/ratfunc.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

namespace qwz {

struct CollapseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// coeff * prod params^pexp * q^qexp  (no k or n dependence)
struct ParamMono {
    Rational coeff{1};
    std::array<int, NPARAMS> pexp{};
    long qexp = 0;

    bool is_one() const {
        if (coeff != 1 || qexp != 0) return false;
        for (int e : pexp)
            if (e) return false;
        return true;
    }
    bool is_zero() const { return coeff == 0; }

    ParamMono& operator*=(const ParamMono& o) {
        coeff *= o.coeff;
        for (int i = 0; i < NPARAMS; ++i) pexp[i] += o.pexp[i];
        qexp += o.qexp;
        if (coeff == 0) *this = ParamMono{0, {}, 0};
        return *this;
    }
    ParamMono inverse() const {
        if (coeff == 0) throw PoleError("inverse of zero monomial");
        ParamMono m;
        m.coeff = 1 / coeff;
        for (int i = 0; i < NPARAMS; ++i) m.pexp[i] = -pexp[i];
        m.qexp = -qexp;
        return m;
    }
    ParamMono pow(long e) const {
        ParamMono m;
        if (coeff == 0) {
            if (e < 0) throw PoleError("negative power of zero monomial");
            return e == 0 ? ParamMono{} : ParamMono{0, {}, 0};
        }
        m.coeff = rational_pow(coeff, e);
        for (int i = 0; i < NPARAMS; ++i) m.pexp[i] = static_cast<int>(pexp[i] * e);
        m.qexp = qexp * e;
        return m;
    }
    // as a rational function of the 9 symbolic variables
    RatFunc as_ratfunc() const {
        std::array<int, NVARS> e{};
        for (int i = 0; i < NPARAMS; ++i) e[VA + i] = pexp[i];
        e[VQ] = static_cast<int>(qexp);
        return RatFunc(coeff == 0 ? Rational(0) : coeff).mul_monomial(1, coeff == 0 ? std::array<int, NVARS>{} : e);
    }
    friend bool operator==(const ParamMono&, const ParamMono&) = default;
};

// One q-shifted-factorial factor (arg; q)_len ^ expo with
// arg = coeff * prod params^pexp * q^{qpow(k,n)}.
struct PochFactor {
    Rational coeff{1};
    std::array<int, NPARAMS> pexp{};
    LinForm qpow{};
    bool infinite = false;
    LinForm len{};
    int expo = 1;

    auto key() const { return std::tie(infinite, pexp, qpow, len, coeff); }
    friend bool operator==(const PochFactor&, const PochFactor&) = default;
};

// Structured q-hypergeometric term in (k, n).  Closed under the shifts
// k -> k+1 and n -> n+1; both shift quotients are rational in x = q^k and
// y = q^n, which is what the whole pipeline runs on.
struct QHyperTerm {
    RatFunc pre{Rational(1)};   // rational prefactor in x, y, params, q
    ParamMono geo_k, geo_n;     // bases raised to the powers k and n
    long cross = 0;             // exponent of q^{n k}
    long qbin_k = 0;            // multiple of C(k,2) in the q-exponent
    int sign_k = 0;             // 1 if the term carries (-1)^k
    std::vector<PochFactor> factors;

    void canonicalize() {
        sign_k &= 1;
        std::vector<PochFactor> merged;
        for (auto& f : factors) {
            if (f.coeff == 0) continue;                       // (0;q)_len = 1
            if (!f.infinite && f.len == LinForm{}) continue;  // (a;q)_0 = 1
            bool found = false;
            for (auto& g : merged)
                if (g.key() == f.key()) {
                    g.expo += f.expo;
                    found = true;
                    break;
                }
            if (!found) merged.push_back(f);
        }
        std::erase_if(merged, [](const PochFactor& f) { return f.expo == 0; });
        std::sort(merged.begin(), merged.end(),
                  [](const PochFactor& a, const PochFactor& b) { return a.key() < b.key(); });
        factors = std::move(merged);
    }

    QHyperTerm operator*(const QHyperTerm& o) const {
        QHyperTerm r = *this;
        r.pre = pre * o.pre;
        r.geo_k *= o.geo_k;
        r.geo_n *= o.geo_n;
        r.cross += o.cross;
        r.qbin_k += o.qbin_k;
        r.sign_k = (sign_k + o.sign_k) & 1;
        r.factors.insert(r.factors.end(), o.factors.begin(), o.factors.end());
        r.canonicalize();
        return r;
    }

    QHyperTerm inverted() const {
        QHyperTerm r = *this;
        r.pre = pre.inverse();
        r.geo_k = geo_k.inverse();
        r.geo_n = geo_n.inverse();
        r.cross = -cross;
        r.qbin_k = -qbin_k;
        for (auto& f : r.factors) f.expo = -f.expo;
        r.canonicalize();
        return r;
    }

    QHyperTerm scaled(const RatFunc& s) const {
        QHyperTerm r = *this;
        r.pre = pre * s;
        return r;
    }

    bool depends_on_n() const {
        if (!geo_n.is_one() || cross != 0) return true;
        if (pre.num.depends_on(VY) || pre.den.depends_on(VY)) return true;
        for (auto& f : factors)
            if (f.qpow.n != 0 || (!f.infinite && f.len.n != 0)) return true;
        return false;
    }

    friend bool operator==(const QHyperTerm&, const QHyperTerm&) = default;
};

// Substitution target for a letter parameter:
// p -> m * q^{qk * k + qn * n}  where m is a ParamMono (possibly zero).
struct ParamSubst {
    ParamMono m;
    long qk = 0, qn = 0;
};

inline QHyperTerm subst_param(const QHyperTerm& t, Var p, const ParamSubst& s) {
    if (!is_param(p)) throw std::invalid_argument("can only substitute letter parameters");
    int pi = p - VA;
    QHyperTerm r = t;

    for (auto& f : r.factors) {
        int e = f.pexp[pi];
        if (e == 0) continue;
        if (s.m.coeff == 0) {
            if (e < 0) throw PoleError("substitution makes factor argument infinite");
            f.coeff = 0; // argument vanishes: (0;q)_len = 1, canonicalize drops it
            continue;
        }
        ParamMono rep = s.m.pow(e);
        f.pexp[pi] = 0;
        f.coeff *= rep.coeff;
        for (int i = 0; i < NPARAMS; ++i) f.pexp[i] += rep.pexp[i];
        f.qpow = f.qpow + LinForm{e * s.qk, e * s.qn, rep.qexp};
    }

    auto subst_geo = [&](ParamMono& g, bool is_k_base) {
        int e = g.pexp[pi];
        if (e == 0) return;
        if (s.m.coeff == 0) {
            if (e < 0) throw PoleError("substitution makes geometric base infinite");
            g = ParamMono{0, {}, 0};
            return;
        }
        ParamMono rep = s.m.pow(e);
        g.pexp[pi] = 0;
        g.coeff *= rep.coeff;
        for (int i = 0; i < NPARAMS; ++i) g.pexp[i] += rep.pexp[i];
        g.qexp += rep.qexp;
        long kq = e * s.qk, nq = e * s.qn;
        if (is_k_base) {
            if (kq != 0) throw CollapseError("substitution would create q^(k^2) in a geometric base");
            r.cross += nq;
        } else {
            if (nq != 0) throw CollapseError("substitution would create q^(n^2) in a geometric base");
            r.cross += kq;
        }
    };
    subst_geo(r.geo_k, true);
    subst_geo(r.geo_n, false);

    std::array<int, NVARS> sexp{};
    for (int i = 0; i < NPARAMS; ++i) sexp[VA + i] = s.m.pexp[i];
    sexp[VQ] = static_cast<int>(s.m.qexp);
    sexp[VX] = static_cast<int>(s.qk);
    sexp[VY] = static_cast<int>(s.qn);
    r.pre = r.pre.subst_monomial(p, s.m.coeff, sexp);

    r.canonicalize();
    return r;
}

// T(n, k+1) as a structured term.
inline QHyperTerm shift_k(const QHyperTerm& t) {
    QHyperTerm r = t;
    for (auto& f : r.factors) {
        f.qpow.c += f.qpow.k;
        if (!f.infinite) f.len.c += f.len.k;
    }
    r.pre = r.pre.subst_q_dilate(VX, 1);
    if (!t.geo_k.is_one()) {
        if (t.geo_k.is_zero()) throw CollapseError("k-shift of a term with zero geometric base");
        r.pre = r.pre * t.geo_k.as_ratfunc();
    }
    if (t.cross) r.pre = r.pre.mul_monomial(1, [&] {
        std::array<int, NVARS> e{};
        e[VY] = static_cast<int>(t.cross);
        return e;
    }());
    if (t.qbin_k) r.pre = r.pre.mul_monomial(1, [&] {
        std::array<int, NVARS> e{};
        e[VX] = static_cast<int>(t.qbin_k);
        return e;
    }());
    if (t.sign_k) r.pre = r.pre * RatFunc(Rational(-1));
    return r;
}

// T(n+1, k) as a structured term.
inline QHyperTerm shift_n(const QHyperTerm& t) {
    QHyperTerm r = t;
    for (auto& f : r.factors) {
        f.qpow.c += f.qpow.n;
        if (!f.infinite) f.len.c += f.len.n;
    }
    r.pre = r.pre.subst_q_dilate(VY, 1);
    if (!t.geo_n.is_one()) {
        if (t.geo_n.is_zero()) throw CollapseError("n-shift of a term with zero geometric base");
        r.pre = r.pre * t.geo_n.as_ratfunc();
    }
    if (t.cross) r.pre = r.pre.mul_monomial(1, [&] {
        std::array<int, NVARS> e{};
        e[VX] = static_cast<int>(t.cross);
        return e;
    }());
    return r;
}

// Collapse a term that is actually a rational function of x and y (all
// q-shifted factorials cancel in matched families) down to that RatFunc.
// This is the engine behind shift ratios and term quotients: every finite
// factor (A;q)_L splits as (A;q)_inf / (A q^L;q)_inf, and within a family of
// arguments differing by integer powers of q the infinite parts must cancel
// exactly, leaving a finite product of (1 - A q^i) factors.
inline RatFunc collapse(const QHyperTerm& t) {
    RatFunc out = t.pre;

    auto fold_geo = [&](const ParamMono& g, Var xy) {
        if (g.is_one()) return;
        if (g.is_zero()) throw CollapseError("zero geometric base is not rational in q^k/q^n");
        ParamMono chk = g;
        chk.qexp = 0;
        if (!chk.is_one())
            throw CollapseError("geometric base with parameter content does not collapse");
        std::array<int, NVARS> e{};
        e[xy] = static_cast<int>(g.qexp);
        out = out.mul_monomial(1, e);
    };
    fold_geo(t.geo_k, VX);
    fold_geo(t.geo_n, VY);
    if (t.cross != 0) throw CollapseError("q^(nk) cross factor does not collapse");
    if (t.qbin_k != 0) throw CollapseError("q^C(k,2) factor does not collapse");
    if (t.sign_k != 0) throw CollapseError("(-1)^k factor does not collapse");

    // family key: (coeff, param exponents, x-exponent, y-exponent)
    using Key = std::tuple<Rational, std::array<int, NPARAMS>, long, long>;
    std::map<Key, std::vector<std::pair<long, int>>> fam; // (q-const, exponent)

    auto add_sym = [&](const PochFactor& f, LinForm arg_shift, int e) {
        if (e == 0) return;
        fam[Key{f.coeff, f.pexp, f.qpow.k + arg_shift.k, f.qpow.n + arg_shift.n}].emplace_back(
            f.qpow.c + arg_shift.c, e);
    };
    for (auto& f : t.factors) {
        if (f.infinite) {
            add_sym(f, LinForm{}, f.expo);
        } else {
            add_sym(f, LinForm{}, f.expo);
            add_sym(f, f.len, -f.expo);
        }
    }

    for (auto& [key, members] : fam) {
        long net = 0;
        for (auto& [c, e] : members) net += e;
        if (net != 0)
            throw CollapseError("unmatched infinite q-shifted factorial family");
        long c0 = members.front().first;
        for (auto& [c, e] : members) c0 = std::min(c0, c);
        const auto& [coeff, pexp, xe, ye] = key;
        std::array<int, NVARS> base{};
        for (int i = 0; i < NPARAMS; ++i) base[VA + i] = pexp[i];
        base[VX] = static_cast<int>(xe);
        base[VY] = static_cast<int>(ye);
        for (auto& [c, e] : members) {
            for (long d = 0; d < c - c0; ++d) {
                std::array<int, NVARS> m = base;
                // careful: q exponent may be negative
                long qe = c0 + d;
                m[VQ] = static_cast<int>(qe);
                RatFunc fac = RatFunc(Rational(1)) - RatFunc(Rational(coeff)).mul_monomial(1, m);
                if (fac.is_zero()) throw CollapseError("degenerate factor 1 - q^j in collapse");
                for (int rep = 0; rep < std::abs(e); ++rep)
                    out = (e < 0) ? out * fac : out / fac;
            }
        }
    }
    return out;
}

// T(n,k+1)/T(n,k) as a rational function of x (and y, parameters, q).
inline RatFunc shift_ratio_k(const QHyperTerm& t) { return collapse(shift_k(t) * t.inverted()); }

// T(n+1,k)/T(n,k).
inline RatFunc shift_ratio_n(const QHyperTerm& t) { return collapse(shift_n(t) * t.inverted()); }

// t1/t2 when the quotient is rational in x and y.
inline RatFunc term_quotient(const QHyperTerm& t1, const QHyperTerm& t2) {
    return collapse(t1 * t2.inverted());
}

} // namespace qwz
