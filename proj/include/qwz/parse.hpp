#pragma once

#include "qwz/term.hpp"

#include <cctype>
#include <string>

namespace qwz {

namespace detail {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eof() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    bool accept_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) == w) {
            char next = pos_ + w.size() < s_.size() ? s_[pos_ + w.size()] : '\0';
            if (!std::isalnum(static_cast<unsigned char>(next)) && next != '_') {
                pos_ += w.size();
                return true;
            }
        }
        return false;
    }
    long integer() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(s_[start]))))
            fail("expected integer");
        return std::stol(std::string(s_.substr(start, pos_ - start)));
    }
    Rational rational() {
        Rational r(integer());
        // '/' is a fraction bar only when a digit follows; otherwise it is
        // factor division and belongs to the caller
        std::size_t save = pos_;
        if (accept('/')) {
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = save;
                return r;
            }
            long d = integer();
            if (d <= 0) fail("denominator must be positive");
            r /= d;
        }
        return r;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    std::size_t pos() const { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

// integer-linear combination of k, n and 1, with optional parentheses,
// e.g. "2*n", "k", "n-1", "n+2*k"
inline LinForm parse_lin(Cursor& c) {
    LinForm lf;
    bool first = true;
    while (true) {
        int sign = 1;
        if (c.accept('-')) sign = -1;
        else if (c.accept('+')) sign = 1;
        else if (!first) break;
        long coef = 1;
        bool have_coef = false;
        char p = c.peek();
        if (std::isdigit(static_cast<unsigned char>(p))) {
            coef = c.integer();
            have_coef = true;
            if (!c.accept('*')) {
                lf.c += sign * coef;
                first = false;
                char nx = c.peek();
                if (nx == '+' || nx == '-') continue;
                break;
            }
        }
        if (c.accept_word("k")) lf.k += sign * coef;
        else if (c.accept_word("n")) lf.n += sign * coef;
        else if (have_coef) c.fail("expected k or n after coefficient");
        else c.fail("expected linear form");
        first = false;
        char nx = c.peek();
        if (nx != '+' && nx != '-') break;
    }
    return lf;
}

// exponent after '^': a full linear form needs parentheses; without them only
// a single atom (integer, k, or n) is consumed, so "q^k + b" splits correctly
inline LinForm parse_lin_maybe_paren(Cursor& c) {
    if (c.accept('(')) {
        LinForm lf = parse_lin(c);
        c.expect(')');
        return lf;
    }
    char p = c.peek();
    if (std::isdigit(static_cast<unsigned char>(p)) || p == '-') return LinForm{0, 0, c.integer()};
    if (c.accept_word("k")) return LinForm{1, 0, 0};
    if (c.accept_word("n")) return LinForm{0, 1, 0};
    c.fail("expected exponent");
}

struct MonoParse {
    Rational coeff{1};
    std::array<int, NPARAMS> pexp{};
    LinForm qpow{};
};

// mono := [rat] { "*" ident ["^" int] | "*" "q" ["^" lin] }, '*' optional
inline MonoParse parse_mono(Cursor& c, bool stop_at_semicolon) {
    MonoParse m;
    bool any = false;
    bool first = true;
    while (true) {
        c.skip_ws();
        char p = c.peek();
        if (!first && p == '*') {
            c.accept('*');
            p = c.peek();
        } else if (!first) {
            break;
        }
        if (std::isdigit(static_cast<unsigned char>(p)) || p == '-') {
            m.coeff *= c.rational();
            any = true;
        } else if (c.accept_word("q")) {
            LinForm e{0, 0, 1};
            if (c.accept('^')) e = parse_lin_maybe_paren(c);
            m.qpow = m.qpow + e;
            any = true;
        } else if (p >= 'a' && p <= 'z') {
            auto v = var_from_name(std::string_view(&p, 1));
            if (!v || !is_param(*v)) {
                if (first) c.fail("unknown indeterminate");
                break;
            }
            c.accept(p);
            int e = 1;
            if (c.accept('^')) e = static_cast<int>(c.integer());
            m.pexp[*v - VA] += e;
            any = true;
        } else {
            if (first) c.fail("expected monomial");
            break;
        }
        first = false;
        c.skip_ws();
        char nx = c.peek();
        if (nx == ';' && stop_at_semicolon) break;
        if (nx != '*') break;
    }
    if (!any) c.fail("empty monomial");
    (void)any;
    return m;
}

// polyexpr := [+-] polymono { (+|-) polymono }; polymono is a mono
inline RatFunc parse_polyexpr(Cursor& c) {
    RatFunc sum;
    bool first = true;
    while (true) {
        int sign = 1;
        if (c.accept('-')) sign = -1;
        else if (c.accept('+')) sign = 1;
        else if (!first) break;
        MonoParse m = parse_mono(c, false);
        std::array<int, NVARS> e{};
        for (int i = 0; i < NPARAMS; ++i) e[VA + i] = m.pexp[i];
        e[VQ] = static_cast<int>(m.qpow.c);
        e[VX] = static_cast<int>(m.qpow.k);
        e[VY] = static_cast<int>(m.qpow.n);
        sum += RatFunc(Rational(sign) * m.coeff).mul_monomial(1, e);
        first = false;
        char nx = c.peek();
        if (nx != '+' && nx != '-') break;
    }
    return sum;
}

inline void apply_pow(QHyperTerm& t, const MonoParse& base, const LinForm& expo, Cursor& c) {
    // quadratic q-exponents are not representable
    if (base.qpow.k * expo.k != 0 || base.qpow.n * expo.n != 0)
        c.fail("pow() would create a quadratic q-exponent");
    auto mono_pow_into = [&](long e, ParamMono& dst) {
        if (e == 0) return;
        ParamMono b{base.coeff, base.pexp, base.qpow.c};
        dst *= b.pow(e);
    };
    // constant part goes to the prefactor
    if (expo.c != 0) {
        ParamMono b{base.coeff, base.pexp, base.qpow.c};
        t.pre = t.pre * b.pow(expo.c).as_ratfunc();
        std::array<int, NVARS> e{};
        e[VX] = static_cast<int>(base.qpow.k * expo.c);
        e[VY] = static_cast<int>(base.qpow.n * expo.c);
        t.pre = t.pre.mul_monomial(1, e);
    }
    mono_pow_into(expo.k, t.geo_k);
    mono_pow_into(expo.n, t.geo_n);
    // cross terms q^{nk}
    t.cross += base.qpow.k * expo.n + base.qpow.n * expo.k;
}

inline void parse_factor(QHyperTerm& t, Cursor& c, int outer_sign_expo) {
    auto read_expo = [&]() -> long {
        if (c.accept('^')) return c.integer();
        return 1;
    };
    if (c.accept_word("poch")) {
        c.expect('(');
        MonoParse m = parse_mono(c, true);
        c.expect(';');
        if (!c.accept_word("q")) c.fail("poch base must be q");
        c.expect(';');
        PochFactor f;
        f.coeff = m.coeff;
        f.pexp = m.pexp;
        f.qpow = m.qpow;
        if (c.accept_word("inf")) f.infinite = true;
        else f.len = parse_lin(c);
        c.expect(')');
        long e = read_expo() * outer_sign_expo;
        f.expo = static_cast<int>(e);
        t.factors.push_back(f);
    } else if (c.accept_word("pow")) {
        c.expect('(');
        MonoParse m = parse_mono(c, false);
        c.expect(',');
        LinForm lf = parse_lin(c);
        c.expect(')');
        long e = read_expo() * outer_sign_expo;
        apply_pow(t, m, e * lf, c);
    } else if (c.accept_word("qbin2")) {
        c.expect('(');
        if (!c.accept_word("k")) c.fail("qbin2 argument must be k");
        c.expect(')');
        t.qbin_k += read_expo() * outer_sign_expo;
    } else if (c.accept_word("sgn")) {
        c.expect('(');
        if (!c.accept_word("k")) c.fail("sgn argument must be k");
        c.expect(')');
        t.sign_k = static_cast<int>((t.sign_k + read_expo()) & 1);
    } else if (c.accept_word("poly")) {
        c.expect('(');
        RatFunc p = parse_polyexpr(c);
        c.expect(')');
        long e = read_expo() * outer_sign_expo;
        for (long i = 0; i < std::abs(e); ++i)
            t.pre = (e > 0) ? t.pre * p : t.pre / p;
    } else {
        char p = c.peek();
        if (std::isdigit(static_cast<unsigned char>(p)) || p == '-') {
            Rational r = c.rational();
            long e = read_expo() * outer_sign_expo;
            t.pre = t.pre * RatFunc(rational_pow(r, e));
        } else {
            c.fail("expected factor");
        }
    }
}

} // namespace detail

// Parse the term expression language; see the grammar in the README.
inline QHyperTerm parse_term(std::string_view text) {
    detail::Cursor c(text);
    QHyperTerm t;
    int sign_expo = 1;
    detail::parse_factor(t, c, sign_expo);
    while (!c.eof()) {
        if (c.accept('*')) sign_expo = 1;
        else if (c.accept('/')) sign_expo = -1;
        else c.fail("expected '*' or '/'");
        detail::parse_factor(t, c, sign_expo);
    }
    t.canonicalize();
    return t;
}

// Polynomial / rational expression in the poly() sub-language, with q^k and
// q^n standing for x and y.
inline RatFunc parse_poly(std::string_view text) {
    detail::Cursor c(text);
    RatFunc num = detail::parse_polyexpr(c);
    if (c.accept('/')) {
        bool paren = c.accept('(');
        RatFunc den = detail::parse_polyexpr(c);
        if (paren) c.expect(')');
        num = num / den;
    }
    if (!c.eof()) c.fail("trailing input in polynomial expression");
    return num;
}

// ---- printing ----------------------------------------------------------

namespace detail {

inline std::string qpow_str(const LinForm& lf) {
    if (lf == LinForm{}) return "";
    if (lf == LinForm{0, 0, 1}) return "q";
    std::string s = lf.str();
    bool simple = (s == "k" || s == "n") ||
                  (s.find_first_of("+-*") == std::string::npos);
    return simple ? "q^" + s : "q^(" + s + ")";
}

inline std::string mono_str(const Rational& coeff, const std::array<int, NPARAMS>& pexp,
                            const LinForm& qpow) {
    std::string out;
    auto app = [&](const std::string& piece) {
        if (!out.empty()) out += "*";
        out += piece;
    };
    if (coeff != 1) app(coeff.str());
    for (int i = 0; i < NPARAMS; ++i) {
        if (!pexp[i]) continue;
        std::string piece = var_name(VA + i);
        if (pexp[i] != 1) piece += "^" + std::to_string(pexp[i]);
        app(piece);
    }
    std::string qs = qpow_str(qpow);
    if (!qs.empty()) app(qs);
    if (out.empty()) out = "1";
    return out;
}

inline std::string poly_str(const MultiPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational ac = c < 0 ? Rational(-c) : c;
        if (first) out += (c < 0 ? "-" : "");
        else out += (c < 0 ? " - " : " + ");
        first = false;
        std::array<int, NPARAMS> pexp{};
        for (int i = 0; i < NPARAMS; ++i) pexp[i] = m[VA + i];
        LinForm qp{m[VX], m[VY], m[VQ]};
        std::string ms = mono_str(ac, pexp, qp);
        out += ms;
    }
    return out;
}

} // namespace detail

inline std::string print_ratfunc(const RatFunc& r) {
    std::string s = detail::poly_str(r.num);
    if (r.den == MultiPoly(1)) return s;
    return s + " / (" + detail::poly_str(r.den) + ")";
}

// Canonical grammar text; parse_term(print_term(t)) reproduces t exactly.
inline std::string print_term(const QHyperTerm& t) {
    std::vector<std::string> num_parts, den_parts;
    if (t.sign_k) num_parts.push_back("sgn(k)");
    if (t.qbin_k != 0) {
        std::string s = "qbin2(k)";
        if (t.qbin_k != 1) s += "^" + std::to_string(t.qbin_k);
        num_parts.push_back(s);
    }
    auto geo_part = [&](const ParamMono& g, const char* idx) {
        if (g.is_one()) return;
        num_parts.push_back("pow(" + detail::mono_str(g.coeff, g.pexp, LinForm{0, 0, g.qexp}) +
                            "," + idx + ")");
    };
    geo_part(t.geo_k, "k");
    geo_part(t.geo_n, "n");
    if (t.cross != 0)
        num_parts.push_back("pow(" + detail::qpow_str(LinForm{0, t.cross, 0}) + ",k)");
    if (!(t.pre == RatFunc(Rational(1)))) {
        num_parts.push_back("poly(" + detail::poly_str(t.pre.num) + ")");
        if (!(t.pre.den == MultiPoly(1)))
            den_parts.push_back("poly(" + detail::poly_str(t.pre.den) + ")");
    }
    for (const auto& f : t.factors) {
        std::string s = "poch(" + detail::mono_str(f.coeff, f.pexp, f.qpow) + ";q;" +
                        (f.infinite ? "inf" : f.len.str()) + ")";
        int e = std::abs(f.expo);
        if (e != 1) s += "^" + std::to_string(e);
        (f.expo > 0 ? num_parts : den_parts).push_back(s);
    }
    if (num_parts.empty()) num_parts.push_back("1");
    std::string out;
    for (std::size_t i = 0; i < num_parts.size(); ++i) {
        if (i) out += " * ";
        out += num_parts[i];
    }
    for (const auto& d : den_parts) out += " / " + d;
    return out;
}

// Pochhammer-style rendering "(a;q)_k" for reports.
inline std::string print_term_human(const QHyperTerm& t) {
    std::string out;
    auto app = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    if (t.sign_k) app("(-1)^k");
    if (t.qbin_k != 0)
        app("q^(" + std::string(t.qbin_k == 1 ? "" : std::to_string(t.qbin_k) + "*") + "C(k,2))");
    if (!t.geo_k.is_one())
        app("(" + detail::mono_str(t.geo_k.coeff, t.geo_k.pexp, LinForm{0, 0, t.geo_k.qexp}) + ")^k");
    if (!t.geo_n.is_one())
        app("(" + detail::mono_str(t.geo_n.coeff, t.geo_n.pexp, LinForm{0, 0, t.geo_n.qexp}) + ")^n");
    if (t.cross != 0) app("q^(" + std::to_string(t.cross) + "*n*k)");
    if (!(t.pre == RatFunc(Rational(1)))) app("[" + print_ratfunc(t.pre) + "]");
    for (const auto& f : t.factors) {
        std::string s = "(" + detail::mono_str(f.coeff, f.pexp, f.qpow) + ";q)_" +
                        (f.infinite ? "inf" : "{" + f.len.str() + "}");
        if (f.expo != 1) s += "^" + std::to_string(f.expo);
        app(s);
    }
    if (out.empty()) out = "1";
    return out;
}

} // namespace qwz
