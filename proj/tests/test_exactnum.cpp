#include <doctest.h>

#include "qwz/ratfunc.hpp"

#include <random>

using namespace qwz;

namespace {

MultiPoly var(int v, int e = 1) { return MultiPoly::variable(v, e); }
MultiPoly one_minus(const MultiPoly& p) { return MultiPoly(1) - p; }

std::array<Rational, NVARS> random_point(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(2, 9);
    std::array<Rational, NVARS> pt;
    for (auto& r : pt) {
        int n = num(rng);
        if (n == 0) n = 1;
        r = Rational(n, den(rng));
    }
    return pt;
}

} // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("-3") == Rational(-3));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK_THROWS_AS(parse_rational("x"), ParseError);
}

TEST_CASE("polynomial arithmetic basics") {
    MultiPoly p = var(VX) * var(VX) - MultiPoly(1); // x^2 - 1
    MultiPoly q = var(VX) - MultiPoly(1);
    CHECK(p.degree(VX) == 2);
    CHECK(*divide_exact(p, q) == var(VX) + MultiPoly(1));
    CHECK(!divide_exact(q, p).has_value());

    std::array<Rational, NVARS> pt{};
    pt[VX] = Rational(3);
    CHECK(p.eval(pt) == Rational(8));
}

TEST_CASE("multivariate gcd") {
    MultiPoly ax = var(VA) * var(VX);
    MultiPoly f = one_minus(ax) * one_minus(var(VQ) * var(VX));
    MultiPoly g = one_minus(var(VQ) * var(VX)) * one_minus(var(VB) * var(VX));
    MultiPoly d = mpoly_gcd(f, g);
    CHECK(d.degree(VX) == 1);
    CHECK(divide_exact(f, d).has_value());
    CHECK(divide_exact(g, d).has_value());

    CHECK(mpoly_gcd(f, one_minus(var(VB) * var(VX))).is_constant());
}

TEST_CASE("ratfunc_normalize forced factorization") {
    RatFunc r(var(VX) * var(VX) - MultiPoly(1), var(VX) - MultiPoly(1));
    CHECK(r == RatFunc(var(VX) + MultiPoly(1)));
}

TEST_CASE("ratfunc_normalize identity case p/p") {
    MultiPoly p = one_minus(var(VA) * var(VX)) * var(VQ) + var(VB);
    RatFunc r(p, p);
    CHECK(r == RatFunc(1));
}

TEST_CASE("ratfunc_normalize cancels common factor, random-point oracle") {
    MultiPoly num = one_minus(var(VA) * var(VX)) * one_minus(var(VQ) * var(VX));
    MultiPoly den = one_minus(var(VQ) * var(VX)) * one_minus(var(VB) * var(VX));
    RatFunc r(num, den);
    RatFunc expect(one_minus(var(VA) * var(VX)), one_minus(var(VB) * var(VX)));
    CHECK(r == expect);

    std::mt19937 rng(12345);
    int checked = 0;
    while (checked < 20) {
        auto pt = random_point(rng);
        Rational d1 = den.eval(pt);
        if (d1 == 0) continue;
        ++checked;
        CHECK(*r.eval(pt) == num.eval(pt) / d1);
    }
}

TEST_CASE("normalize is idempotent") {
    RatFunc r(var(VX, 3) * var(VA) - var(VX), var(VX) * var(VB) - var(VX, 2));
    RatFunc r2 = r;
    r2.normalize();
    CHECK(r == r2);
}

TEST_CASE("zero denominator rejected") {
    CHECK_THROWS_AS(RatFunc(MultiPoly(1), MultiPoly()), PoleError);
}

TEST_CASE("rat_is_zero") {
    RatFunc z(var(VX) - var(VX), one_minus(var(VQ) * var(VX)));
    CHECK(rat_is_zero(z));
    RatFunc nz(one_minus(var(VA) * var(VX)), one_minus(var(VB) * var(VX)));
    CHECK(!rat_is_zero(nz));

    // nonzero witnessed at some sampled rational point
    std::mt19937 rng(7);
    bool witnessed = false;
    for (int i = 0; i < 50 && !witnessed; ++i) {
        auto pt = random_point(rng);
        auto v = nz.eval(pt);
        if (v && *v != 0) witnessed = true;
    }
    CHECK(witnessed);
}

TEST_CASE("ratfunc arithmetic and substitution") {
    RatFunc x = RatFunc::variable(VX);
    RatFunc r = (x * x - RatFunc(1)) / (x + RatFunc(1));
    CHECK(r == x - RatFunc(1));

    // x -> q x
    RatFunc s = x.subst_q_dilate(VX, 1);
    CHECK(s == RatFunc::variable(VQ) * x);
    // x -> q^{-1} x keeps exactness
    CHECK(s.subst_q_dilate(VX, -1) == RatFunc::variable(VQ) * x.subst_q_dilate(VX, -1) * RatFunc(Rational(1)));
    CHECK(x.subst_q_dilate(VX, -1).subst_q_dilate(VX, 1) == x);

    // monomial substitution b -> q/a
    std::array<int, NVARS> e{};
    e[VQ] = 1;
    e[VA] = -1;
    RatFunc f(one_minus(var(VA) * var(VB)), MultiPoly(1));
    RatFunc g = f.subst_monomial(VB, 1, e); // 1 - q
    CHECK(g == RatFunc(one_minus(var(VQ))));

    // b -> 0
    std::array<int, NVARS> z{};
    CHECK(f.subst_monomial(VB, 0, z) == RatFunc(1));
}

TEST_CASE("q_resultant_roots") {
    MultiPoly p_one_minus_qx = one_minus(var(VQ) * var(VX));
    MultiPoly p_one_minus_x = one_minus(var(VX));
    MultiPoly p_one_minus_q2x = one_minus(var(VQ, 2) * var(VX));

    CHECK(q_resultant_roots(p_one_minus_qx, p_one_minus_x, VX) == std::vector<long>{1});
    CHECK(q_resultant_roots(p_one_minus_x, p_one_minus_q2x, VX).empty());
    CHECK(q_resultant_roots(p_one_minus_x, p_one_minus_x, VX) == std::vector<long>{0});

    // composite: (1-ax)(1-q^3 a x) vs (1-ax) gives {0, 3}
    MultiPoly pa = one_minus(var(VA) * var(VX)) * one_minus(var(VQ, 3) * var(VA) * var(VX));
    std::vector<long> roots = q_resultant_roots(pa, one_minus(var(VA) * var(VX)), VX);
    CHECK(roots == std::vector<long>{0, 3});

    // cross-check against direct gcd scan for j < 8
    for (long j = 0; j < 8; ++j) {
        long cleared = 0;
        MultiPoly pj = one_minus(var(VA) * var(VX)).subst_q_dilate(VX, j, cleared);
        bool in = std::find(roots.begin(), roots.end(), j) != roots.end();
        CHECK((mpoly_gcd(pa, pj).degree(VX) > 0) == in);
    }
}

TEST_CASE("resultant sanity") {
    // Res_x(x-a, x-b) = b-a up to sign
    MultiPoly r = resultant(var(VX) - var(VA), var(VX) - var(VB), VX);
    bool ok = (r == var(VB) - var(VA)) || (r == var(VA) - var(VB));
    CHECK(ok);
}
