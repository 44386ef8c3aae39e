#include "qwz/parse.hpp"
#include "qwz/term_eval.hpp"

#include <doctest.h>

using namespace qwz;

namespace {

TruncationPolicy test_policy() {
    TruncationPolicy p;
    p.precision_digits = 40;
    p.max_terms = 4000;
    return p;
}

Assignment base_assignment() {
    Assignment a;
    a.q = Rational(1, 2);
    a.set(VA, Rational(1, 3));
    a.set(VB, Rational(2, 5));
    a.set(VC, Rational(3, 7));
    a.set(VZ, Rational(1, 4));
    return a;
}

Real eps_tol() { return Real("1e-30"); }

} // namespace

TEST_CASE("term parsing round-trips through the printer") {
    set_working_precision(40);
    const char* samples[] = {
        "poch(a;q;k) / poch(q;q;k) * pow(z,k)",
        "sgn(k) * qbin2(k) * pow(a,k)",
        "poch(a*q^n;q;k)",
        "1 / poch(a*z*q^n;q;inf)",
        "poch(a;q;inf) * poch(q*a^-1;q;inf) / poch(b;q;2*n) * pow(q,2*k)",
        "poch(-1*a*q^(k+n);q;inf)^2 * pow(a*b^-1*q^2,n) / poch(q;q;n-1)",
        "pow(q^n,k) * poly(1 - a*q^k + 2/3*b) / poly(1 - q^(n+1))",
        "pow(2,k)",
    };
    for (const char* s : samples) {
        QHyperTerm t = parse_term(s);
        std::string printed = print_term(t);
        CAPTURE(s);
        CAPTURE(printed);
        CHECK(parse_term(printed) == t);
    }
}

TEST_CASE("parser rejects malformed input with positions") {
    CHECK_THROWS_AS(parse_term(""), ParseError);
    CHECK_THROWS_AS(parse_term("poch(a;q)"), ParseError);
    CHECK_THROWS_AS(parse_term("poch(w;q;k)"), ParseError);
    CHECK_THROWS_AS(parse_term("pow(a,k) +"), ParseError);
    CHECK_THROWS_AS(parse_term("pow(q^k,k)"), ParseError); // q^(k^2)
    CHECK_THROWS_AS(parse_term("poch(a;q;k"), ParseError);
}

TEST_CASE("k-shift ratio of the geometric-sum style summand") {
    // T = (a;q)_k z^k / (q;q)_k  =>  T(k+1)/T(k) = z(1-ax)/(1-qx), x = q^k
    QHyperTerm t = parse_term("poch(a;q;k) / poch(q;q;k) * pow(z,k)");
    RatFunc r = shift_ratio_k(t);
    RatFunc want = parse_poly("z - a*z*q^k") / parse_poly("1 - q^(k+1)");
    CHECK(r == want);
}

TEST_CASE("k-shift ratio of the partial theta summand") {
    // T = (-1)^k q^C(k,2) a^k  =>  ratio = -a x
    QHyperTerm t = parse_term("sgn(k) * qbin2(k) * pow(a,k)");
    CHECK(shift_ratio_k(t) == parse_poly("-a*q^k"));
}

TEST_CASE("n-shift ratios") {
    // (a q^n; q)_k: ratio over n -> n+1 is (1 - a x y)/(1 - a y)
    QHyperTerm t1 = parse_term("poch(a*q^n;q;k)");
    CHECK(shift_ratio_n(t1) == parse_poly("1 - a*q^(k+n)") / parse_poly("1 - a*q^n"));

    // 1/(a z q^n; q)_inf: ratio is 1 - a z y
    QHyperTerm t2 = parse_term("1 / poch(a*z*q^n;q;inf)");
    CHECK(shift_ratio_n(t2) == parse_poly("1 - a*z*q^n"));

    // a k-only term has n-ratio 1
    QHyperTerm t3 = parse_term("poch(a;q;k) * pow(z,k)");
    CHECK_FALSE(t3.depends_on_n());
    CHECK(shift_ratio_n(t3) == RatFunc(Rational(1)));
}

TEST_CASE("shift ratios agree with direct numeric term quotients") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Assignment asg = base_assignment();
    const char* samples[] = {
        "poch(a;q;k) / poch(q;q;k) * pow(z,k)",
        "sgn(k) * qbin2(k) * pow(a,k)",
        "poch(a*q^n;q;k) * poch(b;q;n) / poch(q;q;k) * pow(z,k)",
        "poch(a*z*q^(n+k);q;inf) / poch(z*q^k;q;inf) * pow(q^n,k)",
    };
    for (const char* s : samples) {
        QHyperTerm t = parse_term(s);
        RatFunc rk = shift_ratio_k(t), rn = shift_ratio_n(t);
        for (long k : {0L, 1L, 3L}) {
            for (long n : {0L, 2L}) {
                auto pt = asg.point(k, n);
                auto vk = rk.eval(pt), vn = rn.eval(pt);
                REQUIRE(vk.has_value());
                REQUIRE(vn.has_value());
                Real tkn = eval_term(t, asg, k, n, policy);
                CAPTURE(s);
                CAPTURE(k);
                CAPTURE(n);
                CHECK(abs_val(eval_term(t, asg, k + 1, n, policy) - to_real(*vk) * tkn) < eps_tol());
                CHECK(abs_val(eval_term(t, asg, k, n + 1, policy) - to_real(*vn) * tkn) < eps_tol());
            }
        }
    }
}

TEST_CASE("term quotient collapses matched infinite factors") {
    QHyperTerm t1 = parse_term("poch(a*q^(n+1);q;inf)");
    QHyperTerm t2 = parse_term("poch(a*q^n;q;inf)");
    CHECK(term_quotient(t1, t2) == RatFunc(Rational(1)) / parse_poly("1 - a*q^n"));

    // unmatched families are not rational
    QHyperTerm t3 = parse_term("poch(b*q^n;q;inf)");
    CHECK_THROWS_AS(term_quotient(t1, t3), CollapseError);
}

TEST_CASE("parameter substitution") {
    QHyperTerm t = parse_term("poch(a;q;k) / poch(q;q;k) * pow(z,k)");
    // a -> b q^n
    ParamSubst s;
    s.m.pexp[VB - VA] = 1;
    s.qn = 1;
    QHyperTerm r = subst_param(t, VA, s);
    CHECK(r == parse_term("poch(b*q^n;q;k) / poch(q;q;k) * pow(z,k)"));

    // a -> 0 drops the factor
    ParamSubst z;
    z.m = ParamMono{0, {}, 0};
    CHECK(subst_param(t, VA, z) == parse_term("1 / poch(q;q;k) * pow(z,k)"));

    // z -> q^n turns the geometric base into a cross term
    ParamSubst zy;
    zy.qn = 1;
    QHyperTerm cy = subst_param(t, VZ, zy);
    CHECK(cy.cross == 1);
    CHECK(cy.geo_k.is_one());
}

TEST_CASE("scalar q-shifted factorial values") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Real half("0.5");

    // (1/2; 1/2)_2 = (1 - 1/2)(1 - 1/4) = 3/8
    CHECK(abs_val(eval_poch<Real>(half, half, 2, policy) - Real("0.375")) < eps_tol());
    // zero length
    CHECK(eval_poch<Real>(half, half, 0, policy) == Real(1));
    // (1/2; 1/2)_{-1} = 1/(1 - 1) -- pole
    CHECK_THROWS_AS(eval_poch<Real>(half, half, -1, policy), PoleError);
    // (1/3; 1/2)_{-1} = 1/(1 - 2/3) = 3
    CHECK(abs_val(eval_poch<Real>(Real(1) / 3, half, -1, policy) - Real(3)) < eps_tol());
}

TEST_CASE("index law (a;q)_{m+n} = (a;q)_m (a q^m;q)_n") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Real a = Real(1) / 3, q = Real(2) / 7;
    for (long m : {-3L, -1L, 0L, 2L, 5L}) {
        for (long n : {-2L, 0L, 1L, 4L}) {
            Real lhs = eval_poch<Real>(a, q, m + n, policy);
            Real rhs = eval_poch<Real>(a, q, m, policy) *
                       eval_poch<Real>(a * boost::multiprecision::pow(q, static_cast<int>(m)), q, n, policy);
            CAPTURE(m);
            CAPTURE(n);
            CHECK(abs_val(lhs - rhs) < eps_tol());
        }
    }
}

TEST_CASE("negative-length law (a;q)_{-n} = (-q/a)^n q^C(n,2) / (q/a;q)_n") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Real a = Real(3) / 5, q = Real(1) / 4;
    for (long n : {1L, 2L, 5L}) {
        Real lhs = eval_poch<Real>(a, q, -n, policy);
        Real rhs = boost::multiprecision::pow(-q / a, static_cast<int>(n)) *
                   boost::multiprecision::pow(q, static_cast<int>(n * (n - 1) / 2)) /
                   eval_poch<Real>(q / a, q, n, policy);
        CHECK(abs_val(lhs - rhs) < eps_tol());
    }
}

TEST_CASE("structured term evaluation") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Assignment asg = base_assignment(); // q=1/2, a=1/3, z=1/4

    QHyperTerm t = parse_term("poch(a;q;k) / poch(q;q;k) * pow(z,k)");
    // k=1: (1-a)/(1-q) * z = (2/3)/(1/2) * 1/4 = 1/3
    CHECK(abs_val(eval_term(t, asg, 1, 0, policy) - Real(1) / 3) < eps_tol());
    CHECK(eval_term(t, asg, 0, 0, policy) == Real(1));

    QHyperTerm pt = parse_term("sgn(k) * qbin2(k) * pow(a,k)");
    // k=2: q^1 a^2 = (1/2)(1/9) = 1/18
    CHECK(abs_val(eval_term(pt, asg, 2, 0, policy) - Real(1) / 18) < eps_tol());
    // k=3: -q^3 a^3 = -1/216
    CHECK(abs_val(eval_term(pt, asg, 3, 0, policy) + Real(1) / 216) < eps_tol());

    // 1/(q;q)_k vanishes identically for k < 0 (reciprocal hits a 1-1 factor)
    QHyperTerm inv = parse_term("pow(z,k) / poch(q;q;k)");
    CHECK(eval_term(inv, asg, -1, 0, policy) == Real(0));
    CHECK(eval_term(inv, asg, -4, 0, policy) == Real(0));

    // a genuine pole is reported, not silently zeroed
    QHyperTerm pole = parse_term("1 / poly(1 - 2*q^k)");
    CHECK_THROWS_AS(eval_term(pole, asg, 1, 0, policy), PoleError);
}

TEST_CASE("adaptive summation: geometric series") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Assignment asg = base_assignment();

    QHyperTerm t = parse_term("pow(q,k)");
    SumResult r = sum_series(t, 0, Support::Unilateral, asg, policy);
    CHECK(r.converged);
    CHECK(abs_val(r.value - Real(2)) < Real("1e-29"));
}

TEST_CASE("summing the classic q-series against its product form") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Assignment asg = base_assignment(); // q=1/2, a=1/3, z=1/4

    // sum_k (a;q)_k z^k / (q;q)_k = (a z;q)_inf / (z;q)_inf
    QHyperTerm t = parse_term("poch(a;q;k) / poch(q;q;k) * pow(z,k)");
    SumResult r = sum_series(t, 0, Support::Unilateral, asg, policy);
    REQUIRE(r.converged);
    Real q = Real(1) / 2;
    Real want = eval_poch<Real>(Real(1) / 12, q, std::nullopt, policy) /
                eval_poch<Real>(Real(1) / 4, q, std::nullopt, policy);
    CHECK(abs_val(r.value - want) < Real("1e-28"));
}

TEST_CASE("bilateral summation covers negative indices") {
    auto policy = test_policy();
    set_working_precision(policy.precision_digits);
    Assignment asg = base_assignment();

    // term vanishing for k < 0: bilateral == unilateral
    QHyperTerm t = parse_term("pow(z,k) / poch(q;q;k)");
    SumResult uni = sum_series(t, 0, Support::Unilateral, asg, policy);
    SumResult bil = sum_series(t, 0, Support::Bilateral, asg, policy);
    REQUIRE(uni.converged);
    REQUIRE(bil.converged);
    CHECK(abs_val(uni.value - bil.value) < Real("1e-29"));

    // theta-like bilateral sum: sum_k q^C(k,2) z^k = (q, -z, -q/z; q)_inf
    QHyperTerm th = parse_term("qbin2(k) * pow(z,k)");
    SumResult r = sum_series(th, 0, Support::Bilateral, asg, policy);
    REQUIRE(r.converged);
    Real q = Real(1) / 2, z = Real(1) / 4;
    Real want = eval_poch<Real>(q, q, std::nullopt, policy) *
                eval_poch<Real>(-z, q, std::nullopt, policy) *
                eval_poch<Real>(-q / z, q, std::nullopt, policy);
    CHECK(abs_val(r.value - want) < Real("1e-27"));
}

TEST_CASE("truncation policy validity invariant") {
    TruncationPolicy p;
    CHECK(p.valid());
    p.epsilon = parse_rational("1e-50");
    p.precision_digits = 40;
    CHECK_FALSE(p.valid()); // epsilon below what the precision can certify
    p.precision_digits = 60;
    CHECK(p.valid());
}
