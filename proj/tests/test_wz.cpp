#include "qwz/parse.hpp"
#include "qwz/wz.hpp"

#include <doctest.h>

using namespace qwz;

namespace {

const char* QBIN_SUMMAND = "poch(a;q;k) / poch(q;q;k) * pow(z,k)";
const char* QBIN_CLOSED = "poch(a*z;q;inf) / poch(z;q;inf)";

const char* QGAUSS_SUMMAND =
    "poch(a;q;k) * poch(b;q;k) / poch(q;q;k) / poch(c;q;k) * pow(c*a^-1*b^-1,k)";
const char* QGAUSS_CLOSED =
    "poch(c*a^-1;q;inf) * poch(c*b^-1;q;inf) / poch(c;q;inf) / poch(c*a^-1*b^-1;q;inf)";

WZPair discover(const char* summand, const char* closed, std::vector<Var> shifted) {
    QHyperTerm F = build_F(parse_term(summand), parse_term(closed), SubstitutionRecipe{shifted});
    auto p = wz_discover(F);
    REQUIRE(p.has_value());
    return *p;
}

TruncationPolicy policy40() {
    TruncationPolicy p;
    set_working_precision(p.precision_digits);
    return p;
}

} // namespace

TEST_CASE("build_F applies the n-dilation and divides by the closed form") {
    QHyperTerm F = build_F(parse_term(QBIN_SUMMAND), parse_term(QBIN_CLOSED),
                           SubstitutionRecipe{{VA}});
    QHyperTerm want = parse_term(
        "poch(a*q^n;q;k) * poch(z;q;inf) * pow(z,k) / poch(q;q;k) / poch(a*z*q^n;q;inf)");
    CHECK(F == want);
}

TEST_CASE("difference ratio matches the numeric quotient of differences") {
    auto policy = policy40();
    QHyperTerm F = build_F(parse_term(QBIN_SUMMAND), parse_term(QBIN_CLOSED),
                           SubstitutionRecipe{{VA}});
    auto r = difference_ratio(F);
    REQUIRE(r.has_value());

    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(1, 3));
    asg.set(VZ, Rational(1, 4));
    for (long k : {0L, 1L, 2L, 5L}) {
        for (long n : {0L, 1L, 3L}) {
            auto rv = r->eval(asg.point(k, n));
            REQUIRE(rv.has_value());
            Real d0 = eval_term(F, asg, k, n + 1, policy) - eval_term(F, asg, k, n, policy);
            Real d1 = eval_term(F, asg, k + 1, n + 1, policy) - eval_term(F, asg, k + 1, n, policy);
            CHECK(abs_val(d1 - to_real(*rv) * d0) < Real("1e-30"));
        }
    }
}

TEST_CASE("n-independent term gives the zero-difference signal") {
    QHyperTerm t = parse_term("poch(a;q;k) / poch(q;q;k) * pow(z,k)");
    CHECK_FALSE(difference_ratio(t).has_value());
    auto p = wz_discover(t);
    REQUIRE(p.has_value());
    CHECK(p->cert.is_zero());
}

TEST_CASE("discovered pair for the q-binomial identity") {
    WZPair p = discover(QBIN_SUMMAND, QBIN_CLOSED, {VA});
    CHECK(pair_identity_holds(p));
    // printed certificate: G/F = -(a - a q^k) q^n / (1 - a q^n)
    RatFunc want = parse_poly("-1*a*q^n + a*q^(n+k)") / parse_poly("1 - a*q^n");
    CHECK(p.cert == want);
}

TEST_CASE("discovered pair for the Gauss-sum identity") {
    WZPair p = discover(QGAUSS_SUMMAND, QGAUSS_CLOSED, {VA, VC});
    CHECK(pair_identity_holds(p));
    RatFunc want = parse_poly("-1*a*q^n + a*q^(n+k)") / parse_poly("1 - a*q^n");
    CHECK(p.cert == want);
}

TEST_CASE("conditions all pass for the q-binomial pair at the reference point") {
    auto policy = policy40();
    WZPair p = discover(QBIN_SUMMAND, QBIN_CLOSED, {VA});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(1, 3));
    asg.set(VZ, Rational(1, 4));
    ConditionReport rep = check_conditions(p, Support::Unilateral, asg, policy);
    CHECK(rep.c1 == CondStatus::Pass);
    CHECK(rep.c2 == CondStatus::Pass);
    CHECK(rep.c3 == CondStatus::Pass);
    REQUIRE(!rep.f_limits.empty());
    // f_j = lim_n F(n,j) = (z;q)_inf z^j / (q;q)_j; at j=0 that is (z;q)_inf
    Real want = eval_poch<Real>(to_real(Rational(1, 4)), to_real(Rational(1, 2)), std::nullopt, policy);
    CHECK(abs_val(rep.f_limits.front().second - want) < Real("1e-28"));
}

TEST_CASE("certificate pole points are handled via telescoped evaluation") {
    auto policy = policy40();
    WZPair p = discover(QGAUSS_SUMMAND, QGAUSS_CLOSED, {VA, VC});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(4));
    asg.set(VB, Rational(3));
    asg.set(VC, Rational(1, 2));
    // a q^2 = 1: the certificate denominator 1 - a q^n vanishes at n = 2, but
    // G(2,k) itself is finite (compensating zero in (a q^n;q)_k)
    CHECK_FALSE(p.cert.eval(asg.point(1, 2)).has_value());
    Real g = eval_G(p, asg, 3, 2, Support::Unilateral, policy);
    CHECK(boost::multiprecision::isfinite(g));
    ConditionReport rep = check_conditions(p, Support::Unilateral, asg, policy);
    CHECK(rep.c1 == CondStatus::Pass);
    CHECK(rep.c2 == CondStatus::Pass);
    CHECK(rep.c3 == CondStatus::Pass);
}

TEST_CASE("finite telescoping windows close exactly (within tolerance)") {
    auto policy = policy40();
    WZPair p = discover(QBIN_SUMMAND, QBIN_CLOSED, {VA});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(1, 3));
    asg.set(VZ, Rational(1, 4));
    Real tol = 10 * policy.eps_real();
    for (long n : {0L, 2L, 4L}) {
        for (auto [K1, K2] : {std::pair<long, long>{0, 6}, {2, 11}}) {
            Real lhs{0};
            for (long k = K1; k <= K2; ++k)
                lhs += eval_term(p.F, asg, k, n + 1, policy) - eval_term(p.F, asg, k, n, policy);
            Real rhs = eval_G(p, asg, K2 + 1, n, Support::Unilateral, policy) -
                       eval_G(p, asg, K1, n, Support::Unilateral, policy);
            CHECK(abs_val(lhs - rhs) < tol);
        }
    }
}

TEST_CASE("constant determination: z = 0 collapses the q-binomial sum to exactly 1") {
    auto policy = policy40();
    WZPair p = discover(QBIN_SUMMAND, QBIN_CLOSED, {VA});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(1, 3));
    asg.set(VZ, Rational(1, 4));
    ConstantResult c = determine_constant(p.F, Support::Unilateral, {{VZ, Rational(0)}}, asg,
                                          policy, "degeneration z=0");
    CHECK(c.value == Real(1)); // exact: every k>0 term is exactly zero
    CHECK(c.n_independent);
}

TEST_CASE("companion identity residual at the reference point") {
    auto policy = policy40();
    WZPair p = discover(QBIN_SUMMAND, QBIN_CLOSED, {VA});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(1, 3));
    asg.set(VZ, Rational(1, 4));
    for (long k : {0L, 1L, 3L}) {
        CompanionResult c = companion(p, Support::Unilateral, asg, policy, k);
        CAPTURE(k);
        CHECK(c.pass);
    }
}

TEST_CASE("n-independence of the full sum (the telescoped consequence)") {
    auto policy = policy40();
    WZPair p = discover(QGAUSS_SUMMAND, QGAUSS_CLOSED, {VA, VC});
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(4));
    asg.set(VB, Rational(3));
    asg.set(VC, Rational(1, 2));
    SumResult s0 = sum_series(p.F, 0, Support::Unilateral, asg, policy);
    REQUIRE(s0.converged);
    CHECK(abs_val(s0.value - Real(1)) < 10 * policy.eps_real());
    for (long n : {1L, 2L, 3L}) {
        SumResult sn = sum_series(p.F, n, Support::Unilateral, asg, policy);
        REQUIRE(sn.converged);
        CHECK(abs_val(sn.value - s0.value) < 10 * policy.eps_real());
    }
}
