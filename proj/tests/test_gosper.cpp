#include "qwz/gosper.hpp"
#include "qwz/parse.hpp"
#include "qwz/term_eval.hpp"

#include <doctest.h>

using namespace qwz;

namespace {

RatFunc rf(const char* s) { return parse_poly(s); }

// the defining decomposition, rechecked from scratch
void check_normal_form(const RatFunc& r, const GosperNormalForm& nf) {
    RatFunc recon = (nf.A / nf.B) * nf.C.subst_q_dilate(VX, 1) / nf.C;
    CHECK(rat_is_zero(recon - r));
    // gcd(A(x), B(q^j x)) constant over the dispersion bound
    for (long j = 0; j <= 8; ++j) {
        long cleared = 0;
        MultiPoly bj = nf.B.num.subst_q_dilate(VX, j, cleared);
        CHECK(mpoly_gcd(nf.A.num, bj).degree(VX) <= 0);
    }
}

void check_certificate(const RatFunc& r, const RatFunc& y) {
    CHECK(rat_is_zero(r * y.subst_q_dilate(VX, 1) - y - RatFunc(Rational(1))));
}

} // namespace

TEST_CASE("normal form: dispersion-free input is untouched") {
    RatFunc r = rf("z - a*z*q^k") / rf("1 - q^(k+1)");
    GosperNormalForm nf = gosper_normal_form(r, VX);
    check_normal_form(r, nf);
    CHECK(rat_is_zero(nf.C - RatFunc(Rational(1))));
    CHECK(rat_is_zero(nf.A / nf.B - r));
}

TEST_CASE("normal form: pure shift quotient moves entirely into C") {
    // (1-qx)/(1-x) = C(qx)/C(x) with C = 1-x
    RatFunc r = rf("1 - q^(k+1)") / rf("1 - q^k");
    GosperNormalForm nf = gosper_normal_form(r, VX);
    check_normal_form(r, nf);
    CHECK(rat_is_zero(nf.A / nf.B - RatFunc(Rational(1))));
    CHECK(nf.C.num.degree(VX) == 1);
}

TEST_CASE("normal form: trivial and mixed inputs") {
    GosperNormalForm triv = gosper_normal_form(RatFunc(Rational(1)), VX);
    CHECK(rat_is_zero(triv.A - RatFunc(Rational(1))));
    CHECK(rat_is_zero(triv.B - RatFunc(Rational(1))));
    CHECK(rat_is_zero(triv.C - RatFunc(Rational(1))));

    // dispersion 2 plus an untouched parameter factor
    RatFunc r = rf("1 - q^(k+2)") / rf("1 - a*q^k") * rf("1 - a*q^k") / rf("1 - q^k");
    check_normal_form(r, gosper_normal_form(r, VX));
    RatFunc r2 = (rf("1 - q^(k+2)") * rf("1 - b*q^k")) / (rf("1 - q^k") * rf("1 - a*q^k"));
    check_normal_form(r2, gosper_normal_form(r2, VX));
}

TEST_CASE("certificate for the constant ratio q") {
    auto y = qgosper_solve(RatFunc::variable(VQ), VX);
    REQUIRE(y.has_value());
    CHECK(*y == RatFunc(Rational(1)) / (RatFunc::variable(VQ) - RatFunc(Rational(1))));
    check_certificate(RatFunc::variable(VQ), *y);
}

TEST_CASE("ratio 1 has no rational certificate") {
    CHECK_FALSE(qgosper_solve(RatFunc(Rational(1)), VX).has_value());
}

TEST_CASE("constant ratio 2 is summable with certificate 1") {
    auto y = qgosper_solve(RatFunc(Rational(2)), VX);
    REQUIRE(y.has_value());
    CHECK(*y == RatFunc(Rational(1)));
}

TEST_CASE("telescoping quotient with dispersion: r = (1-qx)/(1-x)") {
    RatFunc r = rf("1 - q^(k+1)") / rf("1 - q^k");
    // y = (1-x)/... : solve and verify only through the defining identity
    auto y = qgosper_solve(r, VX);
    // sum of (1-q^{k+1})/(1-q) style telescoping exists?  The certificate
    // equation y(qx)(1-qx)/(1-x) - y(x) = 1 is solved by rational y exactly
    // when the ansatz admits it; whatever comes back must pass the check.
    if (y) check_certificate(r, *y);
}

TEST_CASE("certificates found on structured ratios pass the exact check") {
    const char* nums[] = {"q", "z", "1 - a*q^k", "q - q^(k+1)"};
    const char* dens[] = {"1", "1 - q^(k+1)", "1 - b*q^k"};
    for (const char* nn : nums) {
        for (const char* dd : dens) {
            RatFunc r = rf(nn) / rf(dd);
            auto y = qgosper_solve(r, VX);
            CAPTURE(nn);
            CAPTURE(dd);
            if (y) check_certificate(r, *y);
        }
    }
}

TEST_CASE("antidifference of the geometric term") {
    auto policy = TruncationPolicy{};
    set_working_precision(policy.precision_digits);
    QHyperTerm t = parse_term("pow(q,k)");
    auto z = antidifference(t);
    REQUIRE(z.has_value());
    CHECK(z->pre == RatFunc(Rational(1)) / (RatFunc::variable(VQ) - RatFunc(Rational(1))));

    Assignment asg;
    asg.q = Rational(1, 2);
    // window reconstruction: sum_{k=K1}^{K2} t = Z(K2+1) - Z(K1)
    for (auto [K1, K2] : {std::pair<long, long>{0, 5}, {2, 9}, {-3, 4}}) {
        Real acc{0};
        for (long k = K1; k <= K2; ++k) acc += eval_term(t, asg, k, 0, policy);
        Real recon = eval_term(*z, asg, K2 + 1, 0, policy) - eval_term(*z, asg, K1, 0, policy);
        CHECK(abs_val(acc - recon) < Real("1e-30"));
    }
}

TEST_CASE("antidifference in the other shift direction") {
    auto policy = TruncationPolicy{};
    set_working_precision(policy.precision_digits);
    // t(n) = q^{2n}: ratio q^2, certificate 1/(q^2-1)
    QHyperTerm t = parse_term("pow(q^2,n)");
    auto z = antidifference(t, /*k_shift=*/false);
    REQUIRE(z.has_value());
    Assignment asg;
    asg.q = Rational(1, 3);
    for (long n : {0L, 1L, 4L}) {
        Real lhs = eval_term(*z, asg, 0, n + 1, policy) - eval_term(*z, asg, 0, n, policy);
        CHECK(abs_val(lhs - eval_term(t, asg, 0, n, policy)) < Real("1e-30"));
    }
}

TEST_CASE("window reconstruction for a parameterized summable term") {
    auto policy = TruncationPolicy{};
    set_working_precision(policy.precision_digits);
    // t(k) = a^k q^C(k,2) (-1)^k is the finite-product telescoper for
    // (a;q)_inf partial products: (a;q)_{k+1} - (a;q)_k = -a q^k (a;q)_k.
    // Use the simpler certified case t(k) = q^k here but with a parameter
    // scale to exercise the field arithmetic.
    QHyperTerm t = parse_term("pow(a*q,k)");
    auto z = antidifference(t);
    REQUIRE(z.has_value());
    Assignment asg;
    asg.q = Rational(1, 2);
    asg.set(VA, Rational(3, 5));
    Real acc{0};
    for (long k = 0; k <= 7; ++k) acc += eval_term(t, asg, k, 0, policy);
    Real recon = eval_term(*z, asg, 8, 0, policy) - eval_term(*z, asg, 0, 0, policy);
    CHECK(abs_val(acc - recon) < Real("1e-30"));
}
