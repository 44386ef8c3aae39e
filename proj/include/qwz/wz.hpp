#pragma once

#include "qwz/gosper.hpp"
#include "qwz/term_eval.hpp"

#include <map>
#include <sstream>
#include <string>

namespace qwz {

// Parameters that receive the auxiliary dilation p -> p q^n.
struct SubstitutionRecipe {
    std::vector<Var> shifted;
};

// F(n,k) = summand(..., p q^n, ...) / closed_form(..., p q^n, ...); when the
// right side is zero/absent, F is the dilated summand alone.  The infinite
// factors of the dilated closed form ride along symbolically in the term.
inline QHyperTerm build_F(const QHyperTerm& summand, const std::optional<QHyperTerm>& closed_form,
                          const SubstitutionRecipe& recipe) {
    QHyperTerm s = summand;
    std::optional<QHyperTerm> r = closed_form;
    for (Var p : recipe.shifted) {
        ParamSubst sub;
        sub.m.pexp[p - VA] = 1;
        sub.qn = 1;
        s = subst_param(s, p, sub);
        if (r) r = subst_param(*r, p, sub);
    }
    if (r) s = s * r->inverted();
    return s;
}

// Shift quotient of the difference D(n,k) = F(n+1,k) - F(n,k) in k:
// rho_k(x,y) * (rho_n(qx,y) - 1) / (rho_n(x,y) - 1), rational in x and y —
// all infinite q-shifted factorials cancel.  nullopt when the difference is
// identically zero (F already n-independent).
inline std::optional<RatFunc> difference_ratio(const QHyperTerm& F) {
    RatFunc rho_n = shift_ratio_n(F);
    RatFunc dn = rho_n - RatFunc(Rational(1));
    if (dn.is_zero()) return std::nullopt;
    RatFunc rho_k = shift_ratio_k(F);
    // divide the two shifted copies of rho_n - 1 first: they share most of
    // their factor structure, so the gcds stay small; multiplying rho_k in
    // before dividing can make the reduction intractable
    return rho_k * (dn.subst_q_dilate(VX, 1) / dn);
}

struct WZPair {
    QHyperTerm F;
    RatFunc cert; // G = cert * F
};

// Exact pair identity: divide F(n+1,k)-F(n,k) = G(n,k+1)-G(n,k) by F(n,k)
// and clear denominators.
inline bool pair_identity_holds(const WZPair& p) {
    RatFunc rho_n = shift_ratio_n(p.F);
    RatFunc rho_k = shift_ratio_k(p.F);
    RatFunc lhs = rho_n - RatFunc(Rational(1)) - p.cert.subst_q_dilate(VX, 1) * rho_k + p.cert;
    return rat_is_zero(lhs);
}

// cert = y(x) * (rho_n - 1), y the antidifference certificate of the
// difference quotient; the pair identity is re-checked before returning.
inline std::optional<WZPair> wz_discover(const QHyperTerm& F) {
    RatFunc rho_n = shift_ratio_n(F);
    RatFunc dn = rho_n - RatFunc(Rational(1));
    if (dn.is_zero()) {
        WZPair p{F, RatFunc(Rational(0))};
        return p; // zero difference: G = 0 closes the pair
    }
    RatFunc rho_k = shift_ratio_k(F);
    RatFunc r = rho_k * (dn.subst_q_dilate(VX, 1) / dn);
    // r = [rho_k * den(x)/den(qx)] * (num(qx)/num(x)): hand the dilation
    // factor num to the solver so normalization never expands the product
    RatFunc ab = rho_k * (RatFunc(dn.den) / RatFunc(dn.den).subst_q_dilate(VX, 1));
    auto y = qgosper_solve_factored(ab, dn.num, r, VX);
    if (!y) y = qgosper_solve(r, VX);
    if (!y) return std::nullopt;
    WZPair p{F, *y * (shift_ratio_n(F) - RatFunc(Rational(1)))};
    if (!pair_identity_holds(p)) return std::nullopt;
    return p;
}

// G(n,k), numerically.  Direct product cert(q^k,q^n) * F(n,k) when the
// certificate evaluates; at removable certificate poles (the compensating
// zero sits in an F factor) fall back to telescoping the certified pair
// identity: G(n,k) = sum_{j<k} (F(n+1,j) - F(n,j)).
inline Real eval_G(const WZPair& p, const Assignment& asg, long k, long n, Support support,
                   const TruncationPolicy& policy) {
    auto cv = p.cert.eval(asg.point(k, n));
    if (cv) return to_real(*cv) * eval_term(p.F, asg, k, n, policy);
    Real acc{0};
    if (support == Support::Unilateral) {
        for (long j = 0; j < k; ++j)
            acc += eval_term(p.F, asg, j, n + 1, policy) - eval_term(p.F, asg, j, n, policy);
        return acc;
    }
    Real eps = policy.eps_real();
    int small_run = 0;
    for (long j = k - 1, steps = 0; steps < policy.max_terms; --j, ++steps) {
        Real d = eval_term(p.F, asg, j, n + 1, policy) - eval_term(p.F, asg, j, n, policy);
        acc += d;
        if (abs_val(d) < eps) {
            if (++small_run >= 4) return acc;
        } else {
            small_run = 0;
        }
    }
    throw std::runtime_error("telescoped G evaluation did not converge");
}

enum class CondStatus { Pass, Fail, Undecided, Skipped };

inline const char* status_name(CondStatus s) {
    switch (s) {
        case CondStatus::Pass: return "PASS";
        case CondStatus::Fail: return "FAIL";
        case CondStatus::Undecided: return "UNDECIDED";
        default: return "SKIPPED";
    }
}

struct ConditionReport {
    CondStatus c1 = CondStatus::Skipped, c2 = CondStatus::Skipped, c3 = CondStatus::Skipped;
    std::string ev1, ev2, ev3;
    std::vector<std::pair<long, Real>> f_limits; // (j, f_j) from the C2 scan
};

namespace detail {

inline std::string mag_str(const Real& v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << static_cast<double>(v);
    return os.str();
}

} // namespace detail

// f_j = lim_{n->inf} F(n,j), by successive-difference stagnation.
inline std::optional<Real> limit_F(const QHyperTerm& F, const Assignment& asg, long j,
                                   const TruncationPolicy& policy) {
    Real eps = policy.eps_real();
    Real prev = eval_term(F, asg, j, 0, policy);
    int run = 0;
    for (long n = 1; n <= policy.max_terms; ++n) {
        Real cur = eval_term(F, asg, j, n, policy);
        if (abs_val(cur - prev) < eps) {
            if (++run >= 4) return cur;
        } else {
            run = 0;
        }
        prev = cur;
    }
    return std::nullopt;
}

// Desk-scale numeric evidence for (C1)-(C3); never silently PASS — scans that
// exhaust their budget report UNDECIDED with the last monitored magnitude.
inline ConditionReport check_conditions(const WZPair& pair, Support support, const Assignment& asg,
                                        const TruncationPolicy& policy) {
    ConditionReport rep;
    Real eps = policy.eps_real();
    const long kcap = std::min<long>(policy.max_terms, 400);

    // C1: |G(n,k)| -> 0 as k -> +inf (and k -> -inf for bilateral summands)
    {
        bool all_ok = true, undecided = false;
        std::ostringstream ev;
        for (long n = 0; n <= 3 && all_ok; ++n) {
            for (int dir : {+1, -1}) {
                if (dir < 0 && support == Support::Unilateral) break;
                int run = 0;
                bool ok = false;
                Real last{0};
                for (long i = 0, k = (dir > 0 ? 0 : -1); i < kcap; ++i, k += dir) {
                    last = abs_val(eval_G(pair, asg, k, n, support, policy));
                    if (last < eps) {
                        if (++run >= 4) {
                            ok = true;
                            ev << "n=" << n << (dir > 0 ? " k->+inf" : " k->-inf") << " |G|<eps from k="
                               << k - dir * 3 << "; ";
                            break;
                        }
                    } else {
                        run = 0;
                    }
                }
                if (!ok) {
                    all_ok = false;
                    undecided = true;
                    ev << "n=" << n << " dir=" << dir << " last |G|=" << detail::mag_str(last) << "; ";
                    break;
                }
            }
        }
        rep.c1 = all_ok ? CondStatus::Pass : (undecided ? CondStatus::Undecided : CondStatus::Fail);
        rep.ev1 = ev.str();
    }

    // C2: f_j = lim_n F(n,j) exists and is finite
    {
        bool all_ok = true;
        std::ostringstream ev;
        for (long j : {0L, 1L, 2L}) {
            auto f = limit_F(pair.F, asg, j, policy);
            if (!f) {
                all_ok = false;
                ev << "j=" << j << " no stagnation; ";
                continue;
            }
            rep.f_limits.emplace_back(j, *f);
            ev << "f_" << j << "=" << detail::mag_str(*f) << "; ";
        }
        rep.c2 = all_ok ? CondStatus::Pass : CondStatus::Undecided;
        rep.ev2 = ev.str();
    }

    // C3: sum_{n>=0} G(n,-L) -> 0 as L -> inf
    {
        std::ostringstream ev;
        CondStatus st = CondStatus::Undecided;
        int small_run = 0;
        Real lastS{0};
        for (long L = 1; L <= 40; ++L) {
            Real S{0};
            int run = 0;
            bool inner_ok = false;
            for (long n = 0; n < policy.max_terms; ++n) {
                Real g = eval_G(pair, asg, -L, n, support, policy);
                S += g;
                if (abs_val(g) < eps) {
                    if (++run >= 4) {
                        inner_ok = true;
                        break;
                    }
                } else {
                    run = 0;
                }
            }
            if (!inner_ok) {
                ev << "L=" << L << " inner sum over n did not stabilize; ";
                st = CondStatus::Undecided;
                break;
            }
            lastS = S;
            if (abs_val(S) < eps) {
                if (++small_run >= 3) {
                    st = CondStatus::Pass;
                    ev << "|sum_n G(n,-L)|<eps for L=" << L - 2 << ".." << L << "; ";
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if (st != CondStatus::Pass && ev.str().empty())
            ev << "last |sum|=" << detail::mag_str(lastS) << "; ";
        rep.c3 = st;
        rep.ev3 = ev.str();
    }
    return rep;
}

struct ConstantResult {
    Real value{0};
    std::string method;
    bool n_independent = false;
};

// Degenerate the parameters (collapsing the sum), evaluate sum_k F(0,k), and
// cross-check sum_k F(n,k) for n = 0..3 at the generic assignment.
inline ConstantResult determine_constant(const QHyperTerm& F, Support support,
                                         const std::map<Var, Rational>& degeneration,
                                         const Assignment& generic, const TruncationPolicy& policy,
                                         const std::string& method) {
    Assignment degen = generic;
    for (auto& [v, val] : degeneration) degen.set(v, val);
    SumResult s = sum_series(F, 0, support, degen, policy);
    if (!s.converged) throw std::runtime_error("degenerate constant sum did not converge");
    ConstantResult res;
    res.value = s.value;
    res.method = method;
    Real tol = 10 * policy.eps_real();
    res.n_independent = true;
    SumResult s0 = sum_series(F, 0, support, generic, policy);
    for (long n = 1; n <= 3; ++n) {
        SumResult sn = sum_series(F, n, support, generic, policy);
        if (!s0.converged || !sn.converged || abs_val(sn.value - s0.value) > tol)
            res.n_independent = false;
    }
    return res;
}

struct CompanionResult {
    bool applicable = false;
    std::string statement;
    Real residual{0};
    bool pass = false;
};

// Companion summation: sum_{n>=0} G(n,k) = sum_{j<=k-1} (f_j - F(0,j)).
// Caller gates applicability on C2/C3.
inline CompanionResult companion(const WZPair& pair, Support support, const Assignment& asg,
                                 const TruncationPolicy& policy, long k) {
    CompanionResult out;
    out.applicable = true;
    Real eps = policy.eps_real();

    Real lhs{0};
    int run = 0;
    bool ok = false;
    for (long n = 0; n < policy.max_terms; ++n) {
        Real g = eval_G(pair, asg, k, n, support, policy);
        lhs += g;
        if (abs_val(g) < eps) {
            if (++run >= 4) {
                ok = true;
                break;
            }
        } else {
            run = 0;
        }
    }
    if (!ok) throw std::runtime_error("companion left side did not converge");

    Real rhs{0};
    for (long j = 0; j < k; ++j) {
        auto f = limit_F(pair.F, asg, j, policy);
        if (!f) throw std::runtime_error("companion limit f_j did not stabilize");
        rhs += *f - eval_term(pair.F, asg, j, 0, policy);
    }

    out.residual = abs_val(lhs - rhs);
    out.pass = out.residual < 10 * policy.eps_real();
    out.statement = "sum_{n>=0} G(n," + std::to_string(k) + ") = sum_{j<=" + std::to_string(k - 1) +
                    "} (f_j - F(0,j)) with G = [cert] * F";
    return out;
}

} // namespace qwz
