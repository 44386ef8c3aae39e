#pragma once

#include "qwz/parse.hpp"
#include "qwz/telescope.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace qwz {

// One component of a numeric identity side: either an adaptive series over k
// (n fixed at 0) or a closed product evaluated directly.
struct NumericItem {
    QHyperTerm term;
    bool is_sum = true;
    Support support = Support::Unilateral;
};

struct NumericSide {
    bool product = false; // combine items multiplicatively instead of additively
    std::vector<NumericItem> items;
    Rational offset{0};
};

struct IdentityEntry {
    std::string id;
    Support support = Support::Unilateral;
    std::optional<QHyperTerm> summand;     // F_k in the original parameters
    std::optional<QHyperTerm> closed_form; // product side; nullopt means ZERO
    std::vector<std::string> constraints;  // "abs(expr) < abs(expr)" / "< rat" / "rat < abs(expr)"
    SubstitutionRecipe recipe;
    std::map<Var, std::string> degeneration; // parameter -> monomial text pinning the constant
    Rational expected_constant{1};
    std::optional<QHyperTerm> reference_F, reference_G; // printed pair, verbatim
    std::optional<QHyperTerm> reference_certificate;    // printed telescoper z_n (n-indexed)
    std::optional<FunctionalRecurrence> recurrence;
    std::optional<QHyperTerm> telescope_summand; // D_n (n-indexed)
    bool companion_applicable = true;
    bool numeric_only = false;
    // the printed reference pair is known not to satisfy the pair identity;
    // the discovered pair is authoritative and the discrepancy is recorded
    bool reference_mismatch = false;
    std::string notes;
    Assignment default_point; // admissible sample point used when none is supplied
    std::optional<NumericSide> lhs_override, rhs_override;
};

namespace detail {

// product := atom { (*|/) atom }; atom := rational | letter[^int] | q[^int] | ( product )
inline Rational eval_product_expr(Cursor& c, const Assignment& asg) {
    auto atom = [&]() -> Rational {
        c.skip_ws();
        if (c.accept('(')) {
            Rational r = eval_product_expr(c, asg);
            c.expect(')');
            return r;
        }
        char p = c.peek();
        if (std::isdigit(static_cast<unsigned char>(p)) || p == '-') return c.rational();
        Rational base;
        if (c.accept_word("q")) {
            base = asg.q;
        } else {
            auto v = var_from_name(std::string_view(&p, 1));
            if (!v || !is_param(*v)) c.fail("unknown name in constraint expression");
            c.accept(p);
            base = asg.param(*v);
        }
        long e = c.accept('^') ? c.integer() : 1;
        return rational_pow(base, e);
    };
    Rational r = atom();
    while (true) {
        c.skip_ws();
        if (c.accept('*')) r *= atom();
        else if (c.accept('/')) {
            Rational d = atom();
            if (d == 0) throw PoleError("division by zero in constraint expression");
            r /= d;
        } else
            break;
    }
    return r;
}

// one comparison side: abs(expr) or a bare rational
inline Rational eval_constraint_side(Cursor& c, const Assignment& asg) {
    c.skip_ws();
    if (c.accept_word("abs")) {
        c.expect('(');
        Rational r = eval_product_expr(c, asg);
        c.expect(')');
        return r < 0 ? Rational(-r) : r;
    }
    Rational r = c.rational();
    return r < 0 ? Rational(-r) : r;
}

} // namespace detail

inline bool constraint_holds(const std::string& text, const Assignment& asg) {
    detail::Cursor c{std::string_view(text)};
    Rational lhs = detail::eval_constraint_side(c, asg);
    c.skip_ws();
    c.expect('<');
    Rational rhs = detail::eval_constraint_side(c, asg);
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input in constraint");
    return lhs < rhs;
}

inline bool constraints_satisfied(const IdentityEntry& e, const Assignment& asg) {
    for (const auto& t : e.constraints)
        if (!constraint_holds(t, asg)) return false;
    return true;
}

// Monomial text (e.g. "0", "q", "a", "q*a^-1") evaluated at an assignment.
inline Rational eval_mono_text(const std::string& text, const Assignment& asg) {
    detail::Cursor c{std::string_view(text)};
    detail::MonoParse m = detail::parse_mono(c, false);
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input in monomial");
    if (m.qpow.k || m.qpow.n) c.fail("monomial must not involve k or n");
    Rational r = m.coeff * rational_pow(asg.q, m.qpow.c);
    for (int i = 0; i < NPARAMS; ++i)
        if (m.pexp[i]) r *= rational_pow(asg.params[i], m.pexp[i]);
    return r;
}

// Monomial text as a substitution target p -> coeff * monomial * q^c.
inline ParamSubst parse_mono_subst(const std::string& text) {
    detail::Cursor c{std::string_view(text)};
    detail::MonoParse m = detail::parse_mono(c, false);
    c.skip_ws();
    if (!c.eof()) c.fail("trailing input in monomial");
    if (m.qpow.k || m.qpow.n) c.fail("substitution monomial must not involve k or n");
    ParamSubst s;
    s.m.coeff = m.coeff;
    for (int i = 0; i < NPARAMS; ++i) s.m.pexp[i] = m.pexp[i];
    s.m.qexp = m.qpow.c;
    return s;
}

namespace detail {

inline Support support_from(const std::string& s) {
    if (s == "unilateral") return Support::Unilateral;
    if (s == "bilateral") return Support::Bilateral;
    throw std::runtime_error("catalog: unknown support '" + s + "'");
}

inline Var param_from(const std::string& s) {
    auto v = var_from_name(s);
    if (!v || !is_param(*v)) throw std::runtime_error("catalog: unknown parameter '" + s + "'");
    return *v;
}

inline NumericSide side_from(const nlohmann::json& j) {
    NumericSide side;
    side.product = j.value("op", "sum") == std::string("product");
    if (j.contains("offset")) side.offset = parse_rational(j["offset"].get<std::string>());
    for (const auto& item : j.at("items")) {
        NumericItem it;
        if (item.contains("sum")) {
            it.term = parse_term(item["sum"].get<std::string>());
            it.is_sum = true;
            it.support = support_from(item.value("support", "unilateral"));
        } else {
            it.term = parse_term(item.at("closed").get<std::string>());
            it.is_sum = false;
        }
        side.items.push_back(std::move(it));
    }
    return side;
}

inline IdentityEntry entry_from(const nlohmann::json& j) {
    IdentityEntry e;
    e.id = j.at("id").get<std::string>();
    e.support = support_from(j.value("support", "unilateral"));
    if (j.contains("summand")) e.summand = parse_term(j["summand"].get<std::string>());
    if (j.contains("closed_form") && !j["closed_form"].is_null())
        e.closed_form = parse_term(j["closed_form"].get<std::string>());
    for (const auto& c : j.value("constraints", nlohmann::json::array()))
        e.constraints.push_back(c.get<std::string>());
    for (const auto& r : j.value("recipe", nlohmann::json::array()))
        e.recipe.shifted.push_back(param_from(r.get<std::string>()));
    if (j.contains("degeneration"))
        for (const auto& [k, v] : j["degeneration"].items())
            e.degeneration[param_from(k)] = v.get<std::string>();
    if (j.contains("constant")) e.expected_constant = parse_rational(j["constant"].get<std::string>());
    if (j.contains("reference_pair")) {
        e.reference_F = parse_term(j["reference_pair"].at("F").get<std::string>());
        e.reference_G = parse_term(j["reference_pair"].at("G").get<std::string>());
    }
    if (j.contains("reference_certificate"))
        e.reference_certificate = parse_term(j["reference_certificate"].get<std::string>());
    if (j.contains("recurrence")) {
        FunctionalRecurrence rec;
        for (const auto& c : j["recurrence"].at("coeffs"))
            rec.coeffs.push_back(parse_poly(c.get<std::string>()));
        rec.rhs = parse_poly(j["recurrence"].value("rhs", "0"));
        e.recurrence = std::move(rec);
    }
    if (j.contains("telescope_summand"))
        e.telescope_summand = parse_term(j["telescope_summand"].get<std::string>());
    e.companion_applicable = j.value("companion", true);
    e.numeric_only = j.value("numeric_only", false);
    e.reference_mismatch = j.value("reference_mismatch", false);
    if (j.contains("point"))
        for (const auto& [k, v] : j["point"].items()) {
            Rational val = parse_rational(v.get<std::string>());
            if (k == "q") e.default_point.q = val;
            else e.default_point.set(param_from(k), val);
        }
    e.notes = j.value("notes", "");
    if (j.contains("lhs")) e.lhs_override = side_from(j["lhs"]);
    if (j.contains("rhs")) e.rhs_override = side_from(j["rhs"]);
    return e;
}

} // namespace detail

inline const std::map<std::string, IdentityEntry>& catalog() {
    static const std::map<std::string, IdentityEntry> entries = [] {
        std::ifstream in(QWZ_CATALOG_FILE);
        if (!in) throw std::runtime_error("cannot open catalog data file " QWZ_CATALOG_FILE);
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.at("version").get<int>() != 1)
            throw std::runtime_error("unsupported catalog version");
        std::map<std::string, IdentityEntry> m;
        for (const auto& je : j.at("identities")) {
            IdentityEntry e = detail::entry_from(je);
            std::string id = e.id;
            m.emplace(std::move(id), std::move(e));
        }
        return m;
    }();
    return entries;
}

inline const IdentityEntry& catalog_get(const std::string& id) {
    auto it = catalog().find(id);
    if (it == catalog().end()) throw std::out_of_range("unknown identity '" + id + "'");
    return it->second;
}

inline std::vector<std::string> catalog_list() {
    std::vector<std::string> ids;
    for (const auto& [id, e] : catalog()) ids.push_back(id);
    return ids;
}

// Pin parameters to monomials (e.g. b -> q*a^-1).  Recipe entries, constraint
// strings, and degenerations that mention a pinned parameter are dropped; the
// caller is responsible for the admissibility of the pinned point.
inline IdentityEntry specialize(const IdentityEntry& e,
                                const std::map<Var, std::string>& pinning) {
    IdentityEntry r = e;
    for (const auto& [v, mono] : pinning) {
        ParamSubst s = parse_mono_subst(mono);
        auto apply = [&](std::optional<QHyperTerm>& t) {
            if (t) t = subst_param(*t, v, s);
        };
        apply(r.summand);
        apply(r.closed_form);
        apply(r.reference_F);
        apply(r.reference_G);
        apply(r.telescope_summand);
        apply(r.reference_certificate);
        auto apply_side = [&](std::optional<NumericSide>& sd) {
            if (!sd) return;
            for (auto& it : sd->items) it.term = subst_param(it.term, v, s);
        };
        apply_side(r.lhs_override);
        apply_side(r.rhs_override);
        r.default_point.set(v, eval_mono_text(mono, r.default_point));
        std::erase(r.recipe.shifted, v);
        std::string name(var_name(v));
        std::erase_if(r.constraints,
                      [&](const std::string& c) { return c.find(name) != std::string::npos; });
        r.degeneration.erase(v);
        r.id += "@" + name + "=" + mono;
    }
    return r;
}

struct SideValue {
    Real value{0};
    bool converged = true;
};

inline SideValue eval_side(const NumericSide& side, const Assignment& asg,
                           const TruncationPolicy& policy) {
    SideValue out;
    out.value = side.product ? Real(1) : Real(0);
    for (const auto& it : side.items) {
        Real v;
        if (it.is_sum) {
            SumResult s = sum_series(it.term, 0, it.support, asg, policy);
            out.converged = out.converged && s.converged;
            v = s.value;
        } else {
            v = eval_term(it.term, asg, 0, 0, policy);
        }
        if (side.product) out.value *= v;
        else out.value += v;
    }
    out.value += to_real(side.offset);
    return out;
}

struct VerifyResult {
    Real lhs{0}, rhs{0}, residual{0};
    bool converged = false;
    bool pass = false;
};

// Numeric two-sided check of the identity at an admissible point: sum of the
// summand over its support against the closed form (or the entry's explicit
// side descriptions).
inline VerifyResult verify_numeric(const IdentityEntry& e, const Assignment& asg,
                                   const TruncationPolicy& policy) {
    NumericSide lhs, rhs;
    if (e.lhs_override) {
        lhs = *e.lhs_override;
    } else {
        if (!e.summand) throw std::runtime_error("entry '" + e.id + "' has no summand side");
        lhs.items.push_back({*e.summand, true, e.support});
    }
    if (e.rhs_override) {
        rhs = *e.rhs_override;
    } else if (e.closed_form) {
        rhs.items.push_back({*e.closed_form, false, e.support});
    } // ZERO right side: empty sum evaluates to 0
    VerifyResult out;
    SideValue l = eval_side(lhs, asg, policy);
    SideValue r = eval_side(rhs, asg, policy);
    out.lhs = l.value;
    out.rhs = r.value;
    out.converged = l.converged && r.converged;
    out.residual = abs_val(out.lhs - out.rhs);
    Real scale = std::max(Real(1), std::max(abs_val(out.lhs), abs_val(out.rhs)));
    out.pass = out.converged && out.residual < 10 * policy.eps_real() * scale;
    return out;
}

} // namespace qwz
