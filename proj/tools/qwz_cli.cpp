#include "qwz/catalog.hpp"
#include "qwz/parse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace qwz;
using ojson = nlohmann::ordered_json;

namespace {

// 0 success; 2 bad input; 3 no certificate exists; 4 a check failed
// (artifacts still written); 5 companion not applicable.
constexpr int EXIT_OK = 0;
constexpr int EXIT_BAD_INPUT = 2;
constexpr int EXIT_NO_CERT = 3;
constexpr int EXIT_CHECK_FAILED = 4;
constexpr int EXIT_NOT_APPLICABLE = 5;

struct RunConfig {
    std::string id;
    std::string term_text;
    std::string recipe_csv;
    std::string q_text;
    std::vector<std::string> param_texts;
    unsigned prec = 40;
    std::string eps_text = "1e-30";
    long max_terms = 4000;
    long seed = 20240817;
    std::string json_out;
    long k = 3;
    long N = 60;
};

std::string real_str(const Real& v) {
    std::ostringstream os;
    os.precision(30);
    os << v;
    return os.str();
}

TruncationPolicy make_policy(const RunConfig& cfg) {
    TruncationPolicy p;
    p.precision_digits = cfg.prec;
    p.epsilon = parse_rational(cfg.eps_text);
    p.max_terms = cfg.max_terms;
    if (!p.valid()) throw ParseError("epsilon is below what the precision can resolve", 0);
    set_working_precision(p.precision_digits);
    return p;
}

Assignment make_assignment(const RunConfig& cfg, const Assignment& defaults) {
    Assignment asg = defaults;
    if (!cfg.q_text.empty()) asg.q = parse_rational(cfg.q_text);
    for (const auto& pt : cfg.param_texts) {
        auto eq = pt.find('=');
        if (eq == std::string::npos) throw ParseError("expected NAME=RATIONAL in --param", 0);
        auto v = var_from_name(pt.substr(0, eq));
        if (!v || !is_param(*v)) throw ParseError("unknown parameter '" + pt.substr(0, eq) + "'", 0);
        asg.set(*v, parse_rational(pt.substr(eq + 1)));
    }
    return asg;
}

SubstitutionRecipe make_recipe(const RunConfig& cfg, const SubstitutionRecipe& fallback) {
    if (cfg.recipe_csv.empty()) return fallback;
    SubstitutionRecipe r;
    std::stringstream ss(cfg.recipe_csv);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        auto v = var_from_name(piece);
        if (!v || !is_param(*v)) throw ParseError("unknown recipe parameter '" + piece + "'", 0);
        r.shifted.push_back(*v);
    }
    return r;
}

ojson assignment_json(const Assignment& asg) {
    ojson j;
    j["q"] = asg.q.str();
    for (int i = 0; i < NPARAMS; ++i)
        j[var_name(VA + i)] = asg.params[i].str();
    return j;
}

void write_json(const RunConfig& cfg, const ojson& j) {
    if (cfg.json_out.empty()) return;
    std::ofstream out(cfg.json_out);
    if (!out) throw std::runtime_error("cannot write " + cfg.json_out);
    out << j.dump(2) << "\n";
}

ojson condition_json(CondStatus s, const std::string& ev) {
    return ojson{{"status", status_name(s)}, {"evidence", ev}};
}

const IdentityEntry& lookup(const std::string& id) {
    try {
        return catalog_get(id);
    } catch (const std::out_of_range&) {
        throw ParseError("unknown identity '" + id + "' (see `list`)", 0);
    }
}

std::map<Var, Rational> degeneration_values(const IdentityEntry& e, const Assignment& asg) {
    std::map<Var, Rational> out;
    for (const auto& [v, mono] : e.degeneration) out[v] = eval_mono_text(mono, asg);
    return out;
}

std::string degeneration_label(const IdentityEntry& e) {
    std::string s = "n = 0";
    for (const auto& [v, mono] : e.degeneration) s += std::string(", ") + var_name(v) + " = " + mono;
    return s;
}

int cmd_certify(const RunConfig& cfg) {
    const IdentityEntry& e = lookup(cfg.id);
    if (!e.summand || e.numeric_only)
        throw ParseError("'" + e.id + "' has no summand to certify; use verify-numeric or telescope", 0);
    TruncationPolicy policy = make_policy(cfg);
    Assignment asg = make_assignment(cfg, e.default_point);
    SubstitutionRecipe recipe = make_recipe(cfg, e.recipe);

    QHyperTerm F = build_F(*e.summand, e.closed_form, recipe);
    auto pair = wz_discover(F);
    if (!pair) {
        std::cout << "NO CERTIFICATE: the k-antidifference ansatz has no rational solution for '"
                  << e.id << "'\n";
        return EXIT_NO_CERT;
    }
    bool exact = pair_identity_holds(*pair);

    ConditionReport rep;
    try {
        rep = check_conditions(*pair, e.support, asg, policy);
    } catch (const std::exception& ex) {
        rep.ev1 = rep.ev2 = rep.ev3 = std::string("evaluation aborted: ") + ex.what();
        rep.c1 = rep.c2 = rep.c3 = CondStatus::Undecided;
    }

    ojson constant_j;
    try {
        ConstantResult c = determine_constant(F, e.support, degeneration_values(e, asg), asg, policy,
                                              degeneration_label(e));
        constant_j = ojson{{"value", real_str(c.value)},
                           {"method", c.method},
                           {"n_independent", c.n_independent}};
    } catch (const std::exception& ex) {
        constant_j = ojson{{"value", nullptr}, {"method", std::string("failed: ") + ex.what()}};
    }

    ojson po;
    po["identity_id"] = e.id;
    po["seed"] = cfg.seed;
    ojson rnames = ojson::array();
    for (Var v : recipe.shifted) rnames.push_back(var_name(v));
    po["recipe"] = rnames;
    po["assignment"] = assignment_json(asg);
    po["F"] = print_term(pair->F);
    po["cert"] = ojson{{"num", detail::poly_str(pair->cert.num)},
                       {"den", detail::poly_str(pair->cert.den)}};
    po["exact_check"] = exact;
    po["conditions"] = ojson{{"C1", condition_json(rep.c1, rep.ev1)},
                             {"C2", condition_json(rep.c2, rep.ev2)},
                             {"C3", condition_json(rep.c3, rep.ev3)}};
    po["constant"] = constant_j;
    po["companion"] = nullptr;
    write_json(cfg, po);

    std::cout << "identity: " << e.id << "\n";
    std::cout << "F(n,k)  = " << print_term_human(pair->F) << "\n";
    std::cout << "cert    = " << print_ratfunc(pair->cert) << "   (G = cert * F)\n";
    std::cout << "exact pair identity: " << (exact ? "PASS" : "FAIL") << "\n";
    std::cout << "C1 " << status_name(rep.c1) << "  C2 " << status_name(rep.c2) << "  C3 "
              << status_name(rep.c3) << "\n";
    if (constant_j["value"].is_string())
        std::cout << "constant (" << constant_j["method"].get<std::string>()
                  << ") = " << constant_j["value"].get<std::string>() << "\n";

    bool any_fail = !exact || rep.c1 == CondStatus::Fail || rep.c2 == CondStatus::Fail ||
                    rep.c3 == CondStatus::Fail;
    return any_fail ? EXIT_CHECK_FAILED : EXIT_OK;
}

int cmd_discover(const RunConfig& cfg) {
    if (cfg.term_text.empty()) throw ParseError("discover needs --term TEXT", 0);
    QHyperTerm t = parse_term(cfg.term_text);
    RatFunc ratio;
    try {
        ratio = shift_ratio_k(t);
    } catch (const CollapseError& ex) {
        throw ParseError(std::string("term has no rational k-shift quotient: ") + ex.what(), 0);
    }
    auto y = qgosper_solve(ratio, VX);
    if (!y) {
        std::cout << "NO CERTIFICATE: shift quotient " << print_ratfunc(ratio)
                  << " admits no rational antidifference certificate\n";
        return EXIT_NO_CERT;
    }
    ojson j;
    j["term"] = print_term(t);
    j["shift_ratio"] = ojson{{"num", detail::poly_str(ratio.num)}, {"den", detail::poly_str(ratio.den)}};
    j["certificate"] = ojson{{"num", detail::poly_str(y->num)}, {"den", detail::poly_str(y->den)}};
    write_json(cfg, j);
    std::cout << "term        = " << print_term_human(t) << "\n";
    std::cout << "shift ratio = " << print_ratfunc(ratio) << "\n";
    std::cout << "certificate y = " << print_ratfunc(*y) << "   (y*T telescopes T)\n";
    return EXIT_OK;
}

int cmd_companion(const RunConfig& cfg) {
    const IdentityEntry& e = lookup(cfg.id);
    if (!e.companion_applicable) {
        std::cout << "NOT_APPLICABLE: the companion conditions do not hold for '" << e.id << "'\n";
        return EXIT_NOT_APPLICABLE;
    }
    if (!e.summand || e.numeric_only)
        throw ParseError("'" + e.id + "' has no summand-level pair", 0);
    TruncationPolicy policy = make_policy(cfg);
    Assignment asg = make_assignment(cfg, e.default_point);
    QHyperTerm F = build_F(*e.summand, e.closed_form, make_recipe(cfg, e.recipe));
    auto pair = wz_discover(F);
    if (!pair) {
        std::cout << "NO CERTIFICATE for '" << e.id << "'\n";
        return EXIT_NO_CERT;
    }
    CompanionResult res = companion(*pair, e.support, asg, policy, cfg.k);
    ojson j;
    j["identity_id"] = e.id;
    j["k"] = cfg.k;
    j["assignment"] = assignment_json(asg);
    j["statement"] = res.statement;
    j["residual"] = real_str(res.residual);
    j["pass"] = res.pass;
    write_json(cfg, j);
    std::cout << res.statement << "\n";
    std::cout << "residual = " << real_str(res.residual) << (res.pass ? "  PASS" : "  FAIL") << "\n";
    return res.pass ? EXIT_OK : EXIT_CHECK_FAILED;
}

int cmd_telescope(const RunConfig& cfg) {
    const IdentityEntry& e = lookup(cfg.id);
    if (!e.recurrence || !e.telescope_summand)
        throw ParseError("'" + e.id + "' has no dilation recurrence to telescope", 0);
    TruncationPolicy policy = make_policy(cfg);
    Assignment asg = make_assignment(cfg, e.default_point);
    auto res = telescope_certify(*e.recurrence, *e.telescope_summand);
    if (!res) {
        std::cout << "NO CERTIFICATE: the n-antidifference ansatz has no rational solution\n";
        return EXIT_NO_CERT;
    }
    // telescoped limit must equal rhs / c_0 at the sample point
    bool limit_ok = true;
    std::string limit_note;
    try {
        auto lim = limit_F(res->z, asg, 0, policy);
        RatFunc target = e.recurrence->rhs / e.recurrence->coeffs[0];
        auto tv = target.eval(asg.point(0, 0));
        if (!lim || !tv) {
            limit_ok = false;
            limit_note = "limit did not stabilize";
        } else {
            Real diff = abs_val(*lim - to_real(*tv));
            limit_ok = diff < 10 * policy.eps_real();
            limit_note = "lim z_n = " + real_str(*lim) + ", rhs/c0 = " + real_str(to_real(*tv));
        }
    } catch (const std::exception& ex) {
        limit_ok = false;
        limit_note = std::string("limit evaluation aborted: ") + ex.what();
    }
    ojson j;
    j["identity_id"] = e.id;
    j["assignment"] = assignment_json(asg);
    j["z"] = print_term(res->z);
    j["certificate"] = ojson{{"num", detail::poly_str(res->y.num)}, {"den", detail::poly_str(res->y.den)}};
    j["z0_zero"] = res->z0_zero;
    j["limit"] = limit_note;
    j["limit_ok"] = limit_ok;
    write_json(cfg, j);
    std::cout << "z_n = " << print_term_human(res->z) << "\n";
    std::cout << "z_0 = 0 (symbolic): " << (res->z0_zero ? "PASS" : "FAIL") << "\n";
    std::cout << limit_note << (limit_ok ? "  PASS" : "  FAIL") << "\n";
    return (res->z0_zero && limit_ok) ? EXIT_OK : EXIT_CHECK_FAILED;
}

int cmd_verify_numeric(const RunConfig& cfg) {
    const IdentityEntry& e = lookup(cfg.id);
    TruncationPolicy policy = make_policy(cfg);
    Assignment asg = make_assignment(cfg, e.default_point);
    if (!constraints_satisfied(e, asg))
        throw ParseError("assignment violates the identity's validity constraints", 0);
    VerifyResult res = verify_numeric(e, asg, policy);
    ojson j;
    j["identity_id"] = e.id;
    j["assignment"] = assignment_json(asg);
    j["lhs"] = real_str(res.lhs);
    j["rhs"] = real_str(res.rhs);
    j["residual"] = real_str(res.residual);
    j["converged"] = res.converged;
    j["pass"] = res.pass;
    write_json(cfg, j);
    std::cout << "lhs = " << real_str(res.lhs) << "\nrhs = " << real_str(res.rhs) << "\n";
    std::cout << "residual = " << real_str(res.residual) << (res.pass ? "  PASS" : "  FAIL") << "\n";
    return res.pass ? EXIT_OK : EXIT_CHECK_FAILED;
}

int cmd_anbn(const RunConfig& cfg) {
    const IdentityEntry& e = lookup(cfg.id);
    if (!e.recurrence || e.recurrence->coeffs.size() != 3)
        throw ParseError("'" + e.id + "' has no three-term dilation recurrence", 0);
    TruncationPolicy policy = make_policy(cfg);
    Assignment asg = make_assignment(cfg, e.default_point);
    ABReport rep = iterate_AnBn(*e.recurrence, cfg.N, asg, Real("1e-12"));
    ojson j;
    j["identity_id"] = e.id;
    j["assignment"] = assignment_json(asg);
    j["N"] = cfg.N;
    j["A_last"] = rep.A.back().str();
    j["B_last"] = rep.B.back().str();
    j["max_tail_diff"] = real_str(rep.max_tail_diff);
    j["cauchy"] = rep.cauchy;
    write_json(cfg, j);
    std::cout << "A_" << cfg.N << " = " << real_str(to_real(rep.A.back())) << "\n";
    std::cout << "B_" << cfg.N << " = " << real_str(to_real(rep.B.back())) << "\n";
    std::cout << "max successive difference over the last steps: " << real_str(rep.max_tail_diff)
              << (rep.cauchy ? "  PASS" : "  FAIL") << "\n";
    return rep.cauchy ? EXIT_OK : EXIT_CHECK_FAILED;
}

int cmd_list() {
    for (const auto& id : catalog_list()) std::cout << id << "\n";
    return EXIT_OK;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"q-series summation certificates: discovery, certification, and numeric checks"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--q", cfg.q_text, "value of q (rational, e.g. 1/2)");
        sub->add_option("--param", cfg.param_texts, "parameter assignment NAME=RATIONAL");
        sub->add_option("--prec", cfg.prec, "working precision in decimal digits");
        sub->add_option("--eps", cfg.eps_text, "numeric tolerance");
        sub->add_option("--max-terms", cfg.max_terms, "summation/product term budget");
        sub->add_option("--seed", cfg.seed, "sample-point seed recorded in the output");
        sub->add_option("--json-out", cfg.json_out, "write the result object to this path");
    };

    auto* certify = app.add_subcommand("certify", "discover and certify the pair for an identity");
    certify->add_option("id", cfg.id, "identity id")->required();
    certify->add_option("--recipe", cfg.recipe_csv, "comma-separated dilated parameters");
    add_common(certify);

    auto* discover = app.add_subcommand("discover", "antidifference certificate for a raw term");
    discover->add_option("--term", cfg.term_text, "term expression")->required();
    add_common(discover);

    auto* comp = app.add_subcommand("companion", "check the companion summation at a given k");
    comp->add_option("id", cfg.id, "identity id")->required();
    comp->add_option("--k", cfg.k, "companion boundary index");
    comp->add_option("--recipe", cfg.recipe_csv, "comma-separated dilated parameters");
    add_common(comp);

    auto* tel = app.add_subcommand("telescope", "certify a dilation recurrence termwise");
    tel->add_option("id", cfg.id, "identity id")->required();
    add_common(tel);

    auto* ver = app.add_subcommand("verify-numeric", "high-precision two-sided check");
    ver->add_option("id", cfg.id, "identity id")->required();
    add_common(ver);

    auto* ab = app.add_subcommand("anbn", "exact rational convergents of the recurrence");
    ab->add_option("id", cfg.id, "identity id")->required();
    ab->add_option("--N", cfg.N, "number of iteration steps");
    add_common(ab);

    app.add_subcommand("list", "list catalogued identities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : EXIT_BAD_INPUT;
    }

    try {
        if (app.got_subcommand("certify")) return cmd_certify(cfg);
        if (app.got_subcommand("discover")) return cmd_discover(cfg);
        if (app.got_subcommand("companion")) return cmd_companion(cfg);
        if (app.got_subcommand("telescope")) return cmd_telescope(cfg);
        if (app.got_subcommand("verify-numeric")) return cmd_verify_numeric(cfg);
        if (app.got_subcommand("anbn")) return cmd_anbn(cfg);
        if (app.got_subcommand("list")) return cmd_list();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_BAD_INPUT;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_CHECK_FAILED;
    }
    return EXIT_BAD_INPUT;
}
