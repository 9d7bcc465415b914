// Command-line driver: triple-product period computation and the supporting
// module checks (convenience audit, determinant invariance, cusp-calculus
// constant, ordinary-projector cross-check), plus per-module selftests.

#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "tripp/cusp.hpp"
#include "tripp/io.hpp"
#include "tripp/synthetic.hpp"

using namespace tripp;

namespace {

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

TripleFile load_triple(const std::string& path, int prec, long qprec) {
    Json j = parse_json_text(read_file(path), "triple record");
    if (prec > 0 && j.contains("field")) j["field"]["precision_cap"] = prec;
    if (qprec > 0) j["qprec"] = qprec;
    return parse_triple_text(j.dump());
}

std::string sibling_path(const std::string& anchor, const std::string& name) {
    auto slash = anchor.find_last_of('/');
    if (slash == std::string::npos) return name;
    return anchor.substr(0, slash + 1) + name;
}

ConvenienceReport convenience_of(const TripleConfig& tc) {
    DfghModule D = build_dfgh(tc.F, tc.f.a_p, tc.chi_f.value(tc.p()), tc.k, {tc.mu_g, tc.l},
                              {tc.mu_h, tc.m}, tc.inertia_a, tc.f_semistable);
    return convenient_check(D.D, FpPolynomial::linear(tc.F, tc.F->one()));
}

void print_audit(const ConvenienceReport& rep) {
    std::cout << "verdict: " << verdict_name(rep.verdict) << "\n";
    std::cout << "det Q(phi):   " << to_literal(rep.det_q_phi) << "\n";
    std::cout << "det Q(q phi): " << to_literal(rep.det_q_qphi) << "\n";
    std::cout << "eigenvalue 1 present:     " << (rep.audit.eigenvalue_one ? "yes" : "no") << "\n";
    std::cout << "eigenvalue 1/q present:   " << (rep.audit.eigenvalue_q_inverse ? "yes" : "no")
              << "\n";
    std::cout << "frobenius slopes:";
    for (const auto& [v, m] : rep.audit.frobenius_slopes)
        std::cout << " (" << format_rational(v) << " x" << m << ")";
    std::cout << "\n";
    for (const auto& e : rep.audit.entries)
        std::cout << "  j=" << e.j << "  tau=" << e.tau << "  |lambda| = p^"
                  << format_rational(e.abs_exponent) << "  lambda = " << to_literal(e.eigenvalue)
                  << "\n";
}

int report_violations(const std::vector<std::string>& v) {
    for (const auto& s : v) std::cerr << "violation: " << s << "\n";
    return 2;
}

bool selftest_line(const char* name, bool ok) {
    std::cout << "selftest " << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    return ok;
}

// ---------------------------------------------------------------------------
// selftests (the smallest fixed examples of each module)
// ---------------------------------------------------------------------------

bool selftest_compute() {
    PlantedTriple P = make_planted_triple();
    PeriodReport r = compute_period(P.tc, P.B, P.others);
    bool ok = eq_at_precision(r.I_p, P.u) && r.polys.certified &&
              r.convenience.verdict == ConvVerdict::convenient;
    // the ingestion layer round-trips the same run
    TripleFile tf = parse_triple_text(emit_triple(P.tc));
    ok = ok && tf.violations.empty();
    return selftest_line("compute", ok);
}

bool selftest_check_convenient() {
    auto F = make_field(5, 1, {{mpz_class(-5)}, {mpz_class(0)}}, 30);
    LocalFieldElement pi = F->uniformizer();
    // weights (3,3,2): exponents 3/2 and -1/2, convenient
    DfghModule M = build_dfgh(F, F->from_int(3), F->from_int(2), 3,
                              {F->from_ratio(2, 5), 3}, {pi.inverse() * F->from_int(3), 2}, 1);
    ConvenienceReport rep = convenient_check(M.D, FpPolynomial::linear(F, F->one()));
    bool ok = rep.verdict == ConvVerdict::convenient;
    // engineered unit eigenvalue: not convenient
    DfghModule B = build_dfgh(F, F->one(), F->one(), 2, {pi.inverse(), 2}, {pi.inverse(), 2}, 1);
    ok = ok && convenient_check(B.D, FpPolynomial::linear(F, F->one())).verdict ==
                   ConvVerdict::not_convenient;
    return selftest_line("check-convenient", ok);
}

PMatrix random_sl2(const FieldPtr& F, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(-20, 20);
    PMatrix g = PMatrix::identity(F, 2);
    for (int step = 0; step < 3; ++step) {
        PMatrix s = PMatrix::identity(F, 2);
        if (step % 2 == 0)
            s.at(0, 1) = F->from_int(dist(rng));
        else
            s.at(1, 0) = F->from_int(dist(rng));
        g = g * s;
    }
    return g;
}

PMatrix random_gl2(const FieldPtr& F, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(-20, 20);
    for (;;) {
        PMatrix g(F, 2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g.at(i, j) = F->from_int(dist(rng));
        auto v = determinant(g).valuation();
        if (v && *v == Rational(0)) return g;
    }
}

struct DetRun {
    bool pass = true;
    std::string counterexample;
};

DetRun run_det_invariance(const FieldPtr& F, int r1, int r2, int r3, int trials,
                          std::uint64_t seed) {
    DetRun out;
    std::mt19937_64 rng(seed);
    SymPowerElement Pr = det_polynomial(F, r1, r2, r3);
    int r = (r1 + r2 + r3) / 2;
    for (int trial = 0; trial < trials && out.pass; ++trial) {
        PMatrix g = random_sl2(F, rng);
        if (!sym_eq_at_precision(gl2_act(g, Pr), Pr)) {
            out.pass = false;
            out.counterexample = "unit-determinant g = [" + to_literal(g.at(0, 0)) + ", " +
                                 to_literal(g.at(0, 1)) + "; " + to_literal(g.at(1, 0)) + ", " +
                                 to_literal(g.at(1, 1)) + "]";
        }
        PMatrix h = random_gl2(F, rng);
        if (out.pass &&
            !sym_eq_at_precision(gl2_act(h, Pr), determinant(h).pow(-r) * Pr)) {
            out.pass = false;
            out.counterexample = "general g = [" + to_literal(h.at(0, 0)) + ", " +
                                 to_literal(h.at(0, 1)) + "; " + to_literal(h.at(1, 0)) + ", " +
                                 to_literal(h.at(1, 1)) + "]";
        }
    }
    return out;
}

bool selftest_det_invariance() {
    auto F = make_field(7, 1, {}, 5);
    bool ok = run_det_invariance(F, 1, 1, 0, 5, 11).pass &&
              run_det_invariance(F, 2, 2, 2, 5, 12).pass;
    return selftest_line("det-invariance", ok);
}

LocalFieldElement closed_form_constant(const FieldPtr& F, int k, int l, int m) {
    int r = (k + l + m - 6) / 2;
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(r - k + 2));
    LocalFieldElement e = F->from_mpz(fact);
    if ((k - 2) % 2 == 1) e = -e;
    return e;
}

QExpansion fixed_depleted(const FieldPtr& F, long N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(1, 1000000);
    QExpansion xi(F, N);
    for (long n = 1; n <= N; ++n) {
        if (n % F->p == 0) continue;
        xi.set_coeff(n, F->from_int(dist(rng)));
    }
    return xi;
}

bool selftest_constant() {
    auto F = make_field(5, 1, {}, 30);
    QExpansion xi2 = fixed_depleted(F, 40, 1), xi3 = fixed_depleted(F, 40, 2);
    bool ok = eq_at_precision(constant_check(2, 2, 2, xi2, xi3), F->one()) &&
              eq_at_precision(constant_check(3, 3, 2, xi2, xi3), -F->one());
    return selftest_line("constant", ok);
}

PMatrix nfact_projector(const PMatrix& A, int max_k = 70) {
    PMatrix cur = A;
    for (long k = 2; k <= max_k; ++k) cur = cur.pow(k);
    return cur;
}

bool matrices_eq_mod(const PMatrix& X, const PMatrix& Y, int digits) {
    for (std::size_t i = 0; i < X.a.size(); ++i)
        if (!eq_mod(X.a[i], Y.a[i], Rational(digits))) return false;
    return true;
}

struct EordRun {
    int compared = 0;
    bool pass = true;
    std::string counterexample;
};

EordRun run_eord(long p, int trials, std::uint64_t seed) {
    EordRun out;
    auto F = make_field(p, 1, {}, 25);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-50, 50);
    std::uniform_int_distribution<int> sz(2, 6);
    while (out.compared < trials && out.pass) {
        int n = sz(rng);
        PMatrix A(F, n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A.at(i, j) = F->from_int(dist(rng));
        // the n!-limit needs separated slopes: skip root valuations in (0, 1/2)
        bool separated = true;
        for (const auto& [v, m] : newton_polygon(char_poly(A)).root_valuations())
            if (v > Rational(0) && v < Rational(1, 2)) separated = false;
        if (!separated) continue;
        PMatrix E;
        try {
            E = unit_root_projector(A);
        } catch (const std::domain_error&) {
            continue;
        }
        if (!matrices_eq_mod(E, nfact_projector(A), 8)) {
            out.pass = false;
            std::ostringstream os;
            os << "p=" << p << " size=" << n << " entries:";
            for (const auto& e : A.a) os << " " << to_literal(e);
            out.counterexample = os.str();
        }
        ++out.compared;
    }
    return out;
}

bool selftest_eord() {
    EordRun r = run_eord(5, 3, 101);
    return selftest_line("eord-test", r.pass && r.compared == 3);
}

bool selftest_ingest() {
    auto F = make_field(5, 1, {}, 20);
    LocalFieldElement x = F->from_ratio(7, 25);
    bool ok = to_literal(parse_literal(F, to_literal(x))) == to_literal(x);
    PlantedTriple P = make_planted_triple();
    TripleFile tf = parse_triple_text(emit_triple(P.tc));
    ok = ok && tf.violations.empty() && tf.config.r() == 0;
    try {
        parse_triple_text("{ \"schema_version\": 1");
        ok = false;
    } catch (const ParseError&) {
    }
    return selftest_line("ingest", ok);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_compute(const std::string& input, std::string basis_path, int prec, long qprec,
                bool allow_inconvenient, bool intro_leg, const std::string& format) {
    TripleFile tf = load_triple(input, prec, qprec);
    if (!tf.violations.empty()) return report_violations(tf.violations);
    if (basis_path.empty() && !tf.basis_file.empty())
        basis_path = sibling_path(input, tf.basis_file);
    if (basis_path.empty()) {
        std::cerr << "error: no basis file given (flag --basis or `basis_file` in the record)\n";
        return 2;
    }
    BasisFile bf = parse_basis(basis_path, tf.config.F, tf.qprec);

    // the convenience gate is applied to the exit code below, so the
    // report (with its audit table) is always produced
    PeriodReport r = compute_period(tf.config, bf.basis, bf.competing,
                                    bf.degeneracy.empty() ? nullptr : &bf.degeneracy,
                                    {intro_leg, true});
    std::cout << emit_report(r, format == "structured" ? ReportFormat::structured
                                                       : ReportFormat::text);
    if (r.convenience.verdict != ConvVerdict::convenient) {
        print_audit(r.convenience);
        if (!allow_inconvenient) return 4;
    }
    return (r.polys.certified && r.convenience.verdict == ConvVerdict::convenient) ? 0 : 4;
}

int cmd_check_convenient(const std::string& input, int prec) {
    TripleFile tf = load_triple(input, prec, 0);
    if (!tf.violations.empty()) return report_violations(tf.violations);
    ConvenienceReport rep = convenience_of(tf.config);
    print_audit(rep);
    return rep.verdict == ConvVerdict::convenient ? 0 : 4;
}

int cmd_det_invariance(const std::string& rspec, int trials, const std::string& modspec,
                       std::uint64_t seed) {
    int r1, r2, r3;
    if (std::sscanf(rspec.c_str(), "%d,%d,%d", &r1, &r2, &r3) != 3)
        throw CLI::ValidationError("--r expects r1,r2,r3");
    long p;
    int e;
    if (std::sscanf(modspec.c_str(), "%ld^%d", &p, &e) != 2)
        throw CLI::ValidationError("--modulus expects p^e");
    auto F = make_field(p, 1, {}, e);
    DetRun run = run_det_invariance(F, r1, r2, r3, trials, seed);
    if (run.pass) {
        std::cout << "pass: " << trials << " unit-determinant and " << trials
                  << " general trials for r = (" << r1 << "," << r2 << "," << r3 << ") mod " << p
                  << "^" << e << "\n";
        return 0;
    }
    std::cout << "FAIL: counterexample " << run.counterexample << "\n";
    return 4;
}

int cmd_constant(const std::string& wspec, long qprec, int prec, long p) {
    int k, l, m;
    if (std::sscanf(wspec.c_str(), "%d,%d,%d", &k, &l, &m) != 3)
        throw CLI::ValidationError("--weights expects k,l,m");
    auto F = make_field(p, 1, {}, prec);
    if (qprec <= 0) qprec = std::max<long>(40, 2 * p * std::max({k, l, m}));
    QExpansion xi2 = fixed_depleted(F, qprec, 1), xi3 = fixed_depleted(F, qprec, 2);
    LocalFieldElement got = constant_check(k, l, m, xi2, xi3);
    LocalFieldElement want = closed_form_constant(F, k, l, m);
    std::cout << "computed: " << to_literal(got) << "\n";
    std::cout << "closed form (-1)^(k-2) (r-k+2)!: " << to_literal(want) << "\n";
    bool ok = eq_at_precision(got, want);
    std::cout << (ok ? "match" : "MISMATCH") << "\n";
    return ok ? 0 : 4;
}

int cmd_eord_test(long p, int trials, std::uint64_t seed) {
    EordRun run = run_eord(p, trials, seed);
    if (run.pass) {
        std::cout << "pass: " << run.compared << " random U_p matrices over Q_" << p
                  << ", slope projector = (U_p)^(n!) limit mod p^8\n";
        return 0;
    }
    std::cout << "FAIL: " << run.counterexample << "\n";
    return 4;
}

int run_all_selftests() {
    bool ok = true;
    ok &= selftest_ingest();
    ok &= selftest_constant();
    ok &= selftest_det_invariance();
    ok &= selftest_eord();
    ok &= selftest_check_convenient();
    ok &= selftest_compute();
    return ok ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"triple-product period computations over p-adic fields"};
    app.require_subcommand(1);

    // compute
    auto* compute = app.add_subcommand("compute", "evaluate the period from a triple record");
    std::string input, basis, format = "text";
    int prec = 0;
    long qprec = 0;
    bool allow_inconvenient = false, intro_leg = false, st_compute = false;
    compute->add_option("--input", input, "triple record (JSON)");
    compute->add_option("--basis", basis, "basis file (JSON)");
    compute->add_option("--prec", prec, "p-adic working precision (digits)");
    compute->add_option("--qprec", qprec, "q-expansion precision");
    compute->add_flag("--allow-inconvenient", allow_inconvenient,
                      "proceed past a failed convenience check");
    compute->add_flag("--intro-leg", intro_leg, "apply the derivative to the h-leg");
    compute->add_option("--format", format, "text | structured");
    compute->add_flag("--selftest", st_compute, "run the module's fixed examples");

    // check-convenient
    auto* chk = app.add_subcommand("check-convenient", "convenience audit of a triple record");
    std::string chk_input;
    int chk_prec = 0;
    bool st_chk = false;
    chk->add_option("--input", chk_input, "triple record (JSON)");
    chk->add_option("--prec", chk_prec, "p-adic working precision (digits)");
    chk->add_flag("--selftest", st_chk, "run the module's fixed examples");

    // det-invariance
    auto* det = app.add_subcommand("det-invariance", "randomized invariance of the det polynomial");
    std::string rspec = "2,2,2", modspec = "7^5";
    int det_trials = 100;
    std::uint64_t det_seed = 2026;
    bool st_det = false;
    det->add_option("--r", rspec, "tri-degree r1,r2,r3");
    det->add_option("--trials", det_trials, "number of random matrices");
    det->add_option("--modulus", modspec, "coefficient modulus p^e");
    det->add_option("--seed", det_seed, "random seed");
    det->add_flag("--selftest", st_det, "run the module's fixed examples");

    // constant
    auto* cst = app.add_subcommand("constant", "reproduce the theorem constant by the q-expansion calculus");
    std::string wspec = "2,2,2";
    long cst_qprec = 0, cst_p = 5;
    int cst_prec = 30;
    bool st_cst = false;
    cst->add_option("--weights", wspec, "weights k,l,m (balanced, even sum)");
    cst->add_option("--qprec", cst_qprec, "q-expansion precision");
    cst->add_option("--prec", cst_prec, "p-adic working precision (digits)");
    cst->add_option("--p", cst_p, "prime p");
    cst->add_flag("--selftest", st_cst, "run the module's fixed examples");

    // eord-test
    auto* eord = app.add_subcommand("eord-test", "ordinary projector vs the (U_p)^(n!) limit");
    long eord_p = 5;
    int eord_trials = 10;
    std::uint64_t eord_seed = 31337;
    bool st_eord = false;
    eord->add_option("--p", eord_p, "prime p");
    eord->add_option("--trials", eord_trials, "number of random matrices");
    eord->add_option("--seed", eord_seed, "random seed");
    eord->add_flag("--selftest", st_eord, "run the module's fixed examples");

    // selftest
    auto* self = app.add_subcommand("selftest", "run every module's fixed examples");
    bool st_self = false;
    self->add_flag("--selftest", st_self, "same as running the subcommand");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compute->parsed())
            return st_compute ? (selftest_compute() ? 0 : 4)
                              : cmd_compute(input, basis, prec, qprec, allow_inconvenient,
                                            intro_leg, format);
        if (chk->parsed())
            return st_chk ? (selftest_check_convenient() ? 0 : 4)
                          : cmd_check_convenient(chk_input, chk_prec);
        if (det->parsed())
            return st_det ? (selftest_det_invariance() ? 0 : 4)
                          : cmd_det_invariance(rspec, det_trials, modspec, det_seed);
        if (cst->parsed())
            return st_cst ? (selftest_constant() ? 0 : 4)
                          : cmd_constant(wspec, cst_qprec, cst_prec, cst_p);
        if (eord->parsed())
            return st_eord ? (selftest_eord() ? 0 : 4) : cmd_eord_test(eord_p, eord_trials, eord_seed);
        if (self->parsed()) return run_all_selftests();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
