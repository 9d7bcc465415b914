#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tripp/hida.hpp"
#include "tripp/phin.hpp"

namespace tripp {

/// Validated description of a triple (f, g, h): an ordinary p-stabilized
/// eigenform f and two p-supercuspidal legs g, h, with the character and
/// level bookkeeping needed by the period formula.
struct TripleConfig {
    FieldPtr F;
    long M = 1, M1 = 1; // tame levels, M1 | M
    long t = 1, s = 1;  // p-power exponents, s <= t
    int k = 2, l = 2, m = 2;
    long k0 = 0, l0 = 0, m0 = 0; // Teichmueller exponents
    DirichletCharacter chi_f, chi_g, chi_h; // tame nebentypus characters
    DirichletCharacter eps_f, eps_g, eps_h; // wild characters
    bool has_psi_sqrt = false;
    DirichletCharacter psi_sqrt; // designated square root of (eps_f^{-1} eps_g eps_h)^{-1}
    EigenformRecord f;
    std::optional<EigenformRecord> f_breve; // dual-stabilized eigen-data; defaults to f
    QExpansion g_form, h_form;
    LocalFieldElement mu_g, mu_h; // Frobenius scalars of the supercuspidal legs (h twisted)
    int inertia_a = 1;            // the unramified degree is d = 2 * inertia_a
    bool f_semistable = false;

    long p() const { return F->p; }
    int r1() const { return k - 2; }
    int r2() const { return l - 2; }
    int r3() const { return m - 2; }
    long r() const { return (k + l + m - 6) / 2; }
    int unram_d() const { return 2 * inertia_a; }

    long level_upper() const { // M p^t
        long v = M;
        for (long i = 0; i < t; ++i) v *= p();
        return v;
    }
    long level_lower() const { // M1 p^t
        long v = M1;
        for (long i = 0; i < t; ++i) v *= p();
        return v;
    }

    const EigenformRecord& f_breve_data() const { return f_breve ? *f_breve : f; }
};

/// Check every structural assumption on the triple; violations are returned
/// as data, not thrown.
inline std::vector<std::string> validate(const TripleConfig& tc) {
    std::vector<std::string> v;
    if (!tc.F) {
        v.push_back("no coefficient field");
        return v;
    }
    if (tc.k < 2 || tc.l < 2 || tc.m < 2) v.push_back("weights must all be at least 2");
    if ((tc.k + tc.l + tc.m) % 2 != 0) v.push_back("weight sum must be even (r integral)");
    if (tc.k >= tc.l + tc.m || tc.l >= tc.k + tc.m || tc.m >= tc.k + tc.l)
        v.push_back("weights must be balanced (strict triangle inequality)");
    if (tc.M1 < 1 || tc.M % tc.M1 != 0) v.push_back("M1 must divide M");
    if (tc.s > tc.t) v.push_back("s must not exceed t");
    if (tc.level_upper() < 5) v.push_back("M p^t must be at least 5");
    long tame_ord = tc.p() - 1;
    if (((tc.k0 + tc.l0 + tc.m0) % tame_ord + tame_ord) % tame_ord != 0)
        v.push_back("Teichmueller exponents must sum to 0 mod p-1");
    if (tc.chi_f.field && tc.chi_g.field && tc.chi_h.field) {
        if (!(tc.chi_f * tc.chi_g * tc.chi_h).is_trivial())
            v.push_back("self-duality fails: chi_f chi_g chi_h is not trivial");
    } else {
        v.push_back("tame characters missing");
    }
    auto val = tc.f.a_p.valuation();
    if (!val || *val != Rational(0)) v.push_back("f is not p-ordinary: a_p(f) is not a unit");
    return v;
}

namespace detail {

inline DirichletCharacter char_pow(const DirichletCharacter& c, long e, long order) {
    e %= order;
    if (e < 0) e += order;
    DirichletCharacter out = DirichletCharacter::trivial(c.field, 1);
    for (long i = 0; i < e; ++i) out = out * c;
    return out;
}

} // namespace detail

struct TwistData {
    QExpansion f_prime, h_prime;
    DirichletCharacter psi;
};

/// Build f' = f (x) omega^{k-2-k0} eps_f^{-1} and h' = h (x) psi with
/// psi = omega^{(r2+r3-r1-2k0)/2} (eps_f^{-1} eps_g eps_h)^{-1/2}; a trivial
/// twisting character degenerates to the p-depletion.
inline TwistData build_twists(const TripleConfig& tc) {
    const FieldPtr& F = tc.F;
    DirichletCharacter omega = DirichletCharacter::teichmuller(F);
    long ord = F->p - 1;

    DirichletCharacter theta_f =
        detail::char_pow(omega, tc.k - 2 - tc.k0, ord) * tc.eps_f.inverse();
    QExpansion f_prime = theta_f.is_trivial() ? deplete(tc.f.form) : twist(tc.f.form, theta_f);

    DirichletCharacter eps_part = tc.eps_f.inverse() * tc.eps_g * tc.eps_h;
    DirichletCharacter root = DirichletCharacter::trivial(F, 1);
    if (tc.has_psi_sqrt) {
        if (!(tc.psi_sqrt * tc.psi_sqrt == eps_part.inverse()))
            throw std::invalid_argument(
                "build_twists: designated square root does not square to (eps_f^{-1} eps_g eps_h)^{-1}");
        root = tc.psi_sqrt;
    } else if (!eps_part.is_trivial()) {
        throw std::invalid_argument(
            "build_twists: square-root datum missing for a nontrivial wild character product");
    }
    long psi_exp = (static_cast<long>(tc.r2()) + tc.r3() - tc.r1() - 2 * tc.k0) / 2;
    DirichletCharacter psi = detail::char_pow(omega, psi_exp, ord) * root;
    QExpansion h_prime = psi.is_trivial() ? deplete(tc.h_form) : twist(tc.h_form, psi);
    return {f_prime, h_prime, psi};
}

struct PolynomialData {
    FpPolynomial P_f, P_g, P_h, P_fgh;
    LocalFieldElement fgh_at_1, fgh_at_qinv;
    bool certified = false;
};

/// The lifting polynomials P_f = 1 - a_p(f)^{-d} T, P_xi = 1 - mu_xi^d
/// p^{d(nu-1)} T, and their star product P_fgh = P_f * (1 - p^{-dr} T) *
/// P_g * P_h', with the nonvanishing certificates at 1 and 1/q.
inline PolynomialData build_polynomials(const TripleConfig& tc) {
    const FieldPtr& F = tc.F;
    const int d = tc.unram_d();
    LocalFieldElement pp = F->from_int(F->p);
    PolynomialData out{FpPolynomial(F), FpPolynomial(F), FpPolynomial(F), FpPolynomial(F),
                       F->zero(), F->zero(), false};
    out.P_f = FpPolynomial::linear(F, tc.f.a_p.pow(-d));
    out.P_g = FpPolynomial::linear(F, tc.mu_g.pow(d) * pp.pow(static_cast<long>(d) * (tc.l - 1)));
    out.P_h = FpPolynomial::linear(F, tc.mu_h.pow(d) * pp.pow(static_cast<long>(d) * (tc.m - 1)));
    FpPolynomial mid = FpPolynomial::linear(F, pp.pow(-static_cast<long>(d) * tc.r()));
    out.P_fgh = star_product(star_product(out.P_f, mid), star_product(out.P_g, out.P_h));
    LocalFieldElement q_inv = pp.pow(-static_cast<long>(d));
    out.fgh_at_1 = out.P_fgh.eval(F->one());
    out.fgh_at_qinv = out.P_fgh.eval(q_inv);
    out.certified =
        !out.fgh_at_1.is_zero_at_precision() && !out.fgh_at_qinv.is_zero_at_precision();
    return out;
}

struct ComputeOptions {
    bool intro_leg = false;         // put the Serre derivative on the h-leg instead of g
    bool allow_inconvenient = false;
};

struct PeriodReport {
    LocalFieldElement I_p;
    Rational precision;
    ConvenienceReport convenience;
    QExpansion xi_ord; // the ordinary projection of the traced product
    PolynomialData polys;
    bool intro_leg;
};

/// Evaluate the period through the trace formula:
/// I_p = (-1)^{k-2} (r-k+2)! a_1(e_fbreve(Tr(e_ord(d^{(k-l-m)/2} g x h')))).
/// Every computable hypothesis (validation, depletion, convenience,
/// polynomial nonvanishing) is certified before the value is asserted.
inline PeriodReport compute_period(const TripleConfig& tc, const FormSpaceBasis& B,
                                   const std::vector<std::map<long, LocalFieldElement>>& others,
                                   const DegeneracyData* degeneracy = nullptr,
                                   const ComputeOptions& opts = {}) {
    const FieldPtr& F = tc.F;

    auto violations = validate(tc);
    if (!violations.empty()) {
        std::string msg = "compute_period: validation failed:";
        for (const auto& s : violations) msg += " [" + s + "]";
        throw std::invalid_argument(msg);
    }

    if (!tc.g_form.is_depleted())
        throw std::domain_error("compute_period: g is not p-depleted");
    TwistData tw = build_twists(tc);
    if (!tw.h_prime.is_depleted())
        throw std::domain_error("compute_period: h' is not p-depleted");

    PolynomialData polys = build_polynomials(tc);
    if (!polys.certified)
        throw std::domain_error("compute_period: P_fgh nonvanishing certificate failed");

    DfghModule D = build_dfgh(F, tc.f.a_p, tc.chi_f.value(F->p), tc.k,
                              {tc.mu_g, tc.l}, {tc.mu_h, tc.m}, tc.inertia_a,
                              tc.f_semistable);
    ConvenienceReport conv = convenient_check(D.D, FpPolynomial::linear(F, F->one()));
    if (conv.verdict != ConvVerdict::convenient && !opts.allow_inconvenient)
        throw std::domain_error(
            "compute_period: convenience check did not pass (override to proceed at own risk)");

    long dd = (static_cast<long>(tc.k) - tc.l - tc.m) / 2;
    QExpansion prod = opts.intro_leg
                          ? multiply(tc.g_form, serre_d(tw.h_prime, dd))
                          : multiply(serre_d(tc.g_form, dd), tw.h_prime);
    QExpansion traced = trace_level(prod, tc.level_upper(), tc.level_lower(), &B, degeneracy);

    QExpansion xi_ord = e_ord(traced, B);
    LocalFieldElement a1 = isotypic_a1(traced, tc.f_breve_data(), B, others);
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(tc.r() - tc.k + 2));
    LocalFieldElement pre = F->from_mpz(fact);
    if ((tc.k - 2) % 2 == 1) pre = -pre;
    LocalFieldElement I_p = pre * a1;
    return PeriodReport{I_p, I_p.known_precision, conv, xi_ord, polys, opts.intro_leg};
}

} // namespace tripp
