#pragma once

#include "tripp/pipeline.hpp"

namespace tripp {

/// Q_7(pi) with pi^2 = 7, so supercuspidal scalars of valuation -1/2 exist.
inline FieldPtr planted_field(long cap = 30) {
    return make_field(7, 1, {{mpz_class(-7)}, {mpz_class(0)}}, cap);
}

/// A synthetic triple with a planted answer: the data is constructed so that
/// d^{-1} g x h' = u * fbreve + c * (positive-slope vector) in the span of
/// the basis, hence the period computation must return exactly u.
struct PlantedTriple {
    TripleConfig tc;
    FormSpaceBasis B;
    std::vector<std::map<long, LocalFieldElement>> others;
    QExpansion target;        // u * fbreve + c * w
    LocalFieldElement u;      // the planted answer
    QExpansion A;             // d^{-1} g
};

/// Solve multiply(A, B) = T with both factors p-depleted and B starting
/// q + q^2. Equation n is solved for A_{n-1}, except around the forbidden
/// indices: at n = 0 mod p equation n+1 has no fresh unknown of its own
/// (p | n), so equations n and n+1 are solved jointly for (A_{n-1}, B_{n-1}).
/// T must have zero constant and q^1 coefficients (a product of two cusp
/// expansions has no q^1 term).
inline void plant_factors(const QExpansion& T, QExpansion& A, QExpansion& B) {
    const FieldPtr& F = T.field;
    long p = F->p, N = T.q_precision;
    if (!T.coeff(1).is_zero_at_precision())
        throw std::invalid_argument("plant_factors: target must have zero q^1 coefficient");
    A = QExpansion(F, N);
    B = QExpansion(F, N);
    B.set_coeff(1, F->one());
    B.set_coeff(2, F->one());
    auto partial = [&](long n) {
        LocalFieldElement s = F->zero();
        for (long i = 1; i < n; ++i) s = s + A.coeff(i) * B.coeff(n - i);
        return s;
    };
    for (long n = 2; n <= N; ++n) {
        if (n % p == 0 && n + 1 <= N) {
            // [B_1 A_1; B_2 A_2] (A_{n-1}, B_{n-1})^t = residuals of eqs n, n+1
            LocalFieldElement r0 = T.coeff(n) - partial(n);
            LocalFieldElement r1 = T.coeff(n + 1) - partial(n + 1);
            LocalFieldElement det = B.coeff(1) * A.coeff(2) - A.coeff(1) * B.coeff(2);
            auto v = det.valuation();
            if (!v || *v != Rational(0))
                throw std::runtime_error("plant_factors: ill-conditioned seed coefficients");
            LocalFieldElement di = det.inverse();
            A.set_coeff(n - 1, di * (A.coeff(2) * r0 - A.coeff(1) * r1));
            B.set_coeff(n - 1, di * (B.coeff(1) * r1 - B.coeff(2) * r0));
            ++n; // equation n+1 handled
            continue;
        }
        A.set_coeff(n - 1, T.coeff(n) - partial(n));
    }
}

inline PlantedTriple make_planted_triple(long N = 49, long u_val = 4, bool intro_leg = false) {
    PlantedTriple P;
    auto F = planted_field();
    DirichletCharacter triv = DirichletCharacter::trivial(F);

    LocalFieldElement ap_f = F->from_int(2); // unit: f is ordinary
    LocalFieldElement ap_w = F->from_int(7); // slope 1: killed by e_ord
    QExpansion fb = synthetic_eigenform(F, N, 2, 7, triv,
                                        {{2, F->from_int(1)}, {3, F->from_int(1)}}, &ap_f);
    QExpansion w = synthetic_eigenform(F, N, 2, 7, triv,
                                       {{2, F->from_int(2)}, {3, F->from_int(5)}}, &ap_w);
    P.B.basis = {fb, w};
    P.B.sturm_bound = 6;
    P.B.validate();
    P.others = {{{2, F->from_int(2)}}};

    P.u = F->from_int(u_val);
    // the product of two cusp expansions has no q^1 term, so the planted
    // combination must cancel there: c = -u (both eigenforms have a_1 = 1)
    LocalFieldElement c = -P.u;
    P.target = P.u * fb + c * w;

    QExpansion A, Bser;
    plant_factors(P.target, A, Bser);
    P.A = A;

    TripleConfig& tc = P.tc;
    tc.F = F;
    tc.M = tc.M1 = 1;
    tc.t = tc.s = 1;
    tc.k = tc.l = tc.m = 2;
    tc.chi_f = tc.chi_g = tc.chi_h = triv;
    tc.eps_f = tc.eps_g = tc.eps_h = triv;
    tc.f.form = fb;
    tc.f.a_p = ap_f;
    tc.f.hecke_eigenvalues = {{2, F->from_int(1)}};
    tc.f.lambda_M1 = F->one();
    tc.f.level_M1 = 1;
    tc.mu_g = F->from_int(2) * F->uniformizer().pow(-1);
    tc.mu_h = F->from_int(3) * F->uniformizer().pow(-1);
    if (intro_leg) {
        // g x d^{-1} h' = B x A: the derivative sits on the h-leg
        tc.g_form = Bser;
        tc.h_form = serre_d(A, 1);
    } else {
        // d^{-1} g x h' = A x B
        tc.g_form = serre_d(A, 1);
        tc.h_form = Bser;
    }
    return P;
}

} // namespace tripp
