#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tripp/hida.hpp"

using namespace tripp;

namespace {

// unit root of x^2 - t x + c (c of positive valuation, t a unit), by Newton
LocalFieldElement unit_quadratic_root(const LocalFieldElement& t, const LocalFieldElement& c) {
    LocalFieldElement x = t;
    for (int i = 0; i < 12; ++i) {
        LocalFieldElement num = x * x - t * x + c;
        LocalFieldElement den = x + x - t;
        x = x - num * den.inverse();
    }
    return x;
}

// fixed-length (U_p)^{n!} iterate; see the projector oracle notes in test_linalg
PMatrix nfact_iterate(PMatrix A, long max_k = 70) {
    PMatrix cur = A;
    for (long k = 2; k <= max_k; ++k) cur = cur.pow(k);
    return cur;
}

} // namespace

TEST_CASE("up_matrix on eigenforms and the stabilization basis") {
    auto F = make_field(5, 1, {}, 20);
    long N = 625;
    DirichletCharacter chi = DirichletCharacter::trivial(F);

    // single U_p-eigenform: 1x1 matrix (a_p)
    LocalFieldElement ap = F->from_int(3);
    std::map<long, LocalFieldElement> eigs = {{2, F->from_int(1)}, {3, F->from_int(2)}};
    QExpansion fa = synthetic_eigenform(F, N, 4, 5, chi, eigs, &ap);
    FormSpaceBasis B1{{fa}, 4};
    B1.validate();
    PMatrix A1 = up_matrix(B1);
    REQUIRE(A1.rows == 1);
    CHECK(eq_at_precision(A1.at(0, 0), ap));

    // stabilization basis {f, V_p f}: [[a_p, 1], [-chi(p) p^{k-1}, 0]]
    std::map<long, LocalFieldElement> eigs2 = {{2, F->from_int(2)}, {3, F->from_int(-1)},
                                               {5, F->from_int(7)}};
    QExpansion f = synthetic_eigenform(F, N, 4, 1, chi, eigs2);
    FormSpaceBasis B{{f, v_p(f)}, 6};
    B.validate();
    PMatrix A = up_matrix(B);
    CHECK(eq_at_precision(A.at(0, 0), F->from_int(7)));
    CHECK(eq_at_precision(A.at(0, 1), F->one()));
    CHECK(eq_at_precision(A.at(1, 0), -F->from_int(125)));
    CHECK(A.at(1, 1).is_zero_at_precision());

    // permuted basis: same characteristic polynomial
    FormSpaceBasis Bp{{v_p(f), f}, 6};
    PMatrix Ap = up_matrix(Bp);
    DensePoly c1 = char_poly(A), c2 = char_poly(Ap);
    for (int i = 0; i <= 2; ++i) CHECK(eq_mod(c1.coeff(i), c2.coeff(i), Rational(15)));
}

TEST_CASE("basis and record validation") {
    auto F = make_field(5, 1, {}, 20);
    long N = 125;
    DirichletCharacter chi = DirichletCharacter::trivial(F);
    std::map<long, LocalFieldElement> eigs = {{2, F->from_int(2)}};
    QExpansion f = synthetic_eigenform(F, N, 2, 1, chi, eigs);

    FormSpaceBasis dep{{f, F->from_int(2) * f}, 6};
    CHECK_THROWS_AS(dep.validate(), std::invalid_argument);

    FormSpaceBasis shallow{{f}, 200};
    CHECK_THROWS_AS(shallow.validate(), std::invalid_argument);

    EigenformRecord rec{f, F->from_int(5), {}, F->zero(), 1};
    CHECK_THROWS_AS(rec.validate(), std::invalid_argument); // a_p not a unit

    EigenformRecord rec2{f, F->from_int(2), {{2, F->from_int(3)}}, F->zero(), 1};
    CHECK_THROWS_AS(rec2.validate(), std::invalid_argument); // wrong eigenvalue

    EigenformRecord good{f, F->from_int(2), {{2, F->from_int(2)}}, F->zero(), 1};
    good.validate();
}

TEST_CASE("ordinary projection") {
    auto F = make_field(5, 1, {}, 20);
    long N = 625;
    DirichletCharacter chi = DirichletCharacter::trivial(F);
    std::map<long, LocalFieldElement> eigs = {{2, F->from_int(2)}, {3, F->from_int(-1)},
                                              {5, F->from_int(7)}};
    QExpansion f = synthetic_eigenform(F, N, 4, 1, chi, eigs);
    FormSpaceBasis B{{f, v_p(f)}, 6};

    // p-stabilizations: alpha = unit root of x^2 - a_p x + p^{k-1}
    LocalFieldElement alpha = unit_quadratic_root(F->from_int(7), F->from_int(125));
    LocalFieldElement beta = F->from_int(7) - alpha;
    QExpansion f_ord = f - beta * v_p(f);  // U_p-eigenvalue alpha (unit)
    QExpansion f_crit = f - alpha * v_p(f); // U_p-eigenvalue beta (slope k-1)

    CHECK(qexp_eq_mod(u_p(f_ord), alpha * f_ord, Rational(14)));
    CHECK(qexp_eq_mod(u_p(f_crit), beta * f_crit, Rational(14)));

    QExpansion e1 = e_ord(f_ord, B);
    CHECK(qexp_eq_mod(e1, f_ord, Rational(14)));
    QExpansion e2 = e_ord(f_crit, B);
    CHECK(e2.is_zero_at_precision());

    // mixture: 3 f_ord + f_crit -> 3 f_ord, cross-checked against the
    // (U_p)^{n!} iteration mod p^8
    QExpansion mix = F->from_int(3) * f_ord + f_crit;
    QExpansion em = e_ord(mix, B);
    CHECK(qexp_eq_mod(em, F->from_int(3) * f_ord, Rational(12)));

    PMatrix A = up_matrix(B);
    PMatrix O = nfact_iterate(A);
    auto x = tripp::detail::span_coordinates(B, mix);
    QExpansion oracle = expand_in_basis(B, O.apply(x));
    CHECK(qexp_eq_mod(em, oracle, Rational(8)));

    // idempotent, and commutes with u_p on the span
    CHECK(qexp_eq_mod(e_ord(em, B), em, Rational(12)));
    CHECK(qexp_eq_mod(e_ord(u_p(mix), B), u_p(e_ord(mix, B)), Rational(12)));
}

TEST_CASE("isotypic projection functional") {
    auto F = make_field(5, 1, {}, 20);
    long N = 625;
    DirichletCharacter chi = DirichletCharacter::trivial(F);

    // two ordinary U_p-eigensystems separated at ell = 2, plus one critical
    LocalFieldElement apf = F->from_int(2), apg = F->from_int(3), aph = F->from_int(10);
    std::map<long, LocalFieldElement> ef = {{2, F->from_int(1)}, {3, F->from_int(4)}};
    std::map<long, LocalFieldElement> eg = {{2, F->from_int(6)}, {3, F->from_int(4)}};
    std::map<long, LocalFieldElement> eh = {{2, F->from_int(2)}, {3, F->from_int(1)}};
    QExpansion f = synthetic_eigenform(F, N, 2, 5, chi, ef, &apf);
    QExpansion g = synthetic_eigenform(F, N, 2, 5, chi, eg, &apg);
    QExpansion h = synthetic_eigenform(F, N, 2, 5, chi, eh, &aph); // a_p = 10: slope 1
    FormSpaceBasis B{{f, g, h}, 8};
    B.validate();

    EigenformRecord recf{f, apf, ef, F->zero(), 1};
    std::vector<std::map<long, LocalFieldElement>> others = {eg};

    CHECK(eq_mod(isotypic_a1(f, recf, B, others), F->one(), Rational(12)));
    CHECK(isotypic_a1(g, recf, B, others).is_zero_at_precision());

    // linearity: 3 f + g + critical component -> 3
    QExpansion mix = F->from_int(3) * f + g + F->from_int(7) * h;
    CHECK(eq_mod(isotypic_a1(mix, recf, B, others), F->from_int(3), Rational(12)));

    // adjointness: isotypic_a1(T_ell xi) = a_ell(f) isotypic_a1(xi)
    QExpansion big = synthetic_eigenform(F, N * 3, 2, 5, chi, ef, &apf);
    QExpansion tf = hecke_t_ell(F->from_int(3) * big, 3);
    CHECK(eq_mod(isotypic_a1(tf, recf, B, others),
                 ef.at(3) * F->from_int(3), Rational(12)));

    // unseparated competing system -> error
    std::vector<std::map<long, LocalFieldElement>> same = {ef};
    CHECK_THROWS_AS(isotypic_a1(f, recf, B, same), std::domain_error);
}

TEST_CASE("level trace") {
    auto F = make_field(5, 1, {}, 20);
    long N = 125;
    DirichletCharacter chi = DirichletCharacter::trivial(F);
    QExpansion f = synthetic_eigenform(F, N, 2, 1, chi, {{2, F->from_int(2)}});
    QExpansion g = synthetic_eigenform(F, N, 2, 1, chi, {{2, F->from_int(4)}});
    FormSpaceBasis B{{f, g}, 6};

    // equal levels: identity, no data needed
    CHECK(qexp_eq_at_precision(trace_level(f, 6, 6), f));

    // proper trace without data, and non-divisible levels
    CHECK_THROWS_AS(trace_level(f, 6, 3), std::domain_error);
    CHECK_THROWS_AS(trace_level(f, 6, 4, &B), std::invalid_argument);

    // trace then inclusion = multiplication by the index, on synthetic data
    PMatrix incl(F, 2, 2), tr(F, 2, 2);
    incl.at(0, 0) = F->one();
    incl.at(1, 0) = F->one();
    incl.at(1, 1) = F->from_int(2);
    // tr = 2 * incl^{-1}, so tr . incl = 2 . Id
    tr = F->from_int(2) * matrix_inverse(incl);
    DegeneracyData data;
    data.emplace(std::make_pair(6L, 3L), tr);
    QExpansion xi = F->from_int(4) * f + g;
    QExpansion included = expand_in_basis(B, incl.apply(tripp::detail::span_coordinates(B, xi)));
    QExpansion back = trace_level(included, 6, 3, &B, &data);
    CHECK(qexp_eq_mod(back, F->from_int(2) * xi, Rational(14)));
}
