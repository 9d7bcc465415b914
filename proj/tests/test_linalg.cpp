#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tripp/linalg.hpp"

using namespace tripp;

namespace {

PMatrix random_matrix(const FieldPtr& F, int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(0, 1000000);
    PMatrix A(F, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A.at(i, j) = F->from_int(dist(rng));
    return A;
}

/// Oracle for the ordinary projector: E = lim A^{n!}, iterated as
/// A_k = (A_{k-1})^k. A fixed k-range keeps a comfortable convergence margin
/// (val_p(70!) >= 10 for p <= 7); consecutive-stability tests are deceptive
/// because each step still carries an extra factor of k.
PMatrix nfact_projector(const PMatrix& A, int /*digits*/, int max_k = 70) {
    PMatrix cur = A;
    for (long k = 2; k <= max_k; ++k) cur = cur.pow(k);
    return cur;
}

bool matrices_eq_mod(const PMatrix& X, const PMatrix& Y, int digits) {
    for (std::size_t i = 0; i < X.a.size(); ++i)
        if (!eq_mod(X.a[i], Y.a[i], Rational(digits))) return false;
    return true;
}

} // namespace

TEST_CASE("star product of finite polynomials") {
    auto Q11 = make_field(11, 1, {}, 20);
    auto lin = [&](long a) { return FpPolynomial::linear(Q11, Q11->from_int(a)); };

    SUBCASE("(1-aT)*(1-bT) = 1-abT") {
        auto r = star_product(lin(2), lin(3));
        CHECK(r.degree() == 1);
        CHECK(eq_at_precision(r.coeff(1), -Q11->from_int(6)));
    }
    SUBCASE("(1-T) * Q = Q") {
        FpPolynomial Q(Q11, {Q11->one(), Q11->from_int(4), Q11->from_int(9)});
        auto r = star_product(lin(1), Q);
        CHECK(r.degree() == 2);
        for (int i = 0; i <= 2; ++i) CHECK(eq_at_precision(r.coeff(i), Q.coeff(i)));
    }
    SUBCASE("quadratics with roots {2,3} and {5,7}") {
        // P = (1-2T)(1-3T), Q = (1-5T)(1-7T); oracle: expand prod(1 - rho T)
        auto P = lin(2) * lin(3);
        auto Q = lin(5) * lin(7);
        auto R = star_product(P, Q);
        auto oracle = lin(10) * lin(14) * lin(15) * lin(21);
        CHECK(R.degree() == 4);
        for (int i = 0; i <= 4; ++i) CHECK(eq_at_precision(R.coeff(i), oracle.coeff(i)));
    }
    SUBCASE("commutative and associative") {
        auto P = lin(2) * lin(7);
        auto Q = lin(3);
        auto S = lin(5) * lin(6);
        auto ab = star_product(P, Q);
        auto ba = star_product(Q, P);
        for (int i = 0; i <= ab.degree(); ++i) CHECK(eq_at_precision(ab.coeff(i), ba.coeff(i)));
        auto l = star_product(star_product(P, Q), S);
        auto r = star_product(P, star_product(Q, S));
        CHECK(l.degree() == r.degree());
        for (int i = 0; i <= l.degree(); ++i) CHECK(eq_at_precision(l.coeff(i), r.coeff(i)));
    }
}

TEST_CASE("poly_ext_gcd bezout identity") {
    auto Q5 = make_field(5, 1, {}, 20);
    DensePoly a(Q5, {Q5->from_int(-1), Q5->one()});           // x - 1
    DensePoly b(Q5, {Q5->from_int(-5), Q5->one()});           // x - 5
    auto [s, t] = poly_ext_gcd(a, b);
    DensePoly one = s * a + t * b;
    one.trim();
    CHECK(one.degree() == 0);
    CHECK(eq_at_precision(one.coeff(0), Q5->one()));
}

TEST_CASE("char_poly basics") {
    auto Q5 = make_field(5, 1, {}, 20);
    SUBCASE("identity 2x2 -> (x-1)^2") {
        auto f = char_poly(PMatrix::identity(Q5, 2));
        CHECK(eq_at_precision(f.coeff(2), Q5->one()));
        CHECK(eq_at_precision(f.coeff(1), Q5->from_int(-2)));
        CHECK(eq_at_precision(f.coeff(0), Q5->one()));
    }
    SUBCASE("diag(1, p) -> x^2 - (1+p)x + p") {
        PMatrix A(Q5, 2, 2);
        A.at(0, 0) = Q5->one();
        A.at(1, 1) = Q5->from_int(5);
        auto f = char_poly(A);
        CHECK(eq_at_precision(f.coeff(1), Q5->from_int(-6)));
        CHECK(eq_at_precision(f.coeff(0), Q5->from_int(5)));
    }
    SUBCASE("Cayley-Hamilton residual on random 3x3") {
        std::mt19937_64 rng(12345);
        for (int trial = 0; trial < 5; ++trial) {
            PMatrix A = random_matrix(Q5, 3, rng);
            auto f = char_poly(A);
            PMatrix R = eval_at_matrix(f, A);
            for (const auto& e : R.a) {
                auto v = e.valuation();
                CHECK((!v || *v >= Rational(18)));
            }
        }
    }
}

TEST_CASE("newton polygon slopes match diagonal valuations") {
    auto Q7 = make_field(7, 1, {}, 20);
    PMatrix A(Q7, 3, 3);
    A.at(0, 0) = Q7->from_int(3);       // val 0
    A.at(1, 1) = Q7->from_int(7 * 2);   // val 1
    A.at(2, 2) = Q7->from_int(49 * 4);  // val 2
    auto np = newton_polygon(char_poly(A));
    auto rv = np.root_valuations();
    REQUIRE(rv.size() == 3);
    CHECK(rv[0].first == Rational(2));
    CHECK(rv[1].first == Rational(1));
    CHECK(rv[2].first == Rational(0));
    for (const auto& [v, m] : rv) CHECK(m == 1);
}

TEST_CASE("slope factorization") {
    auto Q5 = make_field(5, 1, {}, 20);
    SUBCASE("x^2 - (1+p)x + p at cut 1/2") {
        DensePoly f(Q5, {Q5->from_int(5), Q5->from_int(-6), Q5->one()});
        auto [below, above] = slope_factorization(f, Rational(1, 2));
        CHECK(below.degree() == 1);
        CHECK(above.degree() == 1);
        // below = x - 1, above = x - 5
        CHECK(eq_at_precision(below.coeff(0), Q5->from_int(-1)));
        CHECK(eq_at_precision(above.coeff(0), Q5->from_int(-5)));
    }
    SUBCASE("degree 4 over Q7 from known factors") {
        auto Q7 = make_field(7, 1, {}, 20);
        // unit roots 2, 3; slope-1 roots 7*3, 7*5
        DensePoly f = DensePoly(Q7, {Q7->from_int(-2), Q7->one()}) *
                      DensePoly(Q7, {Q7->from_int(-3), Q7->one()}) *
                      DensePoly(Q7, {Q7->from_int(-21), Q7->one()}) *
                      DensePoly(Q7, {Q7->from_int(-35), Q7->one()});
        auto [below, above] = slope_factorization(f, Rational(1, 2));
        DensePoly eb = DensePoly(Q7, {Q7->from_int(-2), Q7->one()}) *
                       DensePoly(Q7, {Q7->from_int(-3), Q7->one()});
        DensePoly ea = DensePoly(Q7, {Q7->from_int(-21), Q7->one()}) *
                       DensePoly(Q7, {Q7->from_int(-35), Q7->one()});
        REQUIRE(below.degree() == 2);
        REQUIRE(above.degree() == 2);
        for (int i = 0; i <= 2; ++i) {
            CHECK(eq_mod(below.coeff(i), eb.coeff(i), Rational(15)));
            CHECK(eq_mod(above.coeff(i), ea.coeff(i), Rational(15)));
        }
        // and the product reproduces the input
        DensePoly resid = f - below * above;
        resid.trim();
        CHECK(resid.degree() < 0);
    }
    SUBCASE("slope at the cut is an error") {
        DensePoly f(Q5, {Q5->from_int(-5), Q5->zero(), Q5->one()}); // x^2 - 5, slope 1/2
        CHECK_THROWS_AS(slope_factorization(f, Rational(1, 2)), std::domain_error);
    }
}

TEST_CASE("unit root projector") {
    auto Q5 = make_field(5, 1, {}, 20);
    SUBCASE("diag(u, p*w) -> diag(1, 0)") {
        PMatrix A(Q5, 2, 2);
        A.at(0, 0) = Q5->from_int(3);
        A.at(1, 1) = Q5->from_int(5 * 2);
        PMatrix E = unit_root_projector(A);
        CHECK(eq_at_precision(E.at(0, 0), Q5->one()));
        CHECK(E.at(0, 1).is_zero_at_precision());
        CHECK(E.at(1, 0).is_zero_at_precision());
        CHECK(E.at(1, 1).is_zero_at_precision());
    }
    SUBCASE("nilpotent -> 0") {
        PMatrix A(Q5, 2, 2);
        A.at(0, 1) = Q5->from_int(1);
        PMatrix E = unit_root_projector(A);
        CHECK(E.is_zero_at_precision());
    }
    SUBCASE("non-diagonal 2x2, char poly x^2-(1+p)x+p, oracle A^{n!}") {
        // conjugate diag(1,5) by [[1,1],[0,1]]
        PMatrix A(Q5, 2, 2);
        A.at(0, 0) = Q5->one();
        A.at(0, 1) = Q5->from_int(4);
        A.at(1, 1) = Q5->from_int(5);
        PMatrix E = unit_root_projector(A);
        CHECK(matrix_rank(E) == 1);
        CHECK(matrices_eq_mod(E * E, E, 18));
        CHECK(matrices_eq_mod(E * A, A * E, 18));
        PMatrix O = nfact_projector(A, 10);
        CHECK(matrices_eq_mod(E, O, 10));
    }
    SUBCASE("oracle equivalence on random 4x4") {
        std::mt19937_64 rng(777);
        int done = 0;
        while (done < 5) {
            PMatrix A = random_matrix(Q5, 4, rng);
            // separated slopes: every root valuation 0 or >= 1/2, else the
            // 1/2-cut and the n!-limit measure different subspaces
            bool ok = true;
            for (const auto& [v, m] : newton_polygon(char_poly(A)).root_valuations())
                if (v > Rational(0) && v < Rational(1, 2)) ok = false;
            if (!ok) continue;
            PMatrix E;
            try {
                E = unit_root_projector(A);
            } catch (const std::domain_error&) {
                continue;
            }
            PMatrix O = nfact_projector(A, 8);
            CHECK(matrices_eq_mod(E, O, 8));
            CHECK(matrices_eq_mod(E * E, E, 15));
            CHECK(matrices_eq_mod(E * A, A * E, 15));
            ++done;
        }
    }
}

TEST_CASE("linearize_frobenius") {
    SUBCASE("d=1 is the identity operation") {
        auto Q5 = make_field(5, 1, {}, 20);
        std::mt19937_64 rng(5);
        PMatrix A = random_matrix(Q5, 3, rng);
        PMatrix Phi = linearize_frobenius(A, 1);
        CHECK(matrices_eq_mod(Phi, A, 20));
    }
    SUBCASE("scalar over Q_{p^2}: Phi = mu * sigma(mu)") {
        auto F = make_field(3, 2, {}, 20);
        auto mu = F->alpha_gen() + F->from_int(4);
        PMatrix A(F, 1, 1);
        A.at(0, 0) = mu;
        PMatrix Phi = linearize_frobenius(A, 2);
        CHECK(eq_at_precision(Phi.at(0, 0), mu * mu.frobenius()));
    }
    SUBCASE("supercuspidal shape: phi = mu on both basis vectors, a=1") {
        auto F = make_field(3, 2, {}, 20);
        auto mu = F->from_int(12); // in Q_p: sigma(mu) = mu, Phi = mu^2
        PMatrix A(F, 2, 2);
        A.at(0, 0) = mu;
        A.at(1, 1) = mu;
        PMatrix Phi = linearize_frobenius(A, 2);
        CHECK(eq_at_precision(Phi.at(0, 0), mu * mu));
        CHECK(eq_at_precision(Phi.at(1, 1), mu * mu));
    }
    SUBCASE("wrong d errors") {
        auto Q5 = make_field(5, 1, {}, 20);
        PMatrix A = PMatrix::identity(Q5, 2);
        CHECK_THROWS_AS(linearize_frobenius(A, 2), std::invalid_argument);
    }
}

TEST_CASE("solve, inverse, determinant") {
    auto Q7 = make_field(7, 1, {}, 25);
    std::mt19937_64 rng(99);
    PMatrix A = random_matrix(Q7, 4, rng);
    std::vector<LocalFieldElement> b;
    for (int i = 0; i < 4; ++i) b.push_back(Q7->from_int(i + 3));
    auto x = solve_linear(A, b);
    auto Ax = A.apply(x);
    for (int i = 0; i < 4; ++i) CHECK(eq_mod(Ax[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)], Rational(20)));
    PMatrix inv = matrix_inverse(A);
    CHECK(matrices_eq_mod(inv * A, PMatrix::identity(Q7, 4), 20));
    // det of triangular-by-construction product sanity: det(AB) = det(A)det(B)
    PMatrix B = random_matrix(Q7, 4, rng);
    CHECK(eq_mod(determinant(A * B), determinant(A) * determinant(B), Rational(20)));
}
