// End-to-end acceptance checks, one per headline property of the library.
// Each check prints a single pass/fail line with its runtime; the process
// exits nonzero if any check fails.

#include <chrono>
#include <iostream>
#include <random>

#include "tripp/cusp.hpp"
#include "tripp/io.hpp"
#include "tripp/synthetic.hpp"

using namespace tripp;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool ok, double seconds, double budget) {
    bool in_time = seconds <= budget;
    std::cout << "criterion " << index << " (" << name
              << "): " << ((ok && in_time) ? "pass" : "FAIL") << "  [" << seconds << " s, budget "
              << budget << " s]\n";
    if (!(ok && in_time)) ++g_failures;
}

template <typename Fn>
void timed(int index, const char* name, double budget, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        std::cout << "  exception: " << e.what() << "\n";
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(index, name, ok, dt, budget);
}

QExpansion random_depleted(const FieldPtr& F, long N, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(1, 1000000);
    QExpansion xi(F, N);
    for (long n = 1; n <= N; ++n) {
        if (n % F->p == 0) continue;
        xi.set_coeff(n, F->from_int(dist(rng)));
    }
    return xi;
}

LocalFieldElement closed_form(const FieldPtr& F, int k, int l, int m) {
    int r = (k + l + m - 6) / 2;
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(r - k + 2));
    LocalFieldElement e = F->from_mpz(fact);
    if ((k - 2) % 2 == 1) e = -e;
    return e;
}

// --- 1: the theorem constant from the q-expansion calculus ------------------

bool constant_reproduction() {
    auto F = make_field(5, 1, {}, 30);
    std::mt19937_64 rng(20260823);
    QExpansion xi2 = random_depleted(F, 40, rng), xi3 = random_depleted(F, 40, rng);
    int count = 0;
    for (int k = 2; k <= 6; ++k)
        for (int l = 2; l <= 6; ++l)
            for (int m = 2; m <= 6; ++m) {
                if ((k + l + m) % 2 != 0) continue;
                if (k >= l + m || l >= k + m || m >= k + l) continue;
                auto t0 = std::chrono::steady_clock::now();
                LocalFieldElement got = constant_check(k, l, m, xi2, xi3);
                double dt =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (dt > 10.0) return false;
                if (!eq_at_precision(got, closed_form(F, k, l, m))) return false;
                if (got.known_precision < Rational(10)) return false;
                ++count;
            }
    return count >= 8;
}

// --- 2: eigenvalue audit of the triple tensor module ------------------------

bool convenience_audit() {
    auto F = make_field(5, 1, {{mpz_class(-5)}, {mpz_class(0)}}, 30);
    LocalFieldElement pi = F->uniformizer();
    FpPolynomial Q = FpPolynomial::linear(F, F->one());
    auto mu = [&](int nu, long unit) {
        // ord = (1 - nu) / 2 in units of val(p) = 1
        return F->from_int(unit) * pi.pow(1 - nu);
    };

    struct Case {
        int k, l, m;
        LocalFieldElement ap, mug, muh;
    };
    std::vector<Case> cases = {
        // weight-2 instance engineered to hit a unit eigenvalue exactly
        {2, 2, 2, F->one(), pi.inverse(), pi.inverse()},
        {3, 3, 2, F->from_int(3), mu(3, 2), mu(2, 3)},
        {4, 4, 2, F->from_int(3), mu(4, 2), mu(2, 3)},
        {5, 4, 3, F->from_int(3), mu(4, 2), mu(3, 3)},
    };
    for (const auto& c : cases) {
        DfghModule M =
            build_dfgh(F, c.ap, F->one(), c.k, {c.mug, c.l}, {c.muh, c.m}, 1);
        Rational hi(c.k, 2), lo = Rational(1) - Rational(c.k, 2);
        int nhi = 0, nlo = 0;
        for (const auto& e : M.audit.entries) {
            if (e.abs_exponent == hi)
                ++nhi;
            else if (e.abs_exponent == lo)
                ++nlo;
            else
                return false;
        }
        if (nhi == 0 || nlo == 0) return false;
        ConvVerdict v = convenient_check(M.D, Q).verdict;
        if ((c.k > 2) != (v == ConvVerdict::convenient)) return false;
    }

    // weight-2 semistable f-leg: the kernel-of-N eigenvalues have |.| = p
    DfghModule S = build_dfgh(F, F->from_int(2), F->one(), 2,
                              {pi.inverse() * F->from_int(2), 2},
                              {pi.inverse() * F->from_int(3), 2}, 1, true);
    if (S.D.n_linear().is_zero_at_precision()) return false;
    for (const auto& e : S.audit.entries)
        if (e.tau[0] == 'w' && !(e.abs_exponent == Rational(1))) return false;
    return true;
}

// --- 3: slope projector against the (U_p)^{n!} iteration --------------------

PMatrix nfact_projector(const PMatrix& A, int max_k = 71) {
    PMatrix cur = A;
    for (long k = 2; k <= max_k; ++k) cur = cur.pow(k);
    return cur;
}

// mod-p polynomial helpers for the convergence filter below
using Polp = std::vector<long>;

long modp_inv(long a, long p) {
    long r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

Polp polp_trim(Polp f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

// remainder of a modulo monic-up-to-unit b, in place
Polp polp_mod(Polp a, const Polp& b, long p) {
    a = polp_trim(std::move(a));
    long inv = modp_inv(b.back(), p);
    while (a.size() >= b.size()) {
        long q = a.back() * inv % p;
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::size_t k = a.size() - b.size() + j;
            a[k] = ((a[k] - q * b[j]) % p + p) % p;
        }
        a = polp_trim(std::move(a));
        if (a.empty()) break;
    }
    return a;
}

Polp polp_mulmod(const Polp& a, const Polp& b, const Polp& m, long p) {
    Polp r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return polp_mod(std::move(r), m, p);
}

Polp polp_gcd(Polp a, Polp b, long p) {
    a = polp_trim(std::move(a));
    b = polp_trim(std::move(b));
    while (!b.empty()) {
        Polp r = polp_mod(a, b, p);
        a = b;
        b = r;
    }
    return a;
}

// x^e mod m over F_p
Polp polp_xpow(long e, const Polp& m, long p) {
    Polp r = {1}, base = polp_mod({0, 1}, m, p);
    while (e) {
        if (e & 1) r = polp_mulmod(r, base, m, p);
        base = polp_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

// characteristic polynomial of a small integer matrix over F_p, by Leibniz
// expansion of det(xI - M) (fine for the sizes used here)
Polp charpoly_modp(const std::vector<std::vector<long>>& M, long p) {
    int n = static_cast<int>(M.size());
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Polp total(static_cast<std::size_t>(n) + 1, 0);
    auto entry = [&](int i, int j) -> Polp {
        long c = ((-M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) % p + p) % p;
        if (i == j) return {c, 1};
        return {c};
    };
    auto accumulate = [&](int sign) {
        Polp prod = {1};
        for (int i = 0; i < n; ++i) {
            Polp e = entry(i, perm[static_cast<std::size_t>(i)]);
            Polp next(prod.size() + e.size() - 1, 0);
            for (std::size_t a = 0; a < prod.size(); ++a)
                for (std::size_t b = 0; b < e.size(); ++b)
                    next[a + b] = (next[a + b] + prod[a] * e[b]) % p;
            prod = next;
        }
        long s = (sign > 0) ? 1 : p - 1;
        for (std::size_t i = 0; i < prod.size() && i < total.size(); ++i)
            total[i] = (total[i] + s * prod[i]) % p;
    };
    // iterate all permutations with signs via Heap's algorithm
    std::vector<int> ctr(static_cast<std::size_t>(n), 0);
    int sign = 1;
    accumulate(sign);
    for (int i = 0; i < n;) {
        if (ctr[static_cast<std::size_t>(i)] < i) {
            int j = (i % 2 == 0) ? 0 : ctr[static_cast<std::size_t>(i)];
            std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(i)]);
            sign = -sign;
            accumulate(sign);
            ++ctr[static_cast<std::size_t>(i)];
            i = 0;
        } else {
            ctr[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
    }
    return total;
}

// The n!-iterate at n = 71 kills every unit eigenvalue whose multiplicative
// order only involves primes <= 71. An irreducible residue-degree-5 factor of
// the unit part puts eigenvalues in F_{p^5}^*, whose order carries a prime
// beyond that bound (71 for p = 5, 2801 for p = 7); those matrices converge
// too, but only at iteration depths outside the time budget, so they are
// skipped just like non-separated slopes.
bool has_degree5_unit_factor(const std::vector<std::vector<long>>& M, long p) {
    Polp c = polp_trim(charpoly_modp(M, p));
    std::size_t shift = 0;
    while (shift < c.size() && c[shift] == 0) ++shift;
    Polp u(c.begin() + static_cast<long>(shift), c.end()); // the unit part
    if (u.size() < 6) return false;                        // degree < 5
    long p5 = p * p * p * p * p;
    // gcd(u, x^{p^5} - x) collects the degree-1 and degree-5 factors
    Polp rx = polp_xpow(p5, u, p);
    rx.resize(std::max<std::size_t>(rx.size(), 2), 0);
    rx[1] = ((rx[1] - 1) % p + p) % p;
    Polp g5 = polp_gcd(u, rx, p);
    if (g5.size() < 6) return false;
    // strip the degree-1 part with gcd(g5, x^p - x)
    Polp sx = polp_xpow(p, g5, p);
    sx.resize(std::max<std::size_t>(sx.size(), 2), 0);
    sx[1] = ((sx[1] - 1) % p + p) % p;
    Polp g1 = polp_gcd(g5, sx, p);
    return g5.size() >= g1.size() + 5;
}

bool matrices_eq_mod(const PMatrix& X, const PMatrix& Y, int digits) {
    for (std::size_t i = 0; i < X.a.size(); ++i)
        if (!eq_mod(X.a[i], Y.a[i], Rational(digits))) return false;
    return true;
}

bool ordinary_projector_equivalence() {
    int compared = 0;
    for (long p : {5L, 7L}) {
        auto F = make_field(p, 1, {}, 25);
        std::mt19937_64 rng(p * 1000 + 1);
        std::uniform_int_distribution<long> dist(-50, 50);
        std::uniform_int_distribution<int> sz(2, 6);
        int done = 0;
        while (done < 10) {
            int n = sz(rng);
            PMatrix A(F, n, n);
            std::vector<std::vector<long>> res(static_cast<std::size_t>(n),
                                               std::vector<long>(static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    long v = dist(rng);
                    A.at(i, j) = F->from_int(v);
                    res[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ((v % p) + p) % p;
                }
            if (has_degree5_unit_factor(res, p)) continue;
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
            if (!matrices_eq_mod(E, nfact_projector(A), 8)) return false;
            ++done;
            ++compared;
        }
    }
    return compared >= 20;
}

// --- 4: invariance of the determinant polynomial ----------------------------

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

bool det_invariance() {
    auto F = make_field(7, 1, {}, 5); // exact arithmetic mod 7^5
    std::mt19937_64 rng(4242);
    for (int r1 = 0; r1 <= 4; ++r1)
        for (int r2 = r1; r2 <= 4; ++r2)
            for (int r3 = r2; r3 <= 4; ++r3) {
                if ((r1 + r2 + r3) % 2 != 0) continue;
                if (r1 + r2 < r3) continue; // balanced (non-strict)
                SymPowerElement Pr = det_polynomial(F, r1, r2, r3);
                int r = (r1 + r2 + r3) / 2;
                for (int trial = 0; trial < 100; ++trial) {
                    PMatrix g = random_sl2(F, rng);
                    if (!sym_eq_at_precision(gl2_act(g, Pr), Pr)) return false;
                }
                for (int trial = 0; trial < 10; ++trial) {
                    PMatrix h = random_gl2(F, rng);
                    if (!sym_eq_at_precision(gl2_act(h, Pr), determinant(h).pow(-r) * Pr))
                        return false;
                }
            }
    return true;
}

// --- 5: the cohomology complex ----------------------------------------------

PhiNModuleData plain_module(const FieldPtr& F, int rank, int d) {
    PhiNModuleData D;
    D.L = F;
    D.d = d;
    D.e = 1;
    D.rank = rank;
    auto zt = [&] { return Vec(static_cast<std::size_t>(d), F->zero()); };
    D.phi.assign(static_cast<std::size_t>(rank),
                 std::vector<Vec>(static_cast<std::size_t>(rank), zt()));
    D.nmat = D.phi;
    int n = rank * d;
    D.comparison = PMatrix::identity(F, n);
    D.filtration = {{0, PMatrix::identity(F, n)}, {1, PMatrix(F, n, 0)}};
    return D;
}

PhiNModuleData random_module(const FieldPtr& F, int rank, int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(1, 1000000);
    PhiNModuleData D = plain_module(F, rank, d);
    for (auto& row : D.phi)
        for (auto& entry : row)
            for (auto& c : entry) c = F->from_int(dist(rng));
    return D;
}

Vec random_vec(const FieldPtr& F, int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(0, 1000000);
    Vec v(static_cast<std::size_t>(n), F->zero());
    for (auto& x : v) x = F->from_int(dist(rng));
    return v;
}

// random rank-2 crystalline instance with unit diagonal Frobenius and
// Fil^0 = 0, on which Q(phi) and Q(p phi) are certified bijective
PhiNModuleData random_convenient(const FieldPtr& F, const FpPolynomial& Q,
                                 std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(1, 1000000);
    for (;;) {
        PhiNModuleData D = plain_module(F, 2, 1);
        long a = dist(rng), b = dist(rng);
        if (a % F->p == 0 || b % F->p == 0) continue;
        D.phi[0][0][0] = F->from_int(a);
        D.phi[1][1][0] = F->from_int(b);
        D.filtration = {{-1, PMatrix::identity(F, 2)}, {0, PMatrix(F, 2, 0)}};
        PMatrix Phi = D.frob_linearized();
        auto v1 = determinant(eval_at_matrix(Q, Phi)).valuation();
        auto v2 = determinant(eval_at_matrix(Q, F->from_int(F->p) * Phi)).valuation();
        if (v1 && v2 && *v1 == Rational(0) && *v2 == Rational(0)) return D;
    }
}

bool cohomology_suite() {
    auto F = make_field(5, 1, {}, 20);
    std::mt19937_64 rng(555);
    FpPolynomial Q = FpPolynomial::linear(F, F->one());

    // d after d vanishes on random cochains
    for (int t = 0; t < 5; ++t) {
        PhiNModuleData D = random_module(F, 2, 2, rng);
        for (StVariant variant : {StVariant::semilinear, StVariant::linearized}) {
            StComplex C = build_st_complex(D, Q, variant);
            if (!(C.d1 * C.d0).is_zero_at_precision()) return false;
            StCochain c;
            c.degree = 0;
            c.u = random_vec(F, C.dst, rng);
            c.v = C.fil0cols.apply(random_vec(F, C.f0, rng));
            if (!tripp::detail::vzero(C.apply_d1(C.apply_d0(c)).z)) return false;
        }
    }

    // semilinear H0 embeds into the linearized H0
    for (int t = 0; t < 10; ++t) {
        PhiNModuleData D = random_module(F, 2, 2, rng);
        StCohomology A = st_cohomology(D, Q, StVariant::semilinear);
        StComplex Cl = build_st_complex(D, Q, StVariant::linearized);
        if (A.dim(0) > st_cohomology(D, Q, StVariant::linearized).dim(0)) return false;
        for (const auto& h : A.h0)
            if (!tripp::detail::vzero(Cl.d0.apply(h))) return false;
    }

    // explicit H1 inverse y - Q(Phi)^{-1} w on bijective instances
    FpPolynomial Q4 = FpPolynomial::linear(F, F->from_int(4));
    for (int t = 0; t < 10; ++t) {
        PhiNModuleData D = random_convenient(F, Q4, rng);
        StCohomology H = st_cohomology(D, Q4, StVariant::linearized);
        if (H.dim(1) != 2) return false;
        PMatrix Qinv = matrix_inverse(eval_at_matrix(Q4, D.frob_linearized()));
        for (const auto& rvec : H.h1) {
            StCochain c = H.complex.unflatten1(rvec);
            StCochain back;
            back.degree = 1;
            back.w = tripp::detail::zero_vec(F, 2);
            back.x = tripp::detail::zero_vec(F, 2);
            back.y = tripp::detail::vsub(c.y, Qinv.apply(c.w));
            Vec diff = tripp::detail::vsub(rvec, H.complex.flatten1(back));
            if (!H.coboundary_witness(diff).has_value()) return false;
        }
    }

    // change-of-polynomial short exact sequence, by dimension count
    std::uniform_int_distribution<long> dist(1, 1000000);
    for (int t = 0; t < 10; ++t) {
        PhiNModuleData D = random_convenient(F, Q4, rng);
        long c = dist(rng);
        if (c % F->p == 0) ++c;
        ChangePolyReport rep =
            change_poly(D, Q, FpPolynomial::linear(F, F->from_int(c)), StVariant::semilinear);
        if (!rep.chain_map_ok || !rep.ses_ok) return false;
    }
    return true;
}

// --- 6: cup product independence of the Bezout choice -----------------------

bool cup_product_homotopy() {
    auto F = make_field(5, 1, {}, 20);
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> dist(1, 1000);
    LocalFieldElement lambda = F->from_int(2);

    for (int t = 0; t < 10; ++t) {
        // D1: companion matrix of x^2 - s x + q; P = (T^2 - s T + q)/q
        // vanishes on phi1, so every degree-0 (u, u) is a cocycle
        long s = dist(rng), q = dist(rng);
        if (q % F->p == 0) ++q;
        PhiNModuleData D1 = plain_module(F, 2, 1);
        D1.phi[0][1][0] = -F->from_int(q);
        D1.phi[1][0][0] = F->one();
        D1.phi[1][1][0] = F->from_int(s);
        LocalFieldElement p1 = -F->from_int(s) * F->from_int(q).pow(-1);
        LocalFieldElement p2 = F->from_int(q).pow(-1);
        FpPolynomial P(F, {F->one(), p1, p2});

        // D2: rank 1 with unit phi2 = mu; Q = 1 - T/(p mu) kills p phi2,
        // so every degree-1 (w, x, y) is a cocycle
        long mval = dist(rng);
        if (mval % F->p == 0) ++mval;
        PhiNModuleData D2 = plain_module(F, 1, 1);
        D2.phi[0][0][0] = F->from_int(mval);
        LocalFieldElement gamma = (F->from_int(F->p) * F->from_int(mval)).pow(-1);
        FpPolynomial Q = FpPolynomial::linear(F, gamma);

        // Bezout choice A: S(XY) = P(X) mod Q(Y), remainder divided out
        FpPolynomial S = star_product(P, Q);
        BivarPoly aA = BivarPoly::constant(F, F->one());
        BivarPoly bA(F);
        bA.c = {{F->zero()}, {-p1}, {-p2, -p2 * gamma}};
        // choice B = A shifted by the trivial relation Q(Y) P(X) - P(X) Q(Y)
        BivarPoly aB(F);
        aB.c = {{F->one() + F->one(), -gamma}}; // 1 + Q(Y)
        BivarPoly bB(F);
        bB.c = {{-F->one()}, {-p1 - p1}, {-p2 - p2, -p2 * gamma}};
        if (!bezout_identity_holds(P, Q, aA, bA)) return false;
        if (!bezout_identity_holds(P, Q, aB, bB)) return false;

        StCochain c1;
        c1.degree = 0;
        c1.u = {F->from_int(dist(rng)), F->from_int(dist(rng))};
        c1.v = c1.u;
        StCochain c2;
        c2.degree = 1;
        c2.w = {F->from_int(dist(rng))};
        c2.x = {F->from_int(dist(rng))};
        c2.y = {F->from_int(dist(rng))};

        PhiNModuleData T = tensor_module(D1, D2);
        StCohomology HT = st_cohomology(T, S, StVariant::semilinear);
        const StComplex& CT = HT.complex;
        StCochain rA = st_cup(D1, c1, P, D2, c2, Q, aA, bA, lambda);
        StCochain rB = st_cup(D1, c1, P, D2, c2, Q, aB, bB, lambda);
        if (!tripp::detail::vzero(CT.apply_d1(rA).z)) return false;
        if (!tripp::detail::vzero(CT.apply_d1(rB).z)) return false;
        Vec diff = tripp::detail::vsub(CT.flatten1(rA), CT.flatten1(rB));
        if (!HT.coboundary_witness(diff).has_value()) return false;
    }
    return true;
}

// --- 7: the negative-power Serre derivative as a p-adic limit ---------------

bool serre_derivative_limit() {
    auto F = make_field(5, 1, {}, 30);
    std::mt19937_64 rng(2468);
    QExpansion xi = random_depleted(F, 60, rng);
    for (int t : {-1, -2}) {
        QExpansion target = serre_d(xi, t);
        for (int m = 0; m <= 6; ++m) {
            long e = t + 4; // (p-1) p^m = 4 * 5^m
            for (int i = 0; i < m; ++i) e = (e - t) * 5 + t;
            QExpansion approx = serre_d(xi, e);
            for (long n = 1; n <= xi.q_precision; ++n) {
                if (n % 5 == 0) continue;
                LocalFieldElement err = approx.coeff(n) - target.coeff(n);
                auto v = err.valuation();
                if (v && *v < Rational(m)) return false;
            }
        }
    }
    return true;
}

// --- 8: planted-period end-to-end -------------------------------------------

bool planted_period() {
    PlantedTriple P = make_planted_triple();
    PeriodReport r = compute_period(P.tc, P.B, P.others);
    if (!eq_at_precision(r.I_p, P.u)) return false;
    if (r.precision < Rational(20)) return false;
    if (r.convenience.verdict != ConvVerdict::convenient || !r.polys.certified) return false;
    // the same run through the serialized interfaces
    TripleFile tf = parse_triple_text(emit_triple(P.tc));
    if (!tf.violations.empty()) return false;
    BasisFile bf = parse_basis_text(emit_basis(P.B, P.others), tf.config.F);
    PeriodReport r2 = compute_period(tf.config, bf.basis, bf.competing);
    return to_literal(r2.I_p) == to_literal(r.I_p);
}

// --- 9: the primitive of xi omega^{nu-2} ------------------------------------

bool primitive_equation() {
    auto F = make_field(5, 1, {}, 30);
    std::mt19937_64 rng(13579);
    for (int nu = 2; nu <= 8; ++nu) {
        for (int trial = 0; trial < 5; ++trial) {
            QExpansion xi = random_depleted(F, 40, rng);
            FormalOneForm w = nabla(primitive_flat(xi, nu));
            if (!qexp_eq_at_precision(w.comp(0), xi)) return false;
            for (int j = 1; j <= nu - 2; ++j)
                if (!w.comp(j).is_zero_at_precision()) return false;
        }
    }
    return true;
}

} // namespace

int main() {
    timed(1, "constant reproduction", 90.0, constant_reproduction);
    timed(2, "convenience audit", 1.0 * 10, convenience_audit);
    timed(3, "ordinary projector equivalence", 30.0, ordinary_projector_equivalence);
    timed(4, "det polynomial invariance", 10.0, det_invariance);
    timed(5, "cohomology complex suite", 20.0, cohomology_suite);
    timed(6, "cup product homotopy independence", 20.0, cup_product_homotopy);
    timed(7, "Serre derivative limit", 5.0, serre_derivative_limit);
    timed(8, "planted period end-to-end", 30.0, planted_period);
    timed(9, "primitive equation", 5.0, primitive_equation);
    if (g_failures == 0) {
        std::cout << "all acceptance checks passed\n";
        return 0;
    }
    std::cout << g_failures << " acceptance check(s) FAILED\n";
    return 1;
}
