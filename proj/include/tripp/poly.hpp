#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "tripp/padic.hpp"

namespace tripp {

/// Dense polynomial over a LocalField, coefficient of x^i at index i.
struct DensePoly {
    FieldPtr field;
    std::vector<LocalFieldElement> c;

    explicit DensePoly(FieldPtr F) : field(std::move(F)) {}
    DensePoly(FieldPtr F, std::vector<LocalFieldElement> coeffs)
        : field(std::move(F)), c(std::move(coeffs)) {}

    static DensePoly constant(const FieldPtr& F, const LocalFieldElement& a) {
        return {F, {a}};
    }
    static DensePoly x(const FieldPtr& F) { return {F, {F->zero(), F->one()}}; }

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (!c[static_cast<std::size_t>(i)].is_zero_at_precision()) return i;
        return -1;
    }

    void trim() {
        while (!c.empty() && c.back().is_zero_at_precision()) c.pop_back();
    }

    LocalFieldElement coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c.size())) return field->zero();
        return c[static_cast<std::size_t>(i)];
    }

    LocalFieldElement eval(const LocalFieldElement& x) const {
        LocalFieldElement acc = field->zero();
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            acc = acc * x + c[static_cast<std::size_t>(i)];
        return acc;
    }

    friend DensePoly operator+(const DensePoly& a, const DensePoly& b) {
        DensePoly r(a.field);
        std::size_t n = std::max(a.c.size(), b.c.size());
        for (std::size_t i = 0; i < n; ++i) r.c.push_back(a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i)));
        return r;
    }

    friend DensePoly operator-(const DensePoly& a, const DensePoly& b) {
        DensePoly r(a.field);
        std::size_t n = std::max(a.c.size(), b.c.size());
        for (std::size_t i = 0; i < n; ++i) r.c.push_back(a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i)));
        return r;
    }

    friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
        DensePoly r(a.field);
        if (a.c.empty() || b.c.empty()) return r;
        r.c.assign(a.c.size() + b.c.size() - 1, a.field->zero());
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j)
                r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
        return r;
    }

    friend DensePoly operator*(const LocalFieldElement& s, const DensePoly& a) {
        DensePoly r(a.field);
        for (const auto& x : a.c) r.c.push_back(s * x);
        return r;
    }

    DensePoly operator-() const {
        DensePoly r(field);
        for (const auto& x : c) r.c.push_back(-x);
        return r;
    }

    /// Quotient and remainder; the divisor's leading coefficient must be a
    /// determinate nonzero value.
    friend std::pair<DensePoly, DensePoly> divmod(const DensePoly& a, const DensePoly& b) {
        int db = b.degree();
        if (db < 0) throw std::domain_error("divmod: division by zero polynomial");
        LocalFieldElement lead_inv = b.c[static_cast<std::size_t>(db)].inverse();
        DensePoly rem = a;
        rem.trim();
        DensePoly q(a.field);
        int da = rem.degree();
        if (da < db) return {q, rem};
        q.c.assign(static_cast<std::size_t>(da - db + 1), a.field->zero());
        while ((da = rem.degree()) >= db) {
            LocalFieldElement f = rem.c[static_cast<std::size_t>(da)] * lead_inv;
            q.c[static_cast<std::size_t>(da - db)] = f;
            for (int i = 0; i <= db; ++i) {
                std::size_t k = static_cast<std::size_t>(da - db + i);
                rem.c[k] = rem.c[k] - f * b.coeff(i);
            }
            rem.c.resize(static_cast<std::size_t>(da)); // forced cancellation of the top term
        }
        return {q, rem};
    }

    DensePoly derivative() const {
        DensePoly r(field);
        for (std::size_t i = 1; i < c.size(); ++i)
            r.c.push_back(field->from_int(static_cast<long>(i)) * c[i]);
        return r;
    }
};

/// Extended gcd for coprime polynomials over L: returns (s, t) with
/// s a + t b = 1. Throws when a nonunit gcd is detected at working precision.
inline std::pair<DensePoly, DensePoly> poly_ext_gcd(const DensePoly& a, const DensePoly& b) {
    const FieldPtr& F = a.field;
    DensePoly r0 = a, r1 = b;
    r0.trim(); r1.trim();
    DensePoly s0 = DensePoly::constant(F, F->one()), s1(F);
    DensePoly t0(F), t1 = DensePoly::constant(F, F->one());
    while (r1.degree() >= 0) {
        auto [q, r2] = divmod(r0, r1);
        DensePoly s2 = s0 - q * s1;
        DensePoly t2 = t0 - q * t1;
        r0 = r1; r1 = r2; r1.trim();
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    if (r0.degree() != 0)
        throw std::domain_error("poly_ext_gcd: inputs share a common factor at working precision");
    LocalFieldElement inv = r0.c[0].inverse();
    return {inv * s0, inv * t0};
}

namespace detail {

/// Determinant of a square matrix with entries in L[x], by column-subset
/// dynamic programming (exact division-free Laplace expansion). Intended for
/// the small Sylvester matrices of the star product.
inline DensePoly poly_matrix_det(const std::vector<std::vector<DensePoly>>& M, const FieldPtr& F) {
    const int n = static_cast<int>(M.size());
    if (n == 0) return DensePoly::constant(F, F->one());
    if (n > 20) throw std::invalid_argument("poly_matrix_det: matrix too large");
    // f[S] = det of the submatrix on rows 0..popcount(S)-1 and columns S
    std::vector<DensePoly> f(static_cast<std::size_t>(1) << n, DensePoly(F));
    f[0] = DensePoly::constant(F, F->one());
    for (unsigned S = 1; S < (1u << n); ++S) {
        int row = __builtin_popcount(S) - 1;
        DensePoly acc(F);
        int pos = 0; // index of the column within the subset
        for (int j = 0; j < n; ++j) {
            if (!(S & (1u << j))) continue;
            const DensePoly& prev = f[S & ~(1u << j)];
            if (prev.c.empty() && __builtin_popcount(S & ~(1u << j)) > 0 && prev.degree() < 0) {
                ++pos;
                continue;
            }
            DensePoly term = M[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] * prev;
            if (pos % 2 == 0) acc = acc + term;
            else acc = acc - term;
            ++pos;
        }
        acc.trim();
        f[S] = acc;
    }
    return f[(1u << n) - 1];
}

} // namespace detail

/// Element of 1 + T*L[T]: the multiplicative monoid of "finite polynomials".
struct FpPolynomial {
    FieldPtr field;
    std::vector<LocalFieldElement> c; // c[0] = 1

    explicit FpPolynomial(FieldPtr F) : field(std::move(F)) { c.push_back(field->one()); }
    FpPolynomial(FieldPtr F, std::vector<LocalFieldElement> coeffs)
        : field(std::move(F)), c(std::move(coeffs)) {
        if (c.empty() || !eq_at_precision(c[0], field->one()))
            throw std::invalid_argument("FpPolynomial: constant term must be 1");
    }

    /// 1 - a T
    static FpPolynomial linear(const FieldPtr& F, const LocalFieldElement& a) {
        return {F, {F->one(), -a}};
    }

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (!c[static_cast<std::size_t>(i)].is_zero_at_precision()) return i;
        return 0;
    }

    LocalFieldElement coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c.size())) return field->zero();
        return c[static_cast<std::size_t>(i)];
    }

    LocalFieldElement eval(const LocalFieldElement& x) const {
        return DensePoly(field, c).eval(x);
    }

    DensePoly as_poly() const { return {field, c}; }

    /// Ordinary product (root multisets concatenate).
    friend FpPolynomial operator*(const FpPolynomial& a, const FpPolynomial& b) {
        DensePoly p = a.as_poly() * b.as_poly();
        p.c.resize(static_cast<std::size_t>(a.degree() + b.degree() + 1), a.field->zero());
        p.c[0] = a.field->one();
        return {a.field, p.c};
    }
};

/// Star product: the unique element of 1 + T*L[T] whose roots are the pairwise
/// products {alpha_i beta_j} of the roots of P and Q. Computed as the
/// resultant Res_x(A(x), Q(Tx)) with A the reversal of P (so A is monic with
/// roots alpha_i), normalized to constant term 1 — no root extraction.
inline FpPolynomial star_product(const FpPolynomial& P, const FpPolynomial& Q) {
    const FieldPtr& F = P.field;
    int n = P.degree(), m = Q.degree();
    // a degree-0 factor is the constant 1: empty root multiset, so is the product
    if (n == 0 || m == 0) return FpPolynomial(F);
    // A(x) = x^n P(1/x) = prod (x - alpha_i), coefficients constant in T
    std::vector<DensePoly> A(static_cast<std::size_t>(n + 1), DensePoly(F));
    for (int i = 0; i <= n; ++i)
        A[static_cast<std::size_t>(i)] = DensePoly::constant(F, P.coeff(n - i));
    // B(x) = Q(Tx): coefficient of x^j is q_j T^j
    std::vector<DensePoly> B(static_cast<std::size_t>(m + 1), DensePoly(F));
    for (int j = 0; j <= m; ++j) {
        std::vector<LocalFieldElement> tj(static_cast<std::size_t>(j) + 1, F->zero());
        tj[static_cast<std::size_t>(j)] = Q.coeff(j);
        B[static_cast<std::size_t>(j)] = DensePoly(F, tj);
    }
    // Sylvester matrix of A (degree n) and B (degree m) in x, size (n+m)
    int N = n + m;
    std::vector<std::vector<DensePoly>> S(static_cast<std::size_t>(N),
                                          std::vector<DensePoly>(static_cast<std::size_t>(N), DensePoly(F)));
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i)
            S[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + i)] = A[static_cast<std::size_t>(n - i)];
    for (int r = 0; r < n; ++r)
        for (int j = 0; j <= m; ++j)
            S[static_cast<std::size_t>(m + r)][static_cast<std::size_t>(r + j)] = B[static_cast<std::size_t>(m - j)];
    DensePoly R = detail::poly_matrix_det(S, F);
    R.c.resize(static_cast<std::size_t>(n * m) + 1, F->zero());
    // normalize to constant term 1
    LocalFieldElement c0 = R.coeff(0);
    if (c0.is_zero_at_precision())
        throw std::domain_error("star_product: precision exhausted in resultant elimination");
    LocalFieldElement inv = c0.inverse();
    std::vector<LocalFieldElement> out;
    out.reserve(R.c.size());
    for (const auto& x : R.c) out.push_back(inv * x);
    out[0] = F->one();
    return {F, out};
}

} // namespace tripp
