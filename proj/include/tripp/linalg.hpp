#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tripp/poly.hpp"

namespace tripp {

/// Dense matrix over a LocalField, immutable value semantics.
struct PMatrix {
    FieldPtr field;
    int rows = 0, cols = 0;
    std::vector<LocalFieldElement> a; // row-major

    PMatrix() = default;
    PMatrix(FieldPtr F, int r, int c)
        : field(std::move(F)), rows(r), cols(c),
          a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), field->zero()) {}

    static PMatrix identity(const FieldPtr& F, int n) {
        PMatrix I(F, n, n);
        for (int i = 0; i < n; ++i) I.at(i, i) = F->one();
        return I;
    }

    LocalFieldElement& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const LocalFieldElement& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    friend PMatrix operator+(const PMatrix& x, const PMatrix& y) {
        if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix add: shape mismatch");
        PMatrix r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] + y.a[i];
        return r;
    }

    friend PMatrix operator-(const PMatrix& x, const PMatrix& y) {
        if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix sub: shape mismatch");
        PMatrix r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] - y.a[i];
        return r;
    }

    friend PMatrix operator*(const PMatrix& x, const PMatrix& y) {
        if (x.cols != y.rows) throw std::invalid_argument("matrix mul: shape mismatch");
        PMatrix r(x.field, x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                if (x.at(i, k).is_zero_at_precision()) continue;
                for (int j = 0; j < y.cols; ++j)
                    r.at(i, j) = r.at(i, j) + x.at(i, k) * y.at(k, j);
            }
        return r;
    }

    friend PMatrix operator*(const LocalFieldElement& s, const PMatrix& x) {
        PMatrix r = x;
        for (auto& e : r.a) e = s * e;
        return r;
    }

    PMatrix operator-() const {
        PMatrix r = *this;
        for (auto& e : r.a) e = -e;
        return r;
    }

    std::vector<LocalFieldElement> apply(const std::vector<LocalFieldElement>& v) const {
        if (static_cast<int>(v.size()) != cols) throw std::invalid_argument("matrix apply: shape mismatch");
        std::vector<LocalFieldElement> r(static_cast<std::size_t>(rows), field->zero());
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                r[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + at(i, j) * v[static_cast<std::size_t>(j)];
        return r;
    }

    PMatrix pow(long n) const {
        if (rows != cols) throw std::invalid_argument("matrix pow: not square");
        if (n < 0) throw std::invalid_argument("matrix pow: negative exponent");
        PMatrix acc = identity(field, rows), base = *this;
        while (n > 0) {
            if (n & 1) acc = acc * base;
            base = base * base;
            n >>= 1;
        }
        return acc;
    }

    mpz_class pow_mpz_apply(const mpz_class&) = delete;

    PMatrix entrywise_frobenius() const {
        PMatrix r = *this;
        for (auto& e : r.a) e = e.frobenius();
        return r;
    }

    PMatrix transpose() const {
        PMatrix r(field, cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    LocalFieldElement trace() const {
        if (rows != cols) throw std::invalid_argument("trace: not square");
        LocalFieldElement t = field->zero();
        for (int i = 0; i < rows; ++i) t = t + at(i, i);
        return t;
    }

    bool is_zero_at_precision() const {
        for (const auto& e : a)
            if (!e.is_zero_at_precision()) return false;
        return true;
    }
};

/// Evaluate a polynomial at a square matrix (Horner).
inline PMatrix eval_at_matrix(const DensePoly& f, const PMatrix& A) {
    if (A.rows != A.cols) throw std::invalid_argument("eval_at_matrix: not square");
    PMatrix acc(A.field, A.rows, A.cols);
    for (int i = static_cast<int>(f.c.size()) - 1; i >= 0; --i) {
        acc = acc * A;
        for (int d = 0; d < A.rows; ++d)
            acc.at(d, d) = acc.at(d, d) + f.c[static_cast<std::size_t>(i)];
    }
    return acc;
}

inline PMatrix eval_at_matrix(const FpPolynomial& f, const PMatrix& A) {
    return eval_at_matrix(f.as_poly(), A);
}

/// Gaussian elimination with minimal-valuation pivoting; returns the pivot
/// column for each eliminated row. `aug` is reduced alongside `M` in place.
namespace detail {
inline std::vector<int> val_pivot_eliminate(PMatrix& M, PMatrix& aug) {
    const FieldPtr& F = M.field;
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < M.cols && r < M.rows; ++c) {
        int best = -1;
        Rational best_val{0};
        for (int i = r; i < M.rows; ++i) {
            auto v = M.at(i, c).valuation();
            if (!v) continue;
            if (best < 0 || *v < best_val) { best = i; best_val = *v; }
        }
        if (best < 0) continue;
        for (int j = 0; j < M.cols; ++j) std::swap(M.at(r, j), M.at(best, j));
        for (int j = 0; j < aug.cols; ++j) std::swap(aug.at(r, j), aug.at(best, j));
        LocalFieldElement inv = M.at(r, c).inverse();
        for (int j = 0; j < M.cols; ++j) M.at(r, j) = inv * M.at(r, j);
        for (int j = 0; j < aug.cols; ++j) aug.at(r, j) = inv * aug.at(r, j);
        M.at(r, c) = F->one();
        for (int i = 0; i < M.rows; ++i) {
            if (i == r) continue;
            LocalFieldElement f = M.at(i, c);
            if (f.is_zero_at_precision()) continue;
            for (int j = 0; j < M.cols; ++j) M.at(i, j) = M.at(i, j) - f * M.at(r, j);
            for (int j = 0; j < aug.cols; ++j) aug.at(i, j) = aug.at(i, j) - f * aug.at(r, j);
            M.at(i, c) = F->zero();
        }
        pivot_col.push_back(c);
        ++r;
    }
    return pivot_col;
}
} // namespace detail

/// Solve M x = b for square invertible M.
inline std::vector<LocalFieldElement> solve_linear(PMatrix M, const std::vector<LocalFieldElement>& b) {
    if (M.rows != M.cols || static_cast<int>(b.size()) != M.rows)
        throw std::invalid_argument("solve_linear: shape mismatch");
    PMatrix aug(M.field, M.rows, 1);
    for (int i = 0; i < M.rows; ++i) aug.at(i, 0) = b[static_cast<std::size_t>(i)];
    auto piv = detail::val_pivot_eliminate(M, aug);
    if (static_cast<int>(piv.size()) != M.rows)
        throw std::domain_error("solve_linear: matrix singular at working precision");
    std::vector<LocalFieldElement> x(static_cast<std::size_t>(M.rows), M.field->zero());
    for (int r = 0; r < M.rows; ++r) x[static_cast<std::size_t>(piv[static_cast<std::size_t>(r)])] = aug.at(r, 0);
    return x;
}

inline PMatrix matrix_inverse(PMatrix M) {
    if (M.rows != M.cols) throw std::invalid_argument("matrix_inverse: not square");
    PMatrix aug = PMatrix::identity(M.field, M.rows);
    auto piv = detail::val_pivot_eliminate(M, aug);
    if (static_cast<int>(piv.size()) != M.rows)
        throw std::domain_error("matrix_inverse: matrix singular at working precision");
    // rows of aug are permuted by pivot columns
    PMatrix inv(M.field, M.rows, M.cols);
    for (int r = 0; r < M.rows; ++r)
        for (int j = 0; j < M.cols; ++j)
            inv.at(piv[static_cast<std::size_t>(r)], j) = aug.at(r, j);
    return inv;
}

inline int matrix_rank(PMatrix M) {
    PMatrix aug(M.field, M.rows, 0);
    return static_cast<int>(detail::val_pivot_eliminate(M, aug).size());
}

inline LocalFieldElement determinant(PMatrix M) {
    if (M.rows != M.cols) throw std::invalid_argument("determinant: not square");
    const FieldPtr& F = M.field;
    LocalFieldElement det = F->one();
    int n = M.rows;
    for (int c = 0; c < n; ++c) {
        int best = -1;
        Rational best_val{0};
        for (int i = c; i < n; ++i) {
            auto v = M.at(i, c).valuation();
            if (!v) continue;
            if (best < 0 || *v < best_val) { best = i; best_val = *v; }
        }
        if (best < 0) return F->zero(); // singular at precision: det is 0-at-precision
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(M.at(c, j), M.at(best, j));
            det = -det;
        }
        det = det * M.at(c, c);
        LocalFieldElement inv = M.at(c, c).inverse();
        for (int i = c + 1; i < n; ++i) {
            LocalFieldElement f = M.at(i, c) * inv;
            if (f.is_zero_at_precision()) continue;
            for (int j = c; j < n; ++j) M.at(i, j) = M.at(i, j) - f * M.at(c, j);
        }
    }
    return det;
}

/// Characteristic polynomial by the Samuelson–Berkowitz algorithm
/// (division-free). Returns the monic polynomial det(xI - A).
inline DensePoly char_poly(const PMatrix& A) {
    if (A.rows != A.cols) throw std::invalid_argument("char_poly: not square");
    const FieldPtr& F = A.field;
    int n = A.rows;
    if (n == 0) return DensePoly::constant(F, F->one());
    // V holds the char poly coefficients of the leading principal submatrix,
    // highest degree first.
    std::vector<LocalFieldElement> V{F->one(), -A.at(0, 0)};
    for (int i = 1; i < n; ++i) {
        // submatrix of size i is A[0..i-1][0..i-1]; new row/col index i
        // s_k = R · A_prev^k · C, R = A[i][0..i-1], C = A[0..i-1][i]
        std::vector<LocalFieldElement> w(static_cast<std::size_t>(i));
        for (int j = 0; j < i; ++j) w[static_cast<std::size_t>(j)] = A.at(j, i);
        std::vector<LocalFieldElement> s(static_cast<std::size_t>(i), F->zero());
        for (int k = 0; k < i; ++k) {
            LocalFieldElement dot = F->zero();
            for (int j = 0; j < i; ++j) dot = dot + A.at(i, j) * w[static_cast<std::size_t>(j)];
            s[static_cast<std::size_t>(k)] = dot;
            if (k + 1 < i) {
                std::vector<LocalFieldElement> w2(static_cast<std::size_t>(i), F->zero());
                for (int r = 0; r < i; ++r)
                    for (int j = 0; j < i; ++j)
                        w2[static_cast<std::size_t>(r)] = w2[static_cast<std::size_t>(r)] + A.at(r, j) * w[static_cast<std::size_t>(j)];
                w = std::move(w2);
            }
        }
        // Toeplitz first column: [1, -a, -s_0, -s_1, ...]
        std::vector<LocalFieldElement> col{F->one(), -A.at(i, i)};
        for (int k = 0; k < i; ++k) col.push_back(-s[static_cast<std::size_t>(k)]);
        // V' = T · V, T lower-triangular Toeplitz of size (i+2) x (i+1)
        std::vector<LocalFieldElement> V2(static_cast<std::size_t>(i) + 2, F->zero());
        for (int r = 0; r < i + 2; ++r)
            for (int c = 0; c <= std::min(r, i); ++c)
                V2[static_cast<std::size_t>(r)] =
                    V2[static_cast<std::size_t>(r)] + col[static_cast<std::size_t>(r - c)] * V[static_cast<std::size_t>(c)];
        V = std::move(V2);
    }
    // V[j] is the coefficient of x^{n-j}
    DensePoly f(F);
    f.c.assign(static_cast<std::size_t>(n) + 1, F->zero());
    for (int j = 0; j <= n; ++j) f.c[static_cast<std::size_t>(n - j)] = V[static_cast<std::size_t>(j)];
    return f;
}

/// Newton polygon of a monic polynomial: lower convex hull of the points
/// (i, val(a_i)), i = 0..n. Root valuations are the negated segment slopes.
struct NewtonPolygon {
    std::vector<std::pair<long, Rational>> breakpoints; // hull vertices, left to right

    /// (valuation, multiplicity) of the root groups, in decreasing valuation.
    std::vector<std::pair<Rational, long>> root_valuations() const {
        std::vector<std::pair<Rational, long>> out;
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            auto [x1, v1] = breakpoints[i];
            auto [x2, v2] = breakpoints[i + 1];
            Rational slope = (v2 - v1) / Rational(x2 - x1);
            out.emplace_back(-slope, x2 - x1);
        }
        return out;
    }
};

/// Points with indeterminate coefficient valuation are treated as absent
/// (valuation at least the known precision; they can never be hull vertices
/// below the noise floor).
inline NewtonPolygon newton_polygon(const DensePoly& f) {
    int n = f.degree();
    if (n < 0) throw std::domain_error("newton_polygon: zero polynomial");
    std::vector<std::pair<long, Rational>> pts;
    for (int i = 0; i <= n; ++i) {
        auto v = f.coeff(i).valuation();
        if (v) pts.emplace_back(i, *v);
    }
    if (pts.empty() || pts.back().first != n)
        throw std::domain_error("newton_polygon: leading coefficient indeterminate");
    // lower convex hull, scanning left to right
    std::vector<std::pair<long, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            auto [x1, y1] = hull[hull.size() - 2];
            auto [x2, y2] = hull[hull.size() - 1];
            // keep if (x2,y2) is strictly below segment (x1,y1)-(pt)
            Rational lhs = (y2 - y1) * Rational(pt.first - x1);
            Rational rhs = (pt.second - y1) * Rational(x2 - x1);
            if (lhs < rhs) break;
            hull.pop_back();
        }
        hull.push_back(pt);
    }
    NewtonPolygon np;
    np.breakpoints = std::move(hull);
    return np;
}

/// Factor a monic polynomial as below*above where all roots of `below` have
/// valuation < cut and all roots of `above` have valuation >= cut (no Newton
/// slope may equal the cut). Newton iteration from the Newton-polygon split,
/// verified exactly at the end.
inline std::pair<DensePoly, DensePoly> slope_factorization(const DensePoly& f, Rational cut) {
    const FieldPtr& F = f.field;
    int n = f.degree();
    if (n < 0 || !eq_at_precision(f.coeff(n), F->one()))
        throw std::invalid_argument("slope_factorization: polynomial must be monic");
    NewtonPolygon np = newton_polygon(f);
    for (const auto& [v, mult] : np.root_valuations())
        if (v == cut) throw std::domain_error("slope_factorization: a Newton slope equals the cut");
    // number of roots with valuation >= cut; roots left of the first hull
    // vertex (vanishing low coefficients) have valuation +infinity at precision
    long d_above = np.breakpoints.front().first;
    for (const auto& [v, mult] : np.root_valuations())
        if (v > cut) d_above += mult;
    long d_below = n - d_above;
    if (d_above == 0) return {f, DensePoly::constant(F, F->one())};
    if (d_below == 0) return {DensePoly::constant(F, F->one()), f};
    // initial guesses: `above` from the low coefficients (its roots carry the
    // left hull segments), `below` from the high coefficients
    LocalFieldElement aj = f.coeff(static_cast<int>(d_above));
    LocalFieldElement aj_inv = aj.inverse();
    DensePoly above(F), below(F);
    for (long i = 0; i <= d_above; ++i) above.c.push_back(aj_inv * f.coeff(static_cast<int>(i)));
    for (long j = 0; j <= d_below; ++j) below.c.push_back(f.coeff(static_cast<int>(d_above + j)));
    above.c[static_cast<std::size_t>(d_above)] = F->one();
    below.c[static_cast<std::size_t>(d_below)] = F->one();
    // Newton iteration: solve below*dA + above*dB = f - below*above with
    // deg dA < d_above, deg dB < d_below (n unknowns, n equations)
    for (int iter = 0; iter < F->precision_cap + 4; ++iter) {
        DensePoly resid = f - below * above;
        resid.trim();
        if (resid.degree() < 0) break;
        PMatrix M(F, n, n);
        for (long u = 0; u < d_above; ++u)          // columns 0..d_above-1: dA coeffs
            for (long i = 0; i <= d_below; ++i) {
                long row = u + i;
                if (row < n) M.at(static_cast<int>(row), static_cast<int>(u)) =
                    M.at(static_cast<int>(row), static_cast<int>(u)) + below.coeff(static_cast<int>(i));
            }
        for (long u = 0; u < d_below; ++u)          // columns d_above..n-1: dB coeffs
            for (long i = 0; i <= d_above; ++i) {
                long row = u + i;
                if (row < n) M.at(static_cast<int>(row), static_cast<int>(d_above + u)) =
                    M.at(static_cast<int>(row), static_cast<int>(d_above + u)) + above.coeff(static_cast<int>(i));
            }
        std::vector<LocalFieldElement> b(static_cast<std::size_t>(n), F->zero());
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = resid.coeff(i);
        std::vector<LocalFieldElement> delta;
        try {
            delta = solve_linear(M, b);
        } catch (const std::domain_error&) {
            throw std::domain_error("slope_factorization: insufficient precision to separate factors");
        }
        for (long u = 0; u < d_above; ++u)
            above.c[static_cast<std::size_t>(u)] = above.c[static_cast<std::size_t>(u)] + delta[static_cast<std::size_t>(u)];
        for (long u = 0; u < d_below; ++u)
            below.c[static_cast<std::size_t>(u)] = below.c[static_cast<std::size_t>(u)] + delta[static_cast<std::size_t>(d_above + u)];
    }
    // verification: exact product and slope location of both factors
    DensePoly check = f - below * above;
    check.trim();
    if (check.degree() >= 0)
        throw std::domain_error("slope_factorization: iteration failed to converge at working precision");
    for (const auto& [v, mult] : newton_polygon(below).root_valuations())
        if (v >= cut) throw std::domain_error("slope_factorization: below-factor has a root above the cut");
    for (const auto& [v, mult] : newton_polygon(above).root_valuations())
        if (v < cut) throw std::domain_error("slope_factorization: above-factor has a root below the cut");
    return {below, above};
}

/// Idempotent projector onto the sum of generalized eigenspaces of unit
/// eigenvalues (slope < 1/2), along the positive-slope part. Computed from the
/// slope factorization of the characteristic polynomial and a polynomial
/// Bezout identity; the n!-power limit is kept as a test oracle only.
inline PMatrix unit_root_projector(const PMatrix& A) {
    const FieldPtr& F = A.field;
    DensePoly cp = char_poly(A);
    auto [below, above] = slope_factorization(cp, Rational(1, 2));
    if (below.degree() == 0) return PMatrix(F, A.rows, A.cols);           // no unit part
    if (above.degree() == 0) return PMatrix::identity(F, A.rows);         // all unit
    auto [u, v] = poly_ext_gcd(below, above); // u*below + v*above = 1
    // unit generalized eigenspace = ker below(A); E = v(A)*above(A)
    PMatrix E = eval_at_matrix(v, A) * eval_at_matrix(above, A);
    // sanity: idempotency at precision
    if (!(E * E - E).is_zero_at_precision())
        throw std::domain_error("unit_root_projector: projector fails idempotency at working precision");
    return E;
}

/// Linearization of a sigma-semilinear operator: Phi = A sigma(A) ... sigma^{d-1}(A).
inline PMatrix linearize_frobenius(const PMatrix& A, int d) {
    if (A.rows != A.cols) throw std::invalid_argument("linearize_frobenius: not square");
    if (d != A.field->unram_degree)
        throw std::invalid_argument("linearize_frobenius: d does not match the field's unramified degree");
    PMatrix acc = A;
    PMatrix cur = A;
    for (int i = 1; i < d; ++i) {
        cur = cur.entrywise_frobenius();
        acc = acc * cur;
    }
    return acc;
}

} // namespace tripp
