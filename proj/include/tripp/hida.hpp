#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tripp/linalg.hpp"
#include "tripp/qexp.hpp"

namespace tripp {

/// Ingested basis of q-expansions spanning a U_p-stable space of cusp forms,
/// with membership determined by coefficients a_1..a_sturm_bound.
struct FormSpaceBasis {
    std::vector<QExpansion> basis;
    long sturm_bound = 0;

    const FieldPtr& field() const { return basis.front().field; }
    int dim() const { return static_cast<int>(basis.size()); }

    void validate() const {
        if (basis.empty() || sturm_bound < 1)
            throw std::invalid_argument("FormSpaceBasis: empty basis or bad Sturm bound");
        for (const auto& b : basis)
            if (b.q_precision < sturm_bound)
                throw std::invalid_argument("FormSpaceBasis: q-precision below the Sturm bound");
        PMatrix M(field(), static_cast<int>(sturm_bound), dim());
        for (int j = 0; j < dim(); ++j)
            for (long n = 1; n <= sturm_bound; ++n)
                M.at(static_cast<int>(n - 1), j) = basis[static_cast<std::size_t>(j)].coeff(n);
        if (matrix_rank(M) != dim())
            throw std::invalid_argument("FormSpaceBasis: basis not linearly independent at working precision");
    }
};

/// Eigenform data carried alongside its q-expansion.
struct EigenformRecord {
    QExpansion form;
    LocalFieldElement a_p;
    std::map<long, LocalFieldElement> hecke_eigenvalues;
    LocalFieldElement lambda_M1; // pseudo-eigenvalue, optional (zero when absent)
    long level_M1 = 1;

    void validate(long check_primes_up_to = 0) const {
        auto v = a_p.valuation();
        if (!v || *v != Rational(0))
            throw std::invalid_argument("EigenformRecord: a_p is not a p-adic unit");
        for (const auto& [ell, a] : hecke_eigenvalues) {
            if (check_primes_up_to && ell > check_primes_up_to) continue;
            if (form.level % ell == 0) continue;
            if (form.q_precision / ell < 1) continue;
            QExpansion t = hecke_t_ell(form, ell);
            if (!qexp_eq_at_precision(t, a * form))
                throw std::invalid_argument("EigenformRecord: supplied eigenvalue fails on the expansion");
        }
    }
};

namespace detail {

/// Solve for the coordinates of xi in span(B) using rows 1..sturm_bound;
/// throws when the system is inconsistent or rank-deficient at precision.
inline std::vector<LocalFieldElement> span_coordinates(const FormSpaceBasis& B, const QExpansion& xi) {
    const FieldPtr& F = B.field();
    long rows = B.sturm_bound;
    if (xi.q_precision < rows)
        throw std::domain_error("span_coordinates: q-precision of the target below the Sturm bound");
    int d = B.dim();
    PMatrix M(F, static_cast<int>(rows), d);
    PMatrix aug(F, static_cast<int>(rows), 1);
    for (long n = 1; n <= rows; ++n) {
        for (int j = 0; j < d; ++j)
            M.at(static_cast<int>(n - 1), j) = B.basis[static_cast<std::size_t>(j)].coeff(n);
        aug.at(static_cast<int>(n - 1), 0) = xi.coeff(n);
    }
    auto piv = val_pivot_eliminate(M, aug);
    if (static_cast<int>(piv.size()) != d)
        throw std::domain_error("span_coordinates: underdetermined solve (q-precision too small)");
    for (long r = d; r < rows; ++r)
        if (!aug.at(static_cast<int>(r), 0).is_zero_at_precision())
            throw std::domain_error("span_coordinates: target outside the span at working precision");
    std::vector<LocalFieldElement> x(static_cast<std::size_t>(d), F->zero());
    for (int r = 0; r < d; ++r) x[static_cast<std::size_t>(piv[static_cast<std::size_t>(r)])] = aug.at(r, 0);
    return x;
}

} // namespace detail

/// Re-expand a coordinate vector as a q-series on the basis (to the common
/// q-precision of the basis).
inline QExpansion expand_in_basis(const FormSpaceBasis& B, const std::vector<LocalFieldElement>& x) {
    long N = B.basis.front().q_precision;
    for (const auto& b : B.basis) N = std::min(N, b.q_precision);
    QExpansion r(B.field(), N, B.basis.front().weight, B.basis.front().level);
    r.character = B.basis.front().character;
    for (int j = 0; j < B.dim(); ++j) {
        const QExpansion& b = B.basis[static_cast<std::size_t>(j)];
        r.a0 = r.a0 + x[static_cast<std::size_t>(j)] * b.a0;
        for (long n = 1; n <= N; ++n)
            r.set_coeff(n, r.coeff(n) + x[static_cast<std::size_t>(j)] * b.coeff(n));
    }
    return r;
}

/// Matrix of an operator on span(B): column j holds the coordinates of
/// op(b_j). The operator must keep at least sturm_bound q-coefficients.
inline PMatrix operator_matrix(const FormSpaceBasis& B,
                               const std::function<QExpansion(const QExpansion&)>& op) {
    const FieldPtr& F = B.field();
    int d = B.dim();
    PMatrix A(F, d, d);
    for (int j = 0; j < d; ++j) {
        QExpansion img = op(B.basis[static_cast<std::size_t>(j)]);
        auto x = detail::span_coordinates(B, img);
        for (int i = 0; i < d; ++i) A.at(i, j) = x[static_cast<std::size_t>(i)];
    }
    return A;
}

/// Matrix of U_p on span(B); requires q-precision/p >= sturm_bound.
inline PMatrix up_matrix(const FormSpaceBasis& B) {
    return operator_matrix(B, [](const QExpansion& b) { return u_p(b); });
}

/// Matrix of T_ell on span(B).
inline PMatrix t_ell_matrix(const FormSpaceBasis& B, long ell) {
    return operator_matrix(B, [ell](const QExpansion& b) { return hecke_t_ell(b, ell); });
}

/// Ordinary projection: image of xi under the unit-root projector of the U_p
/// matrix, re-expanded as a q-series.
inline QExpansion e_ord(const QExpansion& xi, const FormSpaceBasis& B) {
    PMatrix A = up_matrix(B);
    PMatrix E = unit_root_projector(A);
    auto x = detail::span_coordinates(B, xi);
    return expand_in_basis(B, E.apply(x));
}

/// a_1 of the projection of e_ord(xi) onto the isotypic line of f. The
/// projector annihilates each competing ordinary eigensystem with a Lagrange
/// factor (T_ell - a'_ell)/(a_ell(f) - a'_ell) at a distinguishing prime.
/// `others` lists the competing eigensystems as maps ell -> a'_ell.
inline LocalFieldElement isotypic_a1(const QExpansion& xi, const EigenformRecord& f,
                                     const FormSpaceBasis& B,
                                     const std::vector<std::map<long, LocalFieldElement>>& others) {
    const FieldPtr& F = B.field();
    PMatrix A = up_matrix(B);
    PMatrix P = unit_root_projector(A);
    std::map<long, PMatrix> tmat;
    for (const auto& other : others) {
        bool separated = false;
        for (const auto& [ell, a_other] : other) {
            auto it = f.hecke_eigenvalues.find(ell);
            if (it == f.hecke_eigenvalues.end()) continue;
            LocalFieldElement diff = it->second - a_other;
            if (diff.is_zero_at_precision()) continue;
            auto found = tmat.find(ell);
            if (found == tmat.end()) found = tmat.emplace(ell, t_ell_matrix(B, ell)).first;
            const PMatrix& T = found->second;
            PMatrix factor = diff.inverse() * (T - a_other * PMatrix::identity(F, B.dim()));
            P = factor * P;
            separated = true;
            break;
        }
        if (!separated)
            throw std::domain_error("isotypic_a1: eigensystems not separated by the supplied primes");
    }
    if (matrix_rank(P) != 1)
        throw std::domain_error("isotypic_a1: isotypic projector does not cut out a line (multiplicity != 1)");
    auto x = detail::span_coordinates(B, xi);
    return expand_in_basis(B, P.apply(x)).coeff(1);
}

/// Degeneracy data for the level trace: explicit matrices on the basis,
/// keyed by (from_level, to_level).
using DegeneracyData = std::map<std::pair<long, long>, PMatrix>;

/// Trace from level `from_level` down to `to_level`. Equal levels are the
/// identity; a proper trace needs an ingested degeneracy matrix on span(B).
inline QExpansion trace_level(const QExpansion& xi, long from_level, long to_level,
                              const FormSpaceBasis* B = nullptr,
                              const DegeneracyData* degeneracy = nullptr) {
    if (from_level % to_level != 0)
        throw std::invalid_argument("trace_level: target level must divide the source level");
    if (from_level == to_level) return xi;
    if (!B || !degeneracy)
        throw std::domain_error("trace_level: proper trace unsupported without degeneracy data");
    auto it = degeneracy->find({from_level, to_level});
    if (it == degeneracy->end())
        throw std::domain_error("trace_level: proper trace unsupported without degeneracy data");
    auto x = detail::span_coordinates(*B, xi);
    return expand_in_basis(*B, it->second.apply(x));
}

} // namespace tripp
