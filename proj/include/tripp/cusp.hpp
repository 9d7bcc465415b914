#pragma once

#include <stdexcept>
#include <vector>

#include "tripp/det_invariant.hpp"
#include "tripp/qexp.hpp"

namespace tripp {

/// Formal section of Sym^r of the rank-2 module spanned by (omega_can,
/// eta_can) over the q-expansion ring at the cusp: components[j] is the
/// coefficient series of omega^{r-j} eta^j, j = 0..r.
struct FormalSection {
    int degree = 0;
    std::vector<QExpansion> components;

    FormalSection() = default;
    FormalSection(const FieldPtr& F, int r, long qprec)
        : degree(r), components(static_cast<std::size_t>(r + 1), QExpansion(F, qprec)) {}

    void validate() const {
        if (degree < 0 || components.size() != static_cast<std::size_t>(degree) + 1)
            throw std::invalid_argument("FormalSection: component count must be degree + 1");
    }

    const QExpansion& comp(int j) const { return components[static_cast<std::size_t>(j)]; }
    QExpansion& comp(int j) { return components[static_cast<std::size_t>(j)]; }
};

/// The same data read as a one-form: (sum_j c_j omega^{r-j} eta^j) (x) dq/q.
struct FormalOneForm {
    int degree = 0;
    std::vector<QExpansion> components;

    void validate() const {
        if (degree < 0 || components.size() != static_cast<std::size_t>(degree) + 1)
            throw std::invalid_argument("FormalOneForm: component count must be degree + 1");
    }

    const QExpansion& comp(int j) const { return components[static_cast<std::size_t>(j)]; }
    QExpansion& comp(int j) { return components[static_cast<std::size_t>(j)]; }
};

inline bool section_eq_at_precision(const FormalSection& a, const FormalSection& b) {
    if (a.degree != b.degree) return false;
    for (int j = 0; j <= a.degree; ++j)
        if (!qexp_eq_at_precision(a.comp(j), b.comp(j))) return false;
    return true;
}

inline bool oneform_eq_at_precision(const FormalOneForm& a, const FormalOneForm& b) {
    if (a.degree != b.degree) return false;
    for (int j = 0; j <= a.degree; ++j)
        if (!qexp_eq_at_precision(a.comp(j), b.comp(j))) return false;
    return true;
}

namespace detail {

/// Antiderivative for q d/dq: divides a_n by n. The constant term must
/// vanish; indices divisible by p are divided honestly, costing v_p(n)
/// digits of tracked precision (a depleted input loses nothing).
inline QExpansion d_inverse(const QExpansion& x) {
    if (!x.a0.is_zero_at_precision())
        throw std::domain_error("d_inverse: constant-term obstruction (series not integrable)");
    QExpansion r = x;
    r.a0 = x.field->zero();
    r.weight = x.weight - 2;
    for (long n = 1; n <= r.q_precision; ++n) {
        if (x.coeff(n).is_zero_at_precision()) { r.set_coeff(n, x.field->zero()); continue; }
        r.set_coeff(n, x.coeff(n) * x.field->from_int(n).pow(-1));
    }
    return r;
}

} // namespace detail

/// Gauss-Manin connection in the (omega_can, eta_can) frame:
/// nabla(c omega^a eta^b) = (q dc/dq) omega^a eta^b + a c omega^{a-1} eta^{b+1},
/// everything tensored with dq/q.
inline FormalOneForm nabla(const FormalSection& s) {
    s.validate();
    const int r = s.degree;
    FormalOneForm out;
    out.degree = r;
    out.components.reserve(static_cast<std::size_t>(r) + 1);
    for (int j = 0; j <= r; ++j) {
        QExpansion c = serre_d(s.comp(j), 1);
        if (j >= 1) {
            const LocalFieldElement a = s.comp(j).field->from_int(r - j + 1);
            c = c + a * s.comp(j - 1);
        }
        out.components.push_back(c);
    }
    return out;
}

/// The canonical flat primitive of xi * omega^{nu-2} (x) dq/q:
/// F = sum_{j=0}^{nu-2} (-1)^j j! binom(nu-2, j) d^{-1-j}(xi) omega^{nu-2-j} eta^j.
/// Requires xi p-depleted so every d^{-1-j} acts by honest unit powers.
inline FormalSection primitive_flat(const QExpansion& xi, int nu) {
    if (nu < 2) throw std::invalid_argument("primitive_flat: weight must be at least 2");
    if (!xi.is_depleted())
        throw std::domain_error("primitive_flat: input series must be p-depleted");
    const FieldPtr& F = xi.field;
    const int r = nu - 2;
    FormalSection out;
    out.degree = r;
    out.components.reserve(static_cast<std::size_t>(r) + 1);
    mpz_class fact = 1;
    for (int j = 0; j <= r; ++j) {
        if (j > 0) fact *= j;
        mpz_class bin;
        mpz_bin_uiui(bin.get_mpz_t(), static_cast<unsigned long>(r), static_cast<unsigned long>(j));
        LocalFieldElement c = F->from_mpz(fact * bin);
        if (j % 2 == 1) c = -c;
        out.components.push_back(c * serre_d(xi, -1 - j));
    }
    return out;
}

namespace detail {

/// Pair the monomial omega^{n_omega} eta^{n_eta} (with n_omega + n_eta = r)
/// against a degree-r section through the symmetrized pairing induced by
/// (omega, eta) = 1: returns the resulting coefficient series.
inline QExpansion pair_monomial_section(const FieldPtr& F, int n_omega, int n_eta,
                                        const FormalSection& s) {
    auto base = symplectic_base(F);
    std::vector<int> alpha;
    alpha.reserve(static_cast<std::size_t>(n_omega + n_eta));
    for (int i = 0; i < n_omega; ++i) alpha.push_back(0);
    for (int i = 0; i < n_eta; ++i) alpha.push_back(1);
    long qprec = s.comp(0).q_precision;
    for (int t = 1; t <= s.degree; ++t) qprec = std::min(qprec, s.comp(t).q_precision);
    QExpansion out(F, qprec);
    for (int t = 0; t <= s.degree; ++t) {
        std::vector<int> beta;
        beta.reserve(static_cast<std::size_t>(s.degree));
        for (int i = 0; i < s.degree - t; ++i) beta.push_back(0);
        for (int i = 0; i < t; ++i) beta.push_back(1);
        LocalFieldElement w = pairing_r(F, alpha, beta, base);
        if (w.is_zero_at_precision()) continue;
        out = out + w * s.comp(t);
    }
    return out;
}

} // namespace detail

/// Upsilon-contraction: read det as an element of Sym^{r1} (x) Sym^{r2} (x)
/// Sym^{r3} of the (omega, eta) module via the symplectic identification of
/// the dual (x1 -> -eta, x2 -> omega, likewise for the other variable
/// pairs), then contract legs 2 and 3 against s2 and s3.
inline FormalSection contract_upsilon(const SymPowerElement& det, const FormalSection& s2,
                                      const FormalSection& s3) {
    s2.validate();
    s3.validate();
    if (det.r2 != s2.degree || det.r3 != s3.degree)
        throw std::invalid_argument("contract_upsilon: leg degrees do not match the sections");
    const FieldPtr& F = det.F;
    long qprec = s2.comp(0).q_precision;
    for (int t = 0; t <= s2.degree; ++t) qprec = std::min(qprec, s2.comp(t).q_precision);
    for (int t = 0; t <= s3.degree; ++t) qprec = std::min(qprec, s3.comp(t).q_precision);
    FormalSection out(F, det.r1, qprec);
    for (const auto& [key, c] : det.coeffs) {
        if (c.is_zero_at_precision()) continue;
        const int a1 = key[0], a2 = key[1];
        const int b1 = key[2], b2 = key[3];
        const int c1 = key[4], c2 = key[5];
        // each x1 (resp. y1, z1) carries a sign from x1 -> -eta
        LocalFieldElement scale = c;
        if ((a1 + b1 + c1) % 2 == 1) scale = -scale;
        QExpansion leg2 = detail::pair_monomial_section(F, b2, b1, s2);
        QExpansion leg3 = detail::pair_monomial_section(F, c2, c1, s3);
        QExpansion term = multiply(leg2, leg3);
        out.comp(a1) = out.comp(a1) + scale * term;
    }
    return out;
}

/// Reduce a one-form modulo nabla-exact forms to its holomorphic
/// representative c(q) omega^r (x) dq/q and return c(q). Each eta-component
/// c_j omega^{r-j} eta^j is removed by subtracting
/// nabla(d^{-1}(c_j) omega^{r-j} eta^j), a d-equation whose spill-over lands
/// one eta-degree higher and is consumed by the next step; the pure-omega
/// component is never touched by these subtractions.
inline QExpansion reduce_mod_nabla(const FormalOneForm& w) {
    w.validate();
    const int r = w.degree;
    std::vector<QExpansion> c = w.components;
    for (int j = 1; j <= r; ++j) {
        if (c[static_cast<std::size_t>(j)].is_zero_at_precision()) continue;
        QExpansion u = detail::d_inverse(c[static_cast<std::size_t>(j)]);
        if (j < r) {
            const LocalFieldElement a = u.field->from_int(r - j);
            c[static_cast<std::size_t>(j + 1)] = c[static_cast<std::size_t>(j + 1)] - a * u;
        }
        // the component itself is now exactly cancelled
    }
    return c[0];
}

/// Independent re-derivation of the constant relating the contracted cusp
/// expansion to the product d^{(k-l-m)/2} xi2 * xi3: runs the full formal
/// pipeline det -> primitive -> contraction -> reduction and returns the
/// coefficientwise ratio, which must be a single scalar. The closed form
/// this is checked against elsewhere is (-1)^{k-2} (r-k+2)! with
/// r = (k+l+m-6)/2.
inline LocalFieldElement constant_check(int k, int l, int m, const QExpansion& xi2,
                                        const QExpansion& xi3) {
    if (k < 2 || l < 2 || m < 2)
        throw std::invalid_argument("constant_check: weights must be at least 2");
    if ((k + l + m) % 2 != 0)
        throw std::invalid_argument("constant_check: weight sum must be even");
    if (k >= l + m || l >= k + m || m >= k + l)
        throw std::invalid_argument("constant_check: weights must be balanced");
    if (!xi2.is_depleted() || !xi3.is_depleted())
        throw std::domain_error("constant_check: test series must be p-depleted");
    const FieldPtr& F = xi2.field;
    const int r1 = k - 2, r2 = l - 2, r3 = m - 2;

    SymPowerElement det = det_polynomial(F, r1, r2, r3);
    FormalSection s2 = primitive_flat(xi2, l);
    FormalSection s3(F, r3, xi3.q_precision);
    s3.comp(0) = xi3;

    FormalSection contracted = contract_upsilon(det, s2, s3);
    FormalOneForm as_form;
    as_form.degree = contracted.degree;
    as_form.components = contracted.components;
    QExpansion reduced = reduce_mod_nabla(as_form);

    QExpansion denom = multiply(serre_d(xi2, (k - l - m) / 2), xi3);

    // pick the best-conditioned pivot coefficient, then certify the ratio
    // across the whole expansion
    long pivot = 0;
    Rational best(0);
    bool found = false;
    long N = std::min(reduced.q_precision, denom.q_precision);
    for (long n = 0; n <= N; ++n) {
        auto v = denom.coeff(n).valuation();
        if (!v) continue;
        if (!found || *v < best) {
            found = true;
            best = *v;
            pivot = n;
        }
    }
    if (!found)
        throw std::domain_error("constant_check: comparison series vanishes at this precision");
    LocalFieldElement ratio = reduced.coeff(pivot) * denom.coeff(pivot).inverse();
    QExpansion residual = reduced - ratio * denom;
    if (!residual.is_zero_at_precision())
        throw std::runtime_error("constant_check: ratio is not constant across coefficients");
    return ratio;
}

} // namespace tripp
