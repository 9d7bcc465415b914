#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "tripp/linalg.hpp"

namespace tripp {

/// Tri-homogeneous polynomial in (x1, x2, y1, y2, z1, z2) of declared
/// tri-degree (r1, r2, r3), the polynomial model of Sym^{r1} (x) Sym^{r2}
/// (x) Sym^{r3} of the dual of a rank-2 symplectic module.
struct SymPowerElement {
    FieldPtr F;
    int r1 = 0, r2 = 0, r3 = 0;
    // key: exponents of (x1, x2, y1, y2, z1, z2)
    std::map<std::array<int, 6>, LocalFieldElement> coeffs;

    static SymPowerElement constant(const FieldPtr& F, const LocalFieldElement& c) {
        SymPowerElement r{F, 0, 0, 0, {}};
        r.coeffs[{0, 0, 0, 0, 0, 0}] = c;
        return r;
    }

    LocalFieldElement coeff(const std::array<int, 6>& key) const {
        auto it = coeffs.find(key);
        return it == coeffs.end() ? F->zero() : it->second;
    }

    void add_term(const std::array<int, 6>& key, const LocalFieldElement& c) {
        auto it = coeffs.find(key);
        if (it == coeffs.end()) coeffs.emplace(key, c);
        else it->second = it->second + c;
    }

    /// Every monomial must match the declared tri-degree.
    void validate() const {
        for (const auto& [k, c] : coeffs) {
            (void)c;
            for (int e : k)
                if (e < 0) throw std::invalid_argument("SymPowerElement: negative exponent");
            if (k[0] + k[1] != r1 || k[2] + k[3] != r2 || k[4] + k[5] != r3)
                throw std::invalid_argument("SymPowerElement: monomial breaks the declared tri-degree");
        }
    }

    friend SymPowerElement operator+(const SymPowerElement& a, const SymPowerElement& b) {
        if (a.r1 != b.r1 || a.r2 != b.r2 || a.r3 != b.r3)
            throw std::invalid_argument("SymPowerElement: tri-degree mismatch in sum");
        SymPowerElement r = a;
        for (const auto& [k, c] : b.coeffs) r.add_term(k, c);
        return r;
    }

    friend SymPowerElement operator*(const LocalFieldElement& s, const SymPowerElement& a) {
        SymPowerElement r = a;
        for (auto& [k, c] : r.coeffs) {
            (void)k;
            c = s * c;
        }
        return r;
    }

    /// Product; tri-degrees add.
    friend SymPowerElement operator*(const SymPowerElement& a, const SymPowerElement& b) {
        SymPowerElement r{a.F, a.r1 + b.r1, a.r2 + b.r2, a.r3 + b.r3, {}};
        for (const auto& [ka, ca] : a.coeffs)
            for (const auto& [kb, cb] : b.coeffs) {
                std::array<int, 6> k{};
                for (int i = 0; i < 6; ++i) k[static_cast<std::size_t>(i)] =
                    ka[static_cast<std::size_t>(i)] + kb[static_cast<std::size_t>(i)];
                r.add_term(k, ca * cb);
            }
        return r;
    }

    SymPowerElement pow(int n) const {
        SymPowerElement r = constant(F, F->one());
        for (int i = 0; i < n; ++i) r = r * (*this);
        return r;
    }
};

inline bool sym_eq_at_precision(const SymPowerElement& a, const SymPowerElement& b) {
    if (a.r1 != b.r1 || a.r2 != b.r2 || a.r3 != b.r3) return false;
    std::map<std::array<int, 6>, LocalFieldElement> keys = a.coeffs;
    for (const auto& [k, c] : b.coeffs) {
        (void)c;
        keys.emplace(k, a.F->zero());
    }
    for (const auto& [k, c] : keys) {
        (void)c;
        if (!(a.coeff(k) - b.coeff(k)).is_zero_at_precision()) return false;
    }
    return true;
}

/// det(x; y)^{r - r3} det(x; z)^{r - r2} det(y; z)^{r - r1} with
/// r = (r1 + r2 + r3) / 2.
inline SymPowerElement det_polynomial(const FieldPtr& F, int r1, int r2, int r3) {
    if ((r1 + r2 + r3) % 2 != 0)
        throw std::invalid_argument("det_polynomial: r1 + r2 + r3 must be even");
    int r = (r1 + r2 + r3) / 2;
    if (r - r1 < 0 || r - r2 < 0 || r - r3 < 0)
        throw std::invalid_argument("det_polynomial: tri-degree not balanced");
    auto det_factor = [&](int pa, int pb) {
        // det of the rows (pair pa, pair pb); pairs indexed 0=x, 1=y, 2=z
        SymPowerElement d{F, 0, 0, 0, {}};
        d.r1 = (pa == 0 || pb == 0) ? 1 : 0;
        d.r2 = (pa == 1 || pb == 1) ? 1 : 0;
        d.r3 = (pa == 2 || pb == 2) ? 1 : 0;
        std::array<int, 6> k1{}, k2{};
        k1[static_cast<std::size_t>(2 * pa)] = 1;     // a1 * b2
        k1[static_cast<std::size_t>(2 * pb + 1)] = 1;
        k2[static_cast<std::size_t>(2 * pa + 1)] = 1; // - a2 * b1
        k2[static_cast<std::size_t>(2 * pb)] = 1;
        d.coeffs[k1] = F->one();
        d.coeffs[k2] = -F->one();
        return d;
    };
    SymPowerElement out = det_factor(0, 1).pow(r - r3) * det_factor(0, 2).pow(r - r2) *
                          det_factor(1, 2).pow(r - r1);
    out.r1 = r1;
    out.r2 = r2;
    out.r3 = r3;
    out.validate();
    return out;
}

namespace detail {

inline LocalFieldElement binomial(const FieldPtr& F, int n, int k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return F->from_mpz(b);
}

/// (c0 x1 + c1 x2)^{a} (d0 x1 + d1 x2)^{b} as coefficients of x1^{i} x2^{a+b-i}.
inline std::vector<LocalFieldElement> linear_pair_power(const FieldPtr& F,
                                                        const LocalFieldElement& c0,
                                                        const LocalFieldElement& c1,
                                                        const LocalFieldElement& d0,
                                                        const LocalFieldElement& d1, int a, int b) {
    std::vector<LocalFieldElement> out(static_cast<std::size_t>(a + b + 1), F->zero());
    for (int i = 0; i <= a; ++i)
        for (int j = 0; j <= b; ++j) {
            LocalFieldElement term = binomial(F, a, i) * binomial(F, b, j) * c0.pow(i) *
                                     c1.pow(a - i) * d0.pow(j) * d1.pow(b - j);
            out[static_cast<std::size_t>(i + j)] = out[static_cast<std::size_t>(i + j)] + term;
        }
    return out;
}

} // namespace detail

/// g * P(x1, x2) = P((g^{-1} (x1; x2))^t), applied simultaneously to the
/// three variable pairs. Requires det(g) to be a unit.
inline SymPowerElement gl2_act(const PMatrix& g, const SymPowerElement& P) {
    const FieldPtr& F = P.F;
    if (g.rows != 2 || g.cols != 2) throw std::invalid_argument("gl2_act: 2x2 matrix expected");
    LocalFieldElement det = determinant(g);
    auto v = det.valuation();
    if (!v || *v != Rational(0))
        throw std::invalid_argument("gl2_act: determinant is not a unit");
    LocalFieldElement di = det.inverse();
    // h = g^{-1}; the substitution is x1 -> h00 x1 + h01 x2, x2 -> h10 x1 + h11 x2
    LocalFieldElement h00 = di * g.at(1, 1), h01 = -di * g.at(0, 1);
    LocalFieldElement h10 = -di * g.at(1, 0), h11 = di * g.at(0, 0);
    SymPowerElement out{F, P.r1, P.r2, P.r3, {}};
    for (const auto& [k, c] : P.coeffs) {
        auto xs = detail::linear_pair_power(F, h00, h01, h10, h11, k[0], k[1]);
        auto ys = detail::linear_pair_power(F, h00, h01, h10, h11, k[2], k[3]);
        auto zs = detail::linear_pair_power(F, h00, h01, h10, h11, k[4], k[5]);
        for (int i = 0; i <= P.r1; ++i)
            for (int j = 0; j <= P.r2; ++j)
                for (int l = 0; l <= P.r3; ++l) {
                    LocalFieldElement cc = c * xs[static_cast<std::size_t>(i)] *
                                           ys[static_cast<std::size_t>(j)] *
                                           zs[static_cast<std::size_t>(l)];
                    if (cc.is_zero_at_precision()) continue;
                    out.add_term({i, P.r1 - i, j, P.r2 - j, l, P.r3 - l}, cc);
                }
    }
    return out;
}

/// Element of R[m]: the ring with G acting through det^m.
struct TwistedScalar {
    LocalFieldElement value;
    long m = 0;
};

inline TwistedScalar gl2_act(const PMatrix& g, const TwistedScalar& a) {
    LocalFieldElement det = determinant(g);
    auto v = det.valuation();
    if (!v || *v != Rational(0))
        throw std::invalid_argument("gl2_act: determinant is not a unit");
    return {det.pow(a.m) * a.value, a.m};
}

/// (alpha, beta)_r = (1/r!) sum_{sigma in Sym(r)} prod_i base(alpha_i, beta_{sigma(i)}),
/// with alpha, beta lists of r basis indices (0 or 1). Requires r! to be a
/// unit, matching the integral (Z/p^e) semantics of the construction.
inline LocalFieldElement pairing_r(const FieldPtr& F, const std::vector<int>& alpha,
                                   const std::vector<int>& beta,
                                   const std::array<std::array<LocalFieldElement, 2>, 2>& base) {
    if (alpha.size() != beta.size())
        throw std::invalid_argument("pairing_r: length mismatch");
    int r = static_cast<int>(alpha.size());
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(r));
    LocalFieldElement rf = F->from_mpz(fact);
    auto v = rf.valuation();
    if (!v || *v != Rational(0))
        throw std::domain_error("pairing_r: r! is not a unit in the coefficient ring");
    std::vector<int> perm(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) perm[static_cast<std::size_t>(i)] = i;
    LocalFieldElement sum = F->zero();
    do {
        LocalFieldElement prod = F->one();
        for (int i = 0; i < r; ++i)
            prod = prod * base[static_cast<std::size_t>(alpha[static_cast<std::size_t>(i)])]
                              [static_cast<std::size_t>(beta[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])];
        sum = sum + prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return rf.inverse() * sum;
}

/// The standard symplectic base pairing on the (omega, eta) basis:
/// (omega, eta) = 1, (eta, omega) = -1.
inline std::array<std::array<LocalFieldElement, 2>, 2> symplectic_base(const FieldPtr& F) {
    return {{{F->zero(), F->one()}, {-F->one(), F->zero()}}};
}

} // namespace tripp
