#pragma once

#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tripp/dirichlet.hpp"

namespace tripp {

/// Truncated q-expansion a_0 + a_1 q + ... + a_N q^N with p-adic coefficients
/// and weight/level/character metadata. a_0 defaults to 0 (cusp forms).
struct QExpansion {
    FieldPtr field;
    LocalFieldElement a0;
    std::vector<LocalFieldElement> an; // a_1..a_N at index n-1
    int weight = 0;
    long level = 1;
    DirichletCharacter character;
    long q_precision = 0; // N

    QExpansion() = default;
    QExpansion(FieldPtr F, long N, int w = 0, long lvl = 1)
        : field(F), a0(F->zero()), an(static_cast<std::size_t>(N), F->zero()),
          weight(w), level(lvl), character(DirichletCharacter::trivial(F)), q_precision(N) {}

    LocalFieldElement coeff(long n) const {
        if (n == 0) return a0;
        if (n < 0 || n > q_precision) throw std::out_of_range("QExpansion: coefficient beyond q-precision");
        return an[static_cast<std::size_t>(n - 1)];
    }

    void set_coeff(long n, const LocalFieldElement& v) {
        if (n == 0) { a0 = v; return; }
        if (n < 1 || n > q_precision) throw std::out_of_range("QExpansion: coefficient beyond q-precision");
        an[static_cast<std::size_t>(n - 1)] = v;
    }

    bool is_depleted() const {
        if (!a0.is_zero_at_precision()) return false;
        for (long n = field->p; n <= q_precision; n += field->p)
            if (!coeff(n).is_zero_at_precision()) return false;
        return true;
    }

    bool is_zero_at_precision() const {
        if (!a0.is_zero_at_precision()) return false;
        for (const auto& c : an)
            if (!c.is_zero_at_precision()) return false;
        return true;
    }

    friend QExpansion operator+(const QExpansion& x, const QExpansion& y) {
        QExpansion r(x.field, std::min(x.q_precision, y.q_precision), x.weight,
                     std::lcm(x.level, y.level));
        r.character = x.character;
        r.a0 = x.a0 + y.a0;
        for (long n = 1; n <= r.q_precision; ++n) r.set_coeff(n, x.coeff(n) + y.coeff(n));
        return r;
    }

    friend QExpansion operator-(const QExpansion& x, const QExpansion& y) {
        QExpansion r(x.field, std::min(x.q_precision, y.q_precision), x.weight,
                     std::lcm(x.level, y.level));
        r.character = x.character;
        r.a0 = x.a0 - y.a0;
        for (long n = 1; n <= r.q_precision; ++n) r.set_coeff(n, x.coeff(n) - y.coeff(n));
        return r;
    }

    friend QExpansion operator*(const LocalFieldElement& s, const QExpansion& x) {
        QExpansion r = x;
        r.a0 = s * r.a0;
        for (auto& c : r.an) c = s * c;
        return r;
    }
};

/// True when the two series agree coefficientwise mod p^digits on the common
/// q-range (metadata ignored).
inline bool qexp_eq_mod(const QExpansion& x, const QExpansion& y, Rational digits) {
    if (!eq_mod(x.a0, y.a0, digits)) return false;
    long N = std::min(x.q_precision, y.q_precision);
    for (long n = 1; n <= N; ++n)
        if (!eq_mod(x.coeff(n), y.coeff(n), digits)) return false;
    return true;
}

inline bool qexp_eq_at_precision(const QExpansion& x, const QExpansion& y) {
    if (!(x.a0 - y.a0).is_zero_at_precision()) return false;
    long N = std::min(x.q_precision, y.q_precision);
    for (long n = 1; n <= N; ++n)
        if (!(x.coeff(n) - y.coeff(n)).is_zero_at_precision()) return false;
    return true;
}

/// U_p: a_n -> a_{np}; q-precision divides by p.
inline QExpansion u_p(const QExpansion& xi) {
    long p = xi.field->p;
    if (xi.q_precision < p) throw std::domain_error("u_p: q-precision below p");
    QExpansion r(xi.field, xi.q_precision / p, xi.weight, xi.level);
    r.character = xi.character;
    r.a0 = xi.a0;
    for (long n = 1; n <= r.q_precision; ++n) r.set_coeff(n, xi.coeff(n * p));
    return r;
}

/// V_p: q -> q^p; q-precision multiplies by p.
inline QExpansion v_p(const QExpansion& xi) {
    long p = xi.field->p;
    QExpansion r(xi.field, xi.q_precision * p, xi.weight, xi.level);
    r.character = xi.character;
    r.a0 = xi.a0;
    for (long n = 1; n <= xi.q_precision; ++n) r.set_coeff(n * p, xi.coeff(n));
    return r;
}

/// p-depletion (1 - V_p U_p): zero out a_n for p | n. Keeps the q-precision
/// (the erased coefficients are exactly known: zero).
inline QExpansion deplete(const QExpansion& xi) {
    long p = xi.field->p;
    if (xi.q_precision < p) throw std::domain_error("deplete: q-precision below p");
    QExpansion r = xi;
    for (long n = p; n <= r.q_precision; n += p) r.set_coeff(n, xi.field->zero());
    return r;
}

/// Serre derivative power d^t: a_n -> n^t a_n, weight += 2t. Negative t
/// requires a p-depleted input, where n^t is the honest unit power (equal to
/// the p-adic limit of d^{t+(p-1)p^m}).
inline QExpansion serre_d(const QExpansion& xi, long t) {
    if (t == 0) return xi;
    if (t < 0) {
        if (!xi.is_depleted())
            throw std::domain_error("serre_d: negative power requires a p-depleted input");
    }
    QExpansion r = xi;
    r.weight = xi.weight + static_cast<int>(2 * t);
    if (t > 0) r.a0 = xi.field->zero();
    for (long n = 1; n <= r.q_precision; ++n) {
        if (t < 0 && n % xi.field->p == 0) { r.set_coeff(n, xi.field->zero()); continue; }
        r.set_coeff(n, xi.field->from_int(n).pow(t) * xi.coeff(n));
    }
    return r;
}

/// Character twist: a_n -> chi(n) a_n; nebentypus multiplies by chi^2.
inline QExpansion twist(const QExpansion& xi, const DirichletCharacter& chi) {
    QExpansion r = xi;
    r.a0 = chi.modulus > 1 ? xi.field->zero() : xi.a0;
    for (long n = 1; n <= r.q_precision; ++n) r.set_coeff(n, chi.value(n) * xi.coeff(n));
    r.character = xi.character * chi * chi;
    r.level = std::lcm(xi.level, chi.modulus * chi.modulus);
    return r;
}

/// Cauchy product; weight adds, character multiplies, q-precision is the min.
inline QExpansion multiply(const QExpansion& x, const QExpansion& y) {
    if (x.field.get() != y.field.get()) throw std::invalid_argument("multiply: mixed coefficient fields");
    long N = std::min(x.q_precision, y.q_precision);
    QExpansion r(x.field, N, x.weight + y.weight, std::lcm(x.level, y.level));
    r.character = x.character * y.character;
    r.a0 = x.a0 * y.a0;
    for (long n = 1; n <= N; ++n) {
        LocalFieldElement c = x.a0 * y.coeff(n) + x.coeff(n) * y.a0;
        for (long i = 1; i < n; ++i) c = c + x.coeff(i) * y.coeff(n - i);
        r.set_coeff(n, c);
    }
    return r;
}

/// Hecke operator T_ell for ell not dividing the level:
/// a_n -> a_{n ell} + chi(ell) ell^{w-1} a_{n/ell}.
inline QExpansion hecke_t_ell(const QExpansion& xi, long ell) {
    if (xi.level % ell == 0)
        throw std::invalid_argument("hecke_t_ell: ell divides the level (use U_p analogue)");
    long N = xi.q_precision / ell;
    if (N < 1) throw std::domain_error("hecke_t_ell: q-precision below ell");
    QExpansion r(xi.field, N, xi.weight, xi.level);
    r.character = xi.character;
    LocalFieldElement scale =
        xi.character.value(ell) * xi.field->from_int(ell).pow(xi.weight - 1);
    r.a0 = (xi.field->one() + scale) * xi.a0;
    for (long n = 1; n <= N; ++n) {
        LocalFieldElement c = xi.coeff(n * ell);
        if (n % ell == 0) c = c + scale * xi.coeff(n / ell);
        r.set_coeff(n, c);
    }
    return r;
}

/// phi_infty = p^{nu-1} <p;1> V_p with nu the weight; satisfies
/// U_p phi_infty = <p;1> p^{nu-1}.
inline QExpansion phi_infty(const QExpansion& xi, const LocalFieldElement& diamond_p) {
    if (diamond_p.is_zero_at_precision())
        throw std::invalid_argument("phi_infty: missing diamond value");
    long nu = xi.weight;
    QExpansion r = v_p(xi);
    LocalFieldElement scale = diamond_p * xi.field->from_int(xi.field->p).pow(nu - 1);
    return scale * r;
}

/// Synthetic normalized eigenform to q-precision N from Hecke eigenvalues:
/// multiplicative coefficients via a_{l^{j+1}} = a_l a_{l^j} - chi(l) l^{w-1}
/// a_{l^{j-1}}; primes missing from the map get a_l = 0. When `ap_eigen` is
/// supplied the p-th coefficients instead follow the U_p-eigenform recursion
/// a_{pn} = a_p a_n.
inline QExpansion synthetic_eigenform(const FieldPtr& F, long N, int weight, long level,
                                      const DirichletCharacter& chi,
                                      const std::map<long, LocalFieldElement>& a_ell,
                                      const LocalFieldElement* ap_eigen = nullptr) {
    QExpansion f(F, N, weight, level);
    f.character = chi;
    f.set_coeff(1, F->one());
    // prime powers
    std::vector<LocalFieldElement> a(static_cast<std::size_t>(N) + 1, F->zero());
    a[1] = F->one();
    for (long ell = 2; ell <= N; ++ell) {
        bool prime = true;
        for (long d = 2; d * d <= ell; ++d) if (ell % d == 0) { prime = false; break; }
        if (!prime) continue;
        LocalFieldElement al = F->zero();
        auto it = a_ell.find(ell);
        if (it != a_ell.end()) al = it->second;
        if (ap_eigen && ell == F->p) al = *ap_eigen;
        bool up_mode = (ap_eigen && ell == F->p) || level % ell == 0;
        LocalFieldElement scale = chi.value(ell) * F->from_int(ell).pow(weight - 1);
        LocalFieldElement prev = F->one(), cur = al;
        for (long q = ell; q <= N; q *= ell) {
            a[static_cast<std::size_t>(q)] = cur;
            LocalFieldElement next = up_mode ? al * cur : al * cur - scale * prev;
            prev = cur;
            cur = next;
            if (q > N / ell) break;
        }
    }
    // multiplicativity across coprime parts
    for (long n = 2; n <= N; ++n) {
        long m = n;
        LocalFieldElement v = F->one();
        for (long ell = 2; ell * ell <= m || m > 1; ++ell) {
            if (ell * ell > m && m > 1) { // m itself is prime
                long q = m;
                v = v * a[static_cast<std::size_t>(q)];
                m = 1;
                break;
            }
            if (m % ell) continue;
            long q = 1;
            while (m % ell == 0) { m /= ell; q *= ell; }
            v = v * a[static_cast<std::size_t>(q)];
        }
        f.set_coeff(n, v);
    }
    return f;
}

} // namespace tripp
