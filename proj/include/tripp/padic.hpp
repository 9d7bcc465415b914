#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tripp/rational.hpp"

namespace tripp {

class LocalField;
using FieldPtr = std::shared_ptr<const LocalField>;

namespace detail {

// ---- polynomial helpers over Z/p (coefficients as longs) -------------------

using FpPoly = std::vector<long>; // coeff of x^i at index i, reduced mod p

inline void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, long p) {
    if (a.empty() || b.empty()) return {};
    FpPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    fp_trim(c);
    return c;
}

inline long fp_inv_scalar(long a, long p) {
    long t = 0, newt = 1, r = p, newr = ((a % p) + p) % p;
    while (newr != 0) {
        long q = r / newr;
        long tmp = t - q * newt; t = newt; newt = tmp;
        tmp = r - q * newr; r = newr; newr = tmp;
    }
    if (r != 1) throw std::domain_error("fp_inv_scalar: not invertible");
    return ((t % p) + p) % p;
}

inline FpPoly fp_mod(FpPoly a, const FpPoly& m, long p) {
    fp_trim(a);
    long lead_inv = fp_inv_scalar(m.back(), p);
    while (a.size() >= m.size() && !a.empty()) {
        long c = (a.back() * lead_inv) % p;
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i)
            a[shift + i] = ((a[shift + i] - c * m[i]) % p + p) % p;
        fp_trim(a);
    }
    return a;
}

inline FpPoly fp_powmod_x(mpz_class exp, const FpPoly& m, long p) {
    FpPoly result{1};
    FpPoly base = fp_mod(FpPoly{0, 1}, m, p);
    while (exp > 0) {
        if (mpz_odd_p(exp.get_mpz_t())) result = fp_mod(fp_mul(result, base, p), m, p);
        base = fp_mod(fp_mul(base, base, p), m, p);
        exp >>= 1;
    }
    return result;
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, long p) {
    fp_trim(a); fp_trim(b);
    while (!b.empty()) {
        a = fp_mod(a, b, p);
        std::swap(a, b);
    }
    if (!a.empty()) {
        long inv = fp_inv_scalar(a.back(), p);
        for (auto& c : a) c = (c * inv) % p;
    }
    return a;
}

inline bool fp_irreducible(const FpPoly& m, long p) {
    // m monic of degree f: irreducible iff x^{p^f} = x mod m and for every
    // prime divisor l of f, gcd(x^{p^{f/l}} - x, m) = 1.
    long f = static_cast<long>(m.size()) - 1;
    mpz_class pf;
    mpz_ui_pow_ui(pf.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(f));
    FpPoly xq = fp_powmod_x(pf, m, p);
    FpPoly x = fp_mod(FpPoly{0, 1}, m, p);
    if (xq != x) return false;
    for (long l = 2; l <= f; ++l) {
        if (f % l != 0) continue;
        bool prime = true;
        for (long d = 2; d * d <= l; ++d) if (l % d == 0) prime = false;
        if (!prime) continue;
        mpz_class pe;
        mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(f / l));
        FpPoly diff = fp_powmod_x(pe, m, p);
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        fp_trim(diff);
        FpPoly g = fp_gcd(diff, m, p);
        if (g.size() != 1) return false;
    }
    return true;
}

inline std::vector<mpz_class> factor_trial(mpz_class n) {
    std::vector<mpz_class> primes;
    for (mpz_class d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            primes.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) primes.push_back(n);
    return primes;
}

/// Monic degree-f polynomial over F_p whose root generates F_{p^f}^*, so the
/// root is a primitive (p^f - 1)-th root of unity.
inline FpPoly find_primitive_poly(long p, long f) {
    if (f == 1) throw std::logic_error("find_primitive_poly: f must be > 1");
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(f));
    mpz_class order = q - 1;
    std::vector<mpz_class> order_primes = factor_trial(order);
    std::vector<long> coeffs(static_cast<std::size_t>(f), 0);
    for (long trial = 0;; ++trial) {
        long t = trial;
        for (long i = 0; i < f; ++i) { coeffs[static_cast<std::size_t>(i)] = t % p; t /= p; }
        if (t > 0) throw std::runtime_error("find_primitive_poly: search exhausted");
        FpPoly m(coeffs.begin(), coeffs.end());
        m.push_back(1); // monic
        if (m[0] == 0) continue;
        if (!fp_irreducible(m, p)) continue;
        bool primitive = true;
        for (const auto& l : order_primes) {
            FpPoly pw = fp_powmod_x(order / l, m, p);
            if (pw.size() == 1 && pw[0] == 1) { primitive = false; break; }
        }
        if (primitive) return m;
    }
}

/// Extended gcd over F_p[x]: returns (s, t) with s a + t b = 1 for coprime a, b.
inline std::pair<FpPoly, FpPoly> fp_ext_gcd(const FpPoly& a, const FpPoly& b, long p) {
    FpPoly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
    fp_trim(r0); fp_trim(r1);
    while (!r1.empty()) {
        FpPoly rem = r0;
        FpPoly q(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 1, 0);
        long lead_inv = fp_inv_scalar(r1.back(), p);
        while (rem.size() >= r1.size() && !rem.empty()) {
            long c = (rem.back() * lead_inv) % p;
            std::size_t shift = rem.size() - r1.size();
            q[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i)
                rem[shift + i] = ((rem[shift + i] - c * r1[i]) % p + p) % p;
            fp_trim(rem);
        }
        fp_trim(q);
        auto step = [&](FpPoly& u0, FpPoly& u1) {
            FpPoly qu = fp_mul(q, u1, p);
            FpPoly u2 = u0;
            if (u2.size() < qu.size()) u2.resize(qu.size(), 0);
            for (std::size_t i = 0; i < qu.size(); ++i) u2[i] = ((u2[i] - qu[i]) % p + p) % p;
            fp_trim(u2);
            u0 = u1; u1 = u2;
        };
        step(s0, s1);
        step(t0, t1);
        r0 = r1; r1 = rem;
    }
    if (r0.size() != 1) throw std::domain_error("fp_ext_gcd: inputs not coprime");
    long inv = fp_inv_scalar(r0[0], p);
    for (auto& c : s0) c = (c * inv) % p;
    for (auto& c : t0) c = (c * inv) % p;
    return {s0, t0};
}

// ---- polynomial helpers over Z/p^K (mpz coefficients) ----------------------

using ZPoly = std::vector<mpz_class>;

inline void zp_trim(ZPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline ZPoly zp_mul(const ZPoly& a, const ZPoly& b, const mpz_class& mod) {
    if (a.empty() || b.empty()) return {};
    ZPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % mod;
    zp_trim(c);
    return c;
}

inline ZPoly zp_add(ZPoly a, const ZPoly& b, const mpz_class& mod) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + b[i]) % mod;
    zp_trim(a);
    return a;
}

inline ZPoly zp_sub(ZPoly a, const ZPoly& b, const mpz_class& mod) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % mod + mod) % mod;
    zp_trim(a);
    return a;
}

/// Division with remainder by a monic polynomial, mod `mod`.
inline std::pair<ZPoly, ZPoly> zp_divmod_monic(ZPoly a, const ZPoly& m, const mpz_class& mod) {
    zp_trim(a);
    if (m.empty() || m.back() != 1) throw std::logic_error("zp_divmod_monic: divisor not monic");
    if (a.size() < m.size()) return {{}, a};
    ZPoly q(a.size() - m.size() + 1, 0);
    while (a.size() >= m.size()) {
        mpz_class c = a.back();
        std::size_t shift = a.size() - m.size();
        q[shift] = c;
        for (std::size_t i = 0; i < m.size(); ++i)
            a[shift + i] = ((a[shift + i] - c * m[i]) % mod + mod) % mod;
        zp_trim(a);
    }
    zp_trim(q);
    return {q, a};
}

struct HenselPair {
    ZPoly g, h, s, t; // f = g h, s g + t h = 1, both factors monic
};

/// Quadratic Hensel lifting of a monic coprime factorization from mod p to mod p^cap.
inline HenselPair hensel_lift(const ZPoly& f, HenselPair cur, long p, int cap) {
    int known = 1;
    while (known < cap) {
        known = std::min(2 * known, cap);
        mpz_class mod2;
        mpz_ui_pow_ui(mod2.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(known));
        ZPoly e = zp_sub(f, zp_mul(cur.g, cur.h, mod2), mod2);
        auto [q, r] = zp_divmod_monic(zp_mul(cur.s, e, mod2), cur.h, mod2);
        ZPoly g2 = zp_add(zp_add(cur.g, zp_mul(cur.t, e, mod2), mod2), zp_mul(q, cur.g, mod2), mod2);
        ZPoly h2 = zp_add(cur.h, r, mod2);
        ZPoly b = zp_sub(zp_add(zp_mul(cur.s, g2, mod2), zp_mul(cur.t, h2, mod2), mod2), ZPoly{1}, mod2);
        auto [c, d] = zp_divmod_monic(zp_mul(cur.s, b, mod2), h2, mod2);
        ZPoly s2 = zp_sub(cur.s, d, mod2);
        ZPoly t2 = zp_sub(zp_sub(cur.t, zp_mul(cur.t, b, mod2), mod2), zp_mul(c, g2, mod2), mod2);
        cur = {g2, h2, s2, t2};
    }
    return cur;
}

} // namespace detail

class LocalFieldElement;

/// A finite extension of Q_p presented as one unramified step (Teichmueller
/// basis: alpha is a primitive (p^f - 1)-th root of unity, so the arithmetic
/// Frobenius acts by alpha -> alpha^p) followed by at most one Eisenstein step.
/// All digit arithmetic is capped at absolute precision `precision_cap`.
class LocalField : public std::enable_shared_from_this<LocalField> {
public:
    long p = 0;
    int unram_degree = 1;        // f
    int ram_degree = 1;          // e, degree of the Eisenstein step
    int precision_cap = 0;       // absolute p-adic precision of stored digits
    mpz_class pcap;              // p^precision_cap

    detail::ZPoly min_poly_alpha;                      // monic, degree f (empty iff f = 1)
    std::vector<std::vector<mpz_class>> eis_lower;     // Eisenstein coeffs of pi^0..pi^{e-1}
                                                       // as unramified coordinate vectors
    std::vector<std::vector<mpz_class>> frob_images;   // sigma(alpha^i) coordinates, i = 0..f-1

    int total_degree() const { return unram_degree * ram_degree; }
    mpz_class residue_size() const {
        mpz_class q;
        mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(unram_degree));
        return q;
    }

    mpz_class p_pow(long k) const {
        if (k < 0) throw std::logic_error("p_pow: negative exponent");
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
        return r;
    }

    // multiplication in the unramified part (coordinate vectors of length f)
    std::vector<mpz_class> unram_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) const {
        int f = unram_degree;
        if (f == 1) return {a[0] * b[0] % pcap};
        detail::ZPoly prod = detail::zp_mul(detail::ZPoly(a.begin(), a.end()),
                                            detail::ZPoly(b.begin(), b.end()), pcap);
        detail::ZPoly rem = detail::zp_divmod_monic(prod, min_poly_alpha, pcap).second;
        rem.resize(static_cast<std::size_t>(f), 0);
        return {rem.begin(), rem.end()};
    }

    std::vector<mpz_class> unram_frob(const std::vector<mpz_class>& a) const {
        int f = unram_degree;
        if (f == 1) return a;
        std::vector<mpz_class> out(static_cast<std::size_t>(f), 0);
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j)
                out[static_cast<std::size_t>(j)] =
                    (out[static_cast<std::size_t>(j)] +
                     a[static_cast<std::size_t>(i)] * frob_images[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) % pcap;
        return out;
    }

    LocalFieldElement zero() const;
    LocalFieldElement one() const;
    LocalFieldElement from_mpz(const mpz_class& n) const;
    LocalFieldElement from_int(long n) const;
    LocalFieldElement from_ratio(long num, long den) const;
    LocalFieldElement alpha_gen() const;       // generator of the unramified step
    LocalFieldElement uniformizer() const;     // pi (or p when e = 1)
};

FieldPtr make_field(long p, int unram_degree,
                    const std::vector<std::vector<mpz_class>>& eisenstein,
                    int precision_cap);

/// Element of a LocalField. The represented value is
///   (sum_i,j coords[j*f+i] alpha^i pi^j) / p^pshift
/// with each coordinate reduced into [0, p^cap). `known_precision` is the
/// absolute precision of the value: digits of valuation < known_precision are
/// trustworthy, everything above is junk.
class LocalFieldElement {
public:
    FieldPtr field;
    std::vector<mpz_class> coords;
    long pshift = 0;
    Rational known_precision{0};

    LocalFieldElement() = default;
    LocalFieldElement(FieldPtr F, std::vector<mpz_class> c, Rational prec, long shift = 0)
        : field(std::move(F)), coords(std::move(c)), pshift(shift), known_precision(prec) {
        clamp_precision();
    }

    long p() const { return field->p; }
    int dim() const { return field->total_degree(); }

    /// Stored digits only determine the value modulo p^{cap - pshift}.
    void clamp_precision() {
        if (field) known_precision = rmin(known_precision, Rational(field->precision_cap - pshift));
    }

    /// Number of trustworthy digits of the *stored* residues.
    long stored_digits() const {
        long d = known_precision.ceil() + pshift;
        return std::max(d, 0L);
    }

    static std::optional<long> residue_val(const mpz_class& c, long p, long known_digits) {
        if (known_digits <= 0) return std::nullopt;
        mpz_class pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(known_digits));
        mpz_class r = ((c % pk) + pk) % pk;
        if (r == 0) return std::nullopt;
        long v = 0;
        while (r % p == 0) { r /= p; ++v; }
        return v;
    }

    /// p-adic valuation normalized with val(p) = 1; nullopt when the value is
    /// indistinguishable from 0 at the known precision.
    std::optional<Rational> valuation() const {
        const int f = field->unram_degree, e = field->ram_degree;
        std::optional<Rational> best;
        long kd = stored_digits();
        for (int j = 0; j < e; ++j) {
            for (int i = 0; i < f; ++i) {
                auto v = residue_val(coords[static_cast<std::size_t>(j * f + i)], field->p, kd);
                if (!v) continue;
                Rational cand = Rational(*v - pshift) + Rational(j, e);
                if (cand >= known_precision) continue; // below the noise floor
                if (!best || cand < *best) best = cand;
            }
        }
        return best;
    }

    Rational val_or_throw() const {
        auto v = valuation();
        if (!v) throw std::domain_error("indeterminate valuation: value is 0 at working precision");
        return *v;
    }

    bool is_zero_at_precision() const { return !valuation().has_value(); }

    Rational effective_val() const {
        auto v = valuation();
        return v ? *v : known_precision;
    }

    /// Rewrite with the given (not smaller) denominator exponent.
    LocalFieldElement with_shift(long s) const {
        if (s < pshift) throw std::logic_error("with_shift: cannot lower the shift directly");
        if (s == pshift) return *this;
        LocalFieldElement out = *this;
        mpz_class scale = field->p_pow(s - pshift);
        for (auto& c : out.coords) c = (c * scale) % field->pcap;
        out.pshift = s;
        out.clamp_precision();
        return out;
    }

    /// Divide out the common p-power in the stored digits, lowering pshift as
    /// far as the known digits allow (junk digits are masked off first).
    LocalFieldElement reduced_shift() const {
        LocalFieldElement out = *this;
        if (out.pshift <= 0) return out;
        long kd = out.stored_digits();
        mpz_class mask = field->p_pow(std::max(kd, 0L));
        for (auto& c : out.coords) c = (kd > 0) ? mpz_class(((c % mask) + mask) % mask) : mpz_class(0);
        long p = field->p;
        while (out.pshift > 0) {
            bool all = true;
            for (const auto& c : out.coords) if (c % p != 0) { all = false; break; }
            if (!all) break;
            for (auto& c : out.coords) c /= p;
            --out.pshift;
        }
        out.clamp_precision();
        return out;
    }

    friend LocalFieldElement operator+(const LocalFieldElement& a, const LocalFieldElement& b) {
        check_fields(a, b);
        long s = std::max(a.pshift, b.pshift);
        LocalFieldElement x = a.with_shift(s), y = b.with_shift(s);
        std::vector<mpz_class> c(x.coords.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = (x.coords[i] + y.coords[i]) % x.field->pcap;
        return LocalFieldElement(a.field, std::move(c),
                                 rmin(x.known_precision, y.known_precision), s).reduced_shift();
    }

    friend LocalFieldElement operator-(const LocalFieldElement& a, const LocalFieldElement& b) {
        return a + (-b);
    }

    LocalFieldElement operator-() const {
        std::vector<mpz_class> c(coords.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = (field->pcap - coords[i]) % field->pcap;
        return {field, std::move(c), known_precision, pshift};
    }

    friend LocalFieldElement operator*(const LocalFieldElement& a, const LocalFieldElement& b) {
        check_fields(a, b);
        const auto& F = *a.field;
        const int f = F.unram_degree, e = F.ram_degree;
        // multiply as polynomials in pi with unramified coefficients
        std::vector<std::vector<mpz_class>> acc(static_cast<std::size_t>(2 * e - 1),
                                                std::vector<mpz_class>(static_cast<std::size_t>(f), 0));
        for (int j1 = 0; j1 < e; ++j1)
            for (int j2 = 0; j2 < e; ++j2) {
                auto prod = F.unram_mul(a.pi_coeff(j1), b.pi_coeff(j2));
                auto& slot = acc[static_cast<std::size_t>(j1 + j2)];
                for (int i = 0; i < f; ++i)
                    slot[static_cast<std::size_t>(i)] =
                        (slot[static_cast<std::size_t>(i)] + prod[static_cast<std::size_t>(i)]) % F.pcap;
            }
        // fold pi^j for j >= e using pi^e = -sum_i eis_lower[i] pi^i
        for (int j = 2 * e - 2; j >= e; --j) {
            auto lead = acc[static_cast<std::size_t>(j)];
            bool nonzero = false;
            for (const auto& x : lead) if (x != 0) { nonzero = true; break; }
            if (!nonzero) continue;
            for (int i = 0; i < e; ++i) {
                auto prod = F.unram_mul(lead, F.eis_lower[static_cast<std::size_t>(i)]);
                auto& slot = acc[static_cast<std::size_t>(j - e + i)];
                for (int t = 0; t < f; ++t)
                    slot[static_cast<std::size_t>(t)] =
                        ((slot[static_cast<std::size_t>(t)] - prod[static_cast<std::size_t>(t)]) % F.pcap + F.pcap) % F.pcap;
            }
            for (auto& x : acc[static_cast<std::size_t>(j)]) x = 0;
        }
        std::vector<mpz_class> c(static_cast<std::size_t>(f * e));
        for (int j = 0; j < e; ++j)
            for (int i = 0; i < f; ++i)
                c[static_cast<std::size_t>(j * f + i)] = acc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        Rational prec = rmin(a.known_precision + b.effective_val(),
                             b.known_precision + a.effective_val());
        return LocalFieldElement(a.field, std::move(c), prec, a.pshift + b.pshift).reduced_shift();
    }

    /// Multiply by p^k for a (possibly negative) integer k. Exact: negative
    /// powers only adjust the denominator exponent.
    LocalFieldElement scale_p_power(long k) const {
        LocalFieldElement out = *this;
        if (k == 0) return out;
        if (k > 0) {
            mpz_class pk = field->p_pow(k);
            for (auto& c : out.coords) c = (c * pk) % field->pcap;
        } else {
            out.pshift += -k;
        }
        out.known_precision = out.known_precision + Rational(k);
        out.clamp_precision();
        return out.reduced_shift();
    }

    /// Multiplicative inverse; needs a determinate valuation and consumes
    /// 2*val(x) digits of absolute precision.
    LocalFieldElement inverse() const {
        const auto& F = *field;
        Rational v = val_or_throw();
        const int e = F.ram_degree;
        // clear the fractional valuation with pi-powers: t with v + t/e integral
        long frac = ((v * Rational(e)).num % e + e) % e;
        long t = (e - frac) % e;
        LocalFieldElement y1 = *this;
        if (t != 0) {
            LocalFieldElement pi = F.uniformizer();
            for (long i = 0; i < t; ++i) y1 = y1 * pi;
        }
        Rational vy = v + Rational(t, e);
        if (!vy.is_integer()) throw std::logic_error("inverse: valuation not integral after pi-clearing");
        long w = vy.num;
        LocalFieldElement u = y1.scale_p_power(-w).reduced_shift();
        if (u.pshift != 0) throw std::logic_error("inverse: unit normalization failed");
        // Newton iteration z <- z(2 - uz), seeded by the residue-field inverse
        LocalFieldElement z = u.unit_inverse_seed();
        LocalFieldElement two = F.from_int(2);
        long need = static_cast<long>(F.precision_cap) * e + 2;
        int steps = 1;
        while ((1L << steps) < need) ++steps;
        for (int i = 0; i <= steps; ++i) z = z * (two - u * z);
        z.known_precision = Rational(F.precision_cap);
        z.clamp_precision();
        // this = p^w u pi^{-t}  =>  this^{-1} = p^{-w} u^{-1} pi^{t}
        LocalFieldElement result = z;
        if (t != 0) {
            LocalFieldElement pi = F.uniformizer();
            for (long i = 0; i < t; ++i) result = result * pi;
        }
        result = result.scale_p_power(-w);
        result.known_precision = known_precision - v - v;
        result.clamp_precision();
        return result;
    }

    friend LocalFieldElement operator/(const LocalFieldElement& a, const LocalFieldElement& b) {
        return a * b.inverse();
    }

    LocalFieldElement pow(long n) const {
        const auto& F = *field;
        if (n == 0) return F.one();
        if (n < 0) return inverse().pow(-n);
        LocalFieldElement base = *this, acc = F.one();
        while (n > 0) {
            if (n & 1) acc = acc * base;
            base = base * base;
            n >>= 1;
        }
        return acc;
    }

    /// Arithmetic Frobenius of the unramified part (alpha -> alpha^p), fixing
    /// pi and p.
    LocalFieldElement frobenius() const {
        const auto& F = *field;
        const int f = F.unram_degree, e = F.ram_degree;
        std::vector<mpz_class> c(coords.size());
        for (int j = 0; j < e; ++j) {
            auto img = F.unram_frob(pi_coeff(j));
            for (int i = 0; i < f; ++i) c[static_cast<std::size_t>(j * f + i)] = img[static_cast<std::size_t>(i)];
        }
        return {field, std::move(c), known_precision, pshift};
    }

    friend bool eq_at_precision(const LocalFieldElement& a, const LocalFieldElement& b) {
        return (a - b).is_zero_at_precision();
    }

    /// True when a = b mod p^k can be certified from the known digits.
    friend bool eq_mod(const LocalFieldElement& a, const LocalFieldElement& b, Rational k) {
        LocalFieldElement d = a - b;
        auto v = d.valuation();
        if (!v) return d.known_precision >= k;
        return *v >= k;
    }

    std::vector<mpz_class> pi_coeff(int j) const {
        const int f = field->unram_degree;
        return {coords.begin() + j * f, coords.begin() + (j + 1) * f};
    }

private:
    static void check_fields(const LocalFieldElement& a, const LocalFieldElement& b) {
        if (a.field.get() != b.field.get())
            throw std::invalid_argument("LocalFieldElement: mixed parent fields");
    }

    /// Inverse of a valuation-0 element modulo p, seeding Newton iteration.
    LocalFieldElement unit_inverse_seed() const {
        const auto& F = *field;
        const int f = F.unram_degree, e = F.ram_degree;
        long p = F.p;
        if (pshift != 0) throw std::logic_error("unit_inverse_seed: shift must be 0");
        // residue field is F_q; a unit has invertible pi^0-part
        auto c0 = pi_coeff(0);
        detail::FpPoly a0;
        for (const auto& c : c0) a0.push_back(static_cast<long>(mpz_class(c % p).get_si()));
        detail::fp_trim(a0);
        detail::FpPoly inv0;
        if (f == 1) {
            if (a0.empty()) throw std::domain_error("unit_inverse_seed: not a unit");
            inv0 = {detail::fp_inv_scalar(a0[0], p)};
        } else {
            detail::FpPoly mbar;
            for (const auto& c : F.min_poly_alpha) mbar.push_back(static_cast<long>(mpz_class(c % p).get_si()));
            detail::fp_trim(mbar);
            auto [s, t] = detail::fp_ext_gcd(a0, mbar, p);
            (void)t;
            inv0 = detail::fp_mod(s, mbar, p);
        }
        std::vector<mpz_class> c(static_cast<std::size_t>(f * e), 0);
        for (std::size_t i = 0; i < inv0.size(); ++i) c[i] = inv0[i];
        return {field, std::move(c), Rational(F.precision_cap), 0};
    }
};

inline LocalFieldElement LocalField::zero() const {
    return {shared_from_this(), std::vector<mpz_class>(static_cast<std::size_t>(total_degree()), 0),
            Rational(precision_cap), 0};
}

inline LocalFieldElement LocalField::one() const {
    std::vector<mpz_class> c(static_cast<std::size_t>(total_degree()), 0);
    c[0] = 1;
    return {shared_from_this(), std::move(c), Rational(precision_cap), 0};
}

inline LocalFieldElement LocalField::from_mpz(const mpz_class& n) const {
    std::vector<mpz_class> c(static_cast<std::size_t>(total_degree()), 0);
    c[0] = ((n % pcap) + pcap) % pcap;
    return {shared_from_this(), std::move(c), Rational(precision_cap), 0};
}

inline LocalFieldElement LocalField::from_int(long n) const { return from_mpz(mpz_class(n)); }

inline LocalFieldElement LocalField::from_ratio(long num, long den) const {
    return from_int(num) / from_int(den);
}

inline LocalFieldElement LocalField::alpha_gen() const {
    std::vector<mpz_class> c(static_cast<std::size_t>(total_degree()), 0);
    if (unram_degree == 1) c[0] = 1;
    else c[1] = 1;
    return {shared_from_this(), std::move(c), Rational(precision_cap), 0};
}

inline LocalFieldElement LocalField::uniformizer() const {
    std::vector<mpz_class> c(static_cast<std::size_t>(total_degree()), 0);
    if (ram_degree == 1) c[0] = p;
    else c[static_cast<std::size_t>(unram_degree)] = 1;
    return {shared_from_this(), std::move(c), Rational(precision_cap), 0};
}

/// Construct Q_p(alpha)(pi). `eisenstein` gives the coefficients of
/// pi^0 .. pi^{e-1} of a monic degree-e Eisenstein polynomial, each as a
/// coordinate vector over the unramified subfield (empty = no ramified step).
inline FieldPtr make_field(long p, int unram_degree,
                           const std::vector<std::vector<mpz_class>>& eisenstein = {},
                           int precision_cap = 30) {
    if (p < 3 || p % 2 == 0) throw std::invalid_argument("make_field: p must be an odd prime");
    for (long d = 3; d * d <= p; d += 2)
        if (p % d == 0) throw std::invalid_argument("make_field: p must be an odd prime");
    if (unram_degree < 1 || precision_cap < 1) throw std::invalid_argument("make_field: bad degree/precision");

    auto F = std::make_shared<LocalField>();
    F->p = p;
    F->unram_degree = unram_degree;
    F->precision_cap = precision_cap;
    mpz_ui_pow_ui(F->pcap.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(precision_cap));

    if (unram_degree > 1) {
        detail::FpPoly mbar = detail::find_primitive_poly(p, unram_degree);
        mpz_class order = F->residue_size() - 1;
        if (order > 20000)
            throw std::invalid_argument("make_field: unramified degree too large for this build");
        unsigned long on = order.get_ui();
        // Hensel-lift mbar to the factor of x^{q-1} - 1 over Z/p^cap whose
        // roots are the Teichmueller lifts of the roots of mbar.
        detail::ZPoly bigfull(on + 1, 0);
        bigfull[0] = F->pcap - 1;
        bigfull[on] = 1;
        detail::FpPoly bigp(on + 1, 0);
        bigp[0] = p - 1;
        bigp[on] = 1;
        detail::FpPoly rem = bigp, quot(on + 1, 0);
        long lead_inv = detail::fp_inv_scalar(mbar.back(), p);
        while (rem.size() >= mbar.size() && !rem.empty()) {
            long c = (rem.back() * lead_inv) % p;
            std::size_t shift = rem.size() - mbar.size();
            quot[shift] = c;
            for (std::size_t i = 0; i < mbar.size(); ++i)
                rem[shift + i] = ((rem[shift + i] - c * mbar[i]) % p + p) % p;
            detail::fp_trim(rem);
        }
        if (!rem.empty()) throw std::logic_error("make_field: primitive poly does not divide x^{q-1}-1");
        detail::fp_trim(quot);
        auto [s, t] = detail::fp_ext_gcd(quot, mbar, p);
        detail::HenselPair hp;
        hp.g.assign(quot.begin(), quot.end());
        hp.h.assign(mbar.begin(), mbar.end());
        hp.s.assign(s.begin(), s.end());
        hp.t.assign(t.begin(), t.end());
        hp = detail::hensel_lift(bigfull, hp, p, precision_cap);
        F->min_poly_alpha = hp.h;
        if (F->min_poly_alpha.size() != static_cast<std::size_t>(unram_degree) + 1 ||
            F->min_poly_alpha.back() != 1)
            throw std::logic_error("make_field: lifted minimal polynomial has wrong shape");

        // sigma(alpha^i) = (x^p mod m)^i
        detail::ZPoly alpha_p{1};
        {
            detail::ZPoly base{0, 1};
            long exp = p;
            while (exp > 0) {
                if (exp & 1)
                    alpha_p = detail::zp_divmod_monic(detail::zp_mul(alpha_p, base, F->pcap),
                                                      F->min_poly_alpha, F->pcap).second;
                base = detail::zp_divmod_monic(detail::zp_mul(base, base, F->pcap),
                                               F->min_poly_alpha, F->pcap).second;
                exp >>= 1;
            }
        }
        F->frob_images.resize(static_cast<std::size_t>(unram_degree));
        detail::ZPoly cur{1};
        for (int i = 0; i < unram_degree; ++i) {
            detail::ZPoly padded = cur;
            padded.resize(static_cast<std::size_t>(unram_degree), 0);
            F->frob_images[static_cast<std::size_t>(i)].assign(padded.begin(), padded.end());
            cur = detail::zp_divmod_monic(detail::zp_mul(cur, alpha_p, F->pcap),
                                          F->min_poly_alpha, F->pcap).second;
        }
    }

    if (!eisenstein.empty()) {
        int e = static_cast<int>(eisenstein.size());
        F->ram_degree = e;
        F->eis_lower.resize(static_cast<std::size_t>(e));
        for (int i = 0; i < e; ++i) {
            auto v = eisenstein[static_cast<std::size_t>(i)];
            v.resize(static_cast<std::size_t>(unram_degree), 0);
            for (auto& c : v) c = ((c % F->pcap) + F->pcap) % F->pcap;
            F->eis_lower[static_cast<std::size_t>(i)] = v;
        }
        for (int i = 0; i < e; ++i)
            for (const auto& c : F->eis_lower[static_cast<std::size_t>(i)])
                if (c % p != 0) throw std::invalid_argument("make_field: polynomial is not Eisenstein");
        bool const_ok = false;
        for (const auto& c : F->eis_lower[0])
            if (c != 0 && (c / p) % p != 0) const_ok = true;
        if (!const_ok) throw std::invalid_argument("make_field: constant term not of valuation exactly 1");
    }

    return F;
}

/// The unique root of unity of order dividing q - 1 congruent to `a` mod pi.
inline LocalFieldElement teichmuller_lift(const LocalFieldElement& a) {
    const auto& F = *a.field;
    long p = F.p;
    if (a.pshift != 0) throw std::domain_error("teichmuller_lift: input must be integral");
    bool nonzero = false;
    for (const auto& c : a.coords) if (c % p != 0) { nonzero = true; break; }
    if (!nonzero) throw std::domain_error("teichmuller_lift: zero residue");
    mpz_class q = F.residue_size();
    LocalFieldElement x = a;
    x.known_precision = Rational(F.precision_cap);
    for (int iter = 0; iter < F.precision_cap + 3; ++iter) {
        LocalFieldElement acc = F.one();
        LocalFieldElement base = x;
        mpz_class exp = q;
        while (exp > 0) {
            if (mpz_odd_p(exp.get_mpz_t())) acc = acc * base;
            base = base * base;
            exp >>= 1;
        }
        acc.known_precision = Rational(F.precision_cap);
        bool stable = (acc - x).is_zero_at_precision();
        x = acc;
        if (stable) break;
    }
    return x;
}

// ---- bit-exact p-adic literal text format ----------------------------------
// scalar:    "u * p^v + O(p^k)" with u a unit written in decimal, v = val,
//            k = absolute precision  (zero prints as "0 * p^0 + O(p^k)")
// extension: "[lit0, lit1, ...]" in the power basis alpha^i pi^j, index j*f+i

inline std::string scalar_literal(const mpz_class& c, Rational prec, long p, long pshift = 0) {
    std::ostringstream os;
    long kd = prec.floor() + pshift; // trustworthy digits of the stored residue
    if (kd <= 0) {
        os << "0 * p^0 + O(p^" << prec.floor() << ")";
        return os.str();
    }
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(kd));
    mpz_class r = ((c % pk) + pk) % pk;
    if (r == 0) {
        os << "0 * p^0 + O(p^" << prec.floor() << ")";
        return os.str();
    }
    long v = 0;
    while (r % p == 0) { r /= p; ++v; }
    os << r.get_str() << " * p^" << (v - pshift) << " + O(p^" << prec.floor() << ")";
    return os.str();
}

inline std::string to_literal(const LocalFieldElement& x) {
    const auto& F = *x.field;
    if (F.total_degree() == 1) return scalar_literal(x.coords[0], x.known_precision, F.p, x.pshift);
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < F.total_degree(); ++i) {
        if (i) os << ", ";
        os << scalar_literal(x.coords[static_cast<std::size_t>(i)], x.known_precision, F.p, x.pshift);
    }
    os << "]";
    return os.str();
}

/// Parse "u * p^v + O(p^k)" into (unit, v, k).
inline std::tuple<mpz_class, long, long> parse_scalar_literal(const std::string& s) {
    auto star = s.find('*');
    auto caret1 = s.find('^');
    auto plus = s.find('+', caret1);
    auto caret2 = s.find('^', plus);
    auto close = s.find(')', caret2);
    if (star == std::string::npos || caret1 == std::string::npos || plus == std::string::npos ||
        caret2 == std::string::npos || close == std::string::npos)
        throw std::invalid_argument("parse_scalar_literal: malformed literal '" + s + "'");
    auto strip = [](std::string t) {
        while (!t.empty() && t.front() == ' ') t.erase(t.begin());
        while (!t.empty() && t.back() == ' ') t.pop_back();
        return t;
    };
    mpz_class u(strip(s.substr(0, star)));
    long v = std::stol(strip(s.substr(caret1 + 1, plus - caret1 - 1)));
    long k = std::stol(strip(s.substr(caret2 + 1, close - caret2 - 1)));
    return {u, v, k};
}

inline LocalFieldElement parse_literal(const FieldPtr& F, const std::string& s) {
    std::string str = s;
    auto trim = [](std::string& t) {
        while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
        while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
    };
    trim(str);
    std::vector<std::string> parts;
    if (!str.empty() && str.front() == '[') {
        if (str.back() != ']') throw std::invalid_argument("parse_literal: unbalanced brackets");
        std::string body = str.substr(1, str.size() - 2);
        std::size_t start = 0;
        while (start <= body.size()) {
            auto pos = body.find(',', start);
            // the scalar literal contains no commas, so every comma separates
            if (pos == std::string::npos) { parts.push_back(body.substr(start)); break; }
            parts.push_back(body.substr(start, pos - start));
            start = pos + 1;
        }
    } else {
        parts.push_back(str);
    }
    if (static_cast<int>(parts.size()) != F->total_degree())
        throw std::invalid_argument("parse_literal: coordinate count does not match the field degree");
    // first pass: the most negative exponent fixes a common denominator shift
    long shift = 0;
    std::vector<std::tuple<mpz_class, long, long>> scalars;
    for (auto& part : parts) {
        trim(part);
        scalars.push_back(parse_scalar_literal(part));
        if (std::get<0>(scalars.back()) != 0 && std::get<1>(scalars.back()) < 0)
            shift = std::max(shift, -std::get<1>(scalars.back()));
    }
    std::vector<mpz_class> coords;
    Rational prec(F->precision_cap);
    for (const auto& [u, v, k] : scalars) {
        prec = rmin(prec, Rational(k));
        mpz_class val = 0;
        if (u != 0) val = u * F->p_pow(v + shift);
        coords.push_back(((val % F->pcap) + F->pcap) % F->pcap);
    }
    return LocalFieldElement(F, std::move(coords), prec, shift).reduced_shift();
}

} // namespace tripp
