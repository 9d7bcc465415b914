#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "tripp/padic.hpp"

namespace tripp {

/// Dirichlet character with values in a LocalField: the full value table on
/// residues mod the modulus, 0 exactly on non-coprime residues.
struct DirichletCharacter {
    FieldPtr field;
    long modulus = 1;
    std::vector<LocalFieldElement> values; // index n mod modulus

    DirichletCharacter() = default;

    DirichletCharacter(FieldPtr F, long mod, std::vector<LocalFieldElement> vals)
        : field(std::move(F)), modulus(mod), values(std::move(vals)) {
        validate();
    }

    static DirichletCharacter trivial(const FieldPtr& F, long mod = 1) {
        std::vector<LocalFieldElement> vals;
        vals.reserve(static_cast<std::size_t>(mod));
        for (long n = 0; n < mod; ++n)
            vals.push_back(std::gcd(n, mod) == 1 ? F->one() : F->zero());
        return {F, mod, std::move(vals)};
    }

    /// The Teichmueller character mod p: n -> the (p-1)-th root of unity
    /// congruent to n.
    static DirichletCharacter teichmuller(const FieldPtr& F) {
        long p = F->p;
        std::vector<LocalFieldElement> vals;
        vals.push_back(F->zero());
        for (long n = 1; n < p; ++n) vals.push_back(teichmuller_lift(F->from_int(n)));
        return {F, p, std::move(vals)};
    }

    void validate() const {
        if (modulus < 1 || static_cast<long>(values.size()) != modulus)
            throw std::invalid_argument("DirichletCharacter: value table size mismatch");
        for (long a = 0; a < modulus; ++a) {
            bool coprime = std::gcd(a, modulus) == 1 || modulus == 1;
            if (coprime == values[static_cast<std::size_t>(a)].is_zero_at_precision())
                throw std::invalid_argument("DirichletCharacter: support must be the coprime residues");
        }
        for (long a = 0; a < modulus; ++a) {
            if (std::gcd(a, modulus) != 1 && modulus != 1) continue;
            for (long b = a; b < modulus; ++b) {
                if (std::gcd(b, modulus) != 1 && modulus != 1) continue;
                if (!eq_at_precision(values[static_cast<std::size_t>((a * b) % modulus)],
                                     values[static_cast<std::size_t>(a)] * values[static_cast<std::size_t>(b)]))
                    throw std::invalid_argument("DirichletCharacter: value table not multiplicative");
            }
        }
    }

    LocalFieldElement value(long n) const {
        long r = n % modulus;
        if (r < 0) r += modulus;
        return values[static_cast<std::size_t>(r)];
    }

    bool is_trivial() const {
        for (long a = 0; a < modulus; ++a) {
            if (std::gcd(a, modulus) != 1 && modulus != 1) continue;
            if (!eq_at_precision(values[static_cast<std::size_t>(a)], field->one())) return false;
        }
        return true;
    }

    DirichletCharacter inverse() const {
        std::vector<LocalFieldElement> vals;
        vals.reserve(values.size());
        for (const auto& v : values)
            vals.push_back(v.is_zero_at_precision() ? field->zero() : v.inverse());
        return {field, modulus, std::move(vals)};
    }

    friend DirichletCharacter operator*(const DirichletCharacter& a, const DirichletCharacter& b) {
        long mod = std::lcm(a.modulus, b.modulus);
        std::vector<LocalFieldElement> vals;
        vals.reserve(static_cast<std::size_t>(mod));
        for (long n = 0; n < mod; ++n) vals.push_back(a.value(n) * b.value(n));
        return {a.field, mod, std::move(vals)};
    }

    friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
        long mod = std::lcm(a.modulus, b.modulus);
        for (long n = 0; n < mod; ++n) {
            bool za = a.value(n).is_zero_at_precision(), zb = b.value(n).is_zero_at_precision();
            if (za != zb) return false;
            if (!za && !eq_at_precision(a.value(n), b.value(n))) return false;
        }
        return true;
    }
};

} // namespace tripp
