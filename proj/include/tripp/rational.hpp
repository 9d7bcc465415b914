#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tripp {

/// Exact rational with small components. Used for valuations, precisions and
/// Newton-polygon slopes; never for field arithmetic.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        normalize();
    }

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) throw std::domain_error("Rational: division by zero");
        return {a.num * b.den, a.den * b.num};
    }
    Rational operator-() const { return {-num, den}; }

    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rational a, Rational b) { return !(a == b); }
    friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(Rational a, Rational b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(Rational a, Rational b) { return b < a; }
    friend bool operator>=(Rational a, Rational b) { return b <= a; }

    bool is_integer() const { return den == 1; }
    /// Largest integer <= value.
    std::int64_t floor() const { return num >= 0 ? num / den : -((-num + den - 1) / den); }
    std::int64_t ceil() const { return -(-*this).floor(); }

    friend std::ostream& operator<<(std::ostream& os, Rational r) {
        os << r.num;
        if (r.den != 1) os << '/' << r.den;
        return os;
    }
};

inline Rational rmin(Rational a, Rational b) { return a < b ? a : b; }
inline Rational rmax(Rational a, Rational b) { return a < b ? b : a; }

} // namespace tripp
