#ifndef TILER_RATIONAL_HPP
#define TILER_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace tiler {

// Exact rational over int64. Denominators in the matching pipeline stay tiny
// (the half-integral route keeps them <= 2d), so overflow is not a concern,
// but normalize on every op and assert den > 0.
struct Rat {
    int64_t num = 0;
    int64_t den = 1;

    Rat() = default;
    Rat(int64_t n) : num(n), den(1) {}
    Rat(int64_t n, int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw InvariantError("Rat: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Rat operator+(const Rat& o) const { return Rat(num * o.den + o.num * den, den * o.den); }
    Rat operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
    Rat operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }
    Rat operator/(const Rat& o) const {
        if (o.num == 0) throw InvariantError("Rat: division by zero");
        return Rat(num * o.den, den * o.num);
    }
    Rat operator-() const { return Rat(-num, den); }

    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const { return num * o.den < o.num * den; }
    bool operator<=(const Rat& o) const { return num * o.den <= o.num * den; }
    bool operator>(const Rat& o) const { return o < *this; }
    bool operator>=(const Rat& o) const { return o <= *this; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }

} // namespace tiler

#endif
