#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double sup_norm() const { return std::max(std::abs(x), std::abs(y)); }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Exact dyadic rational num / 2^exp, normalized so that num is odd or zero.
/// All lattice corners, stage endpoints, and grid spacings in the exact
/// pipeline are values of this type.
struct Dyadic {
    std::int64_t num = 0;
    int exp = 0;  // denominator 2^exp, exp >= 0

    Dyadic() = default;
    Dyadic(std::int64_t n, int e) : num(n), exp(e) { normalize(); }
    static Dyadic from_int(std::int64_t n) { return Dyadic(n, 0); }
    /// 2^-k for k >= 0, or 2^|k| for k < 0.
    static Dyadic pow2(int k) {
        return k >= 0 ? Dyadic(1, k) : Dyadic(std::int64_t(1) << (-k), 0);
    }

    void normalize() {
        if (num == 0) { exp = 0; return; }
        while (exp > 0 && (num & 1) == 0) { num >>= 1; --exp; }
    }

    double to_double() const { return std::ldexp(double(num), -exp); }

    Dyadic operator+(Dyadic o) const {
        int e = std::max(exp, o.exp);
        return Dyadic((num << (e - exp)) + (o.num << (e - o.exp)), e);
    }
    Dyadic operator-(Dyadic o) const {
        int e = std::max(exp, o.exp);
        return Dyadic((num << (e - exp)) - (o.num << (e - o.exp)), e);
    }
    Dyadic operator*(Dyadic o) const { return Dyadic(num * o.num, exp + o.exp); }
    Dyadic operator-() const { return Dyadic(-num, exp); }

    bool operator==(const Dyadic& o) const { return num == o.num && exp == o.exp; }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }
    bool operator<(const Dyadic& o) const {
        int e = std::max(exp, o.exp);
        return (num << (e - exp)) < (o.num << (e - o.exp));
    }
    bool operator<=(const Dyadic& o) const { return *this < o || *this == o; }
    bool operator>(const Dyadic& o) const { return o < *this; }
    bool operator>=(const Dyadic& o) const { return o <= *this; }

    bool is_integer() const { return exp == 0; }

    std::string to_string() const;       // "p/2^q" form, or plain integer
    std::string to_decimal() const;      // exact finite decimal expansion
};

/// Parses "p/2^q", "2^-q", plain integers, and exact decimals like "0.25".
/// Throws std::invalid_argument for values that are not dyadic rationals.
Dyadic parse_dyadic(const std::string& text);

/// Exact conversion: every finite double is a dyadic rational. Throws when
/// the significand/exponent exceed the Dyadic range.
Dyadic dyadic_from_double(double v);

/// Deterministic pairwise summation; the reduction order depends only on the
/// array contents, never on thread count.
double pairwise_sum(std::span<const double> values);

/// Counter-based RNG: every draw is a pure function of (seed, counter), so
/// parallel shards can generate disjoint counter ranges deterministically.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(mix(seed) ^ counter);
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const {
        return double(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }
};

}  // namespace tnl
