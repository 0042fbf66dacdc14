#include "tnl/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace tnl {

std::string Dyadic::to_string() const {
    if (exp == 0) return std::to_string(num);
    return std::to_string(num) + "/2^" + std::to_string(exp);
}

std::string Dyadic::to_decimal() const {
    if (exp == 0) return std::to_string(num);
    // num / 2^exp = num * 5^exp / 10^exp; exp <= 27 keeps num*5^exp in range
    // for the magnitudes used here (coordinates and spacings).
    if (exp > 27) throw std::invalid_argument("dyadic too fine for decimal printing");
    bool neg = num < 0;
    unsigned long long mag = neg ? -(unsigned long long)num : (unsigned long long)num;
    for (int i = 0; i < exp; ++i) mag *= 5ULL;
    std::string digits = std::to_string(mag);
    if ((int)digits.size() <= exp) digits.insert(0, exp + 1 - digits.size(), '0');
    digits.insert(digits.size() - exp, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return (neg ? "-" : "") + digits;
}

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad integer literal: " + std::string(s));
    return v;
}

}  // namespace

Dyadic parse_dyadic(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw std::invalid_argument("empty dyadic literal");

    if (auto pos = s.find("/2^"); pos != std::string::npos) {
        std::int64_t p = parse_int(std::string_view(s).substr(0, pos));
        std::int64_t q = parse_int(std::string_view(s).substr(pos + 3));
        if (q < 0 || q > 62) throw std::invalid_argument("dyadic exponent out of range: " + text);
        return Dyadic(p, int(q));
    }
    if (s.rfind("2^", 0) == 0) {
        std::int64_t e = parse_int(std::string_view(s).substr(2));
        if (e < -62 || e > 62) throw std::invalid_argument("dyadic exponent out of range: " + text);
        return Dyadic::pow2(int(-e));
    }
    if (auto pos = s.find('/'); pos != std::string::npos) {
        std::int64_t p = parse_int(std::string_view(s).substr(0, pos));
        std::int64_t q = parse_int(std::string_view(s).substr(pos + 1));
        if (q <= 0 || (q & (q - 1)) != 0)
            throw std::invalid_argument("denominator is not a power of two: " + text);
        int e = 0;
        while ((std::int64_t(1) << e) != q) ++e;
        return Dyadic(p, e);
    }
    if (auto pos = s.find('.'); pos != std::string::npos) {
        std::string frac = s.substr(pos + 1);
        if (frac.empty() || frac.size() > 18)
            throw std::invalid_argument("bad decimal literal: " + text);
        bool neg = s[0] == '-';
        std::string ip = s.substr(neg ? 1 : 0, pos - (neg ? 1 : 0));
        std::int64_t whole = ip.empty() ? 0 : parse_int(ip);
        std::int64_t digits = parse_int(frac);
        // value = whole + digits / 10^k must reduce to p / 2^q exactly:
        // digits / 10^k is dyadic iff digits divisible by 5^k.
        std::int64_t p5 = 1;
        for (size_t i = 0; i < frac.size(); ++i) p5 *= 5;
        if (digits % p5 != 0)
            throw std::invalid_argument("not a dyadic rational: " + text);
        std::int64_t p2 = digits / p5;  // value = p2 / 2^k
        Dyadic f(p2, int(frac.size()));
        Dyadic w = Dyadic::from_int(whole);
        return neg ? -(w + f) : (w + f);
    }
    return Dyadic::from_int(parse_int(s));
}

Dyadic dyadic_from_double(double v) {
    if (v == 0.0) return Dyadic();
    if (!std::isfinite(v)) throw std::invalid_argument("not a finite value");
    int e = 0;
    double m = std::frexp(v, &e);  // v = m * 2^e, |m| in [0.5, 1)
    std::int64_t num = 0;
    int shift = 0;
    while (m != std::floor(m)) {
        m *= 2.0;
        ++shift;
        if (shift > 62) throw std::invalid_argument("value too fine for dyadic range");
    }
    num = std::int64_t(m);
    int exp = shift - e;
    if (exp < 0) {
        if (e - shift > 62) throw std::invalid_argument("value too large for dyadic range");
        return Dyadic(num << (e - shift), 0);
    }
    if (exp > 62) throw std::invalid_argument("value too fine for dyadic range");
    return Dyadic(num, exp);
}

double pairwise_sum(std::span<const double> values) {
    const size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace tnl
