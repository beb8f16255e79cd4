#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ldpcsec {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.convert_to<double>(); }

/// Exact binomial coefficient.
inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

/// Parse "3/4", "2" or a plain decimal like "0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] {
        throw std::invalid_argument("invalid rational: '" + std::string(text) + "'");
    };
    if (text.empty()) bad();
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        if (num.empty() || den.empty()) bad();
        try {
            BigInt n(num), d(den);
            if (d == 0) bad();
            return Rational(n, d);
        } catch (const std::runtime_error&) {
            bad();
        }
    }
    const auto dot = text.find('.');
    if (dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        const std::string frac(text.substr(dot + 1));
        for (char c : frac)
            if (c < '0' || c > '9') bad();
        bool neg = !digits.empty() && digits[0] == '-';
        if (neg) digits.erase(digits.begin());
        if (digits.empty() && frac.empty()) bad();
        try {
            BigInt whole = digits.empty() ? BigInt(0) : BigInt(digits);
            BigInt den = 1;
            BigInt num = whole;
            for (char c : frac) {
                num = num * 10 + (c - '0');
                den *= 10;
            }
            if (neg) num = -num;
            return Rational(num, den);
        } catch (const std::runtime_error&) {
            bad();
        }
    }
    try {
        return Rational(BigInt(std::string(text)), 1);
    } catch (const std::runtime_error&) {
        bad();
    }
    return 0;  // unreachable
}

inline std::string format_rational(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace ldpcsec
