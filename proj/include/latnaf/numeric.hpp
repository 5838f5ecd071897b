#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace latnaf {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline BigInt pow_bigint(const BigInt& base, unsigned exp) {
    BigInt r = 1, b = base;
    while (exp) {
        if (exp & 1u) r *= b;
        b *= b;
        exp >>= 1u;
    }
    return r;
}

inline Rational rational_pow(const Rational& base, int exp) {
    if (exp < 0) return Rational(1) / rational_pow(base, -exp);
    Rational r(1);
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

inline double to_double(const Rational& r) {
    return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

inline std::string to_string(const Rational& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) s += "/" + r.denominator().str();
    return s;
}

/// Fixed-format double for reproducible text output.
inline std::string fmt_double(double x, int sig = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig, x);
    return buf;
}

/// FNV-1a, used for digit-set fingerprints in output headers.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace latnaf
